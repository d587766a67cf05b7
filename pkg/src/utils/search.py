"""
Meet-in-the-middle search for minimum-weight logical elements.

The search space is a list of sites; each site offers one or more elements,
and each element carries a syndrome and a logical signature packed into Python
ints. A set of elements (at most one per site) is a logical element when the
XOR of its syndromes is zero and the XOR of its signatures is not. Weights are
tried in increasing order, so the first hit is a minimum.
"""
import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

# (site index, element index within the site)
Choice = Tuple[int, int]


@dataclass(frozen=True)
class Element:
    syndrome: int
    signature: int


@dataclass
class SearchOutcome:
    """Result of a bounded search."""
    weight: Optional[int]
    witness: Optional[List[Choice]]
    cap: int
    exhausted: bool

    @property
    def found(self) -> bool:
        return self.weight is not None


class TableTooLarge(RuntimeError):
    """Half-table size exceeds the configured budget."""


def _half_combinations(sites: Sequence[Sequence[Element]], size: int) -> Iterator[Tuple[int, int, Tuple[Choice, ...]]]:
    if size == 0:
        yield 0, 0, ()
        return
    for chosen in combinations(range(len(sites)), size):
        options = [range(len(sites[s])) for s in chosen]
        for picks in product(*options):
            syndrome = 0
            signature = 0
            for s, e in zip(chosen, picks):
                element = sites[s][e]
                syndrome ^= element.syndrome
                signature ^= element.signature
            yield syndrome, signature, tuple(zip(chosen, picks))


def _merge(sites: Sequence[Sequence[Element]], left: Tuple[Choice, ...], right: Tuple[Choice, ...]) -> List[Choice]:
    by_site: Dict[int, int] = {}
    for s, e in left + right:
        if s in by_site:
            # same element twice cancels; anything else would have been found at a lower weight
            if by_site[s] == e:
                del by_site[s]
                continue
        by_site[s] = e
    return sorted(by_site.items())


def min_weight_logical(
    sites: Sequence[Sequence[Element]],
    cap: int,
    max_table: int = 5_000_000,
) -> SearchOutcome:
    """
    Smallest set of elements with zero syndrome and nonzero signature.

    Args:
        sites: Per-site element options
        cap: Largest weight to try
        max_table: Upper bound on entries of one half-table

    Returns:
        SearchOutcome with the weight and witness, or weight None when nothing
        of weight <= cap exists (``exhausted`` is then True)
    """
    tables: Dict[int, Dict[int, Dict[int, Tuple[Choice, ...]]]] = {}

    def table_for(size: int) -> Dict[int, Dict[int, Tuple[Choice, ...]]]:
        if size not in tables:
            table: Dict[int, Dict[int, Tuple[Choice, ...]]] = {}
            entries = 0
            for syndrome, signature, choice in _half_combinations(sites, size):
                bucket = table.setdefault(syndrome, {})
                # two distinct signatures per syndrome are enough to answer any query
                if signature not in bucket and len(bucket) < 2:
                    bucket[signature] = choice
                    entries += 1
                    if entries > max_table:
                        raise TableTooLarge(f"half table for size {size} exceeds {max_table} entries")
            tables[size] = table
            logger.debug(f"Built half table of size {size}: {len(table)} syndromes")
        return tables[size]

    for weight in range(1, cap + 1):
        big = (weight + 1) // 2
        small = weight // 2
        table = table_for(big)
        for syndrome, signature, choice in _half_combinations(sites, small):
            bucket = table.get(syndrome)
            if not bucket:
                continue
            for other_signature, other_choice in bucket.items():
                if other_signature != signature:
                    witness = _merge(sites, other_choice, choice)
                    logger.debug(f"Found logical element of weight {weight}")
                    return SearchOutcome(weight=len(witness), witness=witness, cap=cap, exhausted=False)
    return SearchOutcome(weight=None, witness=None, cap=cap, exhausted=True)
