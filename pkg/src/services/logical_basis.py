"""
Representative selection: cleaning, the row-echelon Z-logical basis and Y-compatible X representatives.
"""
import logging
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import UncleanableError
from ..models.codes import CssCode
from ..models.pauli import PauliOperator
from ..models.plan import Certification, LogicalBasis
from ..utils import gf2
from ..utils.gf2 import GF2Matrix, GF2Vector
from .css_codes import dual_x_basis

logger = logging.getLogger(__name__)


def echelon_basis(code: CssCode) -> LogicalBasis:
    """
    Z-logical representatives from the stacked echelon form of ``[S; L]``.

    ``S`` is the reduced row echelon form of ``hz`` and stays frozen. Logical
    rows first absorb stabilizer rows to clear the stabilizer pivot columns and
    are then reduced among themselves only. The resulting rows are unique for a
    given code.

    Args:
        code: Valid CSS code

    Returns:
        LogicalBasis with ``z_reps`` set and ``x_reps`` empty
    """
    reduced, s_pivots, m = gf2.rref(code.hz)
    stabilizers = reduced.submatrix(rows=range(m))
    kernel = gf2.kernel(code.hx)
    chosen = gf2.complement_basis(stabilizers, kernel)
    logical = kernel.array[chosen].copy() if chosen else np.zeros((0, code.n), dtype=np.uint8)

    for row, pivot in enumerate(s_pivots):
        hits = logical[:, pivot].astype(bool)
        logical[hits] ^= stabilizers.array[row]

    if logical.shape[0]:
        logical_reduced, l_pivots, k = gf2.rref(GF2Matrix(logical))
    else:
        logical_reduced, l_pivots, k = GF2Matrix.zeros(0, code.n), [], 0
    if k != code.k:
        raise RuntimeError(f"echelon basis found {k} logical rows for k={code.k}")

    z_reps = [logical_reduced.row(i) for i in range(k)]
    bound = code.n - m - k + 1
    for i, v in enumerate(z_reps):
        if v.weight > bound:
            raise RuntimeError(f"representative {i} has weight {v.weight} above {bound}")
    logger.info(f"Echelon basis for {code.name}: k={k}, weights {[v.weight for v in z_reps]}")
    return LogicalBasis(n=code.n, z_reps=z_reps, m=m, certificate=list(s_pivots) + list(l_pivots))


def contained_logical_witness(
    region: Sequence[int],
    code: CssCode,
    x_ops: Dict[int, GF2Vector],
) -> Optional[Tuple[GF2Vector, int]]:
    """
    Look for a Z operator inside ``region`` that commutes with the X checks and
    anticommutes with one of ``x_ops``.

    Returns:
        (Z support over all qubits, index of the anticommuting X operator) or None
    """
    region = sorted(set(region))
    if not region or not x_ops:
        return None
    basis = gf2.kernel(code.hx.submatrix(cols=region))
    for i in range(basis.rows):
        local = basis.array[i]
        for j, x_op in x_ops.items():
            if int(np.dot(local.astype(np.int64), x_op.array[region].astype(np.int64)) % 2):
                full = np.zeros(code.n, dtype=np.uint8)
                full[region] = local
                return GF2Vector(full), j
    return None


def verify_echelon_property(basis: LogicalBasis, code: CssCode, limit: int = 12) -> Certification:
    """
    Check every subset I of logical indices: the union of ``v_i`` over I holds no
    Z-logical anticommuting with an X logical outside I.
    """
    k = basis.k
    if k > limit:
        logger.warning(f"Echelon property not checked: k={k} exceeds {limit}")
        return Certification("inconclusive", f"k={k} above subset limit {limit}")
    x_logicals = dual_x_basis(code, basis.z_reps)
    checked = 0
    for size in range(1, k):
        for subset in combinations(range(k), size):
            region = sorted({q for i in subset for q in basis.z_reps[i].support})
            outside = {j: x_logicals[j] for j in range(k) if j not in subset}
            witness = contained_logical_witness(region, code, outside)
            checked += 1
            if witness is not None:
                support, j = witness
                logger.error(f"Subset {subset} contains a logical anticommuting with X{j}")
                return Certification("fail", f"subset {list(subset)} contains a logical anticommuting with X{j}",
                                     {"subset": list(subset), "witness": list(support.support)})
    return Certification("pass", f"{checked} subsets checked", {"subsets": checked})


def clean(op: PauliOperator, region: Sequence[int], code: CssCode) -> PauliOperator:
    """
    Multiply ``op`` by same-type stabilizers until it avoids ``region``.

    X-type operators are cleaned with rows of ``hx``, Z-type ones with rows of
    ``hz``. Lower-weight rows are preferred.

    Raises:
        UncleanableError: When ``region`` contains an opposite-type logical
            anticommuting with ``op``; the witness is that logical's support
    """
    if op.is_x_type():
        checks, vector, make = code.hx, op.x, PauliOperator.x_type
    elif op.is_z_type():
        checks, vector, make = code.hz, op.z, PauliOperator.z_type
    else:
        raise ValueError("clean expects an X-type or Z-type operator")
    region = sorted(set(region))
    if not any(vector[q] for q in region):
        return op

    weights = checks.row_weights()
    order = sorted(range(checks.rows), key=lambda r: (weights[r], r))
    ordered = checks.submatrix(rows=order)
    local = ordered.submatrix(cols=region)
    combination = gf2.solve(local.T, vector.restrict(region)) if order else None
    if combination is None:
        kernel = gf2.kernel(checks.submatrix(cols=region))
        for i in range(kernel.rows):
            if int(np.dot(kernel.array[i].astype(np.int64), vector.array[region].astype(np.int64)) % 2):
                full = np.zeros(code.n, dtype=np.uint8)
                full[region] = kernel.array[i]
                witness = GF2Vector(full)
                logger.error(f"Cannot clean {op} off {region}: contained logical {list(witness.support)}")
                raise UncleanableError("anticommuting contained logical", witness=witness)
        raise RuntimeError("cleaning system unsolvable without a witness")

    difference = ordered.T @ combination
    cleaned = vector + difference
    member, _ = gf2.row_space_member(checks, difference)
    if not member or any(cleaned[q] for q in region):
        raise RuntimeError("cleaning certificate failed")
    logger.debug(f"Cleaned operator off {len(region)} qubits using {combination.weight} stabilizers")
    return make(code.n, cleaned.support).with_exponent(op.exponent)


def y_compatible_x_reps(basis: LogicalBasis, code: CssCode) -> LogicalBasis:
    """
    Fill ``x_reps`` so that each ``w_j`` meets the union of Z representatives only inside ``v_j``.
    """
    x_logicals = dual_x_basis(code, basis.z_reps)
    x_reps: List[GF2Vector] = []
    for j, x_logical in enumerate(x_logicals):
        region = sorted({q for i, v in enumerate(basis.z_reps) if i != j for q in v.support})
        try:
            cleaned = clean(PauliOperator.x_type(code.n, x_logical.support), region, code)
        except UncleanableError as e:
            logger.error(f"X representative {j} could not be cleaned: {e}")
            raise RuntimeError(f"echelon basis violated while cleaning X{j}") from e
        x_reps.append(cleaned.x)
    for i, v in enumerate(basis.z_reps):
        for j, w in enumerate(x_reps):
            if v.dot(w) != int(i == j):
                raise RuntimeError(f"pairing broken between v{i} and w{j}")
    return LogicalBasis(n=basis.n, z_reps=list(basis.z_reps), x_reps=x_reps, m=basis.m,
                        certificate=list(basis.certificate))


def logical_basis(code: CssCode) -> LogicalBasis:
    """Echelon Z representatives plus Y-compatible X representatives."""
    return y_compatible_x_reps(echelon_basis(code), code)


def representative_for(basis: LogicalBasis, index: int, letter: str) -> PauliOperator:
    """
    Physical representative of a single logical Pauli.

    Z gives ``Z(v_i)``, X gives ``X(w_i)`` and Y gives ``i X(w_i) Z(v_i)``.
    """
    if not 0 <= index < basis.k:
        raise IndexError(f"logical index {index} out of range for k={basis.k}")
    v = basis.z_reps[index]
    if letter == "Z":
        return PauliOperator(GF2Vector.zeros(basis.n), v)
    if not basis.has_x_reps:
        raise ValueError("basis has no X representatives; run y_compatible_x_reps first")
    w = basis.x_reps[index]
    if letter == "X":
        return PauliOperator(w, GF2Vector.zeros(basis.n))
    if letter == "Y":
        return PauliOperator(w, v, exponent=1)
    raise ValueError(f"Invalid logical letter '{letter}'")


def basis_to_json(basis: LogicalBasis) -> Dict[str, Any]:
    return {
        "n": basis.n,
        "k": basis.k,
        "m": basis.m,
        "certificate": basis.certificate,
        "logicals": [
            {
                "index": i,
                "v": list(basis.z_reps[i].support),
                "w": list(basis.x_reps[i].support) if basis.has_x_reps else None,
            }
            for i in range(basis.k)
        ],
    }


def basis_from_json(data: Dict[str, Any], code: CssCode) -> LogicalBasis:
    """
    Rebuild a basis written by ``basis_to_json`` and check it against ``code``.

    Raises:
        ValueError: If the sizes disagree, a representative fails a check, or the pairs are not dual
    """
    n = int(data["n"])
    if n != code.n:
        raise ValueError(f"basis is for n={n}, code has n={code.n}")
    entries = sorted(data["logicals"], key=lambda e: e["index"])
    z_reps = [GF2Vector.from_support(n, e["v"]) for e in entries]
    x_reps = [GF2Vector.from_support(n, e["w"]) for e in entries if e.get("w") is not None]
    if len(z_reps) != code.k:
        raise ValueError(f"basis has {len(z_reps)} logicals, code has k={code.k}")
    for v in z_reps:
        if not (code.hx @ v).is_zero():
            raise ValueError(f"Z representative {list(v.support)} anticommutes with an X check")
    for w in x_reps:
        if not (code.hz @ w).is_zero():
            raise ValueError(f"X representative {list(w.support)} anticommutes with a Z check")
    if x_reps:
        if len(x_reps) != len(z_reps):
            raise ValueError("basis lists X representatives for only some logicals")
        pairing = np.array([[w.dot(v) for v in z_reps] for w in x_reps], dtype=np.uint8)
        if not np.array_equal(pairing, np.eye(len(z_reps), dtype=np.uint8)):
            raise ValueError("X and Z representatives are not dual pairs")
    basis = LogicalBasis(n=n, z_reps=z_reps, x_reps=x_reps, m=int(data.get("m", 0)),
                         certificate=list(data.get("certificate", [])))
    logger.info(f"Loaded basis with k={basis.k} for {code.name}")
    return basis
