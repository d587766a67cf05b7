"""
Sample codes and requests for testing.
"""
from pathlib import Path
from typing import Dict, List

import numpy as np

from src.models.codes import CssCode
from src.models.deformation import DeformationBuilder, DeformedCode
from src.services import css_codes
from src.utils import gf2
from src.utils.gf2 import GF2Matrix

DATA_DIR = Path(__file__).resolve().parents[2] / "data"


class CodeFixtures:
    """Builders for the small codes used across the test suite."""

    @staticmethod
    def shor() -> CssCode:
        """[[9,1,3]] Shor code."""
        return css_codes.shor_code()

    @staticmethod
    def hgp_cycle3() -> CssCode:
        """[[18,2,3]] hypergraph product of two length-3 cycle codes."""
        return css_codes.cycle_hgp_code(3)

    @staticmethod
    def shor_pair() -> CssCode:
        """Two Shor blocks side by side, k=2."""
        return css_codes.direct_sum(css_codes.shor_code(), css_codes.shor_code(), name="shor2")

    @staticmethod
    def shor_blocks(count: int) -> CssCode:
        """``count`` Shor blocks side by side, k=count."""
        code = css_codes.shor_code()
        for i in range(2, count + 1):
            code = css_codes.direct_sum(code, css_codes.shor_code(), name=f"shor{i}")
        return code

    @staticmethod
    def broken_shor_hz() -> GF2Matrix:
        """Shor Z checks with one check moved so it overlaps X check 0 on one qubit."""
        return GF2Matrix.from_supports([(5, 6), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)], 9)

    @staticmethod
    def anticommuting_deformation(code: CssCode) -> DeformedCode:
        """Deformation with one extra check that anticommutes with an existing X check."""
        builder = DeformationBuilder(code)
        builder.add_check("bad", {0: "Z"}, provenance="branch", role="vertex")
        return builder.build(name=f"{code.name}+bad")

    @staticmethod
    def random_code(seed: int, n: int = 12, x_rows: int = 4, z_rows: int = 5, max_k: int = 4) -> CssCode:
        """
        Random CSS code with ``1 <= k <= max_k``.

        Z checks are random combinations of the kernel of the X checks, so the
        pair is orthogonal by construction.
        """
        rng = np.random.default_rng(seed)
        while True:
            hx = GF2Matrix(rng.integers(0, 2, size=(x_rows, n)))
            kernel = gf2.kernel(hx)
            if kernel.rows == 0:
                continue
            mix = GF2Matrix(rng.integers(0, 2, size=(z_rows, kernel.rows)))
            hz = (mix @ kernel).nonzero_rows()
            if hz.rows == 0:
                continue
            code = CssCode(hx.nonzero_rows(), hz, name=f"random{seed}")
            if 1 <= code.k <= max_k and code.hx.rows:
                return code

    @staticmethod
    def manifest_path(name: str) -> str:
        return str(DATA_DIR / "codes" / f"{name}.json")

    @staticmethod
    def request_path(name: str) -> str:
        return str(DATA_DIR / "requests" / f"{name}.json")

    @staticmethod
    def request(products: List[str], mode: str = "disjoint", spec: Dict[str, int] = None) -> Dict:
        return {"products": products, "mode": mode, "spec": spec or {}}
