from typing import List

import numpy as np
import sympy

from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import irrep_matrices, irrep_oracle, oracle_to_numpy

ORACLE_TOL = 1e-12
MAX_ORACLE_SAMPLES = 200


def gaussian_rational(rng: np.random.Generator, bound: int = 3, denominators=(1, 2, 4)) -> sympy.Expr:
    """(a + b i) / d with small integers; dyadic denominators keep the float copy exact."""
    a, b = rng.integers(-bound, bound + 1, size=2)
    d = int(rng.choice(denominators))
    return sympy.Rational(int(a), d) + sympy.I * sympy.Rational(int(b), d)


def unimodular_sample(rng: np.random.Generator) -> List[List[sympy.Expr]]:
    """[[1,a],[0,1]] [[1,0],[b,1]] [[1,c],[0,1]]: determinant exactly 1."""
    a, b, c = (gaussian_rational(rng) for _ in range(3))
    product = sympy.Matrix([[1, a], [0, 1]]) * sympy.Matrix([[1, 0], [b, 1]]) * sympy.Matrix([[1, c], [0, 1]])
    return [[sympy.expand(product[i, j]) for j in range(2)] for i in range(2)]


class OracleSuite(Suite):
    """The closed-form representation agrees with exact symbolic expansion."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "oracle"
        self.description = "closed form against the exact oracle"

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        count = min(self.samples, MAX_ORACLE_SAMPLES)
        worst = 0.0
        for _ in self.iterate(range(count), "matrices"):
            entries = unimodular_sample(rng)
            exact = oracle_to_numpy(irrep_oracle(entries, self.n))
            floats = np.array([[complex(v) for v in row] for row in entries])
            approx = irrep_matrices(floats, self.n)
            worst = max(worst, float(np.max(np.abs(approx - exact)) / max(1.0, np.max(np.abs(exact)))))
        if count < self.samples:
            self.note(f"oracle limited to {count} matrices")
        return [CheckResult("oracle_agreement", worst, ORACLE_TOL, detail=f"{count} Gaussian-rational matrices")]
