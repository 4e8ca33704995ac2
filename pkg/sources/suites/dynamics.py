from typing import List, Tuple

import numpy as np
import scipy.linalg

from sources.limits import limit_flags
from sources.moebius import ElementType, MoebiusElement, classify
from sources.presets import cyclic_loxodromic
from sources.projlin import ProjSubspace
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import irrep

ATTRACTION_TOL = 1e-5
MAX_ITERATIONS = 60
SEEDS_PER_LEVEL = 50
# flags are read off the first power of g whose leading eigenvalue modulus reaches this size
FLAG_GROWTH = 1e6


def _residual(x: np.ndarray, subspace: ProjSubspace) -> float:
    basis = subspace.basis
    return float(np.linalg.norm(x - basis @ (basis.conj().T @ x)))


def _seeds(rng: np.random.Generator, outer: np.ndarray, inner: np.ndarray, count: int) -> np.ndarray:
    """Unit vectors of span(outer) with a component of modulus >= 0.1 off span(inner)."""
    off = outer - inner @ (inner.conj().T @ outer) if inner.size else outer
    direction = scipy.linalg.orth(off)[:, :1]
    rows = []
    for _ in range(count):
        weight = rng.uniform(0.1, 1.0) * np.exp(2j * np.pi * rng.uniform())
        x = weight * direction[:, 0]
        if inner.size:
            coeffs = rng.standard_normal(inner.shape[1]) + 1j * rng.standard_normal(inner.shape[1])
            x = x + inner @ coeffs
        rows.append(x / np.linalg.norm(x))
    return np.array(rows)


class LambdaLemmaSuite(Suite):
    """
    For a loxodromic g with flags F^+, F^- read off g^m: every x in F_j^- outside F_{j+1}^-
    is carried into F_j^+ by the iterates of irrep(g).
    """
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "lambda"
        self.description = "lambda-lemma dynamics along the flags"

    def generators(self) -> List[Tuple[str, MoebiusElement]]:
        picked = [("cyclic", cyclic_loxodromic(self.config.group.lam, self.n).generators[0])]
        for g in self.group().generators:
            if classify(g) == ElementType.LOXODROMIC:
                picked.append((g.label, g))
        return picked

    def level_errors(self, g: MoebiusElement, rng: np.random.Generator) -> Tuple[float, int]:
        n = self.n
        top = max(3, int(np.ceil(np.log(FLAG_GROWTH) / np.log(np.max(np.abs(np.linalg.eigvals(g.mat)))))))
        powers = [MoebiusElement(np.linalg.matrix_power(g.mat, m), g.label) for m in range(top - 2, top + 1)]
        flags = limit_flags(powers, n)
        M = irrep(g, n).mat
        worst, slowest = 0.0, 0
        for j in range(1, n + 1):
            outer = np.eye(n + 1, dtype=complex) if j == 1 else flags.backward_step(j).basis
            inner = flags.backward_step(j + 1).basis
            target = flags.forward_step(j)
            for x in _seeds(rng, outer, inner, SEEDS_PER_LEVEL):
                distance = _residual(x, target)
                steps = 0
                while distance >= ATTRACTION_TOL and steps < MAX_ITERATIONS:
                    x = M @ x
                    x = x / np.linalg.norm(x)
                    distance = _residual(x, target)
                    steps += 1
                worst = max(worst, distance)
                slowest = max(slowest, steps)
        return worst, slowest

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        checks = []
        for name, g in self.iterate(self.generators(), "generators"):
            worst, slowest = self.level_errors(g, rng)
            checks.append(CheckResult(f"attraction_{name}", worst, ATTRACTION_TOL,
                                      detail=f"levels 1..{self.n}, at most {slowest} iterations"))
        return checks
