from typing import List

import numpy as np

from sources.moebius import ElementType, enumerate_words, random_element
from sources.projlin import svd
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import frame_singular_values, irrep

LAW_TOL = 1e-8
# beyond this condition number the smallest singular values of a double matrix are not resolved
MEASURABLE_COND = 1e7


def law_error(A, n: int) -> float:
    """Largest relative deviation of sigma_{j+1}/sigma_j (irrep(A), invariant frame) from sigma_1(A)^-2."""
    sigma = frame_singular_values(irrep(A, n), n)
    expected = svd(A.mat).sigma[0] ** -2.0
    ratios = sigma[1:] / sigma[:-1]
    return float(np.max(np.abs(ratios - expected)) / expected)


class SingularValueLawSuite(Suite):
    """Consecutive singular value ratios of irrep(A) all equal sigma_1(A)^-2."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "svlaw"
        self.description = "singular value law of the irreducible representation"

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        worst = 0.0
        for _ in self.iterate(range(self.samples), "random loxodromic"):
            A = random_element(rng, ElementType.LOXODROMIC, spread=1.2, log_modulus=(0.05, 0.5))
            worst = max(worst, law_error(A, self.n))
        checks = [CheckResult("random_loxodromic", worst, LAW_TOL,
                              detail=f"{self.samples} samples, n={self.n}")]
        group_worst, measured, skipped = 0.0, 0, 0
        for word in self.iterate(enumerate_words(self.group(), self.config.lmax), "group words"):
            if svd(word.mat).sigma[0] ** (2 * self.n) > MEASURABLE_COND:
                skipped += 1
                continue
            group_worst = max(group_worst, law_error(word, self.n))
            measured += 1
        if skipped:
            self.note(f"{skipped} group words skipped: image condition number above {MEASURABLE_COND:.0e}")
        checks.append(CheckResult("group_words", group_worst, LAW_TOL,
                                  detail=f"{measured} words up to length {self.config.lmax}"))
        return checks
