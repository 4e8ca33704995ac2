from typing import List

from sources.moebius import TRACE_TOL, ElementType, classify, random_element
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import classify_projective, irrep

KINDS = (ElementType.LOXODROMIC, ElementType.ELLIPTIC, ElementType.PARABOLIC)
# |tr^2 - 4| in this range is the undecided zone around the parabolic threshold
BAND = (TRACE_TOL / 1e3, TRACE_TOL * 1e3)


class TypePreservationSuite(Suite):
    """classify_projective(irrep(A)) = classify(A) for random elements of each class."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "types"
        self.description = "type preservation of the representation"

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        checks = []
        in_band = 0
        for kind in KINDS:
            disagreements = 0
            for _ in self.iterate(range(self.samples), kind.value):
                A = random_element(rng, kind)
                gap = abs(A.trace ** 2 - 4.0)
                if kind != ElementType.PARABOLIC and BAND[0] <= gap <= BAND[1]:
                    in_band += 1
                    continue
                if classify(A) != kind or classify_projective(irrep(A, self.n)) != kind:
                    disagreements += 1
            checks.append(CheckResult(f"{kind.value}_agreement", disagreements, 0,
                                      detail=f"{self.samples} elements"))
        self.note(f"band occupancy: {in_band} of {len(KINDS) * self.samples} elements "
                  f"with |tr^2 - 4| in [{BAND[0]:.0e}, {BAND[1]:.0e}]")
        return checks
