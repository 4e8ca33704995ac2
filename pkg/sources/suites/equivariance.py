from typing import List

from sources.moebius import ElementType, act, random_element
from sources.projlin import chordal_distance, normalize_projective, random_points
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import curve_parameter, embed, irrep

EQUIVARIANCE_TOL = 1e-9
CURVE_TOL = 1e-8
KINDS = (ElementType.LOXODROMIC, ElementType.ELLIPTIC, ElementType.PARABOLIC)


class EquivarianceSuite(Suite):
    """irrep(A) embed(p) = embed(A p), and irrep(A) keeps the curve on the curve."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "equivariance"
        self.description = "equivariance of the Veronese embedding"

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        worst, curve_worst = 0.0, 0.0
        for index in self.iterate(range(self.samples), "samples"):
            A = random_element(rng, KINDS[index % 3], spread=1.0, log_modulus=(0.05, 0.5))
            p = random_points(rng, 1, 1)[0]
            M = irrep(A, self.n).mat
            image = normalize_projective(M @ embed(p, self.n).coords)
            worst = max(worst, chordal_distance(image, embed(act(A, p), self.n)))
            # the image of a curve point is a curve point
            back = curve_parameter(image, self.n, tol=1.0)
            curve_worst = max(curve_worst, chordal_distance(embed(back, self.n), image))
        return [
            CheckResult("embedding_equivariance", worst, EQUIVARIANCE_TOL,
                        detail=f"{self.samples} random (A, p), n={self.n}"),
            CheckResult("curve_automorphism", curve_worst, CURVE_TOL),
        ]
