from typing import List

import numpy as np

from sources.moebius import hopf_coordinates
from sources.projlin import random_points
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import curve_rank_check

MIN_SEPARATION = 0.05
SINGULAR_FLOOR = 1e-10


class IndependenceSuite(Suite):
    """Any n+1 distinct points of the Veronese curve are linearly independent."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "independence"
        self.description = "linear independence of curve points"

    def separated_tuple(self, rng: np.random.Generator):
        while True:
            points = random_points(rng, self.n + 1, 1)
            sphere = hopf_coordinates(points)
            gaps = np.linalg.norm(sphere[:, None, :] - sphere[None, :, :], axis=2)
            np.fill_diagonal(gaps, np.inf)
            # chordal distance on CP^1 is half the distance on the sphere
            if gaps.min() / 2.0 >= MIN_SEPARATION:
                return points

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        deficient, smallest = 0, np.inf
        for _ in self.iterate(range(self.samples), "tuples"):
            result = curve_rank_check(self.separated_tuple(rng), self.n)
            deficient += result.rank != self.n + 1
            smallest = min(smallest, result.smallest_singular)
        self.note(f"smallest singular value over all tuples: {smallest:.3e}")
        return [
            CheckResult("full_rank", deficient, 0, detail=f"{self.samples} tuples of {self.n + 1} points"),
            CheckResult("smallest_singular", smallest, SINGULAR_FLOOR, passed=smallest > SINGULAR_FLOOR),
        ]
