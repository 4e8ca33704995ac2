from typing import List

import numpy as np

from sources.limits import myrberg_distance, myrberg_limit, orbit_accumulation, subsample
from sources.projlin import ProjPoint, normalize_projective
from sources.schemas import CheckResult
from sources.suites.suite import Suite

MYRBERG_TOL = 1e-4
CURVE_APPROACH_TOL = 1e-4
# compact samples keep at least this distance from the sampled Myrberg set
SEED_SEPARATION = 1e-2
TARGETS = 50


class ContainmentSuite(Suite):
    """
    Orbit images of a compact set away from the Myrberg set accumulate on the union of
    osculating hyperplanes, and approach every embedded limit point.
    """
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "containment"
        self.description = "orbit accumulation against the Myrberg hyperplanes"

    def hyperplane_targets(self, myrberg, rng) -> List[ProjPoint]:
        targets = []
        for index in subsample(len(myrberg), TARGETS):
            basis = myrberg.entries[index].hyperplane.basis
            coeffs = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
            targets.append(normalize_projective(basis @ coeffs))
        return targets

    def execute(self) -> List[CheckResult]:
        rng = self.rng()
        G = self.group()
        lmax = self.config.lmax
        tol = self.tolerances
        myrberg = myrberg_limit(G, self.n, lmax, tol.dedup_tol, cross_checks=0)
        K = self.sample_away(lambda rows: myrberg_distance(rows, myrberg), self.samples, SEED_SEPARATION, rng)
        curve_targets = [myrberg.entries[i].curve_point for i in subsample(len(myrberg), TARGETS)]
        plane_targets = self.hyperplane_targets(myrberg, rng)
        cloud = orbit_accumulation(G, self.n, K, lmax, tol.dedup_tol, myrberg=myrberg,
                                   min_separation=SEED_SEPARATION / 2,
                                   targets=curve_targets + plane_targets, keep_points=False)
        curve_distance = float(np.max(cloud.target_distances[:len(curve_targets)]))
        plane_distance = float(np.max(cloud.target_distances[len(curve_targets):]))
        self.note(f"{cloud.images_computed} images over lengths {cloud.lengths[0]}..{cloud.lengths[-1]}, "
                  f"{cloud.distinct} distinct")
        self.record_unchecked("hyperplane_points_approached", plane_distance,
                              "orbits of finitely many seeds accumulate on the embedded limit points, the images "
                              "of the rank-one limits; other hyperplane points are only reached from seeds on "
                              "the repelling hyperplanes")
        return [
            CheckResult("accumulation_in_hyperplanes", cloud.max_myrberg_distance, MYRBERG_TOL,
                        detail=f"{len(K)} compact sample points"),
            CheckResult("curve_points_approached", curve_distance, CURVE_APPROACH_TOL,
                        detail=f"{len(curve_targets)} embedded limit points"),
        ]
