from typing import List

import numpy as np

from sources.limits import ecg_distance, ecg_index, equivariance_defect, extended_cg_limit, proper_discontinuity_check
from sources.schemas import CheckResult
from sources.suites.suite import Suite

NESTING_TOL = 1e-8
EQUIVARIANCE_TOL = 1e-6
STABLE_LENGTH = 8
REGION_POINTS = 20


class ExtendedLimitSuite(Suite):
    """Dimension, nesting and equivariance of the extended Conze-Guivarc'h subspaces, and proper discontinuity off them."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "ecg"
        self.description = "extended Conze-Guivarc'h limit set"

    def execute(self) -> List[CheckResult]:
        n, lmax, tol = self.n, self.config.lmax, self.tolerances
        G = self.group()
        sample = extended_cg_limit(G, n, lmax, tol.dedup_tol)
        self.notes.extend(sample.notes)
        q = ecg_index(n)
        wrong_dim = sum(e.ecg_subspace.proj_dim != q - 1 for e in sample.entries)
        nesting = max(float(np.max(np.abs(e.covector.coords @ e.ecg_subspace.basis))) for e in sample.entries)
        checks = [
            CheckResult("subspace_dimension", wrong_dim, 0, detail=f"proj_dim {q - 1} expected"),
            CheckResult("nested_in_hyperplane", nesting, NESTING_TOL),
        ]
        if lmax >= 3:
            defect = equivariance_defect(sample, G, lmax - 2, cache=self.reps)
            checks.append(CheckResult("generator_equivariance", defect.ecg, EQUIVARIANCE_TOL,
                                      detail=f"{defect.checked} images"))
        else:
            self.note("generator equivariance needs lmax >= 3")
        region = self.sample_away(lambda rows: ecg_distance(rows, sample), min(self.samples, REGION_POINTS),
                                  2 * tol.sep, self.rng())
        report = proper_discontinuity_check(G, n, region, lmax,
                                            sep=tol.sep, ecg=sample, dedup_tol=tol.dedup_tol)
        self.note(f"overlapping words by length: {report.overlaps_by_length}")
        checks.append(CheckResult("overlap_depth", report.max_overlap_depth, STABLE_LENGTH - 1,
                                  detail=f"{report.words_checked} words, sep={tol.sep}"))
        return checks
