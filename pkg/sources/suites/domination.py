from typing import List

from sources.limits import dominated_diagnostic, transversality_report
from sources.schemas import CheckResult
from sources.suites.suite import Suite

SLOPE_SPREAD_TOL = 0.1
TRANSVERSALITY_FLOOR = 1e-8


class DominationSuite(Suite):
    """Dominated splitting of every index p: negative log-ratio slope, equal slopes across p, transverse limit maps."""
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "domination"
        self.description = "p-dominated splitting and Anosov transversality"

    def slope_consistency(self, fits, lmax: int) -> List[CheckResult]:
        """Slopes of all indices compared on one word set: the lengths every index measured completely."""
        common = min(min(fit.complete_length for fit in fits), lmax)
        if common < 2:
            self.note(f"slope consistency skipped: some index has unreliable ratios from length {common + 1}")
            return []
        if common < lmax:
            fits = [dominated_diagnostic(self.group(), self.n, fit.p, common) for fit in fits]
        slopes = [fit.slope for fit in fits]
        scale = max(abs(s) for s in slopes) or 1.0
        return [CheckResult("slope_consistency", (max(slopes) - min(slopes)) / scale, SLOPE_SPREAD_TOL,
                            detail=f"words up to length {common}")]

    def execute(self) -> List[CheckResult]:
        G = self.group()
        lmax = self.config.lmax
        fits = [dominated_diagnostic(G, self.n, p, lmax) for p in self.iterate(range(1, self.n + 1), "fits")]
        checks = []
        for fit in fits:
            checks.append(CheckResult(f"slope_p{fit.p}", fit.slope, 0.0, passed=fit.slope < 0,
                                      detail=f"constant {fit.constant:.6g}, residual {fit.residual:.3e}, "
                                             f"{fit.samples} words, {fit.skipped} skipped"))
        checks.extend(self.slope_consistency(fits, lmax))
        for p in self.iterate(range(1, self.n + 1), "transversality"):
            report = transversality_report(G, self.n, p, lmax, self.tolerances.dedup_tol)
            checks.append(CheckResult(f"transversality_p{p}", report.min_transversality, TRANSVERSALITY_FLOOR,
                                      passed=report.min_transversality > TRANSVERSALITY_FLOOR,
                                      detail=f"{report.pairs} pairs, worst {report.worst_pair}"))
        return checks
