from typing import List

from sources.errors import Inconclusive, PreconditionViolated
from sources.limits import SequenceType, cg_limit, power_limit, sequence_type, subsample
from sources.moebius import ElementType, attracting_point, classify, enumerate_words, repelling_point
from sources.projlin import chordal_distance, point_subspace_distance, subspace_distance
from sources.schemas import CheckResult
from sources.suites.suite import Suite
from sources.veronese import embed, osculating_hyperplane

IMAGE_TOL = 1e-8
KERNEL_TOL = 1e-6
CG_TOL = 1e-8


class KernelImageSuite(Suite):
    """
    For loxodromic words w, the limit of the powers of irrep(w) has image embed(attracting point)
    and kernel the osculating hyperplane at the repelling point; powers of parabolic words have
    parabolic type; dominant directions of proximal images lie on the curve.
    """
    def __init__(self, config, progress=False):
        super().__init__(config, progress)
        self.name = "kernel"
        self.description = "kernel and image of power limits"

    def sequence_class(self, word) -> str:
        limit = power_limit(word, self.n, rank_tol=self.tolerances.rank_tol, conv_tol=self.tolerances.conv_tol)
        try:
            return sequence_type(limit, self.tolerances.type_tol).value
        except (Inconclusive, PreconditionViolated):
            return "undecided"

    def execute(self) -> List[CheckResult]:
        tol = self.tolerances
        G = self.group()
        words = list(enumerate_words(G, self.config.lmax))
        classes = [classify(w) for w in words]
        loxodromic = [w for w, c in zip(words, classes) if c == ElementType.LOXODROMIC]
        parabolic = [w for w, c in zip(words, classes) if c == ElementType.PARABOLIC]
        loxodromic = [loxodromic[i] for i in subsample(len(loxodromic), self.samples)]
        parabolic = [parabolic[i] for i in subsample(len(parabolic), self.samples)]
        image_worst, kernel_worst, failures, mistyped = 0.0, 0.0, 0, 0
        for word in self.iterate(loxodromic, "loxodromic words"):
            limit = power_limit(word, self.n, rank_tol=tol.rank_tol, conv_tol=tol.conv_tol)
            if limit.kernel is None or limit.rank != 1:
                failures += 1
                continue
            image_worst = max(image_worst, point_subspace_distance(embed(attracting_point(word), self.n),
                                                                   limit.image))
            kernel_worst = max(kernel_worst, subspace_distance(limit.kernel,
                                                               osculating_hyperplane(repelling_point(word), self.n)))
            if self.sequence_class(word) != SequenceType.LOXODROMIC_TYPE.value:
                mistyped += 1
        for word in self.iterate(parabolic, "parabolic words"):
            if self.sequence_class(word) != SequenceType.PARABOLIC_TYPE.value:
                mistyped += 1
        checks = [
            CheckResult("rank_one_limits", failures, 0, detail=f"{len(loxodromic)} loxodromic words"),
            CheckResult("image_is_attracting_point", image_worst, IMAGE_TOL),
            CheckResult("kernel_is_repelling_hyperplane", kernel_worst, KERNEL_TOL),
            CheckResult("sequence_types", mistyped, 0,
                        detail=f"{len(loxodromic)} loxodromic, {len(parabolic)} parabolic"),
        ]
        if loxodromic:
            cg_worst = 0.0
            for lp in cg_limit(G, self.n, self.config.lmax, tol.dedup_tol, tol.gap_tol, cache=self.reps):
                cg_worst = max(cg_worst, chordal_distance(lp.point, embed(attracting_point(lp.word), self.n)))
            checks.append(CheckResult("proximal_directions_on_curve", cg_worst, CG_TOL))
        else:
            self.note("no loxodromic word in the group up to the configured length")
        return checks
