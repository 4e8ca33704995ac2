"""
Subcommand implementations. Each command turns a RunConfig (plus its own input)
into a CommandResult: ordered records, a meta block and an exit code. Writing the
result is left to the caller so commands stay testable without files.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from sources import __version__
from sources.errors import PreconditionViolated
from sources.exporter import write_output
from sources.limits import (
    complement_sample,
    ecg_distance,
    extended_cg_limit,
    myrberg_distance,
    myrberg_limit,
    orbit_accumulation,
    proper_discontinuity_check,
)
from sources.logger import Logger
from sources.moebius import evaluate_word, limit_points_cp1
from sources.parsing import format_word, parse_points, parse_word
from sources.projlin import ProjPoint
from sources.schemas import RunConfig
from sources.suites import get_suite
from sources.utility import pretty_print
from sources.veronese import classify_projective, embed, frame_singular_values, irrep

logger = Logger("commands.log")

# compact samples for accumulate / proper keep this distance from the sampled limit sets
MYRBERG_SEPARATION = 1e-2


@dataclass
class CommandResult:
    command: str
    records: List[Dict[str, Any]]
    meta: Dict[str, Any]
    exit_code: int = 0
    summary: List[str] = field(default_factory=list)

    def write(self, config: RunConfig, stream=None) -> str:
        return write_output(self.records, self.meta, config.output, stream)

    def show(self):
        for line in self.summary:
            pretty_print(line, color="success" if self.exit_code == 0 else "failure")


def command_meta(config: RunConfig, command: str, **extra) -> Dict[str, Any]:
    meta = {"tool": "veronese-limits", "version": __version__, "command": command,
            "config": config.jsonify()}
    meta.update(extra)
    return meta


def _point_cells(point: ProjPoint) -> List[complex]:
    return [complex(c) for c in point.coords]


def cmd_embed(config: RunConfig, text: str) -> CommandResult:
    """Embedded coordinates of CP^1 points given one per line as [x:y]."""
    points = parse_points(text)
    records = []
    for index, p in enumerate(points):
        if p.dim_ambient != 1:
            raise PreconditionViolated(f"point {index} is in CP^{p.dim_ambient}, embed expects CP^1")
        records.append({"index": index, "coords": _point_cells(embed(p, config.n))})
    return CommandResult("embed", records, command_meta(config, "embed", points=len(points)),
                         summary=[f"embedded {len(points)} points into CP^{config.n}"])


def cmd_rep(config: RunConfig, word_text: str) -> CommandResult:
    """
    irrep of a word over the configured generators, with singular values measured in the
    invariant frame, the projective class and consecutive singular value ratios.
    """
    group = config.group_spec()
    tokens = parse_word(word_text)
    A = evaluate_word(group, tokens)
    rep = irrep(A, config.n)
    sigma = frame_singular_values(rep, config.n)
    kind = classify_projective(rep)
    record = {
        "word": format_word(tokens),
        "n": config.n,
        "classification": kind.value,
        "matrix": [[complex(v) for v in row] for row in rep.mat],
        "sigma": [float(s) for s in sigma],
        "gap_ratios": [float(r) for r in sigma[1:] / sigma[:-1]],
    }
    return CommandResult("rep", [record], command_meta(config, "rep", word=record["word"]),
                         summary=[f"{record['word'] or '<empty word>'}: {kind.value}, sigma_1 {sigma[0]:.6g}"])


def _limit_record(index: int, entry) -> Dict[str, Any]:
    record = {
        "index": index,
        "word": entry.word,
        "cp1_point": _point_cells(entry.cp1_point),
        "curve_point": _point_cells(entry.curve_point),
        "covector": _point_cells(entry.covector),
    }
    if entry.ecg_subspace is not None:
        # basis columns one after the other
        record["ecg_basis"] = [complex(v) for v in entry.ecg_subspace.basis.T.ravel()]
        record["ecg_osculating_gap"] = entry.ecg_osculating_gap
    return record


def cmd_limitset(config: RunConfig, which: str) -> CommandResult:
    """
    Sampled limit set as records. Exit code 1 when a kernel cross-check of the Myrberg
    sample missed its tolerance; the records are still written.
    """
    group = config.group_spec()
    failed: List[str] = []
    tol = config.tolerances
    n, lmax = config.n, config.lmax
    if which == "cp1":
        points = limit_points_cp1(group, lmax, tol.dedup_tol)
        records = [{"index": i, "word": lp.word.label, "cp1_point": _point_cells(lp.point)}
                   for i, lp in enumerate(points)]
        meta = command_meta(config, "limitset", kind="cp1", count=len(records))
    elif which in ("myrberg", "ecg"):
        if which == "myrberg":
            sample = myrberg_limit(group, n, lmax, tol.dedup_tol, rank_tol=tol.rank_tol, conv_tol=tol.conv_tol)
        else:
            sample = extended_cg_limit(group, n, lmax, tol.dedup_tol)
        records = [_limit_record(i, e) for i, e in enumerate(sample.entries)]
        meta = command_meta(config, "limitset", kind=which, count=len(records), notes=sample.notes,
                            cross_checks=[{"word": c.word, "distance": c.distance, "passed": c.passed}
                                          for c in sample.cross_checks])
        failed = [c.word for c in sample.cross_checks if not c.passed]
    else:
        raise PreconditionViolated(f"unknown limit set {which!r}", {"known": ["myrberg", "ecg", "cp1"]})
    logger.info(f"limitset {which}: {len(records)} records (n={n}, lmax={lmax})")
    summary = [f"{which} limit set: {len(records)} points"]
    if failed:
        logger.warning(f"limitset {which}: kernel cross-check failed for {failed}")
        summary.append(f"kernel cross-check failed for {len(failed)} words: {', '.join(failed)}")
    return CommandResult("limitset", records, meta, exit_code=1 if failed else 0, summary=summary)


def cmd_verify(config: RunConfig, suite: str, progress: bool = False) -> CommandResult:
    """Runs one verify suite; exit code 1 when any check misses its tolerance."""
    report = get_suite(suite, config, progress).run()
    records = [check.jsonify() for check in report.checks]
    meta = command_meta(config, "verify", suite=suite, passed=report.passed, notes=report.notes,
                        unchecked=report.unchecked)
    summary = [str(check) for check in report.checks]
    summary += [f"not checked: {item['property']} = {item['measured']:.3e}" for item in report.unchecked]
    summary.append(str(report))
    return CommandResult("verify", records, meta, exit_code=0 if report.passed else 1, summary=summary)


def cmd_accumulate(config: RunConfig, targets: Optional[List[ProjPoint]] = None) -> CommandResult:
    """orbit_accumulation of a seeded random compact sample away from the Myrberg set."""
    group = config.group_spec()
    tol = config.tolerances
    myrberg = myrberg_limit(group, config.n, config.lmax, tol.dedup_tol, cross_checks=0)
    rng = np.random.default_rng(config.seed)
    K = complement_sample(lambda rows: myrberg_distance(rows, myrberg), config.samples, config.n,
                          MYRBERG_SEPARATION, rng)
    cloud = orbit_accumulation(group, config.n, K, config.lmax, tol.dedup_tol, myrberg=myrberg,
                               min_separation=MYRBERG_SEPARATION / 2, targets=targets)
    records = [{"index": i, "word": p.word, "seed": p.seed, "point": _point_cells(p.point),
                "myrberg_distance": p.myrberg_distance} for i, p in enumerate(cloud.points)]
    extra = {"images_computed": cloud.images_computed, "distinct": cloud.distinct,
             "lengths": cloud.lengths, "max_myrberg_distance": cloud.max_myrberg_distance}
    if cloud.target_distances is not None:
        extra["target_distances"] = [float(d) for d in cloud.target_distances]
    return CommandResult("accumulate", records, command_meta(config, "accumulate", **extra),
                         summary=[f"{cloud.distinct} distinct orbit images, largest distance to the "
                                  f"Myrberg hyperplanes {cloud.max_myrberg_distance:.3e}"])


def cmd_proper(config: RunConfig) -> CommandResult:
    """proper_discontinuity_check on a seeded random sample away from the extended limit set."""
    group = config.group_spec()
    tol = config.tolerances
    ecg = extended_cg_limit(group, config.n, config.lmax, tol.dedup_tol)
    rng = np.random.default_rng(config.seed)
    region = complement_sample(lambda rows: ecg_distance(rows, ecg), config.samples, config.n, 2 * tol.sep, rng)
    report = proper_discontinuity_check(group, config.n, region, config.lmax, sep=tol.sep, ecg=ecg,
                                        dedup_tol=tol.dedup_tol)
    records = [{"word": word, "length": len(word.split())} for word in report.violating_words]
    meta = command_meta(config, "proper", words_checked=report.words_checked,
                        max_overlap_depth=report.max_overlap_depth,
                        overlaps_by_length=report.overlaps_by_length, notes=ecg.notes)
    return CommandResult("proper", records, meta,
                         summary=[f"{len(records)} of {report.words_checked} words overlap the sample, "
                                  f"max depth {report.max_overlap_depth}"])
