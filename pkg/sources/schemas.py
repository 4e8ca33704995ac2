from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from sources.errors import ConfigError, ParseError
from sources.moebius import GroupClass, GroupSpec, MoebiusElement
from sources.parsing import parse_matrix
from sources.presets import build_preset
from sources.utility import pretty_print


class Tolerances(BaseModel):
    dedup_tol: float = Field(1e-6, gt=0, lt=1)
    rank_tol: float = Field(1e-6, gt=0, lt=1)
    conv_tol: float = Field(1e-8, gt=0, lt=1)
    gap_tol: float = Field(1e-6, gt=0, lt=1)
    sep: float = Field(0.05, gt=0, lt=1)
    type_tol: float = Field(1e-6, gt=0, lt=1)

    def jsonify(self):
        return self.model_dump()


class OutputSpec(BaseModel):
    format: Literal["csv", "json"] = "json"
    path: Optional[str] = None

    def __str__(self):
        return f"Format: {self.format}, Path: {self.path or '<stdout>'}"

    def jsonify(self):
        return {"format": self.format, "path": self.path}


class GroupSource(BaseModel):
    """
    Either a preset name or inline generator matrices (name -> "a, b; c, d").
    Inline generators take precedence over the preset.
    """
    preset: Optional[str] = "schottky_pair"
    asserted_class: GroupClass = GroupClass.OTHER
    lam: float = 2.0
    theta: float = float(np.pi / 3)
    generators: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _has_source(self):
        if not self.generators and not self.preset:
            raise ValueError("group needs a preset or at least one generator")
        return self

    def build(self, n: int) -> GroupSpec:
        if not self.generators:
            return build_preset(self.preset, n=n, lam=self.lam, theta=self.theta)
        elements = []
        for name, text in self.generators.items():
            try:
                matrix = parse_matrix(text, size=2)
            except ParseError as e:
                raise ConfigError(f"generator {name}: {e.message}", e.details)
            elements.append(MoebiusElement.from_matrix(matrix, name))
        return GroupSpec(tuple(elements), self.asserted_class, n)

    def jsonify(self):
        return {
            "preset": None if self.generators else self.preset,
            "asserted_class": self.asserted_class.value,
            "lam": self.lam,
            "theta": self.theta,
            "generators": dict(self.generators),
        }


class RunConfig(BaseModel):
    group: GroupSource = Field(default_factory=GroupSource)
    n: int = Field(2, ge=2)
    lmax: int = Field(6, ge=1)
    seed: int = 0
    samples: int = Field(100, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: OutputSpec = Field(default_factory=OutputSpec)

    def __str__(self):
        return (f"n={self.n}, lmax={self.lmax}, seed={self.seed}, samples={self.samples}, "
                f"group={self.group.preset if not self.group.generators else list(self.group.generators)}, "
                f"output=({self.output})")

    def group_spec(self) -> GroupSpec:
        return self.group.build(self.n)

    def jsonify(self):
        return {
            "group": self.group.jsonify(),
            "n": self.n,
            "lmax": self.lmax,
            "seed": self.seed,
            "samples": self.samples,
            "tolerances": self.tolerances.jsonify(),
            "output": self.output.jsonify(),
        }


class CheckResult:
    """
    Outcome of one verify check: a measured error against its tolerance.
    """
    def __init__(self, name: str, measured: float, tolerance: float, passed: bool = None, detail: str = ""):
        """
        Args:
            name: Check identifier, unique within a suite.
            measured: Worst measured error (or the measured quantity for bound checks).
            tolerance: Threshold the measurement is compared against.
            passed: Overrides the default measured <= tolerance decision.
            detail: Free text shown next to the numbers.
        """
        self.name = name
        self.measured = float(measured)
        self.tolerance = float(tolerance)
        self.passed = bool(self.measured <= self.tolerance if passed is None else passed)
        self.detail = detail

    def __str__(self):
        status = "ok" if self.passed else "FAILED"
        return f"{self.name}: {self.measured:.3e} vs {self.tolerance:.1e} [{status}] {self.detail}".rstrip()

    def jsonify(self):
        return {
            "check": self.name,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }

    def show(self):
        pretty_print(str(self), color="success" if self.passed else "failure")


class SuiteReport:
    """
    Checks of one suite run. unchecked lists properties the suite measured but cannot decide
    at a reachable tolerance, each as {"property", "measured", "reason"}; they do not affect passed.
    """
    def __init__(self, suite: str, checks: List[CheckResult], notes: List[str] = None,
                 unchecked: List[Dict[str, Any]] = None):
        self.suite = suite
        self.checks = checks
        self.notes = notes or []
        self.unchecked = unchecked or []

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __str__(self):
        return f"Suite: {self.suite}, Checks: {len(self.checks)}, Passed: {self.passed}"

    def jsonify(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [check.jsonify() for check in self.checks],
            "notes": list(self.notes),
            "unchecked": list(self.unchecked),
        }

    def show(self):
        pretty_print('▂'*64, color="status")
        pretty_print(f"suite {self.suite}", color="status")
        for check in self.checks:
            check.show()
        for note in self.notes:
            pretty_print(note, color="warning")
        for item in self.unchecked:
            pretty_print(f"not checked: {item['property']} = {item['measured']:.3e} ({item['reason']})", color="warning")
        pretty_print('▂'*64, color="status")
