from abc import abstractmethod
from typing import Callable, Iterable, List

import numpy as np
from tqdm import tqdm

from sources.logger import Logger
from sources.moebius import GroupSpec
from sources.limits import complement_sample
from sources.projlin import ProjPoint
from sources.schemas import CheckResult, RunConfig, SuiteReport
from sources.veronese import RepCache


class Suite():
    """
    Abstract class for all verify suites.
    A suite runs one family of property checks at the scale given by the run configuration
    and reports each check as a measured error against its tolerance.
    """
    def __init__(self, config: RunConfig, progress: bool = False):
        self.name = "undefined"
        self.description = "undefined"
        self.config = config
        self.n = config.n
        self.samples = config.samples
        self.tolerances = config.tolerances
        self.progress = progress
        self.notes: List[str] = []
        self.unchecked: List[dict] = []
        self.logger = Logger("suites.log")
        # representation matrices of the configured group, keyed by word label
        self.reps = RepCache()

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator per stream, fixed by the configured seed."""
        return np.random.default_rng([self.config.seed, stream])

    def group(self) -> GroupSpec:
        return self.config.group_spec()

    def iterate(self, items: Iterable, desc: str) -> Iterable:
        return tqdm(items, desc=f"{self.name}: {desc}", disable=not self.progress, leave=False)

    def sample_away(self, distance: Callable[[np.ndarray], np.ndarray], count: int, threshold: float,
                    rng: np.random.Generator, attempts: int = 50) -> List[ProjPoint]:
        return complement_sample(distance, count, self.n, threshold, rng, attempts)

    def note(self, text: str) -> None:
        self.notes.append(text)
        self.logger.info(f"[{self.name}] {text}")

    def record_unchecked(self, prop: str, measured: float, reason: str) -> None:
        self.unchecked.append({"property": prop, "measured": float(measured), "reason": reason})
        self.logger.info(f"[{self.name}] {prop} not checked ({measured:.3e}): {reason}")

    def run(self) -> SuiteReport:
        self.notes = []
        self.unchecked = []
        self.logger.info(f"running suite {self.name} (n={self.n}, samples={self.samples}, seed={self.config.seed})")
        checks = self.execute()
        self.reps.clear()
        for check in checks:
            if check.passed:
                self.logger.info(f"[{self.name}] {check}")
            else:
                self.logger.warning(f"[{self.name}] {check}")
        return SuiteReport(self.name, checks, self.notes, self.unchecked)

    @abstractmethod
    def execute(self) -> List[CheckResult]:
        """
        Run the checks of the suite.
        Returns:
            List[CheckResult]: one entry per check, in a fixed order.
        """
        pass
