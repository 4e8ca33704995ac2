from sources.errors import ConfigError
from sources.suites.classes import TypePreservationSuite
from sources.suites.containment import ContainmentSuite
from sources.suites.domination import DominationSuite
from sources.suites.dynamics import LambdaLemmaSuite
from sources.suites.ecg import ExtendedLimitSuite
from sources.suites.equivariance import EquivarianceSuite
from sources.suites.independence import IndependenceSuite
from sources.suites.kernel import KernelImageSuite
from sources.suites.oracle import OracleSuite
from sources.suites.suite import Suite
from sources.suites.svlaw import SingularValueLawSuite

SUITES = {
    "equivariance": EquivarianceSuite,
    "svlaw": SingularValueLawSuite,
    "lambda": LambdaLemmaSuite,
    "containment": ContainmentSuite,
    "domination": DominationSuite,
    "oracle": OracleSuite,
    "types": TypePreservationSuite,
    "independence": IndependenceSuite,
    "kernel": KernelImageSuite,
    "ecg": ExtendedLimitSuite,
}


def get_suite(name: str, config, progress: bool = False) -> Suite:
    if name not in SUITES:
        raise ConfigError(f"unknown verify suite {name!r}", {"known": list(SUITES)})
    return SUITES[name](config, progress)
