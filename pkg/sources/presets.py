"""
Named groups shipped with the library, used by the command line and the verify suites.
"""

from typing import Callable, Dict

import numpy as np

from sources.errors import ConfigError
from sources.moebius import GroupClass, GroupSpec, MoebiusElement


def cyclic_loxodromic(lam: float = 2.0, n: int = 2) -> GroupSpec:
    """<g>, g = diag(lam, 1/lam)."""
    if abs(lam) <= 1.0:
        raise ConfigError(f"loxodromic preset needs |lam| > 1, got {lam}")
    g = MoebiusElement(np.diag([lam, 1.0 / lam]), "g")
    return GroupSpec((g,), GroupClass.CYCLIC_LOXODROMIC, n)


def cyclic_parabolic(n: int = 2) -> GroupSpec:
    g = MoebiusElement(np.array([[1.0, 1.0], [0.0, 1.0]]), "g")
    return GroupSpec((g,), GroupClass.OTHER, n)


def rotation(theta: float = np.pi / 3, n: int = 2) -> GroupSpec:
    """Elliptic-only group generated by a rotation of angle 2*theta about 0 and infinity."""
    phase = np.exp(1j * theta)
    g = MoebiusElement(np.diag([phase, 1.0 / phase]), "g")
    return GroupSpec((g,), GroupClass.OTHER, n)


def schottky_pair(n: int = 2) -> GroupSpec:
    """
    g = diag(3, 1/3) and h = C g C^-1 with C = [[1,1],[1,2]].
    Fixed points 0, inf of g and 1, 1/2 of h are far apart compared to the isometric circles.
    """
    g = MoebiusElement(np.diag([3.0, 1.0 / 3.0]), "g")
    conjugator = MoebiusElement(np.array([[1.0, 1.0], [1.0, 2.0]]))
    h = MoebiusElement(g.conjugate_by(conjugator).mat, "h")
    return GroupSpec((g, h), GroupClass.SCHOTTKY, n)


def fuchsian_sample(n: int = 2) -> GroupSpec:
    """The level-2 principal congruence pair [[1,2],[0,1]], [[1,0],[2,1]]: free, with parabolic generators."""
    g = MoebiusElement(np.array([[1.0, 2.0], [0.0, 1.0]]), "g")
    h = MoebiusElement(np.array([[1.0, 0.0], [2.0, 1.0]]), "h")
    return GroupSpec((g, h), GroupClass.FUCHSIAN, n)


PRESETS: Dict[str, Callable[..., GroupSpec]] = {
    "cyclic_loxodromic": cyclic_loxodromic,
    "cyclic_parabolic": cyclic_parabolic,
    "rotation": rotation,
    "schottky_pair": schottky_pair,
    "fuchsian_sample": fuchsian_sample,
}

ALIASES = {"cyclic": "cyclic_loxodromic", "schottky": "schottky_pair",
           "parabolic": "cyclic_parabolic", "fuchsian": "fuchsian_sample"}


def build_preset(name: str, n: int = 2, lam: float = 2.0, theta: float = np.pi / 3) -> GroupSpec:
    """Resolve a preset by name (aliases accepted) with its parameters."""
    key = ALIASES.get(name, name)
    if key not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}", {"known": sorted(PRESETS)})
    if key == "cyclic_loxodromic":
        return cyclic_loxodromic(lam, n)
    if key == "rotation":
        return rotation(theta, n)
    return PRESETS[key](n=n)
