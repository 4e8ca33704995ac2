"""
PSL(2,C): element classification, fixed points, rank-one KAK, and finitely
generated groups given by generators, with reduced-word enumeration and a
CP^1 limit-set approximation by attracting fixed points of loxodromic words.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from sources.errors import (
    BudgetExceeded,
    GeometryError,
    IdentityElement,
    NoLoxodromicFound,
    PreconditionViolated,
    UnknownGenerator,
)
from sources.logger import Logger
from sources.projlin import ProjPoint, chordal_distance, normalize_projective, svd

DET_TOL = 1e-12
IDENTITY_TOL = 1e-10
TRACE_TOL = 1e-9
WORD_CAP = 5_000_000

logger = Logger("moebius.log")


class ElementType(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"


class FixedPointRole(str, Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


class GroupClass(str, Enum):
    SCHOTTKY = "schottky"
    CYCLIC_LOXODROMIC = "cyclic_loxodromic"
    FUCHSIAN = "fuchsian"
    OTHER = "other"


def inverse_token(token: str) -> str:
    return token[:-3] if token.endswith("^-1") else f"{token}^-1"


def invert_label(label: Optional[str]) -> Optional[str]:
    if label is None:
        return None
    return " ".join(inverse_token(t) for t in reversed(label.split()))


@dataclass(frozen=True, eq=False)
class MoebiusElement:
    """
    A fixed SL(2,C) lift of an element of PSL(2,C).
    The determinant is accepted when |det A - 1| <= DET_TOL * max(1, ||A||_F^2): the absolute DET_TOL
    for entries of size up to 1, scaled by the squared entries beyond, which is the size of the
    rounding in the determinant of a long word.
    """
    mat: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.shape != (2, 2):
            raise GeometryError(f"Moebius matrix must be 2x2, got {mat.shape}")
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        scale = max(1.0, float(np.sum(np.abs(mat) ** 2)))
        if abs(det - 1.0) > DET_TOL * scale:
            raise GeometryError("Moebius matrix must have determinant 1",
                                {"det": complex(det), "label": self.label})
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_matrix(cls, matrix, label: Optional[str] = None) -> "MoebiusElement":
        """Rescale an invertible 2x2 matrix to determinant 1."""
        mat = np.asarray(matrix, dtype=complex)
        det = np.linalg.det(mat)
        if abs(det) == 0:
            raise GeometryError("singular matrix has no SL(2,C) lift")
        return cls(mat / np.sqrt(det), label)

    @classmethod
    def identity(cls) -> "MoebiusElement":
        return cls(np.eye(2), "")

    @property
    def trace(self) -> complex:
        return complex(self.mat[0, 0] + self.mat[1, 1])

    @property
    def length(self) -> int:
        return len(self.label.split()) if self.label else 0

    def inverse(self) -> "MoebiusElement":
        m = self.mat
        adjugate = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        return MoebiusElement(adjugate, invert_label(self.label))

    def __matmul__(self, other: "MoebiusElement") -> "MoebiusElement":
        labels = [lbl for lbl in (self.label, other.label) if lbl]
        return MoebiusElement(self.mat @ other.mat, " ".join(labels) if labels else None)

    def conjugate_by(self, other: "MoebiusElement") -> "MoebiusElement":
        """other . self . other^-1, keeping this element's label."""
        return MoebiusElement(other.mat @ self.mat @ other.inverse().mat, self.label)

    def __str__(self):
        return f"MoebiusElement({self.label or '?'}: {self.mat.tolist()})"


@dataclass(frozen=True)
class FixedPoint:
    point: ProjPoint
    role: FixedPointRole


@dataclass(frozen=True, eq=False)
class Kak2:
    """A = u @ diag(sigma1, 1/sigma1) @ v with u, v in SU(2)."""
    u: np.ndarray
    sigma1: float
    v: np.ndarray

    def diagonal(self) -> np.ndarray:
        return np.diag([self.sigma1, 1.0 / self.sigma1]).astype(complex)

    def reconstruct(self) -> np.ndarray:
        return self.u @ self.diagonal() @ self.v


def classify(element: MoebiusElement) -> ElementType:
    """Trace classification, thresholds IDENTITY_TOL and TRACE_TOL."""
    m = element.mat
    eye = np.eye(2)
    if min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))) <= IDENTITY_TOL:
        return ElementType.IDENTITY
    tr = element.trace
    if abs(tr * tr - 4.0) <= TRACE_TOL:
        return ElementType.PARABOLIC
    if abs(tr.imag) <= TRACE_TOL and abs(tr.real) < 2.0:
        return ElementType.ELLIPTIC
    return ElementType.LOXODROMIC


def _eigenvector(m: np.ndarray, value: complex) -> np.ndarray:
    """Kernel direction of m - value*I, taken from its better-conditioned row."""
    first = np.array([m[0, 1], value - m[0, 0]])
    second = np.array([value - m[1, 1], m[1, 0]])
    candidate = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    if np.linalg.norm(candidate) <= 1e-14:
        # m is (numerically) scalar on this eigenvalue
        return np.array([1.0, 0.0])
    return candidate


def fixed_points(element: MoebiusElement) -> List[FixedPoint]:
    """
    Fixed points in CP^1 with their dynamical role.
    Loxodromic: attracting (larger |eigenvalue|) first, then repelling.
    Parabolic: a single neutral point. Elliptic: two neutral points.
    """
    kind = classify(element)
    if kind == ElementType.IDENTITY:
        raise IdentityElement("the identity fixes every point", {"label": element.label})
    m = element.mat
    tr = element.trace
    if kind == ElementType.PARABOLIC:
        return [FixedPoint(normalize_projective(_eigenvector(m, tr / 2.0)), FixedPointRole.NEUTRAL)]
    root = np.sqrt(tr * tr - 4.0)
    big = (tr + root) / 2.0 if abs(tr + root) >= abs(tr - root) else (tr - root) / 2.0
    small = 1.0 / big
    first = normalize_projective(_eigenvector(m, big))
    second = normalize_projective(_eigenvector(m, small))
    if kind == ElementType.LOXODROMIC:
        return [FixedPoint(first, FixedPointRole.ATTRACTING), FixedPoint(second, FixedPointRole.REPELLING)]
    return [FixedPoint(first, FixedPointRole.NEUTRAL), FixedPoint(second, FixedPointRole.NEUTRAL)]


def attracting_point(element: MoebiusElement) -> ProjPoint:
    points = fixed_points(element)
    if points[0].role != FixedPointRole.ATTRACTING:
        raise PreconditionViolated("element is not loxodromic", {"label": element.label})
    return points[0].point


def repelling_point(element: MoebiusElement) -> ProjPoint:
    points = fixed_points(element)
    if points[0].role != FixedPointRole.ATTRACTING:
        raise PreconditionViolated("element is not loxodromic", {"label": element.label})
    return points[1].point


def act(element: MoebiusElement, p: ProjPoint) -> ProjPoint:
    if p.dim_ambient != 1:
        raise GeometryError(f"Moebius elements act on CP^1, got a point of CP^{p.dim_ambient}")
    return normalize_projective(element.mat @ p.coords)


def _su2(unitary: np.ndarray) -> np.ndarray:
    return unitary / np.sqrt(np.linalg.det(unitary))


def kak2(element: MoebiusElement) -> Kak2:
    """Rank-one KAK: A = u diag(sigma1, 1/sigma1) v, u and v of determinant 1."""
    triple = svd(element.mat)
    sigma1 = float(max(triple.sigma[0], 1.0))
    u = _su2(triple.u)
    v = _su2(triple.v.conj().T)
    a = np.diag([sigma1, 1.0 / sigma1])
    if np.linalg.norm(u @ a @ v - element.mat) > np.linalg.norm(u @ a @ v + element.mat):
        v = -v
    return Kak2(u=u, sigma1=sigma1, v=v)


def normalized_power(element: MoebiusElement, m: int) -> np.ndarray:
    """
    A^m scaled to unit Frobenius norm (a projective representative, not in SL(2,C)).
    Parabolic powers use A^m = zeta^m (I + m zeta N), N = A - zeta I, which avoids the
    cancellation of repeated squaring.
    """
    mat = element.mat if m >= 0 else element.inverse().mat
    exponent = abs(m)
    if exponent == 0:
        return np.eye(2, dtype=complex) / np.sqrt(2.0)
    if classify(MoebiusElement(mat)) == ElementType.PARABOLIC:
        zeta = np.sign((mat[0, 0] + mat[1, 1]).real) or 1.0
        power = np.eye(2) / exponent + zeta * (mat - zeta * np.eye(2))
        return power / np.linalg.norm(power)
    result = np.eye(2, dtype=complex)
    base = mat / np.linalg.norm(mat)
    while exponent:
        if exponent & 1:
            result = result @ base
            result = result / np.linalg.norm(result)
        exponent >>= 1
        if exponent:
            base = base @ base
            base = base / np.linalg.norm(base)
    return result


@dataclass(frozen=True)
class GroupSpec:
    """
    A finitely generated subgroup of PSL(2,C) given by labelled generators.
    asserted_class is the user's claim about the group; it is not verified.
    """
    generators: Tuple[MoebiusElement, ...]
    asserted_class: GroupClass = GroupClass.OTHER
    n: int = 2

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise PreconditionViolated("a group needs at least one generator")
        names = [g.label for g in gens]
        for name in names:
            if not name or " " in name or "^" in name:
                raise PreconditionViolated(f"invalid generator name {name!r}")
        if len(set(names)) != len(names):
            raise PreconditionViolated("generator names must be unique", {"names": names})
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "asserted_class", GroupClass(self.asserted_class))

    @property
    def names(self) -> List[str]:
        return [g.label for g in self.generators]

    def alphabet(self) -> List[MoebiusElement]:
        """Letters g_1, g_1^-1, g_2, g_2^-1, ... in this order."""
        letters = []
        for g in self.generators:
            letters.append(g)
            letters.append(g.inverse())
        return letters

    def generator(self, name: str) -> MoebiusElement:
        for g in self.generators:
            if g.label == name:
                return g
        raise UnknownGenerator(f"unknown generator {name!r}", {"known": self.names})

    def conjugate(self, other: MoebiusElement) -> "GroupSpec":
        return GroupSpec(tuple(g.conjugate_by(other) for g in self.generators),
                         self.asserted_class, self.n)


def evaluate_word(group: GroupSpec, tokens: List[Tuple[str, int]]) -> MoebiusElement:
    """
    Product of generator powers, left to right.
    Args:
        tokens: (generator name, nonzero exponent) pairs.
    """
    result = MoebiusElement.identity()
    labels = []
    for name, power in tokens:
        g = group.generator(name)
        step = g if power > 0 else g.inverse()
        letter = name if power > 0 else f"{name}^-1"
        for _ in range(abs(power)):
            result = MoebiusElement(result.mat @ step.mat)
            labels.append(letter)
    return MoebiusElement(result.mat, " ".join(labels))


def reduced_word_count(generator_count: int, max_length: int, min_length: int = 1) -> int:
    """Number of freely reduced words with length in [min_length, max_length]."""
    letters = 2 * generator_count
    return sum(letters * (letters - 1) ** (length - 1) for length in range(max(1, min_length), max_length + 1))


def enumerate_words(group: GroupSpec, max_length: int, cap: int = WORD_CAP,
                    min_length: int = 1) -> Iterator[MoebiusElement]:
    """
    Stream all freely reduced words of length in [min_length, max_length],
    by length, then lexicographically in the alphabet order g, g^-1, h, h^-1, ...
    """
    if max_length < 1:
        raise PreconditionViolated("max word length must be at least 1", {"lmax": max_length})
    total = reduced_word_count(len(group.generators), max_length, min_length)
    if total > cap:
        raise BudgetExceeded(f"{total} words exceed the cap of {cap}",
                             {"words": total, "cap": cap, "lmax": max_length})
    letters = group.alphabet()
    inverse_of = [i ^ 1 for i in range(len(letters))]
    level = [(letter, index) for index, letter in enumerate(letters)]
    for length in range(1, max_length + 1):
        if length >= min_length:
            for element, _ in level:
                yield element
        if length == max_length:
            break
        level = [(element @ letters[j], j)
                 for element, last in level
                 for j in range(len(letters)) if j != inverse_of[last]]


@dataclass(frozen=True)
class LimitPoint:
    point: ProjPoint
    word: MoebiusElement


def hopf_coordinates(points: List[ProjPoint]) -> np.ndarray:
    """Points of CP^1 on the unit sphere; euclidean distance there is twice the chordal distance."""
    return hopf_array(np.array([p.coords for p in points]))


def hopf_array(coords: np.ndarray) -> np.ndarray:
    """Hopf map of an (m, 2) array of homogeneous coordinates, any scaling."""
    coords = np.asarray(coords, dtype=complex)
    coords = coords / np.linalg.norm(coords, axis=1, keepdims=True)
    z, w = coords[:, 0], coords[:, 1]
    cross = 2.0 * z * np.conj(w)
    return np.column_stack([cross.real, cross.imag, np.abs(z) ** 2 - np.abs(w) ** 2])


def dedup_points(points: List[ProjPoint], tol: float) -> List[int]:
    """
    Greedy deduplication in input order: keep a point unless an earlier kept point
    lies within chordal distance tol. Returns indices of kept points.
    """
    if not points:
        return []
    if points[0].dim_ambient == 1:
        tree = cKDTree(hopf_coordinates(points))
        removed = np.zeros(len(points), dtype=bool)
        kept = []
        for index in range(len(points)):
            if removed[index]:
                continue
            kept.append(index)
            for neighbour in tree.query_ball_point(tree.data[index], r=2.0 * tol):
                if neighbour > index:
                    removed[neighbour] = True
        return kept
    kept = []
    for index, p in enumerate(points):
        if all(chordal_distance(points[k], p) > tol for k in kept):
            kept.append(index)
    return kept


def limit_points_cp1(group: GroupSpec, max_length: int, dedup_tol: float = 1e-6,
                     cap: int = WORD_CAP) -> List[LimitPoint]:
    """
    Attracting fixed points of all loxodromic reduced words up to max_length,
    deduplicated at chordal distance dedup_tol, each with the first word producing it.
    """
    candidates = []
    for word in enumerate_words(group, max_length, cap):
        if classify(word) == ElementType.LOXODROMIC:
            candidates.append(LimitPoint(attracting_point(word), word))
    if not candidates:
        raise NoLoxodromicFound(f"no loxodromic word of length <= {max_length}",
                                {"generators": group.names, "lmax": max_length})
    kept = dedup_points([c.point for c in candidates], dedup_tol)
    logger.info(f"CP^1 limit sample: {len(candidates)} loxodromic words, {len(kept)} distinct points "
                f"(lmax={max_length}, dedup_tol={dedup_tol})")
    return [candidates[i] for i in kept]


def limit_set_cp1(group: GroupSpec, max_length: int, dedup_tol: float = 1e-6,
                  cap: int = WORD_CAP) -> List[ProjPoint]:
    return [lp.point for lp in limit_points_cp1(group, max_length, dedup_tol, cap)]


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed SU(2) element."""
    q = rng.standard_normal(4)
    q = q / np.linalg.norm(q)
    a, b = complex(q[0], q[1]), complex(q[2], q[3])
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def random_element(rng: np.random.Generator, kind: ElementType, spread: float = 1.5,
                   log_modulus: Tuple[float, float] = (0.2, 2.0)) -> MoebiusElement:
    """
    A random element of the requested class: a normal form conjugated by k . diag(r, 1/r) . k'
    with k, k' in SU(2) and 1 <= r <= spread, so the conjugator has condition number <= spread^2.
    """
    r = rng.uniform(1.0, spread)
    conjugator = random_unitary(rng) @ np.diag([r, 1.0 / r]) @ random_unitary(rng)
    if kind == ElementType.LOXODROMIC:
        modulus = np.exp(rng.uniform(*log_modulus))
        lam = modulus * np.exp(1j * rng.uniform(-np.pi, np.pi))
        normal = np.diag([lam, 1.0 / lam])
    elif kind == ElementType.ELLIPTIC:
        theta = rng.uniform(0.2, np.pi - 0.2)
        normal = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
    elif kind == ElementType.PARABOLIC:
        shift = complex(*rng.standard_normal(2))
        shift = shift / abs(shift) * rng.uniform(0.5, 2.0)
        normal = np.array([[1.0, shift], [0.0, 1.0]])
    else:
        normal = np.eye(2)
    mat = conjugator @ normal @ np.linalg.inv(conjugator)
    return MoebiusElement.from_matrix(mat)
