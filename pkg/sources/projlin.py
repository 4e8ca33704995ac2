"""
Projective numerical linear algebra on CP^k.

Points are stored as canonical unit vectors, subspaces as orthonormal bases,
singular value decompositions as (u, sigma, v) with input = u diag(sigma) v*.
Every object is immutable once built and every function is pure.
"""

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
import scipy.linalg

from sources.errors import (
    DimensionMismatch,
    GeometryError,
    NoGap,
    NumericalFailure,
    SingularInput,
    ZeroVector,
)

NORM_TOL = 1e-12
PHASE_TOL = 1e-12
ZERO_NORM = 1e-300
ORTHO_TOL = 1e-10
FLAG_TOL = 1e-8
GAP_TOL = 1e-6
RECONSTRUCTION_TOL = 1e-10
# sigma_min / sigma_max below this counts as a singular matrix
SINGULAR_RTOL = 1e-15


def _as_vector(v) -> np.ndarray:
    return np.asarray(v, dtype=complex).ravel()


def _as_square(matrix) -> np.ndarray:
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {mat.shape}",
                                {"shape": list(mat.shape)})
    return mat


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate v so its first coordinate of modulus > PHASE_TOL is real positive."""
    significant = np.flatnonzero(np.abs(v) > PHASE_TOL)
    if significant.size == 0:
        return v
    lead = v[significant[0]]
    out = v * (abs(lead) / lead)
    out[significant[0]] = abs(lead)
    return out


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of CP^k given by its canonical homogeneous coordinates."""
    coords: np.ndarray

    def __post_init__(self):
        coords = _as_vector(self.coords).copy()
        if abs(np.linalg.norm(coords) - 1.0) > NORM_TOL:
            raise GeometryError("ProjPoint coordinates must have unit norm, use normalize_projective",
                                {"norm": float(np.linalg.norm(coords))})
        significant = np.flatnonzero(np.abs(coords) > PHASE_TOL)
        lead = coords[significant[0]]
        if abs(lead.imag) > PHASE_TOL or lead.real <= 0:
            raise GeometryError("ProjPoint coordinates are not in canonical phase")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def dim_ambient(self) -> int:
        return self.coords.size - 1

    def as_subspace(self) -> "ProjSubspace":
        return ProjSubspace(self.coords.reshape(-1, 1))

    def jsonify(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.coords]

    def __str__(self):
        inner = " : ".join(f"{c.real:.6g}{c.imag:+.6g}i" for c in self.coords)
        return f"[{inner}]"


def normalize_projective(v) -> ProjPoint:
    """
    Canonical representative of the projective class of v.
    Args:
        v: nonzero complex vector.
    Returns:
        ProjPoint: unit norm, first significant coordinate real positive.
    """
    vec = _as_vector(v)
    if not np.all(np.isfinite(vec)):
        raise ZeroVector("vector has non-finite entries")
    norm = np.linalg.norm(vec)
    if norm <= ZERO_NORM:
        raise ZeroVector("cannot projectivize the zero vector", {"norm": float(norm)})
    return ProjPoint(canonical_phase(vec / norm))


def _check_same_ambient(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"ambient dimensions differ: CP^{a} vs CP^{b}", {"left": a, "right": b})


def chordal_distance(p: ProjPoint, q: ProjPoint) -> float:
    """sqrt(1 - |<p,q>|^2), computed as the norm of the part of q orthogonal to p."""
    _check_same_ambient(p.dim_ambient, q.dim_ambient)
    residual = q.coords - p.coords * np.vdot(p.coords, q.coords)
    return float(min(1.0, np.linalg.norm(residual)))


@dataclass(frozen=True, eq=False)
class ProjSubspace:
    """
    A projective subspace of CP^k spanned by the orthonormal columns of basis.
    A hyperplane can also be addressed through its dual covector.
    """
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        rows, cols = basis.shape
        if not 1 <= cols <= rows:
            raise GeometryError(f"subspace basis must have between 1 and {rows} columns, got {cols}")
        gram_defect = np.linalg.norm(basis.conj().T @ basis - np.eye(cols))
        if gram_defect > ORTHO_TOL:
            raise GeometryError("subspace basis is not orthonormal", {"defect": float(gram_defect)})
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_span(cls, vectors, rank_rtol: float = 1e-12) -> "ProjSubspace":
        """Orthonormal basis of the column span of vectors (columns), rank decided at rank_rtol."""
        mat = np.asarray(vectors, dtype=complex)
        if mat.ndim == 1:
            mat = mat.reshape(-1, 1)
        basis = scipy.linalg.orth(mat, rcond=rank_rtol)
        if basis.shape[1] == 0:
            raise ZeroVector("cannot span a subspace from zero vectors")
        return cls(basis)

    @classmethod
    def from_covector(cls, covector) -> "ProjSubspace":
        """Hyperplane {x : sum_j covector_j x_j = 0}."""
        eta = _as_vector(covector)
        if np.linalg.norm(eta) <= ZERO_NORM:
            raise ZeroVector("zero covector does not define a hyperplane")
        return cls(scipy.linalg.null_space(eta.reshape(1, -1)))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def proj_dim(self) -> int:
        return self.dim - 1

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0] - 1

    @property
    def is_hyperplane(self) -> bool:
        return self.dim == self.dim_ambient

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def complement_basis(self) -> np.ndarray:
        """Orthonormal basis of the Hermitian orthogonal complement."""
        return scipy.linalg.null_space(self.basis.conj().T)

    def covector(self) -> ProjPoint:
        """Dual covector of a hyperplane, canonical phase and unit norm."""
        if not self.is_hyperplane:
            raise GeometryError(f"proj_dim {self.proj_dim} subspace of CP^{self.dim_ambient} is not a hyperplane")
        normal = self.complement_basis()[:, 0]
        return normalize_projective(normal.conj())

    def contains(self, other: "ProjSubspace", tol: float = FLAG_TOL) -> bool:
        _check_same_ambient(self.dim_ambient, other.dim_ambient)
        residual = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return bool(np.linalg.norm(residual, 2) <= tol)

    def contains_point(self, p: ProjPoint, tol: float = FLAG_TOL) -> bool:
        return point_subspace_distance(p, self) <= tol

    def map(self, matrix) -> "ProjSubspace":
        """Image of the subspace under an invertible linear map."""
        return ProjSubspace.from_span(np.asarray(matrix, dtype=complex) @ self.basis)

    def jsonify(self) -> list:
        return [[[float(c.real), float(c.imag)] for c in col] for col in self.basis.T]


@dataclass(frozen=True, eq=False)
class Flag:
    """Nested projective subspaces with strictly increasing dimension."""
    steps: Tuple[ProjSubspace, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise GeometryError("a flag needs at least one step")
        for lower, upper in zip(steps, steps[1:]):
            if upper.dim <= lower.dim:
                raise GeometryError("flag dimensions must increase strictly",
                                    {"dims": [s.dim for s in steps]})
            if not upper.contains(lower, FLAG_TOL):
                raise GeometryError("flag steps are not nested",
                                    {"dims": [lower.dim, upper.dim]})
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[ProjSubspace]:
        return iter(self.steps)

    def __getitem__(self, index: int) -> ProjSubspace:
        return self.steps[index]

    def map(self, matrix) -> "Flag":
        return Flag(tuple(step.map(matrix) for step in self.steps))


@dataclass(frozen=True, eq=False)
class SVDTriple:
    """input = u @ diag(sigma) @ v^*"""
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if np.any(self.sigma < 0) or np.any(np.diff(self.sigma) > 0):
            raise GeometryError("singular values must be non-negative and non-increasing")

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.conj().T


def svd(matrix) -> SVDTriple:
    """
    Complex singular value decomposition of a square matrix (LAPACK gesdd, gesvd as fallback).
    Raises NumericalFailure when neither driver converges or the reconstruction is off.
    """
    mat = _as_square(matrix)
    if not np.all(np.isfinite(mat)):
        raise NumericalFailure("matrix has non-finite entries")
    try:
        u, sigma, vh = scipy.linalg.svd(mat, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        try:
            u, sigma, vh = scipy.linalg.svd(mat, lapack_driver="gesvd")
        except np.linalg.LinAlgError as e:
            raise NumericalFailure("SVD iteration did not converge",
                                   {"frobenius_norm": float(np.linalg.norm(mat)),
                                    "max_entry": float(np.max(np.abs(mat)))}) from e
    triple = SVDTriple(u=u, sigma=sigma, v=vh.conj().T)
    scale = np.linalg.norm(mat)
    error = np.linalg.norm(triple.reconstruct() - mat)
    if error > RECONSTRUCTION_TOL * max(scale, ZERO_NORM):
        raise NumericalFailure("SVD reconstruction error above tolerance",
                               {"error": float(error), "frobenius_norm": float(scale),
                                "condition": float(sigma[0] / sigma[-1]) if sigma[-1] > 0 else float("inf")})
    return triple


def singular_values(matrix) -> np.ndarray:
    return svd(matrix).sigma


def _check_invertible(sigma: np.ndarray, singular_rtol: float) -> None:
    if sigma[0] == 0 or sigma[-1] <= singular_rtol * sigma[0]:
        raise SingularInput("matrix is numerically singular",
                            {"sigma_max": float(sigma[0]), "sigma_min": float(sigma[-1])})


def singular_gaps(matrix, gap_tol: float = GAP_TOL,
                  singular_rtol: float = SINGULAR_RTOL) -> List[Tuple[int, float]]:
    """
    Indices p (1-based) where sigma_{p+1}/sigma_p < 1 - gap_tol, with the ratio.
    """
    sigma = svd(matrix).sigma
    _check_invertible(sigma, singular_rtol)
    ratios = sigma[1:] / sigma[:-1]
    return [(p + 1, float(r)) for p, r in enumerate(ratios) if r < 1.0 - gap_tol]


def _gap_ratio(sigma: np.ndarray, p: int) -> float:
    if not 1 <= p < sigma.size:
        raise NoGap(f"gap index p={p} outside 1..{sigma.size - 1}", {"p": p})
    if sigma[p - 1] == 0:
        return 1.0
    return float(sigma[p] / sigma[p - 1])


def dominant_subspace(matrix, p: int, gap_tol: float = GAP_TOL) -> ProjSubspace:
    """U_p: span of the first p left singular vectors; requires a gap of index p."""
    triple = svd(matrix)
    ratio = _gap_ratio(triple.sigma, p)
    if ratio >= 1.0 - gap_tol:
        raise NoGap(f"no singular gap of index {p}", {"p": p, "ratio": ratio})
    return ProjSubspace(triple.u[:, :p])


def repelling_subspace(matrix, p: int, gap_tol: float = GAP_TOL,
                       singular_rtol: float = SINGULAR_RTOL) -> ProjSubspace:
    """S_{n-p} = U_{n-p}(M^{-1}): span of the last (dim - p) right singular vectors."""
    triple = svd(matrix)
    _check_invertible(triple.sigma, singular_rtol)
    ratio = _gap_ratio(triple.sigma, p)
    if ratio >= 1.0 - gap_tol:
        raise NoGap(f"no singular gap of index {p}", {"p": p, "ratio": ratio})
    return ProjSubspace(triple.v[:, p:])


def subspace_distance(a: ProjSubspace, b: ProjSubspace) -> float:
    """
    Frobenius distance of orthogonal projectors, scaled to [0, 1].
    Equals sqrt(mean of sin^2 of the principal angles) over the maximal possible count.
    """
    _check_same_ambient(a.dim_ambient, b.dim_ambient)
    if a.dim != b.dim:
        raise DimensionMismatch(f"subspaces have different dimensions {a.dim} and {b.dim}",
                                {"left": a.dim, "right": b.dim})
    size = a.dim_ambient + 1
    max_angles = min(a.dim, size - a.dim)
    if max_angles == 0:
        return 0.0
    # equal dimensions: ||P_a - P_b||_F^2 = 2 ||(I - P_a) B||_F^2
    residual = b.basis - a.basis @ (a.basis.conj().T @ b.basis)
    squared = 2.0 * np.linalg.norm(residual) ** 2
    return float(min(1.0, np.sqrt(squared / (2.0 * max_angles))))


def point_subspace_distance(p: ProjPoint, subspace: ProjSubspace) -> float:
    """Chordal distance from p to its orthogonal projection into the subspace."""
    _check_same_ambient(p.dim_ambient, subspace.dim_ambient)
    basis = subspace.basis
    residual = p.coords - basis @ (basis.conj().T @ p.coords)
    return float(min(1.0, np.linalg.norm(residual)))


def transversality(a: ProjSubspace, b: ProjSubspace) -> float:
    """Smallest singular value of the stacked bases; > 0 iff a and b are in direct sum."""
    _check_same_ambient(a.dim_ambient, b.dim_ambient)
    stacked = np.hstack([a.basis, b.basis])
    return float(scipy.linalg.svdvals(stacked)[-1]) if stacked.shape[1] <= stacked.shape[0] else 0.0


def eigen_moduli(matrix) -> np.ndarray:
    """Eigenvalue moduli sorted in decreasing order."""
    mat = _as_square(matrix)
    try:
        values = scipy.linalg.eigvals(mat)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure("eigenvalue iteration did not converge") from e
    return np.sort(np.abs(values))[::-1]


def is_proximal(matrix, gap_tol: float = GAP_TOL) -> bool:
    """A unique eigenvalue of maximal modulus."""
    moduli = eigen_moduli(matrix)
    return bool(moduli.size == 1 or moduli[1] < (1.0 - gap_tol) * moduli[0])


def dominant_vector(matrix, gap_tol: float = GAP_TOL) -> ProjPoint:
    """Eigendirection of the maximal-modulus eigenvalue of a proximal matrix."""
    mat = _as_square(matrix)
    try:
        values, vectors = scipy.linalg.eig(mat)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure("eigenvector iteration did not converge") from e
    order = np.argsort(-np.abs(values))
    if values.size > 1 and abs(values[order[1]]) >= (1.0 - gap_tol) * abs(values[order[0]]):
        raise NoGap("matrix is not proximal",
                    {"top_moduli": [float(abs(values[order[0]])), float(abs(values[order[1]]))]})
    return normalize_projective(vectors[:, order[0]])


def standard_subspace(size: int, indices: Sequence[int]) -> ProjSubspace:
    """span{e_i : i in indices} with 0-based indices."""
    basis = np.zeros((size, len(indices)), dtype=complex)
    for col, index in enumerate(indices):
        basis[index, col] = 1.0
    return ProjSubspace(basis)


def random_points(rng: np.random.Generator, count: int, dim_ambient: int) -> List[ProjPoint]:
    """Points of CP^k with complex Gaussian coordinates, i.e. uniform for the Fubini-Study measure."""
    raw = rng.standard_normal((count, dim_ambient + 1)) + 1j * rng.standard_normal((count, dim_ambient + 1))
    return [normalize_projective(row) for row in raw]
