"""
The Veronese embedding of CP^1 into CP^n, the irreducible representation of
SL(2,C) on degree-n binary forms, osculating flags of the Veronese curve and
the classification of projective transformations.

Coordinates on CP^n are the weighted coordinates [x^n : C(n,1)x^{n-1}y : ... : y^n].
Metric quantities of representation matrices (singular values, KAK factors)
are taken in the SU(2)-invariant frame D^{-1} M D with D = diag(sqrt(C(n,j))),
see unitary_frame.
"""

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import sympy
from scipy.optimize import minimize

from sources.errors import (
    DimensionMismatch,
    DuplicatePoints,
    GeometryError,
    NonRationalInput,
    NumericalFailure,
    PreconditionViolated,
    ZeroVector,
)
from sources.logger import Logger
from sources.moebius import ElementType, MoebiusElement
from sources.projlin import (
    Flag,
    ProjPoint,
    ProjSubspace,
    chordal_distance,
    normalize_projective,
    svd,
)

REP_DET_TOL = 1e-9
CURVE_TOL = 1e-8
CONTACT_TOL = 1e-8
# spectral radius log-growth below this counts as "all moduli equal"
GROWTH_TOL = 1e-7
# eigenvector condition numbers above this count as non-diagonalizable
DIAGONALIZABLE_COND = 1e8
SQUARINGS = 40
NILPOTENT_TOL = 1e-6

logger = Logger("veronese.log")


def check_degree(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise PreconditionViolated(f"degree n must be an integer >= 2, got {n!r}", {"n": n})


@dataclass(frozen=True, eq=False)
class RepMatrix:
    """The image irrep(A) of an SL(2,C) lift, with the label of A."""
    mat: np.ndarray
    n: int
    source: Optional[str] = None

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.shape != (self.n + 1, self.n + 1):
            raise DimensionMismatch(f"representation matrix of degree {self.n} must be "
                                    f"{self.n + 1}x{self.n + 1}, got {mat.shape}")
        # Hadamard bound on |det| sets the scale of rounding in det
        scale = max(1.0, float(np.prod(np.linalg.norm(mat, axis=0))))
        det = np.linalg.det(mat)
        if abs(det - 1.0) > REP_DET_TOL * scale:
            raise GeometryError("representation matrix must have determinant 1",
                                {"det": complex(det), "source": self.source})
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def __matmul__(self, other: "RepMatrix") -> "RepMatrix":
        if self.n != other.n:
            raise DimensionMismatch("representation degrees differ", {"left": self.n, "right": other.n})
        labels = [lbl for lbl in (self.source, other.source) if lbl]
        return RepMatrix(self.mat @ other.mat, self.n, " ".join(labels) if labels else None)

    def unitary(self) -> np.ndarray:
        return unitary_frame(self.mat, self.n)


def binomials(n: int) -> np.ndarray:
    return np.array([comb(n, j) for j in range(n + 1)], dtype=float)


def embed(p: ProjPoint, n: int) -> ProjPoint:
    """psi_n([x:y]) = [x^n : C(n,1) x^{n-1} y : ... : y^n]."""
    check_degree(n)
    if p.dim_ambient != 1:
        raise DimensionMismatch(f"embed expects a point of CP^1, got CP^{p.dim_ambient}")
    return normalize_projective(embedded_coordinates(p.coords, n))


def embedded_coordinates(xy: np.ndarray, n: int) -> np.ndarray:
    """Unnormalized weighted coordinates; xy may be a single pair or an (m, 2) array."""
    xy = np.asarray(xy, dtype=complex)
    j = np.arange(n + 1)
    x = xy[..., 0:1]
    y = xy[..., 1:2]
    return binomials(n) * x ** (n - j) * y ** j


def unitary_frame(matrix, n: int) -> np.ndarray:
    """D^{-1} M D, in which irrep(unitary) is unitary."""
    scale = np.sqrt(binomials(n))
    mat = np.asarray(matrix, dtype=complex)
    return mat / scale[:, None] * scale[None, :]


def subspace_from_unitary_frame(basis, n: int) -> ProjSubspace:
    """Map a basis given in the invariant frame back to weighted coordinates."""
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim == 1:
        basis = basis.reshape(-1, 1)
    q, _ = np.linalg.qr(np.sqrt(binomials(n))[:, None] * basis)
    return ProjSubspace(q)


@lru_cache(maxsize=None)
def _entry_tensor(n: int) -> Tuple[np.ndarray, ...]:
    """
    Coefficients and exponents of
    irrep(A)[i][j] = sum_k C(n-j,k) C(j,i-k) a^{n-j-k} c^k b^{j-i+k} d^{i-k},
    k from max(i-j, 0) to min(i, n-j). Unused slots carry coefficient 0.
    """
    size = n + 1
    coef = np.zeros((size, size, size))
    exps = np.zeros((4, size, size, size), dtype=int)
    for i in range(size):
        for j in range(size):
            for k in range(max(i - j, 0), min(i, n - j) + 1):
                coef[i, j, k] = comb(n - j, k) * comb(j, i - k)
                exps[:, i, j, k] = (n - j - k, k, j - i + k, i - k)
    for array in (coef, exps):
        array.setflags(write=False)
    return coef, exps[0], exps[1], exps[2], exps[3]


def _power_table(values: np.ndarray, n: int) -> np.ndarray:
    """Column k holds values**k, k = 0..n (0**0 = 1)."""
    table = np.ones((values.size, n + 1), dtype=complex)
    for k in range(1, n + 1):
        table[:, k] = table[:, k - 1] * values
    return table


def irrep_matrices(mats, n: int) -> np.ndarray:
    """
    Closed-form irrep for a batch of 2x2 matrices.
    Args:
        mats: array of shape (2, 2) or (m, 2, 2).
    Returns:
        np.ndarray of shape (n+1, n+1) or (m, n+1, n+1).
    """
    check_degree(n)
    mats = np.asarray(mats, dtype=complex)
    single = mats.ndim == 2
    if single:
        mats = mats[None]
    coef, ea, ec, eb, ed = _entry_tensor(n)
    a, b, c, d = (_power_table(mats[:, r, s], n) for r, s in ((0, 0), (0, 1), (1, 0), (1, 1)))
    terms = coef * a[:, ea] * c[:, ec] * b[:, eb] * d[:, ed]
    out = terms.sum(axis=-1)
    return out[0] if single else out


def irrep(A: MoebiusElement, n: int) -> RepMatrix:
    """The matrix M with M . embed(p) = embed(A . p) for every p, det M = 1."""
    return RepMatrix(irrep_matrices(A.mat, n), n, A.label)


class RepCache:
    """
    In-memory cache of representation matrices keyed by (word label, n).
    Safe to share between worker threads.
    """
    def __init__(self):
        self._store: Dict[Tuple[str, int], RepMatrix] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, A: MoebiusElement, n: int) -> RepMatrix:
        if A.label is None:
            return irrep(A, n)
        key = (A.label, n)
        with self._lock:
            cached = self._store.get(key)
            if cached is not None:
                self.hits += 1
                return cached
        rep = irrep(A, n)
        with self._lock:
            self.misses += 1
            return self._store.setdefault(key, rep)

    def is_cached(self, label: str, n: int) -> bool:
        with self._lock:
            return (label, n) in self._store

    def clear(self) -> None:
        with self._lock:
            logger.info(f"representation cache cleared: {len(self._store)} entries, "
                        f"{self.hits} hits, {self.misses} misses")
            self._store.clear()
            self.hits = self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)


def _to_gaussian_rational(value) -> sympy.Expr:
    if isinstance(value, (bool, np.bool_)):
        raise NonRationalInput(f"boolean entry {value!r}")
    if isinstance(value, (int, np.integer)):
        return sympy.Integer(int(value))
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise NonRationalInput(f"non-finite entry {value!r}")
        # a finite double is an exact dyadic rational
        return sympy.Rational(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return _to_gaussian_rational(value.real) + sympy.I * _to_gaussian_rational(value.imag)
    try:
        expr = sympy.sympify(value)
    except (sympy.SympifyError, TypeError) as e:
        raise NonRationalInput(f"cannot read entry {value!r}") from e
    parts = []
    for part in expr.as_real_imag():
        if isinstance(part, sympy.Float):
            part = sympy.Rational(part)
        if not part.is_Rational:
            raise NonRationalInput(f"entry {value} is not a Gaussian rational", {"entry": str(value)})
        parts.append(part)
    return parts[0] + sympy.I * parts[1]


def irrep_oracle(entries: Sequence[Sequence], n: int) -> sympy.Matrix:
    """
    Exact irrep over the Gaussian rationals by expanding
    C(n,i) (ax+by)^{n-i} (cx+dy)^i in the basis {C(n,j) x^{n-j} y^j}.
    Args:
        entries: 2x2 nested sequence of ints, Fractions, finite floats (read as their exact
            dyadic value), complex numbers or sympy Gaussian rationals.
    """
    check_degree(n)
    (a, b), (c, d) = [[_to_gaussian_rational(v) for v in row] for row in entries]
    if sympy.expand(a * d - b * c) != 1:
        raise PreconditionViolated("oracle input must have determinant exactly 1",
                                   {"det": str(sympy.expand(a * d - b * c))})
    x, y = sympy.symbols("x y")
    rows = []
    for i in range(n + 1):
        form = sympy.Poly(comb(n, i) * (a * x + b * y) ** (n - i) * (c * x + d * y) ** i, x, y)
        rows.append([sympy.expand(form.coeff_monomial(x ** (n - j) * y ** j) / comb(n, j))
                     for j in range(n + 1)])
    return sympy.Matrix(rows)


def oracle_to_numpy(exact: sympy.Matrix) -> np.ndarray:
    return np.array([[complex(entry) for entry in row] for row in exact.tolist()])


@dataclass(frozen=True)
class OsculatingFlag:
    """Osculating flag of the Veronese curve: steps of proj_dim 0 .. n-1 at embed(base_point)."""
    base_point: ProjPoint
    flag: Flag

    @property
    def n(self) -> int:
        return self.flag[0].dim_ambient

    @property
    def curve_point(self) -> ProjPoint:
        return normalize_projective(self.flag[0].basis[:, 0])

    @property
    def hyperplane(self) -> ProjSubspace:
        return self.flag[-1]

    def covector(self) -> ProjPoint:
        return osculating_covector(self.base_point, self.n)

    def step(self, proj_dim: int) -> ProjSubspace:
        return self.flag[proj_dim]


def _chart(p: ProjPoint) -> Tuple[bool, complex]:
    """(True, y/x) in the chart [1:t] when |x| >= |y|, else (False, x/y) in [s:1]."""
    x, y = p.coords
    if abs(x) >= abs(y):
        return True, complex(y / x)
    return False, complex(x / y)


def _derivative_matrix(p: ProjPoint, n: int, order: int) -> np.ndarray:
    """Columns psi^{(k)}(t), k = 0..order-1, in the chart where |t| <= 1."""
    forward, t = _chart(p)
    binom = binomials(n)
    # exponent of the chart parameter in coordinate j
    exponent = np.arange(n + 1) if forward else n - np.arange(n + 1)
    columns = []
    for k in range(order):
        falling = np.ones(n + 1)
        for r in range(k):
            falling = falling * (exponent - r)
        power = np.where(exponent >= k, exponent - k, 0)
        column = np.where(exponent >= k, binom * falling * t ** power, 0.0)
        columns.append(column / np.linalg.norm(column))
    return np.column_stack(columns)


def osculating_flag(p: ProjPoint, n: int) -> OsculatingFlag:
    """
    Step k is span{psi(t), psi'(t), ..., psi^{(k)}(t)}, k = 0..n-1, orthonormalized by QR
    so the steps are nested by construction.
    """
    check_degree(n)
    if p.dim_ambient != 1:
        raise DimensionMismatch(f"osculating_flag expects a point of CP^1, got CP^{p.dim_ambient}")
    q, r = np.linalg.qr(_derivative_matrix(p, n, n))
    if np.min(np.abs(np.diag(r))) <= 1e-14:
        raise NumericalFailure("curve derivatives are numerically dependent", {"n": n})
    steps = tuple(ProjSubspace(q[:, :k + 1]) for k in range(n))
    return OsculatingFlag(base_point=p, flag=Flag(steps))


def osculating_covector(p: ProjPoint, n: int) -> ProjPoint:
    """
    Dual covector of the osculating hyperplane at embed([x:y]): eta_j = x^j (-y)^{n-j},
    so that sum_j eta_j psi_j([u:v]) = (xv - yu)^n.
    """
    check_degree(n)
    x, y = p.coords
    j = np.arange(n + 1)
    return normalize_projective(x ** j * (-y) ** (n - j))


def osculating_hyperplane(p: ProjPoint, n: int) -> ProjSubspace:
    return ProjSubspace.from_covector(osculating_covector(p, n).coords)


def covector_polynomial(covector, n: int, forward: bool = True) -> np.ndarray:
    """
    Coefficients, highest degree first, of t -> <eta, psi([1:t])> (forward chart)
    or s -> <eta, psi([s:1])>.
    """
    eta = np.asarray(covector, dtype=complex).ravel()
    weighted = eta * binomials(n)
    return weighted[::-1] if forward else weighted


def hyperplane_contact(covector, base: ProjPoint, n: int, tol: float = CONTACT_TOL) -> int:
    """
    Contact order of the hyperplane {eta = 0} with the curve at embed(base):
    the number of times (t - t0) divides <eta, psi(t)>, found by repeated deflation.
    """
    check_degree(n)
    forward, t0 = _chart(base)
    coeffs = covector_polynomial(covector, n, forward)
    scale = np.linalg.norm(coeffs)
    if scale == 0:
        raise GeometryError("zero covector")
    order = 0
    while coeffs.size > 1:
        quotient, remainder = np.polydiv(coeffs, np.array([1.0, -t0]))
        if abs(remainder[-1]) > tol * scale:
            break
        order += 1
        coeffs = quotient
    return order


def hyperplane_curve_points(covectors: np.ndarray, n: int) -> List[List[ProjPoint]]:
    """
    Points where each hyperplane meets the curve, with multiplicity (up to n of them).
    Args:
        covectors: array of shape (m, n+1).
    """
    covectors = np.atleast_2d(np.asarray(covectors, dtype=complex))
    weighted = covectors * binomials(n)
    result = []
    for row in weighted:
        scale = np.max(np.abs(row))
        significant = np.flatnonzero(np.abs(row) > 1e-14 * scale)
        # missing top-degree terms are roots at [0:1]
        degree = significant[-1]
        roots = np.roots(row[:degree + 1][::-1]) if degree > 0 else np.array([])
        points = [normalize_projective([1.0, t]) for t in roots]
        points += [normalize_projective([0.0, 1.0])] * (n - degree)
        result.append(points)
    return result


def _eigen_condition(mat: np.ndarray) -> float:
    try:
        _, vectors = scipy.linalg.eig(mat)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure("eigenvector iteration did not converge") from e
    return float(np.linalg.cond(vectors))


def dominant_growth(matrix) -> float:
    """
    Exponential growth rate lim log ||M^m|| / m of a determinant-one matrix, estimated
    by normalized repeated squaring. A normalized power that becomes numerically
    nilpotent means no eigenvalue modulus dominates: the rate is reported as 0.
    """
    mat = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(mat, 2)
    log_norm = np.log(norm)
    x = mat / norm
    for _ in range(SQUARINGS):
        x = x @ x
        step = np.linalg.norm(x, 2)
        if not np.isfinite(step):
            raise NumericalFailure("repeated squaring overflowed")
        if step < NILPOTENT_TOL:
            return 0.0
        log_norm = 2.0 * log_norm + np.log(step)
        x = x / step
    return float(log_norm / 2.0 ** SQUARINGS)


def classify_projective(M) -> ElementType:
    """
    identity: M is a scalar matrix.
    loxodromic: some eigenvalue moduli differ, i.e. spectral radius > 1 at det 1.
    elliptic / parabolic: all moduli equal, diagonalizable or not.
    Works in the invariant frame, which leaves the class unchanged.
    """
    mat = M.mat if isinstance(M, RepMatrix) else np.asarray(M, dtype=complex)
    size = mat.shape[0]
    mat = unitary_frame(mat, size - 1)
    scalar = np.trace(mat) / size
    if np.linalg.norm(mat - scalar * np.eye(size)) <= 1e-9 * np.linalg.norm(mat):
        return ElementType.IDENTITY
    if dominant_growth(mat) > GROWTH_TOL:
        return ElementType.LOXODROMIC
    if _eigen_condition(mat) <= DIAGONALIZABLE_COND:
        return ElementType.ELLIPTIC
    return ElementType.PARABOLIC


@dataclass(frozen=True)
class CurveRank:
    rank: int
    smallest_singular: float
    singular_values: Tuple[float, ...]


def curve_rank_check(points: Sequence[ProjPoint], n: int, duplicate_tol: float = 1e-8) -> CurveRank:
    """Rank of the (n+1) x m matrix of embedded points, with the smallest relevant singular value."""
    check_degree(n)
    points = list(points)
    if not points:
        raise PreconditionViolated("no points given")
    for i in range(len(points)):
        for k in range(i):
            if chordal_distance(points[i], points[k]) <= duplicate_tol:
                raise DuplicatePoints(f"points {k} and {i} coincide",
                                      {"first": k, "second": i, "tol": duplicate_tol})
    matrix = np.column_stack([embed(p, n).coords for p in points])
    sigma = scipy.linalg.svdvals(matrix)
    cutoff = max(matrix.shape) * np.finfo(float).eps * sigma[0]
    rank = int(np.sum(sigma > cutoff))
    expected = min(len(points), n + 1)
    logger.info(f"curve rank check n={n}: {len(points)} points, rank {rank}, "
                f"smallest singular value {sigma[expected - 1]:.3e}")
    return CurveRank(rank=rank, smallest_singular=float(sigma[expected - 1]),
                     singular_values=tuple(float(s) for s in sigma))


def curve_parameter(q: ProjPoint, n: int, tol: float = CURVE_TOL) -> ProjPoint:
    """The point p of CP^1 with embed(p) = q; GeometryError when q is off the curve."""
    check_degree(n)
    if q.dim_ambient != n:
        raise DimensionMismatch(f"expected a point of CP^{n}, got CP^{q.dim_ambient}")
    c = q.coords
    try:
        if abs(c[0]) >= abs(c[n]):
            p = normalize_projective([n * c[0], c[1]])
        else:
            p = normalize_projective([c[n - 1], n * c[n]])
    except ZeroVector as e:
        raise GeometryError("point is not on the Veronese curve", {"tol": tol}) from e
    error = chordal_distance(embed(p, n), q)
    if error > tol:
        raise GeometryError("point is not on the Veronese curve", {"distance": error, "tol": tol})
    return p


def _sphere_grid(count: int) -> np.ndarray:
    """Fibonacci points of the sphere lifted to C^2 (unit vectors)."""
    k = np.arange(count) + 0.5
    polar = np.arccos(1.0 - 2.0 * k / count)
    azimuth = np.pi * (1.0 + 5 ** 0.5) * k
    return np.column_stack([np.cos(polar / 2.0), np.sin(polar / 2.0) * np.exp(1j * azimuth)])


def distance_to_curve(q: ProjPoint, n: int, grid: int = 2000) -> float:
    """Chordal distance from q to the Veronese curve: coarse sphere grid, then local refinement."""
    check_degree(n)
    if q.dim_ambient != n:
        raise DimensionMismatch(f"expected a point of CP^{n}, got CP^{q.dim_ambient}")
    try:
        return chordal_distance(embed(curve_parameter(q, n), n), q)
    except (GeometryError, ZeroVector):
        return _refined_distance(q, n, grid)


def _overlap_gap(xy: np.ndarray, q: np.ndarray, n: int) -> np.ndarray:
    pts = embedded_coordinates(xy, n)
    pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    return 1.0 - np.abs(pts @ q.conj()) ** 2


def _refined_distance(q: ProjPoint, n: int, grid: int) -> float:
    candidates = _sphere_grid(grid)
    gaps = _overlap_gap(candidates, q.coords, n)
    best = float(np.min(gaps))
    for index in np.argsort(gaps)[:4]:
        forward, t0 = _chart(normalize_projective(candidates[index]))

        def objective(params, forward=forward):
            t = complex(params[0], params[1])
            xy = np.array([1.0, t]) if forward else np.array([t, 1.0])
            return float(_overlap_gap(xy / np.linalg.norm(xy), q.coords, n))

        result = minimize(objective, [t0.real, t0.imag], method="Nelder-Mead",
                          options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 2000})
        best = min(best, float(result.fun))
    return float(np.sqrt(max(best, 0.0)))


def recover_moebius(M, n: int) -> MoebiusElement:
    """
    The A in SL(2,C), up to sign, with irrep(A) proportional to M, read off from the images
    of embed([1:0]), embed([0:1]) and embed([1:1]).
    """
    check_degree(n)
    mat = M.mat if isinstance(M, RepMatrix) else np.asarray(M, dtype=complex)
    label = M.source if isinstance(M, RepMatrix) else None
    anchors = [normalize_projective(v) for v in ([1, 0], [0, 1], [1, 1])]
    images = [curve_parameter(normalize_projective(mat @ embed(p, n).coords), n) for p in anchors]
    p0, p1, p2 = (p.coords for p in images)
    alpha, beta = np.linalg.solve(np.column_stack([p0, p1]), p2)
    A = MoebiusElement.from_matrix(np.column_stack([alpha * p0, beta * p1]), label)
    rebuilt = irrep_matrices(A.mat, n)
    ratio = np.vdot(rebuilt, mat) / np.vdot(rebuilt, rebuilt)
    if np.linalg.norm(ratio * rebuilt - mat) > 1e-8 * np.linalg.norm(mat):
        logger.warning(f"recover_moebius: {label or '<unlabelled>'} does not preserve the curve")
        raise GeometryError("matrix is not a projective automorphism of the Veronese curve")
    return A


def rep_singular_values(A: MoebiusElement, n: int) -> np.ndarray:
    """Singular values of irrep(A) in the invariant frame: sigma_1(A)^{n+2-2j}, j = 1..n+1."""
    check_degree(n)
    sigma1 = svd(A.mat).sigma[0]
    return sigma1 ** (n - 2.0 * np.arange(n + 1))


def frame_singular_values(M, n: int) -> np.ndarray:
    """Singular values of a representation matrix measured in the invariant frame."""
    mat = M.mat if isinstance(M, RepMatrix) else M
    return svd(unitary_frame(mat, n)).sigma
