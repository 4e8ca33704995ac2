"""
Limits of divergent sequences in the Veronese group and the limit sets built from them.

A divergent sequence of matrices is normalized to unit Frobenius norm; its limit is a
quasi-projective map whose kernel and image carry the dynamics (lambda-lemma flags,
loxodromic or parabolic type). The Myrberg limit set is sampled as the union of
osculating hyperplanes at the CP^1 limit points, the extended Conze-Guivarc'h set as
the forward flag steps of index (n+2)//2, and the Kulkarni set through an orbit
accumulation proxy.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from sources.errors import (
    BudgetExceeded,
    EmptySequence,
    Inconclusive,
    NotConverged,
    NotDivergent,
    PreconditionViolated,
)
from sources.logger import Logger
from sources.moebius import (
    WORD_CAP,
    ElementType,
    GroupSpec,
    LimitPoint,
    MoebiusElement,
    attracting_point,
    classify,
    dedup_points,
    enumerate_words,
    hopf_array,
    kak2,
    limit_points_cp1,
    normalized_power,
    reduced_word_count,
    repelling_point,
)
from sources.projlin import (
    GAP_TOL,
    PHASE_TOL,
    Flag,
    ProjPoint,
    ProjSubspace,
    dominant_subspace,
    dominant_vector,
    is_proximal,
    normalize_projective,
    random_points,
    subspace_distance,
    svd,
    transversality,
)
from sources.utility import parallel_map
from sources.veronese import (
    RepCache,
    RepMatrix,
    embed,
    irrep_matrices,
    osculating_covector,
    osculating_flag,
    osculating_hyperplane,
    subspace_from_unitary_frame,
    unitary_frame,
)

DEDUP_TOL = 1e-6
RANK_TOL = 1e-6
CONV_TOL = 1e-8
TYPE_TOL = 1e-6
SEP = 0.05
CROSS_TOL = 1e-5
FLAG_AGREEMENT_TOL = 1e-6
GAUGE_TOL = 1e-4
DIVERGENCE_SIGMA = 10.0
MAX_DOUBLINGS = 60
WORD_CHUNK = 4096
# smallest sigma_{q+1}/sigma_1 a measured gap ratio is read from
RATIO_FLOOR = 1e-10

logger = Logger("limits.log")

MatrixLike = Union[RepMatrix, np.ndarray]


class SequenceType(str, Enum):
    LOXODROMIC_TYPE = "loxodromic_type"
    PARABOLIC_TYPE = "parabolic_type"


@dataclass(frozen=True, eq=False)
class QuasiProjLimit:
    """
    Limit of a normalized matrix sequence.
    kernel is None when the limit is invertible (the sequence did not diverge).
    """
    limit_mat: np.ndarray
    kernel: Optional[ProjSubspace]
    image: ProjSubspace
    converged: bool
    residual: float
    singular_values: np.ndarray

    @property
    def quasi_projective(self) -> bool:
        return self.kernel is not None

    @property
    def rank(self) -> int:
        return self.image.dim

    def apply(self, p: ProjPoint) -> ProjPoint:
        """[[T]](p) = [T p], defined off the kernel."""
        return normalize_projective(self.limit_mat @ p.coords)


def normalize_term(matrix) -> np.ndarray:
    """
    Unit Frobenius norm, then rotated so the first entry (row-major) whose modulus is within
    a factor 1 - 1e-6 of the largest is real positive.
    """
    mat = np.asarray(matrix.mat if isinstance(matrix, RepMatrix) else matrix, dtype=complex)
    norm = np.linalg.norm(mat)
    if norm == 0 or not np.isfinite(norm):
        raise PreconditionViolated("sequence term is zero or not finite")
    mat = mat / norm
    moduli = np.abs(mat).ravel()
    lead = mat.ravel()[np.flatnonzero(moduli >= (1.0 - 1e-6) * moduli.max())[0]]
    return mat * (abs(lead) / lead)


def quasi_projective_limit(seq: Sequence[MatrixLike], rank_tol: float = RANK_TOL,
                           conv_tol: float = CONV_TOL, strict: bool = False) -> QuasiProjLimit:
    """
    Quasi-projective limit of an ordered matrix sequence.
    converged iff the last two normalized terms differ by less than conv_tol (Frobenius);
    kernel and image come from the SVD of the last term, split at rank_tol * sigma_1.
    In strict mode a non-converged sequence raises NotConverged carrying the estimate.
    """
    seq = list(seq)
    if not seq:
        raise EmptySequence("no matrices given")
    if len(seq) < 3:
        raise PreconditionViolated(f"need at least 3 terms, got {len(seq)}", {"length": len(seq)})
    last = normalize_term(seq[-1])
    previous = normalize_term(seq[-2])
    residual = float(np.linalg.norm(last - previous))
    converged = residual < conv_tol
    triple = svd(last)
    sigma = triple.sigma
    rank = int(np.sum(sigma >= rank_tol * sigma[0]))
    image = ProjSubspace(triple.u[:, :rank])
    kernel = ProjSubspace(triple.v[:, rank:]) if rank < sigma.size else None
    result = QuasiProjLimit(limit_mat=last, kernel=kernel, image=image, converged=converged,
                            residual=residual, singular_values=sigma)
    if kernel is None:
        logger.warning(f"limit of a {len(seq)}-term sequence is invertible (sigma_min/sigma_max="
                       f"{sigma[-1] / sigma[0]:.3e}); the sequence does not diverge")
    if not converged:
        logger.warning(f"quasi-projective limit not converged: residual {residual:.3e} >= {conv_tol:.1e}")
        if strict:
            raise NotConverged("normalized sequence did not converge", estimate=result,
                               details={"residual": residual, "conv_tol": conv_tol})
    return result


def normalized_powers(A: MoebiusElement, n: int, exponents: Sequence[int]) -> List[np.ndarray]:
    """Projective representatives of irrep(A^m), m in exponents, free of overflow."""
    mats = np.array([normalized_power(A, m) for m in exponents])
    return [normalize_term(m) for m in irrep_matrices(mats, n)]


def dyadic_matrix_powers(matrix) -> Iterator[np.ndarray]:
    """M, M^2, M^4, ..., each normalized, by repeated squaring."""
    term = normalize_term(matrix)
    while True:
        yield term
        term = normalize_term(term @ term)


def power_limit(M: Union[MoebiusElement, MatrixLike], n: Optional[int] = None,
                rank_tol: float = RANK_TOL, conv_tol: float = CONV_TOL,
                strict: bool = False, max_doublings: int = MAX_DOUBLINGS) -> QuasiProjLimit:
    """
    Quasi-projective limit of the powers M^(2^k), generated until two consecutive
    normalized terms agree within conv_tol or max_doublings is reached.
    A MoebiusElement needs the degree n and is raised to powers in SL(2,C) first,
    which keeps parabolic powers accurate; plain matrices are squared directly.
    """
    if isinstance(M, MoebiusElement):
        if n is None:
            raise PreconditionViolated("power_limit of a Moebius element needs the degree n")
        source = (normalized_powers(M, n, [2 ** k])[0] for k in range(max_doublings))
    else:
        source = itertools.islice(dyadic_matrix_powers(M), max_doublings)
    terms = list(itertools.islice(source, 3))
    for term in source:
        if np.linalg.norm(terms[-1] - terms[-2]) < conv_tol:
            break
        terms.append(term)
    return quasi_projective_limit(terms, rank_tol=rank_tol, conv_tol=conv_tol, strict=strict)


def conjugation_sequence(A: MoebiusElement, B: MoebiusElement, n: int, count: int) -> List[np.ndarray]:
    """Normalized irrep(A^m B A^-m), m = 1..count."""
    mats = []
    for m in range(1, count + 1):
        term = normalized_power(A, m) @ B.mat @ normalized_power(A, -m)
        mats.append(term / np.linalg.norm(term))
    return [normalize_term(t) for t in irrep_matrices(np.array(mats), n)]


def image_kernel_distance(q: QuasiProjLimit) -> float:
    """Largest distance of a unit vector of the image from the kernel, ||(I - P_ker) B_img||_2."""
    if q.kernel is None:
        raise PreconditionViolated("limit is invertible, it has no kernel")
    basis = q.image.basis
    residual = basis - q.kernel.basis @ (q.kernel.basis.conj().T @ basis)
    return float(np.linalg.norm(residual, 2))


def sequence_type(q: QuasiProjLimit, type_tol: float = TYPE_TOL) -> SequenceType:
    """
    loxodromic type iff the image leaves the kernel by more than type_tol,
    parabolic type iff it stays within type_tol / 10; Inconclusive in between.
    """
    if not q.converged:
        raise PreconditionViolated("sequence type needs a converged limit", {"residual": q.residual})
    distance = image_kernel_distance(q)
    if distance > type_tol:
        return SequenceType.LOXODROMIC_TYPE
    if distance <= type_tol / 10.0:
        return SequenceType.PARABOLIC_TYPE
    raise Inconclusive("image-kernel distance inside the undecided band",
                       {"distance": distance, "band": [type_tol / 10.0, type_tol]})


@dataclass(frozen=True)
class FlagPair:
    """
    forward: F_1^+ < ... < F_n^+, step j-1 has proj_dim j-1.
    backward: F_{n+1}^- < ... < F_2^-, stored with increasing dimension;
    use backward_step(j) for F_j^- (proj_dim n+1-j).
    """
    forward: Flag
    backward: Flag
    route_agreement: float = 0.0
    gauge_warning: bool = False

    @property
    def n(self) -> int:
        return self.forward[0].dim_ambient

    def forward_step(self, j: int) -> ProjSubspace:
        if not 1 <= j <= self.n:
            raise PreconditionViolated(f"forward flag index {j} outside 1..{self.n}")
        return self.forward[j - 1]

    def backward_step(self, j: int) -> ProjSubspace:
        if not 2 <= j <= self.n + 1:
            raise PreconditionViolated(f"backward flag index {j} outside 2..{self.n + 1}")
        return self.backward[self.n + 1 - j]


def _kak_flags(A: MoebiusElement, n: int):
    """Forward steps irrep(u)<e_1..e_j>, backward steps irrep(v)^-1 <e_j..e_{n+1}>."""
    factors = kak2(A)
    u_rep = unitary_frame(irrep_matrices(factors.u, n), n)
    v_rep = unitary_frame(irrep_matrices(factors.v, n), n)
    v_inverse = v_rep.conj().T
    forward = [subspace_from_unitary_frame(u_rep[:, :j], n) for j in range(1, n + 1)]
    backward = [subspace_from_unitary_frame(v_inverse[:, j - 1:], n) for j in range(n + 1, 1, -1)]
    return forward, backward, factors


def _dominant_flags(A: MoebiusElement, n: int):
    """
    Forward step j = dominant_subspace(irrep(A), j), backward step j = dominant_subspace(irrep(A^-1), n+2-j),
    both in the invariant frame. Those subspaces are the osculating steps at psi(U_1(A)) and psi(U_1(A^-1)),
    so only the top singular direction of a 2x2 matrix is computed. The singular vectors of irrep(A) itself
    lose about sigma_1(A)^(2 min(j-1, n-j)) digits at step j.
    """
    attracting = normalize_projective(dominant_subspace(A.mat, 1).basis[:, 0])
    repelling = normalize_projective(dominant_subspace(A.inverse().mat, 1).basis[:, 0])
    forward = list(osculating_flag(attracting, n).flag)
    backward_flag = osculating_flag(repelling, n).flag
    backward = [backward_flag[n + 1 - j] for j in range(n + 1, 1, -1)]
    return forward, backward


def limit_flags(seq: Sequence[MoebiusElement], n: int,
                agreement_tol: float = FLAG_AGREEMENT_TOL) -> FlagPair:
    """
    Full flags of the lambda-lemma for a divergent sequence, read off the last term.
    The flags returned come from the KAK factors u, v of the last term. The dominant subspaces
    of irrep(last) and irrep(last^-1) give a second route; the largest step distance between
    the two is kept in route_agreement and NotConverged (estimate: the KAK flags) is raised
    when it exceeds agreement_tol.
    """
    seq = list(seq)
    if len(seq) < 3:
        raise PreconditionViolated(f"need at least 3 terms, got {len(seq)}", {"length": len(seq)})
    last = seq[-1]
    sigma1 = svd(last.mat).sigma[0]
    if sigma1 < DIVERGENCE_SIGMA:
        raise NotDivergent(f"sigma_1 of the last term is {sigma1:.3g} < {DIVERGENCE_SIGMA}",
                           {"sigma1": float(sigma1), "label": last.label})
    forward, backward, factors = _kak_flags(last, n)
    dominant_forward, dominant_backward = _dominant_flags(last, n)
    distances = [subspace_distance(a, b) for a, b in zip(forward + backward, dominant_forward + dominant_backward)]
    agreement = max(distances)
    drift = kak2(seq[-2]).u.conj().T @ factors.u
    gauge_warning = bool(max(abs(drift[0, 1]), abs(drift[1, 0])) > GAUGE_TOL)
    if gauge_warning:
        logger.warning("KAK factor u still moving between the last two terms; "
                       "a convergent subsequence may be needed")
    flags = FlagPair(forward=Flag(tuple(forward)), backward=Flag(tuple(backward)),
                     route_agreement=float(agreement), gauge_warning=gauge_warning)
    if agreement > agreement_tol:
        logger.error(f"flag routes disagree by {agreement:.3e} for {last.label}")
        raise NotConverged("KAK flags and dominant-subspace flags disagree", estimate=flags,
                           details={"route_agreement": float(agreement), "agreement_tol": agreement_tol,
                                    "forward": distances[:n], "backward": distances[n:],
                                    "label": last.label})
    return flags


@dataclass(frozen=True)
class LimitSetEntry:
    cp1_point: ProjPoint
    curve_point: ProjPoint
    hyperplane: ProjSubspace
    covector: ProjPoint
    word: str
    ecg_subspace: Optional[ProjSubspace] = None
    # distance between the dynamically computed ECG subspace and the osculating step
    ecg_osculating_gap: Optional[float] = None


@dataclass(frozen=True)
class CrossCheck:
    word: str
    distance: float
    passed: bool


@dataclass
class LimitSetSample:
    entries: List[LimitSetEntry]
    n: int
    kind: str
    cross_checks: List[CrossCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def provenance(self) -> List[str]:
        return [e.word for e in self.entries]

    @property
    def cross_validated(self) -> bool:
        return all(c.passed for c in self.cross_checks)

    def covectors(self) -> np.ndarray:
        return np.array([e.covector.coords for e in self.entries])

    def cp1_array(self) -> np.ndarray:
        return np.array([e.cp1_point.coords for e in self.entries])

    def __len__(self) -> int:
        return len(self.entries)


def _myrberg_entry(limit_point: LimitPoint, n: int) -> LimitSetEntry:
    z = limit_point.point
    covector = osculating_covector(z, n)
    return LimitSetEntry(cp1_point=z, curve_point=embed(z, n),
                         hyperplane=ProjSubspace.from_covector(covector.coords),
                         covector=covector, word=limit_point.word.label)


def subsample(count: int, size: int) -> List[int]:
    if size <= 0 or count == 0:
        return []
    if size >= count:
        return list(range(count))
    return sorted(set(np.linspace(0, count - 1, size).round().astype(int).tolist()))


def kernel_cross_check(word: MoebiusElement, z: ProjPoint, n: int,
                       rank_tol: float = RANK_TOL, conv_tol: float = CONV_TOL,
                       tol: float = CROSS_TOL) -> CrossCheck:
    """
    The powers of word^-1 converge to a map whose kernel is the osculating hyperplane at
    the attracting point z of word.
    """
    limit = power_limit(word.inverse(), n, rank_tol=rank_tol, conv_tol=conv_tol)
    if limit.kernel is None or limit.kernel.dim != n:
        return CrossCheck(word=word.label, distance=1.0, passed=False)
    distance = subspace_distance(limit.kernel, osculating_hyperplane(z, n))
    return CrossCheck(word=word.label, distance=distance, passed=distance <= tol)


def myrberg_limit(G: GroupSpec, n: int, lmax: int, dedup_tol: float = DEDUP_TOL,
                  cross_checks: int = 8, rank_tol: float = RANK_TOL, conv_tol: float = CONV_TOL,
                  cap: int = WORD_CAP, threads: Optional[int] = None) -> LimitSetSample:
    """
    Osculating hyperplanes at the embedded CP^1 limit points, one entry per sampled point,
    with a kernel cross-check on an evenly spaced subsample of cross_checks entries.
    """
    points = limit_points_cp1(G, lmax, dedup_tol, cap)
    entries = parallel_map(lambda lp: _myrberg_entry(lp, n), points, threads)
    picked = [points[i] for i in subsample(len(points), cross_checks)]
    checks = parallel_map(lambda lp: kernel_cross_check(lp.word, lp.point, n, rank_tol, conv_tol),
                          picked, threads)
    for check in checks:
        if not check.passed:
            logger.warning(f"kernel cross-check failed for {check.word}: distance {check.distance:.3e}")
    logger.info(f"Myrberg sample n={n} lmax={lmax}: {len(entries)} hyperplanes, "
                f"{sum(c.passed for c in checks)}/{len(checks)} cross-checks passed")
    return LimitSetSample(entries=entries, n=n, kind="myrberg", cross_checks=checks)


def ecg_index(n: int) -> int:
    return (n + 2) // 2


def attracting_subspace(word: MoebiusElement, n: int, q: int) -> ProjSubspace:
    """
    Limit of the dominant subspaces U_q(irrep(word^m)) as m grows: the sum of the q
    eigenlines of largest modulus, irrep(B) <e_1..e_q> where B = [attracting | repelling]
    diagonalizes word. Built from the 2x2 eigenvectors, which stay accurate for long words.
    """
    basis = np.column_stack([attracting_point(word).coords, repelling_point(word).coords])
    B = MoebiusElement.from_matrix(basis)
    return ProjSubspace.from_span(irrep_matrices(B.mat, n)[:, :q])


def _ecg_entry(limit_point: LimitPoint, n: int, q: int) -> LimitSetEntry:
    entry = _myrberg_entry(limit_point, n)
    subspace = attracting_subspace(limit_point.word, n, q)
    gap = subspace_distance(subspace, osculating_flag(limit_point.point, n).step(q - 1))
    return LimitSetEntry(cp1_point=entry.cp1_point, curve_point=entry.curve_point,
                         hyperplane=entry.hyperplane, covector=entry.covector, word=entry.word,
                         ecg_subspace=subspace, ecg_osculating_gap=gap)


def extended_cg_limit(G: GroupSpec, n: int, lmax: int, dedup_tol: float = DEDUP_TOL,
                      cap: int = WORD_CAP, threads: Optional[int] = None) -> LimitSetSample:
    """
    For each sampled limit point z, the forward flag step of index q = (n+2)//2 along the
    powers of the loxodromic word attracting to z (proj_dim q-1), next to its hyperplane.
    """
    q = ecg_index(n)
    points = limit_points_cp1(G, lmax, dedup_tol, cap)
    entries = parallel_map(lambda lp: _ecg_entry(lp, n, q), points, threads)
    notes = []
    if n % 2 == 0:
        notes.append(f"even degree n={n}: index q={q} is above the middle singular value")
        logger.warning(f"extended Conze-Guivarc'h index q={q} for even n={n}: "
                       f"singular values of loxodromic images are pairwise distinct")
    worst = max(e.ecg_osculating_gap for e in entries)
    logger.info(f"ECG sample n={n} q={q} lmax={lmax}: {len(entries)} subspaces, "
                f"max gap to osculating step {worst:.3e}")
    return LimitSetSample(entries=entries, n=n, kind="ecg", notes=notes)


def cg_limit(G: GroupSpec, n: int, lmax: int, dedup_tol: float = DEDUP_TOL,
             gap_tol: float = GAP_TOL, cap: int = WORD_CAP,
             cache: Optional[RepCache] = None) -> List[LimitPoint]:
    """
    Dominant eigendirections of the proximal images irrep(w), deduplicated.
    Representation matrices go through cache, keyed by word label, when one is given for G.
    """
    reps = cache if cache is not None else RepCache()
    found = []
    for word in enumerate_words(G, lmax, cap):
        rep = reps.get(word, n).mat
        if classify(word) == ElementType.LOXODROMIC and is_proximal(rep, gap_tol):
            found.append(LimitPoint(dominant_vector(rep, gap_tol), word))
    kept = dedup_points([f.point for f in found], dedup_tol)
    return [found[i] for i in kept]


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Unit norm and canonical phase for every row."""
    vectors = np.asarray(vectors, dtype=complex)
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    significant = np.abs(vectors) > PHASE_TOL
    lead = vectors[np.arange(vectors.shape[0]), np.argmax(significant, axis=1)]
    return vectors * (np.abs(lead) / lead)[:, None]


def tangency_parameters(points: np.ndarray, n: int) -> np.ndarray:
    """
    For each x in CP^n the n parameters z = [s:t] whose osculating hyperplane contains x,
    i.e. the roots of sum_j x_j s^j (-t)^{n-j}. Returns an (m, n, 2) array.
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    signs = (-1.0) ** (n - np.arange(n + 1))
    coeffs = points * signs
    out = np.zeros((points.shape[0], n, 2), dtype=complex)
    scale = np.max(np.abs(coeffs), axis=1)
    regular = np.abs(coeffs[:, n]) > 1e-8 * scale
    if np.any(regular):
        monic = coeffs[regular, :n] / coeffs[regular, n:n + 1]
        companion = np.zeros((monic.shape[0], n, n), dtype=complex)
        companion[:, np.arange(1, n), np.arange(n - 1)] = 1.0
        companion[:, :, -1] = -monic
        roots = np.linalg.eigvals(companion)
        out[regular, :, 0] = roots
        out[regular, :, 1] = 1.0
    for index in np.flatnonzero(~regular):
        row = coeffs[index]
        degree = np.flatnonzero(np.abs(row) > 1e-14 * scale[index])[-1]
        roots = np.roots(row[:degree + 1][::-1]) if degree > 0 else np.array([])
        out[index, :roots.size, 0] = roots
        out[index, :roots.size, 1] = 1.0
        out[index, roots.size:, 0] = 1.0
    return out


def myrberg_distance(points: np.ndarray, sample: LimitSetSample, candidates: int = 3) -> np.ndarray:
    """
    Distance from each row of points (unit vectors) to the union of the sampled hyperplanes,
    searched among the samples nearest to the points' tangency parameters. An upper bound
    for the distance to the whole Myrberg set.
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    n = sample.n
    covectors = sample.covectors()
    tree = cKDTree(hopf_array(sample.cp1_array()))
    k = min(candidates, len(sample))
    params = tangency_parameters(points, n).reshape(-1, 2)
    _, nearest = tree.query(hopf_array(params), k=k)
    nearest = np.asarray(nearest).reshape(points.shape[0], n * k)
    pairing = np.abs(np.einsum("mkj,mj->mk", covectors[nearest], points))
    return pairing.min(axis=1)


def orbit_images(words: Sequence[MoebiusElement], seeds: np.ndarray, n: int,
                 chunk: int = WORD_CHUNK) -> Iterator[Tuple[int, np.ndarray]]:
    """Unit images irrep(w) x as (offset, array of shape (words, seeds, n+1)), chunk of words at a time."""
    for start in range(0, len(words), chunk):
        block = words[start:start + chunk]
        reps = irrep_matrices(np.array([w.mat for w in block]), n)
        images = np.einsum("wij,kj->wki", reps, seeds)
        yield start, images / np.linalg.norm(images, axis=2, keepdims=True)


def _grid_keys(rows: np.ndarray, tol: float) -> List[bytes]:
    cells = np.round(np.hstack([rows.real, rows.imag]) / tol).astype(np.int64)
    return [cell.tobytes() for cell in cells]


@dataclass(frozen=True)
class AccumulationPoint:
    point: ProjPoint
    word: str
    seed: int
    myrberg_distance: float


@dataclass
class AccumulationCloud:
    """
    Deduplicated orbit images. With keep_points=False only the summary fields are filled.
    target_distances[i] is the chordal distance from target i to the nearest image.
    """
    points: List[AccumulationPoint]
    n: int
    lengths: List[int]
    images_computed: int
    distinct: int
    max_myrberg_distance: float
    target_distances: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.points)


def orbit_accumulation(G: GroupSpec, n: int, K: Sequence[ProjPoint], lmax: int,
                       dedup_tol: float = DEDUP_TOL, myrberg: Optional[LimitSetSample] = None,
                       require_off_myrberg: bool = True, min_separation: float = 1e-3,
                       targets: Optional[Sequence[ProjPoint]] = None, keep_points: bool = True,
                       cap: int = WORD_CAP) -> AccumulationCloud:
    """
    Images irrep(w) x for all reduced words w with length in [lmax-2, lmax] and x in K,
    deduplicated on a grid of side dedup_tol in canonical coordinates, each annotated with
    its distance to the sampled Myrberg hyperplanes. The empty word never contributes.
    """
    K = list(K)
    if not K:
        raise PreconditionViolated("compact sample K is empty")
    for p in K:
        if p.dim_ambient != n:
            raise PreconditionViolated(f"sample point in CP^{p.dim_ambient}, expected CP^{n}")
    low = max(1, lmax - 2)
    words_total = reduced_word_count(len(G.generators), lmax, low)
    if words_total * len(K) > cap:
        raise BudgetExceeded(f"{words_total} words x {len(K)} points exceed the cap of {cap}",
                             {"words": words_total, "points": len(K), "cap": cap})
    if myrberg is None:
        myrberg = myrberg_limit(G, n, lmax, dedup_tol, cross_checks=0, cap=cap)
    seeds = np.array([p.coords for p in K])
    if require_off_myrberg:
        seed_distance = myrberg_distance(seeds, myrberg)
        if np.min(seed_distance) <= min_separation:
            index = int(np.argmin(seed_distance))
            raise PreconditionViolated("compact sample meets the Myrberg set",
                                       {"seed": index, "distance": float(seed_distance[index]),
                                        "min_separation": min_separation})
    target_rows = None if targets is None else np.array([t.coords for t in targets])
    best_overlap = None if target_rows is None else np.zeros(target_rows.shape[0])
    words = list(enumerate_words(G, lmax, cap, min_length=low))
    seen = set()
    points: List[AccumulationPoint] = []
    distinct, computed, worst = 0, 0, 0.0
    for start, images in orbit_images(words, seeds, n, max(1, WORD_CHUNK * 16 // len(K))):
        rows = normalize_rows(images.reshape(-1, n + 1))
        computed += rows.shape[0]
        if best_overlap is not None:
            overlap = np.abs(rows.conj() @ target_rows.T).max(axis=0)
            best_overlap = np.maximum(best_overlap, overlap)
        fresh = []
        for index, key in enumerate(_grid_keys(rows, dedup_tol)):
            if key not in seen:
                seen.add(key)
                fresh.append(index)
        if not fresh:
            continue
        distances = myrberg_distance(rows[fresh], myrberg)
        distinct += len(fresh)
        worst = max(worst, float(distances.max()))
        if keep_points:
            points.extend(AccumulationPoint(point=ProjPoint(rows[i]), word=words[start + i // len(K)].label,
                                            seed=i % len(K), myrberg_distance=float(d))
                          for i, d in zip(fresh, distances))
    target_distances = None
    if best_overlap is not None:
        target_distances = np.sqrt(np.clip(1.0 - np.minimum(best_overlap, 1.0) ** 2, 0.0, None))
    logger.info(f"orbit accumulation n={n} lengths {low}..{lmax}: {computed} images, "
                f"{distinct} distinct, max Myrberg distance {worst:.3e}")
    return AccumulationCloud(points=points, n=n, lengths=list(range(low, lmax + 1)),
                             images_computed=computed, distinct=distinct,
                             max_myrberg_distance=worst, target_distances=target_distances)


def ecg_distance(points: np.ndarray, sample: LimitSetSample) -> np.ndarray:
    """Distance from each row of points to the nearest sampled ECG subspace."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    bases = np.array([e.ecg_subspace.basis for e in sample.entries])
    coefficients = np.einsum("sjq,mj->msq", bases.conj(), points)
    projections = np.einsum("sjq,msq->msj", bases, coefficients)
    residual = np.linalg.norm(points[:, None, :] - projections, axis=2)
    return residual.min(axis=1)


@dataclass
class ProperDiscontinuityReport:
    violating_words: List[str]
    max_overlap_depth: int
    overlaps_by_length: Dict[int, int]
    words_checked: int
    sep: float

    def stable_beyond(self, length: int) -> bool:
        """No overlap at word length >= length."""
        return self.max_overlap_depth < length


def proper_discontinuity_check(G: GroupSpec, n: int, region_sample: Sequence[ProjPoint], lmax: int,
                               sep: float = SEP, ecg: Optional[LimitSetSample] = None,
                               dedup_tol: float = DEDUP_TOL,
                               cap: int = WORD_CAP) -> ProperDiscontinuityReport:
    """
    Words w of length 1..lmax moving some sample point within chordal distance sep of
    another sample point. The sample must keep distance > sep from the ECG union.
    """
    region = np.array([p.coords for p in region_sample])
    if region.size == 0:
        raise PreconditionViolated("region sample is empty")
    if ecg is None:
        ecg = extended_cg_limit(G, n, lmax, dedup_tol, cap)
    distance = ecg_distance(region, ecg)
    if np.min(distance) <= sep:
        index = int(np.argmin(distance))
        raise PreconditionViolated("region sample meets the extended Conze-Guivarc'h set",
                                   {"point": index, "distance": float(distance[index]), "sep": sep})
    words = list(enumerate_words(G, lmax, cap))
    chunk = max(1, WORD_CHUNK * 256 // region.shape[0] ** 2)
    violating = []
    for start, images in orbit_images(words, region, n, chunk):
        overlap = np.abs(np.einsum("lj,wkj->wlk", region.conj(), images)) ** 2
        hit = np.any(overlap > 1.0 - sep ** 2, axis=(1, 2))
        violating.extend(words[start + i].label for i in np.flatnonzero(hit))
    by_length: Dict[int, int] = {}
    for label in violating:
        length = len(label.split())
        by_length[length] = by_length.get(length, 0) + 1
    depth = max(by_length, default=0)
    logger.info(f"proper discontinuity n={n} lmax={lmax} sep={sep}: "
                f"{len(violating)}/{len(words)} overlapping words, max depth {depth}")
    return ProperDiscontinuityReport(violating_words=violating, max_overlap_depth=depth,
                                     overlaps_by_length=dict(sorted(by_length.items())),
                                     words_checked=len(words), sep=sep)


@dataclass(frozen=True)
class DominationFit:
    p: int
    slope: float
    constant: float
    residual: float
    samples: int
    envelope: Dict[int, float]
    skipped: int = 0
    # every word up to this length gave a reliable ratio
    complete_length: int = 0


def measured_log_ratios(words: Sequence[MoebiusElement], n: int, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    log(sigma_{p+1}/sigma_p) of irrep(w) in the invariant frame, and a mask of the reliable values.
    The ratio of index p for M is the ratio of index n+1-p for M^-1, so the smaller of the two
    indices q is read, from irrep(w) or irrep(w^-1). A value is reliable when
    sigma_{q+1} >= RATIO_FLOOR * sigma_1, rounding of the largest singular value swamps it otherwise.
    """
    q = min(p, n + 1 - p)
    mats = np.array([w.mat if q == p else w.inverse().mat for w in words])
    mats = mats / np.linalg.norm(mats, axis=(1, 2))[:, None, None]
    sigma = np.linalg.svd(unitary_frame(irrep_matrices(mats, n), n), compute_uv=False)
    reliable = sigma[:, q] >= RATIO_FLOOR * sigma[:, 0]
    with np.errstate(divide="ignore"):
        log_ratio = np.log(sigma[:, q] / sigma[:, q - 1])
    return log_ratio, reliable


def dominated_diagnostic(G: GroupSpec, n: int, p: int, lmax: int, cap: int = WORD_CAP) -> DominationFit:
    """
    Least-squares fit log(sigma_{p+1}/sigma_p)(irrep(w)) ~ log C + slope * |w| over the
    reduced words up to lmax, singular values measured in the invariant frame.
    Words whose ratio sits below the floating point floor are left out of the fit and counted
    in skipped. envelope holds the largest log ratio seen at each length.
    """
    if not 1 <= p <= n:
        raise PreconditionViolated(f"gap index p={p} outside 1..{n}", {"p": p, "n": n})
    if lmax < 2:
        raise PreconditionViolated("a slope needs words of at least two lengths", {"lmax": lmax})
    words = list(enumerate_words(G, lmax, cap))
    log_ratio, reliable = measured_log_ratios(words, n, p)
    lengths = np.array([w.length for w in words], dtype=float)
    unreliable_lengths = lengths[~reliable]
    complete_length = int(unreliable_lengths.min()) - 1 if unreliable_lengths.size else lmax
    lengths, log_ratio = lengths[reliable], log_ratio[reliable]
    if np.unique(lengths).size < 2:
        raise Inconclusive(f"reliable gap ratios of index {p} cover fewer than two word lengths",
                           {"p": p, "n": n, "complete_length": complete_length})
    slope, intercept = np.polyfit(lengths, log_ratio, 1)
    fitted = slope * lengths + intercept
    residual = float(np.sqrt(np.mean((log_ratio - fitted) ** 2)))
    envelope = {int(length): float(log_ratio[lengths == length].max()) for length in np.unique(lengths)}
    skipped = len(words) - int(lengths.size)
    if skipped:
        logger.warning(f"domination fit n={n} p={p}: {skipped} words past the ratio floor, "
                       f"complete up to length {complete_length}")
    logger.info(f"domination fit n={n} p={p} lmax={lmax}: slope {slope:.6g}, residual {residual:.3e}")
    return DominationFit(p=p, slope=float(slope), constant=float(np.exp(intercept)),
                         residual=residual, samples=int(lengths.size), envelope=envelope,
                         skipped=skipped, complete_length=complete_length)


@dataclass(frozen=True)
class TransversalityReport:
    p: int
    pairs: int
    min_transversality: float
    worst_pair: Optional[tuple]


def transversality_report(G: GroupSpec, n: int, p: int, lmax: int, dedup_tol: float = DEDUP_TOL,
                          max_points: int = 64, cap: int = WORD_CAP) -> TransversalityReport:
    """
    Smallest transversality between xi_p^+(x) and xi_{n+1-p}^-(y) over pairs of distinct
    sampled limit points, xi given by the osculating steps of dimension p and n+1-p.
    """
    if not 1 <= p <= n:
        raise PreconditionViolated(f"index p={p} outside 1..{n}", {"p": p, "n": n})
    points = limit_points_cp1(G, lmax, dedup_tol, cap)
    points = [points[i] for i in subsample(len(points), max_points)]
    flags = [osculating_flag(lp.point, n) for lp in points]
    worst, worst_pair, pairs = 1.0, None, 0
    for i, fx in enumerate(flags):
        forward = fx.step(p - 1)
        for k, fy in enumerate(flags):
            if i == k:
                continue
            backward = fy.step(n - p)
            value = transversality(forward, backward)
            pairs += 1
            if value < worst:
                worst, worst_pair = value, (points[i].word.label, points[k].word.label)
    return TransversalityReport(p=p, pairs=pairs, min_transversality=float(worst), worst_pair=worst_pair)


@dataclass(frozen=True)
class EquivarianceDefect:
    point: float
    hyperplane: float
    ecg: Optional[float]
    checked: int


def equivariance_defect(sample: LimitSetSample, G: GroupSpec, max_label_length: int,
                        cache: Optional[RepCache] = None) -> EquivarianceDefect:
    """
    Apply every generator and inverse to the entries whose word has length <= max_label_length
    and match each image with the nearest sampled limit point. Reports the largest mismatch of
    points (chordal on CP^1), hyperplanes and ECG subspaces.
    """
    n = sample.n
    reps = cache if cache is not None else RepCache()
    tree = cKDTree(hopf_array(sample.cp1_array()))
    worst_point = worst_plane = 0.0
    worst_ecg = 0.0 if sample.entries and sample.entries[0].ecg_subspace is not None else None
    checked = 0
    for letter in G.alphabet():
        rep = reps.get(letter, n).mat
        for entry in sample.entries:
            if len(entry.word.split()) > max_label_length:
                continue
            image = normalize_projective(letter.mat @ entry.cp1_point.coords)
            _, index = tree.query(hopf_array(image.coords[None])[0])
            match = sample.entries[int(index)]
            worst_point = max(worst_point, float(np.sqrt(max(0.0, 1.0 - abs(
                np.vdot(image.coords, match.cp1_point.coords)) ** 2))))
            worst_plane = max(worst_plane, subspace_distance(entry.hyperplane.map(rep), match.hyperplane))
            if worst_ecg is not None:
                worst_ecg = max(worst_ecg, subspace_distance(entry.ecg_subspace.map(rep), match.ecg_subspace))
            checked += 1
    return EquivarianceDefect(point=worst_point, hyperplane=worst_plane, ecg=worst_ecg, checked=checked)


def complement_sample(distance: Callable[[np.ndarray], np.ndarray], count: int, n: int, threshold: float,
                      rng: np.random.Generator, attempts: int = 50) -> List[ProjPoint]:
    """
    Random points of CP^n (Fubini-Study uniform) whose distance to a sampled limit set,
    as measured by distance on an array of unit rows, exceeds threshold.
    """
    kept: List[ProjPoint] = []
    for _ in range(attempts):
        batch = random_points(rng, 4 * count, n)
        far = distance(np.array([p.coords for p in batch])) > threshold
        kept.extend(p for p, keep in zip(batch, far) if keep)
        if len(kept) >= count:
            return kept[:count]
    raise PreconditionViolated(f"could not find {count} points at distance > {threshold} from the limit set",
                               {"found": len(kept), "attempts": attempts})
