"""Eigenstructure and definiteness-type classification of normal operators.

In finite dimension the approximate point spectrum is the set of
eigenvalues, and a point is of positive type exactly when the indefinite
product is positive definite on its kernel.  A point is of two-sided
positive type when the same holds for the adjoint operator at the
conjugated eigenvalue.  ``classified_spectrum`` computes the full
inventory; the per-point helpers expose the individual steps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    DEFAULT_DEFINITENESS_TOL,
    DEFAULT_NORMALITY_TOL,
    DEFAULT_RANK_TOL,
    DefinitenessKind,
    KreinOperator,
    SubspaceBasis,
    compressed_gram,
    definiteness,
)

__all__ = [
    "SpectralPoint",
    "SpectralType",
    "ToleranceConfig",
    "classified_spectrum",
    "classify_point",
    "definiteness_margin",
    "kernel_basis",
    "root_subspace",
    "selfadjoint_product",
    "spectrum",
    "verify_selfadjoint_link",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerances used throughout the pipeline.

    ``cluster_tol`` scales with ``max(1, ||N||)`` to give the eigenvalue
    clustering radius, ``rank_tol`` with the largest singular value of the
    matrix whose kernel is sought, ``definiteness_tol`` with the Gram
    scale, and ``normality_tol`` with ``max(1, ||N||_F^2)``.
    """

    cluster_tol: float = 1e-7
    rank_tol: float = DEFAULT_RANK_TOL
    definiteness_tol: float = DEFAULT_DEFINITENESS_TOL
    normality_tol: float = DEFAULT_NORMALITY_TOL
    contour_nodes: int = 128

    def __post_init__(self):
        for name in ("cluster_tol", "rank_tol", "definiteness_tol", "normality_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.contour_nodes < 16:
            raise ValueError("contour_nodes must be at least 16")

    def cluster_radius(self, N: KreinOperator) -> float:
        """Absolute clustering radius for one operator.

        Scales with the spectral radius (eigenvalue geometry, immune to
        norm inflation under ill-conditioned similarity) plus a floor for
        the square-root smear of defective eigenvalues, which grows with
        the departure of the matrix norm from the spectral radius.  The
        floor is capped at a small fraction of the eigenvalue scale:
        beyond that, defective structure is unresolvable in double
        precision and clustering must not collapse distinct eigenvalues.
        """
        scale = max(1.0, N.spectral_radius)
        kappa = max(1.0, N.norm / scale)
        smear = 10.0 * kappa * float(np.sqrt(np.finfo(float).eps * scale))
        return self.cluster_tol * scale + min(smear, 1e-3 * scale)


class SpectralType(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    TWO_SIDED_POSITIVE = "two-sided-positive"
    TWO_SIDED_NEGATIVE = "two-sided-negative"
    NEUTRAL = "neutral"
    INDEFINITE = "indefinite"


POSITIVE_TAGS = frozenset({SpectralType.POSITIVE, SpectralType.TWO_SIDED_POSITIVE})
NEGATIVE_TAGS = frozenset({SpectralType.NEGATIVE, SpectralType.TWO_SIDED_NEGATIVE})
DEFINITE_TAGS = POSITIVE_TAGS | NEGATIVE_TAGS


@dataclass(frozen=True)
class SpectralPoint:
    """One eigenvalue cluster with multiplicities and kernel data.

    ``type_tag`` is None until :func:`classify_point` fills it in;
    ``gram_margin`` is the extremal compressed-Gram eigenvalue of the
    kernel.  ``warnings`` collects clustering-ambiguity and borderline
    flags instead of silently resolving them.
    """

    value: complex
    alg_mult: int
    geo_mult: int
    kernel: SubspaceBasis
    adjoint_kernel: SubspaceBasis
    type_tag: SpectralType | None = None
    gram_margin: float = math.nan
    warnings: tuple[str, ...] = ()


def kernel_basis(
    a: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL, scale: float = 0.0
) -> SubspaceBasis:
    """Null space of a matrix by singular-value thresholding.

    The threshold is ``rank_tol`` times the larger of the top singular
    value and ``scale``.  Kernels of shifted operators pass the operator
    norm as the scale: when the shift consumes the whole matrix the
    residual is rounding noise and must count as kernel.
    """
    a = np.asarray(a, dtype=np.complex128)
    _, s, vh = np.linalg.svd(a)
    top = max(float(s[0]) if s.size else 0.0, scale)
    if top == 0.0:
        return SubspaceBasis.full(a.shape[1])
    rank = int(np.count_nonzero(s > rank_tol * top))
    return SubspaceBasis(vh[rank:].conj().T)


def _cluster_eigenvalues(eigs: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage clustering; returns index arrays per cluster."""
    n = eigs.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(ix) for ix in groups.values()]


def spectrum(N: KreinOperator, cfg: ToleranceConfig = ToleranceConfig()) -> list[SpectralPoint]:
    """Eigenvalue clusters of a normal operator, unclassified.

    Eigenvalues are clustered by single linkage at the configured radius;
    each cluster is represented by its multiplicity-weighted mean.  Two
    clusters closer than four times the clustering radius are flagged with
    a warning rather than merged.  Points are sorted by (real, imag).
    """
    eigs = np.linalg.eigvals(N.matrix)
    radius = cfg.cluster_radius(N)
    clusters = _cluster_eigenvalues(eigs, radius)
    reps = [complex(np.mean(eigs[ix])) for ix in clusters]

    ambiguous = set()
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            gap = min(abs(eigs[a] - eigs[b]) for a in clusters[i] for b in clusters[j])
            if gap <= 4.0 * radius:
                ambiguous.add(i)
                ambiguous.add(j)

    scale = max(1.0, N.norm)
    adj_scale = max(1.0, float(np.linalg.norm(N.adjoint, 2)))
    points = []
    for i, ix in enumerate(clusters):
        lam = reps[i]
        ker = kernel_basis(N.matrix - lam * np.eye(N.dim), cfg.rank_tol, scale)
        adj_ker = kernel_basis(
            N.adjoint - np.conj(lam) * np.eye(N.dim), cfg.rank_tol, adj_scale
        )
        warnings = ()
        if i in ambiguous:
            warnings = ("cluster-separation-below-4x-radius",)
        points.append(
            SpectralPoint(
                value=lam,
                alg_mult=int(ix.size),
                geo_mult=ker.k,
                kernel=ker,
                adjoint_kernel=adj_ker,
                warnings=warnings,
            )
        )
    points.sort(key=lambda p: (p.value.real, p.value.imag))
    return points


def classify_point(
    N: KreinOperator, pt: SpectralPoint, cfg: ToleranceConfig = ToleranceConfig()
) -> SpectralPoint:
    """Fill in the definiteness type of a spectral point.

    The kernel's compressed Gram decides the one-sided type; when the
    adjoint kernel carries the same definite sign the point upgrades to
    the two-sided tag.  Degenerate borderline spectra are tagged NEUTRAL
    with a warning instead of a definite verdict.
    """
    verdict = definiteness(pt.kernel, N.space, cfg.definiteness_tol)
    adj_verdict = definiteness(pt.adjoint_kernel, N.space, cfg.definiteness_tol)
    warnings = pt.warnings

    if verdict.kind is DefinitenessKind.UNIFORMLY_POSITIVE:
        tag = SpectralType.POSITIVE
        if adj_verdict.kind is DefinitenessKind.UNIFORMLY_POSITIVE:
            tag = SpectralType.TWO_SIDED_POSITIVE
    elif verdict.kind is DefinitenessKind.UNIFORMLY_NEGATIVE:
        tag = SpectralType.NEGATIVE
        if adj_verdict.kind is DefinitenessKind.UNIFORMLY_NEGATIVE:
            tag = SpectralType.TWO_SIDED_NEGATIVE
    elif verdict.kind is DefinitenessKind.INDEFINITE:
        tag = SpectralType.INDEFINITE
    else:
        tag = SpectralType.NEUTRAL
        threshold = cfg.definiteness_tol * N.space.gram_scale
        if verdict.eigenvalues and max(abs(e) for e in verdict.eigenvalues) > 0.25 * threshold:
            warnings = warnings + ("borderline-definiteness-margin",)
    return replace(pt, type_tag=tag, gram_margin=verdict.margin, warnings=warnings)


def classified_spectrum(
    N: KreinOperator, cfg: ToleranceConfig = ToleranceConfig()
) -> list[SpectralPoint]:
    """Spectrum with every point classified."""
    return [classify_point(N, pt, cfg) for pt in spectrum(N, cfg)]


def selfadjoint_product(N: KreinOperator, lam: complex) -> np.ndarray:
    """The selfadjoint operator ``(adj(N) - conj(lam)) (N - lam)``.

    Selfadjoint in the indefinite product for any matrix and shift; for a
    normal operator the definiteness type of 0 for this product mirrors
    the two-sided type of ``lam`` for N.
    """
    eye = np.eye(N.dim)
    return (N.adjoint - np.conj(lam) * eye) @ (N.matrix - lam * eye)


def verify_selfadjoint_link(
    N: KreinOperator, pt: SpectralPoint, cfg: ToleranceConfig = ToleranceConfig()
) -> bool:
    """Check that 0 is of positive type for the selfadjoint product at
    ``pt.value`` exactly when the point is of two-sided positive type.

    Borderline kernels (warnings on either side) make the equivalence
    undecidable at tolerance; the comparison is skipped and counts as a
    pass.
    """
    if pt.type_tag is None:
        pt = classify_point(N, pt, cfg)
    a = selfadjoint_product(N, pt.value)
    ker = kernel_basis(a, cfg.rank_tol, max(1.0, float(np.linalg.norm(a, 2))))
    verdict = definiteness(ker, N.space, cfg.definiteness_tol)
    if "borderline-definiteness-margin" in pt.warnings:
        return True
    zero_positive = verdict.kind is DefinitenessKind.UNIFORMLY_POSITIVE
    return zero_positive == (pt.type_tag is SpectralType.TWO_SIDED_POSITIVE)


def nearest_point_selector(points: list[SpectralPoint], index: int):
    """Predicate accepting eigenvalues whose closest cluster is ``index``.

    Robust against cluster radii: membership is decided by comparison
    against all representatives rather than a fixed disk.
    """
    return nearest_subset_selector(points, (index,))


def nearest_subset_selector(points: list[SpectralPoint], indices):
    """Predicate accepting eigenvalues whose closest cluster lies in a set."""
    reps = np.array([p.value for p in points])
    index_set = frozenset(indices)

    def selector(z: complex) -> bool:
        return int(np.argmin(np.abs(reps - z))) in index_set

    return selector


def _locate_point(
    N: KreinOperator, pt: SpectralPoint, cfg: ToleranceConfig,
    points: list[SpectralPoint] | None,
) -> tuple[list[SpectralPoint], int]:
    if points is None:
        points = spectrum(N, cfg)
    dists = [abs(p.value - pt.value) for p in points]
    index = int(np.argmin(dists))
    if dists[index] > cfg.cluster_radius(N) * max(1, pt.alg_mult):
        raise ValueError(f"point {pt.value} is not a spectral point of the operator")
    return points, index


def root_subspace(
    N: KreinOperator,
    pt: SpectralPoint,
    cfg: ToleranceConfig = ToleranceConfig(),
    points: list[SpectralPoint] | None = None,
) -> SubspaceBasis:
    """Invariant subspace of the full eigenvalue cluster (dimension
    ``alg_mult``), computed from the ordered spectral decomposition."""
    from .numerics import ordered_spectral_decomposition

    points, index = _locate_point(N, pt, cfg, points)
    dec = ordered_spectral_decomposition(
        N.matrix, nearest_point_selector(points, index)
    )
    if dec.split != pt.alg_mult:
        raise ValueError(
            f"cluster selector matched {dec.split} eigenvalues, expected {pt.alg_mult}"
        )
    return SubspaceBasis(dec.unitary[:, : dec.split])


def definiteness_margin(
    N: KreinOperator,
    lam: complex,
    eps: float,
    cfg: ToleranceConfig = ToleranceConfig(),
) -> float:
    """Smallest compressed-Gram eigenvalue over the near-singular
    directions of ``N - lam`` (singular values at most ``eps``).

    Returns ``+inf`` when no singular value falls below ``eps``, i.e. when
    ``lam`` is far from the spectrum at that resolution.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = N.matrix - lam * np.eye(N.dim)
    _, s, vh = np.linalg.svd(a)
    mask = s <= eps
    if not np.any(mask):
        return math.inf
    basis = SubspaceBasis(vh[mask].conj().T)
    eigs = np.linalg.eigvalsh(compressed_gram(basis, N.space))
    return float(eigs[0])
