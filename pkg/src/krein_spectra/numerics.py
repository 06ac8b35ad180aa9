"""Dense complex linear-algebra substrate with explicit contracts.

Ordered Schur decompositions realize spectral-set splittings, the
Sylvester solver decouples invariant blocks (unique solvability granted
by disjoint coefficient spectra), and circle contour integrals of the
resolvent recover spectral projectors and Laurent coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from ._errors import ContourThroughSpectrumError, SelectorAmbiguityError, SpectralOverlapError
from .core import frobenius, operator_norm

__all__ = [
    "OrderedDecomposition",
    "contour_integral_resolvent",
    "ordered_spectral_decomposition",
    "solve_sylvester",
    "solve_sylvester_dense",
    "spectral_projector",
    "sylvester_spectral_gap",
]


@dataclass(frozen=True)
class OrderedDecomposition:
    """Unitary similarity ``A = U T U*`` with the selected eigenvalues in
    the leading ``split`` x ``split`` block of the upper-triangular T."""

    unitary: np.ndarray
    triangular: np.ndarray
    split: int
    backward_error: float

    def __post_init__(self):
        u = self.unitary
        n = u.shape[0]
        ortho_defect = frobenius(u.conj().T @ u - np.eye(n))
        if ortho_defect > 1e-12 * max(1.0, n):
            raise ValueError(f"Schur factor is not unitary: defect {ortho_defect:.3e}")
        if self.backward_error > 1e-10:
            raise ValueError(
                f"Schur backward error {self.backward_error:.3e} exceeds 1e-10"
            )

    @property
    def selected_eigenvalues(self) -> np.ndarray:
        return np.diag(self.triangular)[: self.split]

    @property
    def rejected_eigenvalues(self) -> np.ndarray:
        return np.diag(self.triangular)[self.split :]


def ordered_spectral_decomposition(
    A: np.ndarray,
    selector: Callable[[complex], bool],
    boundary_distance: Callable[[complex], float] | None = None,
    cluster_tol: float = 1e-7,
) -> OrderedDecomposition:
    """Complex Schur form reordered so selected eigenvalues lead.

    The leading ``split`` columns of the unitary factor span the invariant
    subspace of the selected eigenvalues.  When ``boundary_distance`` is
    supplied, eigenvalues closer than ``cluster_tol * max(1, ||A||)`` to
    the selector boundary are refused as ambiguous.  The reordering is
    validated post hoc: every diagonal entry must land on the side the
    selector assigns it to.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix must be square, got {A.shape}")
    scale = max(1.0, operator_norm(A))
    if boundary_distance is not None:
        eigs = np.linalg.eigvals(A)
        offenders = [z for z in eigs if boundary_distance(z) <= cluster_tol * scale]
        if offenders:
            raise SelectorAmbiguityError(
                f"eigenvalues too close to the selector boundary: {offenders}"
            )
    t, u, sdim = scipy.linalg.schur(A, output="complex", sort=lambda z: bool(selector(z)))
    diag = np.diag(t)
    for i, z in enumerate(diag):
        if bool(selector(z)) != (i < sdim):
            raise SelectorAmbiguityError(
                f"reordered eigenvalue {z} landed on the wrong side of the split"
            )
    backward = frobenius(A - u @ t @ u.conj().T) / max(frobenius(A), 1e-300)
    return OrderedDecomposition(u, t, int(sdim), float(backward))


def spectral_projector(dec: OrderedDecomposition) -> np.ndarray:
    """Spectral projector onto the invariant subspace of the leading block.

    Solves the Sylvester equation that block-diagonalizes the triangular
    factor; in the decoupled coordinates the projector is [[I, 0], [0, 0]].
    """
    n = dec.triangular.shape[0]
    k = dec.split
    if k == 0:
        return np.zeros((n, n), dtype=np.complex128)
    if k == n:
        return np.eye(n, dtype=np.complex128)
    t11 = dec.triangular[:k, :k]
    t12 = dec.triangular[:k, k:]
    t22 = dec.triangular[k:, k:]
    r = solve_sylvester(t11, t22, -t12)
    q_inner = np.zeros((n, n), dtype=np.complex128)
    q_inner[:k, :k] = np.eye(k)
    q_inner[:k, k:] = -r
    return dec.unitary @ q_inner @ dec.unitary.conj().T


def sylvester_spectral_gap(S: np.ndarray, T: np.ndarray) -> tuple[float, tuple[complex, complex]]:
    """Minimum distance between the two spectra, with the attaining pair."""
    es = np.linalg.eigvals(np.asarray(S, dtype=np.complex128))
    et = np.linalg.eigvals(np.asarray(T, dtype=np.complex128))
    dists = np.abs(es[:, None] - et[None, :])
    i, j = np.unravel_index(int(np.argmin(dists)), dists.shape)
    return float(dists[i, j]), (complex(es[i]), complex(et[j]))


def solve_sylvester(S: np.ndarray, T: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Solve ``S X - X T = Z`` by triangularizing both coefficients.

    Both sides are brought to complex Schur form and the transformed
    equation is solved column by column with triangular solves.  Requires
    disjoint spectra; overlap is rejected with the offending pair.
    """
    S = np.asarray(S, dtype=np.complex128)
    T = np.asarray(T, dtype=np.complex128)
    Z = np.asarray(Z, dtype=np.complex128)
    m, n = S.shape[0], T.shape[0]
    if S.shape != (m, m) or T.shape != (n, n) or Z.shape != (m, n):
        raise ValueError(f"incompatible shapes {S.shape}, {T.shape}, {Z.shape}")

    ts, us = scipy.linalg.schur(S, output="complex")
    tt, ut = scipy.linalg.schur(T, output="complex")
    gap = np.abs(np.diag(ts)[:, None] - np.diag(tt)[None, :])
    i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
    scale = max(operator_norm(S) + operator_norm(T), 1e-300)
    if gap[i, j] <= 1e-12 * scale:
        raise SpectralOverlapError(
            f"coefficient spectra overlap at {ts[i, i]} vs {tt[j, j]} "
            f"(gap {gap[i, j]:.3e})"
        )

    c = us.conj().T @ Z @ ut
    y = np.zeros((m, n), dtype=np.complex128)
    eye = np.eye(m)
    for col in range(n):
        rhs = c[:, col] + y[:, :col] @ tt[:col, col]
        y[:, col] = scipy.linalg.solve_triangular(
            ts - tt[col, col] * eye, rhs, lower=False
        )
    return us @ y @ ut.conj().T


def solve_sylvester_dense(S: np.ndarray, T: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Kronecker-product solve of ``S X - X T = Z``; small-instance oracle.

    Builds the mn x mn system (I (x) S - T^t (x) I) vec(X) = vec(Z) and
    solves it densely.  Quadratic memory in the problem size, intended for
    cross-validation at small dimensions only.
    """
    S = np.asarray(S, dtype=np.complex128)
    T = np.asarray(T, dtype=np.complex128)
    Z = np.asarray(Z, dtype=np.complex128)
    m, n = S.shape[0], T.shape[0]
    big = np.kron(np.eye(n), S) - np.kron(T.T, np.eye(m))
    x = np.linalg.solve(big, Z.reshape(-1, order="F"))
    return x.reshape((m, n), order="F")


def resolvent_at(N: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Batched resolvents ``(z_j - N)^{-1}`` stacked along the first axis."""
    N = np.asarray(N, dtype=np.complex128)
    n = N.shape[0]
    points = np.asarray(points, dtype=np.complex128).reshape(-1)
    lhs = points[:, None, None] * np.eye(n) - N
    rhs = np.broadcast_to(np.eye(n, dtype=np.complex128), (points.size, n, n))
    return np.linalg.solve(lhs, rhs)


def contour_integral_resolvent(
    N: np.ndarray,
    center: complex,
    radius: float,
    k: int = 0,
    nodes: int = 128,
    cluster_tol: float = 1e-7,
) -> np.ndarray:
    """Trapezoidal evaluation of the circle integral
    ``(1/2 pi i) ∮ (z - center)^k (z - N)^{-1} dz``.

    ``k = 0`` on a spectrum-enclosing circle gives the identity; ``k >= 1``
    probes Laurent coefficients at an enclosed isolated eigenvalue.
    Refuses circles passing within the clustering tolerance of an
    eigenvalue.
    """
    N = np.asarray(N, dtype=np.complex128)
    if radius <= 0:
        raise ValueError("radius must be positive")
    eigs = np.linalg.eigvals(N)
    scale = max(1.0, operator_norm(N))
    margin = np.abs(np.abs(eigs - center) - radius)
    if np.any(margin <= cluster_tol * scale):
        offenders = eigs[margin <= cluster_tol * scale]
        raise ContourThroughSpectrumError(
            f"eigenvalues on the integration circle: {list(offenders)}"
        )
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    unit = np.exp(1j * theta)
    points = center + radius * unit
    res = resolvent_at(N, points)
    # weights (r/nodes) e^{i theta} (z - center)^k collapse the 1/(2 pi i) prefactor
    factors = (radius / nodes) * unit * (radius * unit) ** k
    return np.einsum("j,jab->ab", factors, res)
