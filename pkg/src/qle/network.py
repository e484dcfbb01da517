"""Passive linear-optical coupling matrices.

A network of bosonic modes ``b_j`` with Hamiltonian ``H = sum_jk b_j^dag G_jk b_k``
is described by a Hermitian coupling matrix ``G`` (units of angular frequency,
hbar = 1). Mode 0 is the resonator; the remaining modes form its reservoir.

This module validates ``G``, diagonalizes the reservoir block to obtain the
resonator's couplings to reservoir eigenmodes, and decides whether ``G`` admits
a time-reversal gauge, i.e. phases ``theta`` with
``exp(i(theta_j - theta_k)) conj(G_jk) = G_jk``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionTooSmallError,
    EigensolverFailure,
    NotHermitianError,
    NotSquareError,
)

TOL_HERM = 1e-10
TOL_UNIT = 1e-9
TOL_GAUGE = 1e-8
TOL_ZERO = 1e-12

RESONATOR_INDEX = 0


@dataclass(frozen=True)
class CouplingMatrix:
    """Exactly Hermitian mode-coupling matrix; index 0 is the resonator."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def resonator_index(self) -> int:
        return RESONATOR_INDEX

    @property
    def detuning(self) -> float:
        return float(self.entries[0, 0].real)

    @property
    def reservoir_block(self) -> np.ndarray:
        """The submatrix ``G'`` over reservoir modes ``j, k != 0``."""
        return self.entries[1:, 1:]

    @property
    def coupling_row(self) -> np.ndarray:
        """``G_0k`` for ``k != 0``."""
        return self.entries[0, 1:]


def validate_coupling(raw, tol: float = TOL_HERM) -> CouplingMatrix:
    """Check that ``raw`` is square and Hermitian, and return it symmetrized.

    The Hermiticity tolerance is relative to the largest entry magnitude. The
    stored matrix is ``(raw + raw^dag)/2`` so downstream code sees an exactly
    Hermitian matrix.
    """
    m = np.array(raw, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise NotSquareError(f"coupling matrix must be square with dim >= 1, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.conj().T)))
    scale = float(np.max(np.abs(m)))
    if asym > tol * scale:
        raise NotHermitianError(asym)
    return CouplingMatrix(0.5 * (m + m.conj().T))


@dataclass(frozen=True)
class ReservoirDecomposition:
    """Resonator coupled to reservoir eigenmodes ``c_j = sum_k V_jk b_k``.

    Attributes:
        detuning: ``G_00``.
        eta: coupling of the resonator to each eigenmode,
            ``eta_j = sum_k G_0k conj(V_jk)``.
        reservoir_frequencies: eigenvalues ``D_jj`` of ``G'``, ascending.
        transform: unitary ``V`` with ``G' = V^dag D V``; row ``j`` defines ``c_j``.
    """

    detuning: float
    eta: np.ndarray
    reservoir_frequencies: np.ndarray
    transform: np.ndarray

    def reconstruct_reservoir(self) -> np.ndarray:
        """Rebuild ``G' = V^dag D V``."""
        v = self.transform
        return v.conj().T @ np.diag(self.reservoir_frequencies) @ v

    def hamiltonian_matrix(self) -> np.ndarray:
        """Coupling matrix in the (resonator, eigenmode) basis."""
        n = self.eta.size + 1
        h = np.zeros((n, n), dtype=complex)
        h[0, 0] = self.detuning
        h[0, 1:] = self.eta
        h[1:, 0] = self.eta.conj()
        h[1:, 1:] = np.diag(self.reservoir_frequencies)
        return h


def decompose_reservoir(g: CouplingMatrix) -> ReservoirDecomposition:
    if g.dim < 2:
        raise DimensionTooSmallError(f"need at least one reservoir mode, got dim = {g.dim}")
    block = g.reservoir_block
    try:
        # eigh returns ascending eigenvalues and G' = U diag(w) U^dag, so V = U^dag
        w, u = np.linalg.eigh(block)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    v = u.conj().T
    eta = g.coupling_row @ u
    return ReservoirDecomposition(
        detuning=g.detuning,
        eta=eta,
        reservoir_frequencies=w,
        transform=v,
    )


@dataclass(frozen=True)
class GaugeSolution:
    """Outcome of the time-reversal gauge search.

    ``phases`` is ``None`` when no consistent gauge exists. ``worst_cycle_defect``
    is the largest wrapped phase mismatch over the fundamental cycles of the
    coupling graph (0 for a forest).
    """

    exists: bool
    phases: np.ndarray | None
    worst_cycle_defect: float


def _wrap(x: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    y = -((-x + np.pi) % (2 * np.pi) - np.pi)
    return float(y)


def coupling_edges(g: CouplingMatrix, tol_zero: float = TOL_ZERO) -> list[tuple[int, int, float]]:
    """Edges ``(j, k, 2 arg G_jk)`` for ``j < k`` with ``|G_jk|`` above the zero threshold."""
    m = g.entries
    cut = tol_zero * float(np.max(np.abs(m))) if m.size else 0.0
    edges = []
    for j in range(g.dim):
        for k in range(j + 1, g.dim):
            if abs(m[j, k]) > cut:
                edges.append((j, k, 2.0 * float(np.angle(m[j, k]))))
    return edges


def solve_gauge(g: CouplingMatrix, tol: float = TOL_GAUGE, tol_zero: float = TOL_ZERO) -> GaugeSolution:
    """Search for phases satisfying the time-reversal gauge condition.

    Each nonzero ``G_jk`` constrains ``theta_j - theta_k = 2 arg G_jk (mod 2 pi)``.
    Phases are propagated along a BFS spanning forest (roots fixed to 0) and every
    non-tree edge is then checked; its mismatch is the phase sum around the
    fundamental cycle it closes.
    """
    n = g.dim
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    edges = coupling_edges(g, tol_zero)
    for j, k, c in edges:
        # theta_j - theta_k = c  <=>  theta_k = theta_j - c  <=>  theta_j = theta_k + c
        adj[j].append((k, -c))
        adj[k].append((j, c))

    theta = np.full(n, np.nan)
    for root in range(n):
        if not np.isnan(theta[root]):
            continue
        theta[root] = 0.0
        queue = deque([root])
        while queue:
            j = queue.popleft()
            for k, shift in adj[j]:
                if np.isnan(theta[k]):
                    theta[k] = theta[j] + shift
                    queue.append(k)

    worst = 0.0
    for j, k, c in edges:
        worst = max(worst, abs(_wrap(theta[j] - theta[k] - c)))

    exists = worst <= tol
    phases = np.mod(theta, 2 * np.pi) if exists else None
    if phases is not None:
        phases[np.isclose(phases, 2 * np.pi, rtol=0.0, atol=1e-15)] = 0.0
    return GaugeSolution(exists=exists, phases=phases, worst_cycle_defect=worst)


def gauge_residual(g: CouplingMatrix, phases) -> float:
    """Largest ``|exp(i(theta_j - theta_k)) conj(G_jk) - G_jk| / |G_jk|`` over nonzero entries."""
    m = g.entries
    th = np.asarray(phases, dtype=float)
    lhs = np.exp(1j * (th[:, None] - th[None, :])) * m.conj()
    mask = np.abs(m) > TOL_ZERO * float(np.max(np.abs(m)))
    if not mask.any():
        return 0.0
    return float(np.max(np.abs(lhs - m)[mask] / np.abs(m)[mask]))
