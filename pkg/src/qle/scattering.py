"""Static port algebra for nonreciprocal devices.

Conventions: outgoing amplitudes are ``S @ incoming``, so ``S[k, j]`` is the
transmission from port ``j`` to port ``k``. Ports are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosureCheckFailed, DilationVerificationFailed, NotPassiveError, NotSquareError, SingularClosureError

TOL_S = 1e-9
TOL_RANK = 1e-7


@dataclass(frozen=True)
class ScatteringMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise NotSquareError(f"scattering matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    @property
    def unitary(self) -> bool:
        return classify(self).unitary

    @property
    def reciprocal(self) -> bool:
        return classify(self).reciprocal

    @property
    def passive(self) -> bool:
        return classify(self).passive


@dataclass(frozen=True)
class Classification:
    unitary: bool
    reciprocal: bool
    passive: bool

    CSV_HEADER = "unitary,reciprocal,passive"

    def csv_line(self) -> str:
        return ",".join(str(x).lower() for x in (self.unitary, self.reciprocal, self.passive))


def _as_matrix(s) -> np.ndarray:
    if isinstance(s, ScatteringMatrix):
        return s.entries
    return ScatteringMatrix(s).entries


def unitarity_error(s) -> float:
    m = _as_matrix(s)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def classify(s, tol: float = TOL_S) -> Classification:
    m = _as_matrix(s)
    return Classification(
        unitary=unitarity_error(m) <= tol,
        reciprocal=float(np.max(np.abs(m - m.T))) <= tol,
        passive=float(np.linalg.norm(m, 2)) <= 1.0 + tol,
    )


def psd_sqrt(h: np.ndarray, tol: float = TOL_S) -> np.ndarray:
    """Square root of a Hermitian PSD matrix via ``eigh``.

    Eigenvalues down to ``-tol`` are floored to 0; anything more negative means
    the input was not PSD.
    """
    h = 0.5 * (h + h.conj().T)
    w, u = np.linalg.eigh(h)
    if w.size and w.min() < -tol:
        raise NotPassiveError(f"defect operator has eigenvalue {w.min():.3e} < 0")
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def dilation_rank(s, tol_rank: float = TOL_RANK) -> int:
    """Number of singular values of ``S`` below ``1 - tol_rank``, i.e. the
    number of extra ports a minimal unitary dilation needs."""
    return int(np.sum(np.linalg.svd(_as_matrix(s), compute_uv=False) < 1.0 - tol_rank))


def dilate_to_unitary(s, tol: float = TOL_S, tol_rank: float = TOL_RANK) -> ScatteringMatrix:
    """Embed a passive ``S`` as the upper-left block of a minimal unitary.

    Builds the defect operators ``D = sqrt(I - S^dag S)`` and
    ``D' = sqrt(I - S S^dag)`` and keeps only the ``r`` directions where the
    defect is nonzero, using the singular vectors ``S = U Sigma W^dag``:

        [[ S,           D' U_r          ],
         [ W_r^dag D,  -W_r^dag S^dag U_r ]]

    The added ``r`` ports carry exactly the flux ``S`` loses.
    """
    m = _as_matrix(s)
    n = m.shape[0]
    u, sv, wh = np.linalg.svd(m)
    if sv[0] > 1.0 + tol:
        raise NotPassiveError(f"largest singular value {sv[0]:.12g} exceeds 1")
    keep = sv < 1.0 - tol_rank
    r = int(keep.sum())
    if r == 0:
        out = m.copy()
    else:
        d = psd_sqrt(np.eye(n) - m.conj().T @ m, tol)
        d_prime = psd_sqrt(np.eye(n) - m @ m.conj().T, tol)
        u_r = u[:, keep]
        w_r = wh.conj().T[:, keep]
        out = np.zeros((n + r, n + r), dtype=complex)
        out[:n, :n] = m
        out[:n, n:] = d_prime @ u_r
        out[n:, :n] = w_r.conj().T @ d
        out[n:, n:] = -(w_r.conj().T @ m.conj().T @ u_r)
    err = unitarity_error(out)
    if err > 10 * tol:
        raise DilationVerificationFailed(f"dilation unitarity error {err:.3e} > {10 * tol:.1e}")
    return ScatteringMatrix(out)


def close_port(s, closed_port: int, mirror_phase: float, tol: float = TOL_S) -> ScatteringMatrix:
    """Terminate one port with a lossless mirror of reflection ``exp(i mirror_phase)``.

    Uses ``S_red = S_aa + S_ab r (1 - S_bb r)^{-1} S_ba`` with ``r`` the mirror
    reflection, ``b`` the closed port and ``a`` the rest.
    """
    m = _as_matrix(s)
    n = m.shape[0]
    if not 0 <= closed_port < n:
        raise IndexError(f"closed_port {closed_port} out of range for {n} ports")
    a = [k for k in range(n) if k != closed_port]
    b = closed_port
    refl = np.exp(1j * mirror_phase)
    denom = 1.0 - m[b, b] * refl
    if abs(denom) <= tol:
        raise SingularClosureError(f"1 - S_bb e^(i phi) = {denom:.3e} is singular")
    red = m[np.ix_(a, a)] + np.outer(m[a, b], m[b, a]) * (refl / denom)
    return ScatteringMatrix(red)


def two_port_closure_check(s3, closed_port: int, mirror_phase: float, tol: float = TOL_S) -> ScatteringMatrix:
    """Close one port of a unitary 3-port and return the effective 2-port.

    A lossless closure leaves a unitary 2-port, whose two transmission
    magnitudes must agree; ``ClosureCheckFailed`` is raised if they differ by
    more than ``tol``.
    """
    m = _as_matrix(s3)
    if m.shape != (3, 3):
        raise NotSquareError(f"expected a 3-port, got shape {m.shape}")
    if unitarity_error(m) > tol:
        raise ValueError("two_port_closure_check expects a unitary 3-port")
    red = close_port(m, closed_port, mirror_phase, tol)
    gap = transmission_asymmetry(red)
    if gap > tol:
        raise ClosureCheckFailed(f"|S_12| and |S_21| differ by {gap:.3e} after closure")
    return red


def transmission_asymmetry(s2) -> float:
    m = _as_matrix(s2)
    return abs(abs(m[0, 1]) - abs(m[1, 0]))


def circulator(n: int = 3) -> ScatteringMatrix:
    """Ideal circulator: port ``j`` feeds port ``j + 1`` (mod ``n``)."""
    return ScatteringMatrix(np.roll(np.eye(n), 1, axis=0))


def isolator() -> ScatteringMatrix:
    """Ideal two-port isolator passing port 0 to port 1 and absorbing the reverse."""
    return ScatteringMatrix([[0, 0], [1, 0]])
