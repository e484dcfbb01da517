"""Brute-force check of the moment equations.

Each white-noise input is chopped into one discrete bosonic mode per channel
per time step, and the resonator operator is carried as a vector of
coefficients over all of those modes:

    a(t_n) = u a(0) + v a^dag(0) + sum_{j,m} (p_{jm} b_{jm} + q_{jm} b_{jm}^dag)

An Euler-Maruyama step on the Langevin equation is a linear map on these
coefficients. Vacuum expectation values follow from ``<b b^dag> = 1``. Nothing
here uses the closed moment equations, so agreement with
:func:`qle.langevin.propagate_moments` validates their noise sources.
"""

from __future__ import annotations

import numpy as np

from .errors import MemoryGuardError, StepTooLargeError
from .langevin import MomentState, ResonatorModel

MAX_MODES = 20_000_000
DEFAULT_STEPS_PER_TAU = 400


def discrete_mode_oracle(
    model: ResonatorModel,
    dt: float | None = None,
    t_end: float = 5.0,
    max_modes: int = MAX_MODES,
) -> MomentState:
    """Evolve the operator coefficients from vacuum and return moments at ``t_end``."""
    tau = model.tau
    if dt is None:
        dt = tau / DEFAULT_STEPS_PER_TAU
    if not dt > 0 or dt > tau / 200 * (1 + 1e-12):
        raise StepTooLargeError(f"oracle needs 0 < dt <= tau/200, got dt = {dt}")
    n_steps = int(round(t_end / dt))
    n_ch = model.n_channels
    if n_steps * n_ch > max_modes:
        raise MemoryGuardError(
            f"{n_steps} steps x {n_ch} channels = {n_steps * n_ch} modes exceeds cap {max_modes}"
        )

    lam = 1.0 - (1j * model.omega0 + 1.0 / tau) * dt
    new_p = np.sqrt(np.asarray(model.gamma) * dt).astype(complex)
    new_q = np.sqrt(model.bogoliubov_rates() * dt) * np.exp(1j * model.bogoliubov_phases())

    u, v = 1.0 + 0j, 0j
    p = np.zeros((n_steps, n_ch), dtype=complex)
    q = np.zeros((n_steps, n_ch), dtype=complex)
    for m in range(n_steps):
        u *= lam
        v *= lam
        p[:m] *= lam
        q[:m] *= lam
        p[m] = new_p
        q[m] = new_q

    pp = float(np.sum(np.abs(p) ** 2))
    qq = float(np.sum(np.abs(q) ** 2))
    return MomentState(
        t=n_steps * dt,
        mean=0j,
        number=abs(v) ** 2 + qq,
        anomalous=u * v + complex(np.sum(p * q)),
        commutator=abs(u) ** 2 - abs(v) ** 2 + pp - qq,
    )
