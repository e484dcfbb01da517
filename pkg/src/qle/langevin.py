"""Quantum Langevin models of a single resonator mode.

The general model is

    da/dt = -(i w0 + 1/tau) a + sum_j sqrt(g_j) A_j + sum_k sqrt(k_k) e^{i phi_k} A_k^dag

with white-noise input fields ``[A_j(t), A_k^dag(t')] = delta_jk delta(t - t')``.
Channel 0 carries the coherent drive; every other channel is in vacuum.
``kappa[i]`` and ``phi[i]`` belong to channel ``i + 1`` (channel 0 has no
creation-operator coupling because its mean is nonzero).

Second moments are split into the coherent part (built from the mean) and the
noise part. With vacuum reservoirs the noise part closes on itself:

    dC/dt = -(2/tau) C + (sum gamma - sum kappa)                  commutator [a, a^dag]
    dN/dt = -(2/tau) N + sum kappa                                <a^dag a> - |<a>|^2
    dM/dt = -2 (i w0 + 1/tau) M + sum_k sqrt(g_k k_k) e^{i phi_k}  <a a> - <a>^2

These source terms are cross-checked against :func:`qle.oracle.discrete_mode_oracle`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import StepTooLargeError, UnphysicalStateError

TOL_FD = 1e-9
TOL_MOM = 1e-8
DEFAULT_STEPS_PER_TAU = 1000


@dataclass(frozen=True)
class ResonatorModel:
    """Resonance ``omega0``, decay time ``tau``, input rates ``gamma`` and
    Bogoliubov rates ``kappa`` with phases ``phi`` (channels 1, 2, ...)."""

    omega0: float
    tau: float
    gamma: tuple[float, ...]
    kappa: tuple[float, ...] = ()
    phi: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(x) for x in np.atleast_1d(self.gamma)))
        object.__setattr__(self, "kappa", tuple(float(x) for x in np.atleast_1d(self.kappa)))
        phi = self.phi
        if len(np.atleast_1d(phi)) == 0 and len(self.kappa) > 0:
            phi = np.zeros(len(self.kappa))
        object.__setattr__(self, "phi", tuple(float(x) for x in np.atleast_1d(phi)))
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if len(self.gamma) == 0:
            raise ValueError("gamma needs at least the input channel 0")
        if any(g < 0 for g in self.gamma):
            raise ValueError("coupling rates gamma must be non-negative")
        if any(k < 0 for k in self.kappa):
            raise ValueError("Bogoliubov rates kappa must be non-negative")
        if len(self.phi) != len(self.kappa):
            raise ValueError(f"phi has {len(self.phi)} entries but kappa has {len(self.kappa)}")
        for i, k in enumerate(self.kappa):
            if k > 0 and i + 1 >= len(self.gamma):
                raise ValueError(
                    f"kappa on channel {i + 1} needs gamma to list that channel "
                    f"(len(gamma) = {len(self.gamma)})"
                )

    @classmethod
    def passive(cls, tau: float, gamma, omega0: float = 0.0) -> "ResonatorModel":
        return cls(omega0=omega0, tau=tau, gamma=tuple(np.atleast_1d(gamma)))

    @property
    def gamma_sum(self) -> float:
        return float(sum(self.gamma))

    @property
    def kappa_sum(self) -> float:
        return float(sum(self.kappa))

    @property
    def is_passive(self) -> bool:
        return self.kappa_sum == 0.0

    @property
    def n_channels(self) -> int:
        return len(self.gamma)

    def bogoliubov_rates(self) -> np.ndarray:
        """``kappa`` laid out per channel, with 0 on channel 0."""
        out = np.zeros(self.n_channels)
        k = self.kappa[: self.n_channels - 1]
        out[1 : 1 + len(k)] = k
        return out

    def bogoliubov_phases(self) -> np.ndarray:
        out = np.zeros(self.n_channels)
        p = self.phi[: self.n_channels - 1]
        out[1 : 1 + len(p)] = p
        return out

    def anomalous_source(self) -> complex:
        """Source term of the noise part of ``<aa>``."""
        g = np.asarray(self.gamma)
        k = self.bogoliubov_rates()
        return complex(np.sum(np.sqrt(g * k) * np.exp(1j * self.bogoliubov_phases())))


class Classification(str, enum.Enum):
    PASSIVE_CONSISTENT = "PassiveConsistent"
    ACTIVE_CONSISTENT = "ActiveConsistent"
    INCONSISTENT = "Inconsistent"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TbpReport:
    tbp: float
    total_gamma: float
    total_kappa: float
    constraint_residual: float
    classification: Classification

    def csv_line(self) -> str:
        from .ioutil import fmt

        return ",".join(
            [fmt(self.tbp), fmt(self.total_gamma), fmt(self.total_kappa),
             fmt(self.constraint_residual), self.classification.value]
        )

    CSV_HEADER = "tbp,total_gamma,total_kappa,residual,classification"


def tbp_report(model: ResonatorModel, tol: float = TOL_FD) -> TbpReport:
    """Time-bandwidth product ``tau*gamma_0`` and the commutator constraint
    ``tau (sum gamma - sum kappa) = 2``."""
    tau = model.tau
    total_gamma = tau * model.gamma_sum
    total_kappa = tau * model.kappa_sum
    residual = tau * (model.gamma_sum - model.kappa_sum) - 2.0
    if abs(residual) > tol:
        cls = Classification.INCONSISTENT
    elif model.is_passive:
        cls = Classification.PASSIVE_CONSISTENT
    else:
        cls = Classification.ACTIVE_CONSISTENT
    return TbpReport(
        tbp=tau * model.gamma[0],
        total_gamma=total_gamma,
        total_kappa=total_kappa,
        constraint_residual=residual,
        classification=cls,
    )


def commutator_analytic(model: ResonatorModel, t):
    """Closed-form ``[a(t), a^dag(t)]`` starting from 1 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    decay = np.exp(-2.0 * t / model.tau)
    out = decay + 0.5 * model.tau * (model.gamma_sum - model.kappa_sum) * (1.0 - decay)
    return float(out) if out.ndim == 0 else out


def qmfs_check(model: ResonatorModel) -> float:
    """Commutator density of the combined input
    ``sum sqrt(g_j) A_j + sum sqrt(k_k) e^{i phi_k} A_k^dag``.

    Zero means the total input has commuting quadratures.
    """
    return model.gamma_sum - model.kappa_sum


def ase_penalty(model: ResonatorModel) -> float:
    """Steady-state noise photons ``tau * sum(kappa) / 2`` added by the Bogoliubov terms."""
    return 0.5 * model.tau * model.kappa_sum


def required_kappa(tau: float, target_tbp: float, other_gamma=()) -> float:
    """Total Bogoliubov rate needed for ``tau*gamma_0 = target_tbp`` under the
    commutator constraint, given the extra passive rates ``other_gamma``."""
    return (target_tbp - 2.0 + tau * float(np.sum(other_gamma))) / tau


# --------------------------------------------------------------------------
# drives and integration


@dataclass(frozen=True)
class ClassicalDrive:
    """Sampled input field ``s_in(t_n)``, ``t_n = n dt``, held constant over each step."""

    samples: np.ndarray
    dt: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if s.size == 0:
            raise ValueError("drive must have at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("drive samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.size)

    @classmethod
    def from_function(cls, func, dt: float, t_end: float) -> "ClassicalDrive":
        n = int(round(t_end / dt)) + 1
        t = dt * np.arange(n)
        return cls(np.asarray(func(t), dtype=complex) * np.ones(n), dt)

    @classmethod
    def zero(cls, dt: float, t_end: float) -> "ClassicalDrive":
        return cls.from_function(lambda t: np.zeros_like(t), dt, t_end)

    @classmethod
    def constant(cls, value: complex, dt: float, t_end: float) -> "ClassicalDrive":
        return cls.from_function(lambda t: np.full(t.shape, value, dtype=complex), dt, t_end)

    @classmethod
    def tone(cls, frequency: float, dt: float, t_end: float, amplitude: complex = 1.0) -> "ClassicalDrive":
        return cls.from_function(lambda t: amplitude * np.exp(1j * frequency * t), dt, t_end)

    @classmethod
    def chirp(cls, f_start: float, rate: float, dt: float, t_end: float, amplitude: complex = 1.0):
        """``amplitude * exp(i (f_start t + rate t^2 / 2))``."""
        return cls.from_function(
            lambda t: amplitude * np.exp(1j * (f_start * t + 0.5 * rate * t * t)), dt, t_end
        )


def check_step(model: ResonatorModel, dt: float) -> None:
    if not dt > 0:
        raise StepTooLargeError(f"dt must be positive, got {dt}")
    if dt > model.tau / 20:
        raise StepTooLargeError(f"dt = {dt} exceeds tau/20 = {model.tau / 20}")
    if model.omega0 != 0 and dt > 0.1 / abs(model.omega0):
        raise StepTooLargeError(f"dt = {dt} exceeds 0.1/|omega0| = {0.1 / abs(model.omega0)}")


def rk4_step(f, t: float, y, h: float):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_classical(model: ResonatorModel, drive: ClassicalDrive, alpha0: complex = 0.0) -> np.ndarray:
    """RK4 trajectory of ``d alpha/dt = (i w0 - 1/tau) alpha + gamma_0 s_in`` at the
    drive's sample times.

    Note the ``+i w0``: ``alpha`` is proportional to ``<a^dag>``, not ``<a>``.
    """
    check_step(model, drive.dt)
    rate = 1j * model.omega0 - 1.0 / model.tau
    g0 = model.gamma[0]
    s = drive.samples
    h = drive.dt
    out = np.empty(s.size, dtype=complex)
    out[0] = alpha = complex(alpha0)
    for n in range(s.size - 1):
        s_n = s[n]
        alpha = rk4_step(lambda _t, y: rate * y + g0 * s_n, n * h, alpha, h)
        out[n + 1] = alpha
    return out


def _rk4_linear(rate: complex, forcing, y0: complex, h: float) -> np.ndarray:
    """RK4 for ``y' = rate*y + f_n`` with ``f`` held over each step.

    For a linear right-hand side one RK4 step is exactly
    ``y_{n+1} = R(z) y_n + h P(z) f_n`` with ``z = rate*h``,
    ``R = 1 + z + z^2/2 + z^3/6 + z^4/24`` and ``P = 1 + z/2 + z^2/6 + z^3/24``,
    so the whole recursion runs as a first-order IIR filter.
    Returns ``[y_0, y_1, ..., y_N]`` for ``N = len(forcing)``.
    """
    z = rate * h
    r = 1 + z + z * z / 2 + z**3 / 6 + z**4 / 24
    p = 1 + z / 2 + z * z / 6 + z**3 / 24
    f = np.asarray(forcing, dtype=complex)
    ys, _ = lfilter([h * p], [1.0, -r], f, zi=[r * y0])
    return np.concatenate([[y0], ys])


@dataclass(frozen=True)
class MomentState:
    t: float
    mean: complex
    number: float
    anomalous: complex
    commutator: float

    @classmethod
    def vacuum(cls, t: float = 0.0) -> "MomentState":
        return cls(t=t, mean=0j, number=0.0, anomalous=0j, commutator=1.0)

    @classmethod
    def coherent(cls, amplitude: complex, t: float = 0.0) -> "MomentState":
        a = complex(amplitude)
        return cls(t=t, mean=a, number=abs(a) ** 2, anomalous=a * a, commutator=1.0)

    @property
    def noise_number(self) -> float:
        return self.number - abs(self.mean) ** 2

    @property
    def noise_anomalous(self) -> complex:
        return self.anomalous - self.mean**2

    def is_physical(self, tol: float = TOL_MOM) -> bool:
        """Positivity of the Gaussian second-moment matrix (noise part)."""
        n = self.noise_number
        return n >= -tol and abs(self.noise_anomalous) <= n + 0.5 * self.commutator + tol


@dataclass(frozen=True)
class MomentTrajectory:
    """Moment time series stored column-wise; indexing yields :class:`MomentState`."""

    t: np.ndarray
    mean: np.ndarray
    number: np.ndarray
    anomalous: np.ndarray
    commutator: np.ndarray

    CSV_HEADER = "t,re_mean,im_mean,number,re_anom,im_anom,commutator"

    def __len__(self):
        return self.t.size

    def __getitem__(self, i) -> MomentState:
        return MomentState(
            t=float(self.t[i]),
            mean=complex(self.mean[i]),
            number=float(self.number[i]),
            anomalous=complex(self.anomalous[i]),
            commutator=float(self.commutator[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def final(self) -> MomentState:
        return self[-1]

    def classical_alpha(self, gamma0: float) -> np.ndarray:
        """Mean field in the classical normalization, ``sqrt(gamma_0) <a^dag>``."""
        return np.sqrt(gamma0) * self.mean.conj()

    def to_csv(self) -> str:
        from .ioutil import fmt

        lines = [self.CSV_HEADER]
        for i in range(len(self)):
            m, a = self.mean[i], self.anomalous[i]
            lines.append(",".join(fmt(x) for x in (
                self.t[i], m.real, m.imag, self.number[i], a.real, a.imag, self.commutator[i]
            )))
        return "\n".join(lines) + "\n"


def propagate_moments(
    model: ResonatorModel,
    state0: MomentState | None = None,
    t_end: float | None = None,
    dt: float | None = None,
    drive: ClassicalDrive | None = None,
) -> MomentTrajectory:
    """Integrate first and second moments with RK4 at fixed step.

    The coherent drive ``s_in`` enters channel 0 as ``<A_0> = conj(s_in)``; all
    other channels are vacuum. With a drive, its ``dt`` sets the step and the
    drive switches off after its last sample. ``t_end`` defaults to the drive
    length. Inconsistent models are integrated as well; the commutator then
    drifts away from 1.
    """
    state0 = MomentState.vacuum() if state0 is None else state0
    if abs(state0.commutator - 1.0) > TOL_MOM:
        raise ValueError(f"initial commutator must be 1, got {state0.commutator}")
    if state0.noise_number < -TOL_MOM:
        raise UnphysicalStateError(f"initial noise number {state0.noise_number} < 0")
    if drive is not None:
        if dt is not None and dt != drive.dt:
            raise ValueError("dt must match drive.dt when a drive is given")
        dt = drive.dt
        if t_end is None:
            t_end = drive.dt * (drive.samples.size - 1)
    if t_end is None or not t_end > 0:
        raise ValueError("t_end must be positive")
    if dt is None:
        dt = model.tau / DEFAULT_STEPS_PER_TAU
    check_step(model, dt)

    n_steps = int(round(t_end / dt))
    if n_steps < 1:
        raise ValueError(f"t_end = {t_end} shorter than one step dt = {dt}")

    tau = model.tau
    field_rate = -(1j * model.omega0 + 1.0 / tau)
    pop_rate = -2.0 / tau

    mean_forcing = np.zeros(n_steps, dtype=complex)
    if drive is not None:
        m = min(n_steps, drive.samples.size)
        mean_forcing[:m] = np.sqrt(model.gamma[0]) * drive.samples[:m].conj()

    ones = np.ones(n_steps)
    mean = _rk4_linear(field_rate, mean_forcing, state0.mean, dt)
    comm = _rk4_linear(pop_rate, (model.gamma_sum - model.kappa_sum) * ones, state0.commutator, dt).real
    noise_n = _rk4_linear(pop_rate, model.kappa_sum * ones, state0.noise_number, dt).real
    noise_m = _rk4_linear(2 * field_rate, model.anomalous_source() * ones, state0.noise_anomalous, dt)

    if np.any(noise_n < -TOL_MOM):
        i = int(np.argmax(noise_n < -TOL_MOM))
        raise UnphysicalStateError(f"noise photon number {noise_n[i]} < 0 at t = {state0.t + i * dt}")

    t = state0.t + dt * np.arange(n_steps + 1)
    return MomentTrajectory(
        t=t,
        mean=mean,
        number=noise_n + np.abs(mean) ** 2,
        anomalous=noise_m + mean**2,
        commutator=comm,
    )


def steady_state(model: ResonatorModel) -> MomentState:
    """Undriven stationary moments. The population decay rate ``2/tau`` does not
    depend on the couplings, so every model has one."""
    tau = model.tau
    return MomentState(
        t=float("inf"),
        mean=0j,
        number=0.5 * tau * model.kappa_sum,
        anomalous=model.anomalous_source() / (2 * (1j * model.omega0 + 1.0 / tau)),
        commutator=0.5 * tau * (model.gamma_sum - model.kappa_sum),
    )


def lorentzian_response(model: ResonatorModel, detuning) -> np.ndarray:
    """Steady-state ``|alpha|`` for a unit tone ``s_in = exp(i (w0 + detuning) t)``."""
    d = np.asarray(detuning, dtype=float)
    return model.gamma[0] / np.abs(1j * d + 1.0 / model.tau)
