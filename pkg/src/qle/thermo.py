"""Finite heat baths exchanging energy through one-way and reciprocal links.

A ``OneWay`` link carries power ``g * T_source`` from source to target and
nothing back (a single classical channel in the Rayleigh-Jeans limit whose
reverse direction is forbidden). A ``Reciprocal`` link carries the net power
``g * (T_source - T_target)``. Bath temperatures follow explicit Euler steps
and the total entropy ``S = sum_i C_i ln T_i`` is recorded after each step.

Starting from equal temperatures, any net one-way transfer spreads the
temperatures apart at fixed total energy, which lowers ``S``: the second law
is violated unless every bath's one-way outflow is matched by one-way inflow,
as in a circulator loop.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveTemperatureError, StabilityGuardError
from .ioutil import fmt

STABILITY_LIMIT = 0.1


class LinkMode(str, enum.Enum):
    ONE_WAY = "OneWay"
    RECIPROCAL = "Reciprocal"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Bath:
    temperature: float
    heat_capacity: float = 1.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not self.heat_capacity > 0:
            raise ValueError(f"heat capacity must be positive, got {self.heat_capacity}")


@dataclass(frozen=True)
class Link:
    source: int
    target: int
    conductance: float
    mode: LinkMode = LinkMode.RECIPROCAL

    def __post_init__(self):
        object.__setattr__(self, "mode", LinkMode(self.mode))
        if self.conductance < 0:
            raise ValueError(f"conductance must be non-negative, got {self.conductance}")
        if self.source == self.target:
            raise ValueError("a link needs two distinct baths")


def total_entropy(temperatures, heat_capacities) -> float:
    return math.fsum(c * math.log(t) for t, c in zip(temperatures, heat_capacities))


@dataclass(frozen=True)
class BathSystem:
    """Baths, links and the recorded history (times, temperatures, entropy)."""

    baths: tuple[Bath, ...]
    links: tuple[Link, ...]
    times: np.ndarray = field(repr=False)
    temperature_history: np.ndarray = field(repr=False)
    entropy_ledger: np.ndarray = field(repr=False)

    @classmethod
    def create(cls, baths, links=()) -> "BathSystem":
        baths = tuple(baths)
        links = tuple(links)
        for ln in links:
            for idx in (ln.source, ln.target):
                if not 0 <= idx < len(baths):
                    raise IndexError(f"link refers to bath {idx}, have {len(baths)} baths")
        temps = np.array([[b.temperature for b in baths]], dtype=float)
        caps = [b.heat_capacity for b in baths]
        return cls(
            baths=baths,
            links=links,
            times=np.zeros(1),
            temperature_history=temps,
            entropy_ledger=np.array([total_entropy(temps[0], caps)]),
        )

    def __post_init__(self):
        for arr in (self.times, self.temperature_history, self.entropy_ledger):
            arr.setflags(write=False)

    @property
    def heat_capacities(self) -> np.ndarray:
        return np.array([b.heat_capacity for b in self.baths])

    @property
    def temperatures(self) -> np.ndarray:
        return self.temperature_history[-1]

    @property
    def t(self) -> float:
        return float(self.times[-1])

    @property
    def entropy_initial(self) -> float:
        return float(self.entropy_ledger[0])

    def energy(self) -> float:
        return math.fsum(self.heat_capacities * self.temperatures)

    def max_stable_dt(self) -> float:
        g = sum(ln.conductance for ln in self.links)
        if g == 0:
            return math.inf
        return STABILITY_LIMIT * float(self.heat_capacities.min()) / g

    def default_dt(self) -> float:
        return min(0.5 * self.max_stable_dt(), 0.01)

    def to_csv(self) -> str:
        n = len(self.baths)
        header = ["t", *[f"T_{i + 1}" for i in range(n)], "S_total", "S_deficit"]
        lines = [",".join(header)]
        s0 = self.entropy_initial
        for t, temps, s in zip(self.times, self.temperature_history, self.entropy_ledger):
            lines.append(",".join([fmt(t), *(fmt(x) for x in temps), fmt(s), fmt(s0 - s)]))
        return "\n".join(lines) + "\n"


def _check_dt(system: BathSystem, dt: float) -> None:
    if not dt > 0:
        raise StabilityGuardError(f"dt must be positive, got {dt}")
    g = sum(ln.conductance for ln in system.links)
    ratio = dt * g / float(system.heat_capacities.min())
    if ratio >= STABILITY_LIMIT:
        raise StabilityGuardError(f"dt * sum(g) / min(C) = {ratio:.3g} >= {STABILITY_LIMIT}")


def _advance(temps: list[float], caps: list[float], links, dt: float) -> list[float]:
    flow = [0.0] * len(temps)
    for ln in links:
        if ln.mode is LinkMode.ONE_WAY:
            p = ln.conductance * temps[ln.source]
        else:
            p = ln.conductance * (temps[ln.source] - temps[ln.target])
        flow[ln.source] -= p
        flow[ln.target] += p
    new = [t + f * dt / c for t, f, c in zip(temps, flow, caps)]
    for i, t in enumerate(new):
        if not t > 0:
            raise NonPositiveTemperatureError(f"bath {i} temperature would reach {t}")
    return new


def step(system: BathSystem, dt: float) -> BathSystem:
    """Advance by one Euler step and append to the history."""
    return run(system, dt, dt)


def run(
    system: BathSystem,
    dt: float | None = None,
    horizon: float = 1.0,
    stop_on_violation: bool = False,
    tol: float | None = None,
) -> BathSystem:
    """Take ``round(horizon/dt)`` Euler steps from the system's current state.

    With ``stop_on_violation`` the run ends at the first entropy deficit beyond
    ``tol`` (see :func:`entropy_tolerance`).
    """
    if dt is None:
        dt = system.default_dt()
    _check_dt(system, dt)
    n_steps = max(1, int(round(horizon / dt)))
    caps = [b.heat_capacity for b in system.baths]
    temps = [float(x) for x in system.temperatures]
    s0 = system.entropy_initial
    if tol is None:
        tol = entropy_tolerance(s0)
    t0 = system.t

    hist = np.empty((n_steps, len(temps)))
    ledger = np.empty(n_steps)
    done = n_steps
    for i in range(n_steps):
        temps = _advance(temps, caps, system.links, dt)
        hist[i] = temps
        ledger[i] = total_entropy(temps, caps)
        if stop_on_violation and ledger[i] - s0 < -tol:
            done = i + 1
            break

    return BathSystem(
        baths=system.baths,
        links=system.links,
        times=np.concatenate([system.times, t0 + dt * np.arange(1, done + 1)]),
        temperature_history=np.concatenate([system.temperature_history, hist[:done]]),
        entropy_ledger=np.concatenate([system.entropy_ledger, ledger[:done]]),
    )


def entropy_tolerance(entropy_initial: float) -> float:
    return 1e-12 * abs(entropy_initial) + 1e-12


@dataclass(frozen=True)
class ViolationReport:
    violated: bool
    first_violation_time: float | None
    max_entropy_deficit: float

    def verdict(self) -> str:
        if self.violated:
            return f"SECOND-LAW VIOLATION at t={self.first_violation_time:.6g} deficit={self.max_entropy_deficit:.3e}"
        return f"second law respected deficit={self.max_entropy_deficit:.3e}"


def detect_violation(system: BathSystem, tol: float | None = None) -> ViolationReport:
    ledger = system.entropy_ledger
    if ledger.size < 2:
        raise ValueError("need at least one step in the entropy ledger")
    s0 = system.entropy_initial
    if tol is None:
        tol = entropy_tolerance(s0)
    change = ledger - s0
    deficit = max(0.0, -float(change.min()))
    below = np.flatnonzero(change < -tol)
    if below.size:
        return ViolationReport(True, float(system.times[below[0]]), deficit)
    return ViolationReport(False, None, deficit)


# --------------------------------------------------------------------------
# scenarios


def two_bath(
    mode: LinkMode | str,
    conductance: float,
    temperatures=(1.0, 1.0),
    heat_capacities=(1.0, 1.0),
) -> BathSystem:
    """Two baths joined by a single link from bath 0 to bath 1."""
    baths = [Bath(t, c) for t, c in zip(temperatures, heat_capacities)]
    return BathSystem.create(baths, [Link(0, 1, conductance, LinkMode(mode))])


def three_bath_system(g_forward: float, g_third: float, temperature: float = 1.0, heat_capacity: float = 1.0):
    """One-way link 0 -> 1 plus reciprocal links from both baths to bath 2."""
    baths = [Bath(temperature, heat_capacity) for _ in range(3)]
    links = [
        Link(0, 1, g_forward, LinkMode.ONE_WAY),
        Link(0, 2, g_third, LinkMode.RECIPROCAL),
        Link(1, 2, g_third, LinkMode.RECIPROCAL),
    ]
    return BathSystem.create(baths, links)


def circulator_system(g_forward: float, g_third: float = 0.0, temperature: float = 1.0, heat_capacity: float = 1.0):
    """Baths on the three ports of an ideal circulator: one-way links
    0 -> 1 -> 2 -> 0 of equal conductance, optionally with reciprocal links of
    conductance ``g_third`` between bath 2 and the other two."""
    baths = [Bath(temperature, heat_capacity) for _ in range(3)]
    links = [
        Link(0, 1, g_forward, LinkMode.ONE_WAY),
        Link(1, 2, g_forward, LinkMode.ONE_WAY),
        Link(2, 0, g_forward, LinkMode.ONE_WAY),
    ]
    if g_third > 0:
        links += [Link(0, 2, g_third, LinkMode.RECIPROCAL), Link(1, 2, g_third, LinkMode.RECIPROCAL)]
    return BathSystem.create(baths, links)


@dataclass(frozen=True)
class RestoreReport:
    system: BathSystem
    violation: ViolationReport
    critical_g_third: float | None
    search_upper: float

    @property
    def violated(self) -> bool:
        return self.violation.violated


def _violates(system: BathSystem, horizon: float) -> bool:
    return detect_violation(run(system, horizon=horizon, stop_on_violation=True)).violated


def critical_third_conductance(
    g_forward: float,
    horizon: float,
    upper: float | None = None,
    rel_tol: float = 1e-3,
    **bath_kw,
) -> float | None:
    """Smallest ``g_third`` in ``[0, upper]`` for which the three-bath system
    shows no violation over ``horizon``, by bisection. ``None`` if even
    ``upper`` violates."""
    if g_forward == 0:
        return 0.0
    if upper is None:
        upper = 1000.0 * g_forward
    if _violates(three_bath_system(g_forward, upper, **bath_kw), horizon):
        return None
    lo, hi = 0.0, upper
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if _violates(three_bath_system(g_forward, mid, **bath_kw), horizon):
            lo = mid
        else:
            hi = mid
    return hi


def three_bath_restore(
    g_forward: float,
    g_third: float,
    horizon: float,
    dt: float | None = None,
    search: bool = True,
    search_upper: float | None = None,
    **bath_kw,
) -> RestoreReport:
    """Run the one-way pair with a reciprocally coupled third bath.

    Also bisects for the smallest third-bath conductance that avoids a
    violation (``critical_g_third``). For this topology there is none: the
    stationary state keeps a temperature split of order ``g_forward/g_third``,
    so the entropy settles about ``(g_forward/g_third)^2`` below its initial
    value. :func:`circulator_restore` gives the closure that does work.
    """
    if g_forward < 0 or g_third < 0:
        raise ValueError("conductances must be non-negative")
    system = run(three_bath_system(g_forward, g_third, **bath_kw), dt, horizon)
    upper = 1000.0 * g_forward if search_upper is None else search_upper
    critical = critical_third_conductance(g_forward, horizon, upper, **bath_kw) if search else None
    return RestoreReport(system, detect_violation(system), critical, upper)


def circulator_restore(g_forward: float, horizon: float, g_third: float = 0.0, dt: float | None = None, **bath_kw) -> RestoreReport:
    """Run three baths on an ideal circulator loop; no entropy deficit can appear."""
    system = run(circulator_system(g_forward, g_third, **bath_kw), dt, horizon)
    return RestoreReport(system, detect_violation(system), None, 0.0)
