"""Execute parsed scenarios, write their data files and collect verdicts."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import langevin, network, oracle, scattering, thermo
from .config import Scenario, ScenarioKind
from .errors import QleError
from .ioutil import atomic_write_text, fmt
from .matrixio import dumps_matrix, read_matrix

DEFAULT_OUT_DIR = "qle_out"
DEFAULT_TOL = 1e-6


@dataclass
class ScenarioResult:
    name: str
    verdict: str
    outputs: list[Path] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class ScenarioError(QleError):
    def __init__(self, name: str, exc: Exception):
        self.name = name
        self.cause = exc
        super().__init__(f"[{name}] {type(exc).__name__}: {exc}")


def resolve_out_dir(out_dir: str | os.PathLike | None = None) -> Path:
    if out_dir is not None:
        return Path(out_dir)
    return Path(os.environ.get("QLE_OUT_DIR", DEFAULT_OUT_DIR))


def _model(p: dict) -> langevin.ResonatorModel:
    return langevin.ResonatorModel(
        omega0=p.get("omega0", 0.0),
        tau=p["tau"],
        gamma=p["gamma"],
        kappa=p.get("kappa", ()),
        phi=p.get("phi", ()),
    )


def _drive(p: dict, dt: float, t_end: float) -> langevin.ClassicalDrive:
    kind = p.get("drive", "zero")
    amp = p.get("amplitude", 1.0)
    if kind == "zero":
        return langevin.ClassicalDrive.zero(dt, t_end)
    if kind == "constant":
        return langevin.ClassicalDrive.constant(amp, dt, t_end)
    if kind == "tone":
        return langevin.ClassicalDrive.tone(p.get("frequency", 0.0), dt, t_end, amp)
    return langevin.ClassicalDrive.chirp(p.get("frequency", 0.0), p.get("chirp_rate", 0.0), dt, t_end, amp)


class _Checker:
    def __init__(self, params: dict):
        self.params = params
        self.tol = params.get("tol", DEFAULT_TOL)
        self.failures: list[str] = []

    def value(self, key: str, actual: float) -> None:
        if key in self.params and not abs(actual - self.params[key]) <= self.tol:
            self.failures.append(f"{key}: expected {self.params[key]!r}, got {actual!r} (tol {self.tol:g})")

    def equal(self, key: str, actual) -> None:
        if key in self.params and self.params[key] != actual:
            self.failures.append(f"{key}: expected {self.params[key]!r}, got {actual!r}")

    def require(self, ok: bool, message: str) -> None:
        if not ok:
            self.failures.append(message)


def _run_tbp(sc, out, chk):
    rep = langevin.tbp_report(_model(sc.parameters))
    atomic_write_text(out, f"{rep.CSV_HEADER}\n{rep.csv_line()}\n")
    chk.equal("expect", rep.classification.value)
    chk.value("expect_tbp", rep.tbp)
    return f"{rep.classification} tbp={rep.tbp:.3f}"


def _run_gauge(sc, out, chk):
    g = network.validate_coupling(read_matrix(sc.parameters["matrix"]))
    sol = network.solve_gauge(g)
    rows = ["mode,theta"]
    for j in range(g.dim):
        rows.append(f"{j},{fmt(sol.phases[j]) if sol.exists else 'nan'}")
    atomic_write_text(out, "\n".join(rows) + "\n")
    chk.equal("expect", "symmetric" if sol.exists else "broken")
    chk.value("expect_defect", sol.worst_cycle_defect)
    label = "TimeReversalSymmetric" if sol.exists else "TimeReversalBroken"
    return f"{label} defect={sol.worst_cycle_defect:.9f}"


def _run_classical(sc, out, chk):
    p = sc.parameters
    model = _model(p)
    dt = p.get("dt", model.tau / langevin.DEFAULT_STEPS_PER_TAU)
    drive = _drive(p, dt, p["t_end"])
    alpha = langevin.integrate_classical(model, drive, complex(p.get("alpha0_re", 0.0), p.get("alpha0_im", 0.0)))
    lines = ["t,re_alpha,im_alpha"]
    lines += [f"{fmt(t)},{fmt(a.real)},{fmt(a.imag)}" for t, a in zip(drive.times, alpha)]
    atomic_write_text(out, "\n".join(lines) + "\n")
    final = abs(alpha[-1])
    chk.value("expect_final_abs", final)
    return f"final |alpha|={final:.6f}"


def _run_moments(sc, out, chk):
    p = sc.parameters
    model = _model(p)
    dt = p.get("dt", model.tau / langevin.DEFAULT_STEPS_PER_TAU)
    drive = _drive(p, dt, p["t_end"]) if p.get("drive", "zero") != "zero" else None
    traj = langevin.propagate_moments(model, t_end=p["t_end"], dt=dt, drive=drive)
    atomic_write_text(out, traj.to_csv())
    f = traj.final
    chk.value("expect_commutator", f.commutator)
    chk.value("expect_number", f.number)
    rep = langevin.tbp_report(model)
    return f"{rep.classification} commutator={f.commutator:.6f} number={f.number:.6f}"


def _run_oracle(sc, out, chk):
    p = sc.parameters
    model = _model(p)
    st = oracle.discrete_mode_oracle(model, p.get("dt"), p["t_end"])
    row = [st.t, st.mean.real, st.mean.imag, st.number, st.anomalous.real, st.anomalous.imag, st.commutator]
    atomic_write_text(out, langevin.MomentTrajectory.CSV_HEADER + "\n" + ",".join(fmt(x) for x in row) + "\n")
    chk.value("expect_commutator", st.commutator)
    chk.value("expect_number", st.number)
    return f"oracle commutator={st.commutator:.6f} number={st.number:.6f}"


def _run_dilate(sc, out, chk):
    s = scattering.ScatteringMatrix(read_matrix(sc.parameters["matrix"]))
    big = scattering.dilate_to_unitary(s)
    atomic_write_text(out, dumps_matrix(big.entries))
    added = big.dim - s.dim
    chk.equal("expect_added", added)
    chk.require(scattering.classify(big).unitary, "dilation is not unitary")
    chk.require(np.allclose(big.entries[: s.dim, : s.dim], s.entries, rtol=0, atol=1e-8),
                "dilation does not contain the input block")
    return f"unitary dilation {s.dim}->{big.dim} ports (added {added})"


def _run_closure(sc, out, chk):
    p = sc.parameters
    s3 = read_matrix(p["matrix"])
    red = scattering.close_port(s3, p["closed_port"], p.get("mirror_phase", 0.0))
    atomic_write_text(out, dumps_matrix(red.entries))
    s12, s21 = abs(red.entries[0, 1]), abs(red.entries[1, 0])
    chk.value("expect_s12", s12)
    chk.value("expect_s21", s21)
    chk.require(abs(s12 - s21) <= scattering.TOL_S, f"|S12| - |S21| = {s12 - s21:.3e}")
    return f"|S12|={s12:.6f} |S21|={s21:.6f}"


def _run_thermo(sc, out, chk):
    p = sc.parameters
    mode = p["mode"]
    g_f = p.get("g_forward", 0.1)
    g_3 = p.get("g_third", 0.0)
    temps = p.get("temperatures")
    caps = p.get("heat_capacities")
    if mode in ("oneway", "reciprocal"):
        system = thermo.two_bath(
            thermo.LinkMode.ONE_WAY if mode == "oneway" else thermo.LinkMode.RECIPROCAL,
            g_f,
            temps or (1.0, 1.0),
            caps or (1.0, 1.0),
        )
    else:
        kw = {}
        if temps:
            kw["temperature"] = temps[0]
        if caps:
            kw["heat_capacity"] = caps[0]
        build = thermo.three_bath_system if mode == "threebath" else thermo.circulator_system
        system = build(g_f, g_3, **kw)
    system = thermo.run(system, p.get("dt"), p["horizon"])
    atomic_write_text(out, system.to_csv())
    report = thermo.detect_violation(system)
    chk.equal("expect", "violation" if report.violated else "respected")
    return report.verdict()


_RUNNERS = {
    ScenarioKind.TBP_REPORT: (_run_tbp, ".csv"),
    ScenarioKind.GAUGE_CHECK: (_run_gauge, ".csv"),
    ScenarioKind.CLASSICAL_RUN: (_run_classical, ".csv"),
    ScenarioKind.MOMENT_RUN: (_run_moments, ".csv"),
    ScenarioKind.ORACLE_RUN: (_run_oracle, ".csv"),
    ScenarioKind.DILATE: (_run_dilate, ".txt"),
    ScenarioKind.CLOSURE: (_run_closure, ".txt"),
    ScenarioKind.THERMO_RUN: (_run_thermo, ".csv"),
}


def run_scenario(scenario: Scenario, out_dir: str | os.PathLike | None = None) -> ScenarioResult:
    func, suffix = _RUNNERS[scenario.kind]
    out = resolve_out_dir(out_dir) / (scenario.output_path or scenario.name + suffix)
    chk = _Checker(scenario.parameters)
    try:
        verdict = func(scenario, out, chk)
    except (QleError, ValueError, OSError, IndexError) as exc:
        raise ScenarioError(scenario.name, exc) from exc
    return ScenarioResult(scenario.name, verdict, [out], chk.failures)


def run_scenarios(scenarios, out_dir=None, check: bool = False, echo=print) -> int:
    """Run every scenario in order, printing one verdict line each.

    Returns the process exit status: 0 when all scenarios executed (and, with
    ``check``, all expectations held), 1 otherwise.
    """
    status = 0
    for sc in scenarios:
        try:
            res = run_scenario(sc, out_dir)
        except ScenarioError as exc:
            echo(f"[{sc.name}] ERROR {type(exc.cause).__name__}: {exc.cause}")
            status = 1
            continue
        echo(f"[{res.name}] {res.verdict}")
        if check:
            for msg in res.failures:
                echo(f"[{res.name}] CHECK FAILED {msg}")
                status = 1
            if res.passed:
                echo(f"[{res.name}] CHECK OK")
    return status
