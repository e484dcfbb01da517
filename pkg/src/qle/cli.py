"""Command-line entry point ``qle``."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import langevin, network, scattering, thermo
from .config import load_config
from .errors import QleError
from .ioutil import atomic_write_text, fmt
from .matrixio import dumps_matrix, read_matrix
from .runner import resolve_out_dir, run_scenarios


def bundled_config() -> Path:
    return Path(str(resources.files("qle") / "scenarios" / "bundled.cfg"))


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _cmd_run(args) -> int:
    if args.bundled:
        path = bundled_config()
    elif args.config:
        path = Path(args.config)
    else:
        print("qle run: give a config file or --bundled", file=sys.stderr)
        return 2
    scenarios = load_config(path)
    return run_scenarios(scenarios, resolve_out_dir(args.out_dir), check=args.check)


def _cmd_tbp(args) -> int:
    model = langevin.ResonatorModel(
        omega0=args.omega0, tau=args.tau, gamma=args.gamma, kappa=args.kappa, phi=args.phi or ()
    )
    rep = langevin.tbp_report(model)
    print(rep.CSV_HEADER)
    print(rep.csv_line())
    print(f"{rep.classification} tbp={rep.tbp:.3f} ase_noise={langevin.ase_penalty(model):.6g}")
    return 0


def _cmd_gauge(args) -> int:
    g = network.validate_coupling(read_matrix(args.matrix))
    sol = network.solve_gauge(g)
    print(f"exists={str(sol.exists).lower()} worst_cycle_defect={fmt(sol.worst_cycle_defect)}")
    if sol.exists:
        print("phases=" + ",".join(fmt(x) for x in sol.phases))
    return 0


def _cmd_dilate(args) -> int:
    s = scattering.ScatteringMatrix(read_matrix(args.matrix))
    big = scattering.dilate_to_unitary(s)
    text = dumps_matrix(big.entries)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    cls = scattering.classify(big)
    print(cls.CSV_HEADER)
    print(cls.csv_line())
    return 0


def _cmd_thermo(args) -> int:
    mode = args.mode
    if mode in ("oneway", "reciprocal"):
        system = thermo.two_bath(
            mode="OneWay" if mode == "oneway" else "Reciprocal",
            conductance=args.g_forward,
            temperatures=args.temperatures or (1.0, 1.0),
            heat_capacities=args.heat_capacities or (1.0, 1.0),
        )
    else:
        build = thermo.three_bath_system if mode == "threebath" else thermo.circulator_system
        system = build(args.g_forward, args.g_third)
    system = thermo.run(system, args.dt, args.horizon)
    if args.out:
        atomic_write_text(args.out, system.to_csv())
    print(thermo.detect_violation(system).verdict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qle", description="Resonator time-bandwidth limit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run scenarios from a config file")
    p.add_argument("config", nargs="?")
    p.add_argument("--bundled", action="store_true", help="run the bundled scenario set")
    p.add_argument("--check", action="store_true", help="treat expectations as pass/fail assertions")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("tbp", help="time-bandwidth product and commutator constraint")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--gamma", type=_floats, required=True)
    p.add_argument("--kappa", type=_floats, default=())
    p.add_argument("--phi", type=_floats, default=())
    p.add_argument("--omega0", type=float, default=0.0)
    p.set_defaults(func=_cmd_tbp)

    p = sub.add_parser("gauge", help="time-reversal gauge of a coupling matrix")
    p.add_argument("matrix")
    p.set_defaults(func=_cmd_gauge)

    p = sub.add_parser("dilate", help="minimal unitary dilation of a scattering matrix")
    p.add_argument("matrix")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dilate)

    p = sub.add_parser("thermo", help="bath network entropy run")
    p.add_argument("--mode", choices=["oneway", "reciprocal", "threebath", "circulator"], required=True)
    p.add_argument("--g-forward", type=float, default=0.1)
    p.add_argument("--g-third", type=float, default=0.0)
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--temperatures", type=_floats, default=())
    p.add_argument("--heat-capacities", type=_floats, default=())
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_thermo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QleError, OSError) as exc:
        print(f"qle: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
