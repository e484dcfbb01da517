"""Line-oriented scenario config.

    # comment
    [scenario.passive_bound]
    kind = TbpReport
    tau = 1
    gamma = 2

Vectors are comma-separated; matrices are given as paths to matrix files,
resolved relative to the config file.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError


class ScenarioKind(str, enum.Enum):
    GAUGE_CHECK = "GaugeCheck"
    TBP_REPORT = "TbpReport"
    CLASSICAL_RUN = "ClassicalRun"
    MOMENT_RUN = "MomentRun"
    ORACLE_RUN = "OracleRun"
    DILATE = "Dilate"
    CLOSURE = "Closure"
    THERMO_RUN = "ThermoRun"


# value types
FLOAT, VECTOR, INT, PATH = "float", "vector", "int", "path"


def _enum(*choices):
    return ("enum", choices)


_MODEL = {"tau": FLOAT, "gamma": VECTOR, "kappa": VECTOR, "phi": VECTOR, "omega0": FLOAT}
_DRIVE = {
    "drive": _enum("zero", "constant", "tone", "chirp"),
    "amplitude": FLOAT,
    "frequency": FLOAT,
    "chirp_rate": FLOAT,
}
_COMMON = {"output": "str", "tol": FLOAT}

SCHEMAS: dict[ScenarioKind, tuple[set[str], dict]] = {
    ScenarioKind.TBP_REPORT: (
        {"tau", "gamma"},
        {**_MODEL, "expect": _enum("PassiveConsistent", "ActiveConsistent", "Inconsistent"), "expect_tbp": FLOAT},
    ),
    ScenarioKind.GAUGE_CHECK: (
        {"matrix"},
        {"matrix": PATH, "expect": _enum("symmetric", "broken"), "expect_defect": FLOAT},
    ),
    ScenarioKind.CLASSICAL_RUN: (
        {"tau", "gamma", "t_end"},
        {**_MODEL, **_DRIVE, "t_end": FLOAT, "dt": FLOAT, "alpha0_re": FLOAT, "alpha0_im": FLOAT,
         "expect_final_abs": FLOAT},
    ),
    ScenarioKind.MOMENT_RUN: (
        {"tau", "gamma", "t_end"},
        {**_MODEL, **_DRIVE, "t_end": FLOAT, "dt": FLOAT, "expect_commutator": FLOAT, "expect_number": FLOAT},
    ),
    ScenarioKind.ORACLE_RUN: (
        {"tau", "gamma", "t_end"},
        {**_MODEL, "t_end": FLOAT, "dt": FLOAT, "expect_commutator": FLOAT, "expect_number": FLOAT},
    ),
    ScenarioKind.DILATE: (
        {"matrix"},
        {"matrix": PATH, "expect_added": INT},
    ),
    ScenarioKind.CLOSURE: (
        {"matrix", "closed_port"},
        {"matrix": PATH, "closed_port": INT, "mirror_phase": FLOAT, "expect_s12": FLOAT, "expect_s21": FLOAT},
    ),
    ScenarioKind.THERMO_RUN: (
        {"mode", "horizon"},
        {"mode": _enum("oneway", "reciprocal", "threebath", "circulator"), "horizon": FLOAT, "dt": FLOAT,
         "g_forward": FLOAT, "g_third": FLOAT, "temperatures": VECTOR, "heat_capacities": VECTOR,
         "expect": _enum("violation", "respected")},
    ),
}


@dataclass
class Scenario:
    name: str
    kind: ScenarioKind
    parameters: dict = field(default_factory=dict)
    output_path: str = ""


_HEADER = re.compile(r"^\[scenario\.([A-Za-z0-9_\-]+)\]$")
_PAIR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def _convert(name: str, key: str, raw: str, typ, base_dir: Path | None):
    def bad(what):
        return ValidationError(f"scenario {name!r}: key {key!r} must be {what}, got {raw!r}", key)

    if typ == FLOAT:
        try:
            return float(raw)
        except ValueError:
            raise bad("a number") from None
    if typ == INT:
        try:
            return int(raw)
        except ValueError:
            raise bad("an integer") from None
    if typ == VECTOR:
        if raw.strip() == "":
            return ()
        try:
            return tuple(float(x) for x in raw.split(","))
        except ValueError:
            raise bad("a comma-separated list of numbers") from None
    if typ == PATH:
        p = Path(raw)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        return str(p)
    if isinstance(typ, tuple) and typ[0] == "enum":
        if raw not in typ[1]:
            raise bad("one of " + ", ".join(typ[1]))
        return raw
    return raw


def _validate(name: str, raw: dict[str, tuple[str, int]], base_dir: Path | None) -> Scenario:
    if "kind" not in raw:
        raise ValidationError(f"scenario {name!r}: missing key 'kind'", "kind")
    kind_text, _ = raw["kind"]
    try:
        kind = ScenarioKind(kind_text)
    except ValueError:
        raise ValidationError(
            f"scenario {name!r}: unknown kind {kind_text!r}; expected one of "
            + ", ".join(k.value for k in ScenarioKind),
            "kind",
        ) from None
    required, types = SCHEMAS[kind]
    types = {**_COMMON, **types}
    params = {}
    for key, (value, _line) in raw.items():
        if key == "kind":
            continue
        if key not in types:
            raise ValidationError(f"scenario {name!r}: unknown key {key!r} for {kind.value}", key)
        params[key] = _convert(name, key, value, types[key], base_dir)
    for key in sorted(required):
        if key not in params:
            raise ValidationError(f"scenario {name!r}: missing required key {key!r}", key)
    if params.get("kappa") and "phi" not in params:
        raise ValidationError(f"scenario {name!r}: 'kappa' given without 'phi'", "phi")
    if "phi" in params and len(params["phi"]) != len(params.get("kappa", ())):
        raise ValidationError(f"scenario {name!r}: 'phi' must have one entry per 'kappa'", "phi")
    output = params.pop("output", "")
    return Scenario(name=name, kind=kind, parameters=params, output_path=output)


def parse_config(text: str, base_dir: str | Path | None = None) -> list[Scenario]:
    base = Path(base_dir) if base_dir is not None else None
    sections: list[tuple[str, dict]] = []
    current: dict | None = None
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise ParseError(f"malformed section header {stripped!r}", lineno)
            name = m.group(1)
            if name in seen:
                raise ParseError(f"duplicate scenario {name!r}", lineno)
            seen.add(name)
            current = {}
            sections.append((name, current))
            continue
        m = _PAIR.match(stripped)
        if not m:
            raise ParseError(f"expected 'key = value', got {stripped!r}", lineno)
        if current is None:
            raise ParseError("key/value pair before any [scenario.<name>] header", lineno)
        key, value = m.group(1), m.group(2).strip()
        if key in current:
            raise ParseError(f"duplicate key {key!r}", lineno)
        current[key] = (value, lineno)
    return [_validate(name, raw, base) for name, raw in sections]


def load_config(path: str | Path) -> list[Scenario]:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
