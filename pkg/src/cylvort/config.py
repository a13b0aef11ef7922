"""Plain key-value run configuration.

Grammar, one entry per line:

    # full-line comment
    key = value          # trailing comments allowed
    sim.tail_exponents = 0,1,2,3   (integer lists are comma-separated)

Keys are dotted lowercase identifiers from the registry below; anything
else is rejected with the offending line number.  Booleans are the
literals true/false.  The single top-level `seed` feeds every seeded
component; there is no other source of randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import INTEGRATORS, ProbeSpec, SimConfig
from .errors import ConfigError
from .scenarios import ScenarioSpec

_SCHEMA: dict[str, type | str] = {
    "scenario.kind": str,
    "scenario.blob_count": int,
    "scenario.delta": float,
    "scenario.circulation_scale": float,
    "scenario.nonneg": bool,
    "scenario.radius": float,
    "scenario.center_x": float,
    "scenario.center_y": float,
    "scenario.separation": float,
    "sim.dt": float,
    "sim.t_end": float,
    "sim.output_every": int,
    "sim.integrator": str,
    "sim.tail_exponents": "int_list",
    "probe.x_min": float,
    "probe.x_max": float,
    "probe.num_x": int,
    "probe.num_y": int,
    "seed": int,
    "output.csv": str,
    "output.manifest": str,
    "output.snapshot": str,
}

_BOOL_LITERALS = {"true": True, "false": False}


def _parse_value(key: str, raw: str, line_no: int):
    kind = _SCHEMA[key]
    try:
        if kind is bool:
            lit = raw.strip().lower()
            if lit not in _BOOL_LITERALS:
                raise ValueError("expected true or false")
            return _BOOL_LITERALS[lit]
        if kind is int:
            return int(raw.strip())
        if kind is float:
            v = float(raw.strip())
            if math.isnan(v):
                raise ValueError("nan is not a valid setting")
            return v
        if kind == "int_list":
            return tuple(int(p.strip()) for p in raw.split(",") if p.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(
            f"line {line_no}: key {key!r}: cannot parse {raw.strip()!r} ({exc})"
        ) from None


def parse_kv_text(text: str) -> dict[str, object]:
    """Parse config text into {key: typed value}; errors carry line numbers."""
    out: dict[str, object] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {body!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        out[key] = _parse_value(key, raw, line_no)
    return out


@dataclass(frozen=True)
class RunConfig:
    """Everything cmd-simulate needs: scenario, dynamics, output paths."""

    scenario: ScenarioSpec
    sim: SimConfig
    csv_path: str | None
    manifest_path: str | None
    snapshot_path: str | None
    raw: dict


def _require(kv: dict, key: str):
    if key not in kv:
        raise ConfigError(f"missing required key {key!r}")
    return kv[key]


def run_config_from_kv(kv: dict[str, object]) -> RunConfig:
    seed = int(kv.get("seed", 0))

    scen_kwargs: dict = {"kind": _require(kv, "scenario.kind"), "seed": seed}
    for field_name in ("blob_count", "delta", "circulation_scale", "nonneg",
                       "radius", "separation"):
        key = f"scenario.{field_name}"
        if key in kv:
            scen_kwargs[field_name] = kv[key]
    if "scenario.center_x" in kv or "scenario.center_y" in kv:
        scen_kwargs["center"] = (
            float(kv.get("scenario.center_x", 0.0)),
            float(kv.get("scenario.center_y", math.pi)),
        )
    scenario = ScenarioSpec(**scen_kwargs)

    probe_kwargs = {}
    for field_name in ("x_min", "x_max", "num_x", "num_y"):
        key = f"probe.{field_name}"
        if key in kv:
            probe_kwargs[field_name] = kv[key]
    integrator = kv.get("sim.integrator", "rk4")
    if integrator not in INTEGRATORS:
        raise ConfigError(
            f"key 'sim.integrator': unknown integrator {integrator!r}; "
            f"expected one of {', '.join(INTEGRATORS)}"
        )
    try:
        probe = ProbeSpec(**probe_kwargs)
        sim = SimConfig(
            dt=float(_require(kv, "sim.dt")),
            t_end=float(_require(kv, "sim.t_end")),
            output_every=int(kv.get("sim.output_every", 1)),
            integrator=str(integrator),
            tail_exponents=tuple(kv.get("sim.tail_exponents", range(0, 7))),
            seed=seed,
            sup_u1_probe=probe,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return RunConfig(
        scenario=scenario,
        sim=sim,
        csv_path=kv.get("output.csv"),
        manifest_path=kv.get("output.manifest"),
        snapshot_path=kv.get("output.snapshot"),
        raw=dict(kv),
    )


def load_run_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        return run_config_from_kv(parse_kv_text(text))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
