"""Command-line front end: ``holoqutrit {table,synth,evolve,qpt,rb}``.

A run is described by one JSON document (``--config``) whose ``command`` key
names the subcommand; command-line flags override file values. Every output
JSON carries a ``provenance`` block (config hash, seed, library versions) and
a ``timestamp`` that is the only field allowed to differ between reruns.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__
from .benchmarking import (DEFAULT_M_VALUES, FitError, RBConfig, average_error,
                           interleaved_fidelity, rb_to_json, run_rb, write_rb_csv)
from .clifford import NAMES, NUM_CLIFFORDS, clifford_lookup, table, table_as_json
from .core import GateSpec, QutritState, check_density_matrix, ket
from .dynamics import (DEFAULT_STEPS, IntegrationError, NoiseModel, propagate_lindblad,
                       propagate_unitary, write_trajectory_csv)
from .pulses import DEFAULT_TAU, sample_drives, synthesize, write_waveform_csv
from .tomography import ReadoutModel, TomographyError, run_qpt

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


_GATE_PROPS = {
    "clifford": {"type": "array", "items": {"type": "integer", "minimum": 0,
                                            "maximum": NUM_CLIFFORDS - 1}},
    "gamma": {"type": "number"},
    "axis": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
    "rotation_class": {"enum": ["identity", "pi", "pi/2", "2pi/3", "all"]},
}
_NOISE_PROPS = {
    "noise": {"type": "boolean"},
    "t1_e0": {"type": "number", "exclusiveMinimum": 0},
    "t1_1e": {"type": "number", "exclusiveMinimum": 0},
    "tphi_e0": {"type": "number", "exclusiveMinimum": 0},
    "tphi_1e": {"type": "number", "exclusiveMinimum": 0},
    "readout": {"type": "boolean"},
}
_COMMON = {
    "command": {"enum": ["table", "synth", "evolve", "qpt", "rb"]},
    "out": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
    "steps": {"type": "integer", "minimum": 100},
    "tau": {"type": "number", "exclusiveMinimum": 0},
}
_COMMAND_PROPS = {
    "table": {},
    "synth": {**_GATE_PROPS, "samples": {"type": "integer", "minimum": 2}},
    "evolve": {**_GATE_PROPS, **_NOISE_PROPS,
               "initial": {"enum": ["0", "e", "1", "+", "+i"]},
               "trajectory": {"type": "boolean"},
               "record_every": {"type": "integer", "minimum": 1}},
    "qpt": {**_GATE_PROPS, **_NOISE_PROPS,
            "shots": {"type": ["integer", "null"], "minimum": 1}},
    "rb": {**_NOISE_PROPS,
           "m_values": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 3},
           "k": {"type": "integer", "minimum": 1},
           "interleaved": {"type": "array", "items": {"type": "integer", "minimum": 0,
                                                      "maximum": NUM_CLIFFORDS - 1}},
           "reference_fit": {"type": ["string", "null"]},
           "shots": {"type": ["integer", "null"], "minimum": 1}},
}

DEFAULTS = {"out": ".", "seed": 0, "steps": DEFAULT_STEPS, "tau": DEFAULT_TAU, "noise": False,
            "readout": False, "samples": 201, "initial": "0", "trajectory": False,
            "record_every": 20, "k": 50, "m_values": list(DEFAULT_M_VALUES), "interleaved": [],
            "reference_fit": None, "shots": None}


def schema_for(command: str) -> dict:
    return {"type": "object", "additionalProperties": False,
            "properties": {**_COMMON, **_COMMAND_PROPS[command]}}


def resolve_config(command: str, file_cfg: dict, overrides: dict) -> dict:
    """Merge defaults, file values and flag overrides, then validate."""
    if "command" in file_cfg and file_cfg["command"] != command:
        raise ConfigError(f"config is for {file_cfg['command']!r}, not {command!r}")
    allowed = schema_for(command)["properties"]
    cfg = {k: v for k, v in DEFAULTS.items() if k in allowed}
    cfg.update(file_cfg)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    cfg["command"] = command
    try:
        jsonschema.validate(cfg, schema_for(command))
    except jsonschema.ValidationError as exc:
        raise ConfigError(exc.message) from None
    return cfg


def _noise(cfg) -> NoiseModel:
    if not cfg.get("noise"):
        return NoiseModel.off()
    kw = {k: cfg[k] for k in ("t1_e0", "t1_1e", "tphi_e0", "tphi_1e") if k in cfg}
    return NoiseModel(**kw)


def _gates(cfg) -> list:
    if "gamma" in cfg or "axis" in cfg:
        if "gamma" not in cfg or "axis" not in cfg:
            raise ConfigError("explicit gates need both gamma and axis")
        axis = np.asarray(cfg["axis"], dtype=float)
        if np.linalg.norm(axis) == 0:
            raise ConfigError("axis must be nonzero")
        try:
            return [GateSpec(cfg["gamma"], tuple(axis / np.linalg.norm(axis)))]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if "rotation_class" in cfg:
        cls = cfg["rotation_class"]
        return [e.spec for e in table() if cls == "all" or e.rotation_class == cls]
    if "clifford" in cfg:
        return [clifford_lookup(i) for i in cfg["clifford"]]
    raise ConfigError("select a gate with --clifford, --class or --gamma/--axis")


def _label(spec: GateSpec) -> str:
    if spec.clifford_index is not None:
        return f"C{spec.clifford_index}"
    return "gate"


def provenance(cfg: dict) -> dict:
    # The output location does not change results, so it is left out of the hash.
    canon = json.dumps({k: v for k, v in cfg.items() if k != "out"}, sort_keys=True,
                       separators=(",", ":"))
    return {"config_hash": hashlib.sha256(canon.encode()).hexdigest(), "seed": cfg.get("seed", 0),
            "versions": {"holoqutrit": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__},
            "basis_order": "0,e,1"}


def _write_json(path: Path, payload, cfg) -> None:
    doc = {"provenance": provenance(cfg),
           "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
           "data": payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))


def cmd_table(cfg, out: Path) -> list:
    path = out / "clifford_table.json"
    _write_json(path, table_as_json(), cfg)
    return [path]


def cmd_synth(cfg, out: Path) -> list:
    written = []
    for spec in _gates(cfg):
        sched = synthesize(spec, cfg["tau"])
        stem = _label(spec)
        jpath, cpath = out / f"schedule_{stem}.json", out / f"waveform_{stem}.csv"
        _write_json(jpath, sched.to_json(), cfg)
        write_waveform_csv(cpath, sample_drives(sched, cfg["samples"]))
        written += [jpath, cpath]
    return written


_INITIAL = {"0": ket(0), "e": ket(1), "1": ket(2),
            "+": ket(0) + ket(2), "+i": ket(0) + 1j * ket(2)}


def _cjson(a):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]


def cmd_evolve(cfg, out: Path) -> list:
    written = []
    noise = _noise(cfg)
    rho0 = check_density_matrix(QutritState(_INITIAL[cfg["initial"]]).density_matrix())
    rec = cfg["record_every"] if cfg["trajectory"] else None
    for spec in _gates(cfg):
        sched = synthesize(spec, cfg["tau"])
        stem = _label(spec)
        if noise.enabled:
            res = propagate_lindblad(sched, noise, rho0, cfg["steps"], rec)
            payload = {"mode": "lindblad", "final_rho": _cjson(res.final_rho),
                       "final_map": _cjson(res.final_map), "steps": res.step_count}
            traj = res.trajectory
        else:
            res = propagate_unitary(sched, cfg["steps"], rec)
            u = res.final_unitary
            payload = {"mode": "unitary", "final_unitary": _cjson(u),
                       "final_rho": _cjson(u @ rho0 @ u.conj().T), "steps": res.step_count}
            traj = [v @ rho0 @ v.conj().T for v in res.trajectory]
        path = out / f"evolve_{stem}.json"
        _write_json(path, payload, cfg)
        written.append(path)
        if rec:
            tpath = out / f"trajectory_{stem}.csv"
            write_trajectory_csv(tpath, res.times, traj)
            written.append(tpath)
    return written


def cmd_qpt(cfg, out: Path) -> list:
    noise = _noise(cfg)
    readout = ReadoutModel() if cfg["readout"] else None
    rng = np.random.Generator(np.random.Philox(cfg["seed"]))
    written, summary = [], {}
    for spec in _gates(cfg):
        res = run_qpt(spec, noise, tau=cfg["tau"], steps=cfg["steps"], readout=readout,
                      shots=cfg.get("shots"), rng=rng)
        stem = _label(spec)
        jpath, cpath = out / f"chi_{stem}.json", out / f"chi_abs_{stem}.csv"
        _write_json(jpath, {"measured": res.chi.to_json(), "ideal": res.chi_ideal.to_json()}, cfg)
        res.chi.write_abs_csv(cpath)
        summary[stem] = res.summary()
        written += [jpath, cpath]
    fids = [s["fidelity"] for s in summary.values()]
    spath = out / "qpt_summary.json"
    _write_json(spath, {"gates": summary, "mean_fidelity": float(np.mean(fids))}, cfg)
    return written + [spath]


def _rb_config(cfg, interleaved=None, readout=True) -> RBConfig:
    return RBConfig(m_values=tuple(cfg["m_values"]), k=cfg["k"], seed=cfg["seed"],
                    interleaved_gate=interleaved, noise=_noise(cfg),
                    readout=ReadoutModel() if cfg["readout"] and readout else None,
                    tau=cfg["tau"], steps=cfg["steps"], shots=cfg.get("shots"))


def cmd_rb(cfg, out: Path) -> list:
    written = []
    if cfg["reference_fit"]:
        ref_doc = json.loads(Path(cfg["reference_fit"]).read_text())
        ref_fit = ref_doc.get("data", ref_doc)["fit"]
        if ref_fit is None:
            raise FitError("stored reference run has no fit")
        p_ref = ref_fit["p"]
    else:
        rconf = _rb_config(cfg)
        records, fit = run_rb(rconf)
        derived = {"r": average_error(fit.p)} if fit else {}
        if cfg["readout"]:
            _, corrected = run_rb(_rb_config(cfg, readout=False))
            derived["fit_readout_corrected"] = corrected.to_json() if corrected else None
        _write_json(out / "rb_reference.json", rb_to_json(rconf, records, fit, derived), cfg)
        write_rb_csv(out / "rb_reference.csv", records)
        written += [out / "rb_reference.json", out / "rb_reference.csv"]
        if fit is None:
            raise FitError("reference decay fit failed; raw records written")
        p_ref = fit.p
    for g in cfg["interleaved"]:
        iconf = _rb_config(cfg, interleaved=g)
        records, fit = run_rb(iconf)
        derived = {"p_ref": p_ref}
        if fit is not None:
            derived["F_gate"] = interleaved_fidelity(fit.p, p_ref)
        stem = f"rb_interleaved_C{g}"
        _write_json(out / f"{stem}.json", rb_to_json(iconf, records, fit, derived), cfg)
        write_rb_csv(out / f"{stem}.csv", records)
        written += [out / f"{stem}.json", out / f"{stem}.csv"]
        if fit is None:
            raise FitError(f"interleaved fit for C{g} failed; raw records written")
    return written


COMMANDS = {"table": cmd_table, "synth": cmd_synth, "evolve": cmd_evolve, "qpt": cmd_qpt,
            "rb": cmd_rb}


def _onoff(v):
    if v not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return v == "on"


def _int_list(v):
    return [int(x) for x in v.split(",") if x]


def _float_list(v):
    return [float(x) for x in v.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run description")
    common.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--steps", type=int, help="integrator steps per gate")
    common.add_argument("--tau", type=float, help="gate duration in seconds")

    noisy = argparse.ArgumentParser(add_help=False)
    noisy.add_argument("--noise", type=_onoff, help="on|off: Lindblad decoherence")
    noisy.add_argument("--readout", type=_onoff, help="on|off: readout assignment errors")

    gate = argparse.ArgumentParser(add_help=False)
    gate.add_argument("--clifford", type=_int_list, help="Clifford indices, comma separated")
    gate.add_argument("--class", dest="rotation_class",
                      choices=["identity", "pi", "pi/2", "2pi/3", "all"],
                      help="all Cliffords of one rotation class")
    gate.add_argument("--gamma", type=float, help="rotation angle (rad)")
    gate.add_argument("--axis", type=_float_list, help="rotation axis x,y,z")

    p = argparse.ArgumentParser(prog="holoqutrit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common], help="write the 24-entry Clifford table")
    s = sub.add_parser("synth", parents=[common, gate], help="drive schedule and waveform")
    s.add_argument("--samples", type=int, help="waveform samples")
    e = sub.add_parser("evolve", parents=[common, gate, noisy], help="propagate one gate")
    e.add_argument("--initial", choices=list(_INITIAL), help="initial state")
    e.add_argument("--trajectory", action="store_true", default=None,
                   help="also write the density-matrix trajectory CSV")
    e.add_argument("--record-every", dest="record_every", type=int)
    q = sub.add_parser("qpt", parents=[common, gate, noisy], help="simulated process tomography")
    q.add_argument("--shots", type=int)
    r = sub.add_parser("rb", parents=[common, noisy], help="reference/interleaved RB")
    r.add_argument("--m-values", dest="m_values", type=_int_list)
    r.add_argument("--k", type=int, help="sequences per length")
    r.add_argument("--interleaved", type=_int_list, help="Clifford indices to interleave")
    r.add_argument("--reference-fit", dest="reference_fit",
                   help="rb_reference.json from an earlier run")
    r.add_argument("--shots", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_cfg = json.loads(args.config.read_text()) if args.config else {}
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args.command, file_cfg, overrides)
        if "clifford" in cfg and any(k in cfg for k in ("gamma", "rotation_class")):
            raise ConfigError("give exactly one gate selector")
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        written = COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, TomographyError, FitError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
