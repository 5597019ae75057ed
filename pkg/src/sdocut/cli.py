"""
Command-line driver.

    sdocut gen      --benchmark qaoa:6 --seeds 1 --out qaoa6.qasm
    sdocut run      --config exp.json --mode cut+SDO --p2 0.01 --seeds 0 1 2 3 4
    sdocut scaling  --benchmark qaoa:10 --benchmark qaoa:20 --out fig.csv

Exit codes: 0 success, 2 config error, 3 infeasible cut, 4 width cap.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .circuit import Circuit
from .errors import CircuitError, ConfigError, InfeasibleCutError, QasmError, WidthError
from .generators import gen_bv, gen_qaoa, gen_qft, random_graph
from .metrics import ExperimentRecord, rows_to_csv, rows_to_json
from .pipeline import evaluate, normalize_mode, scaling_table
from .qasm import emit_qasm, parse_qasm
from .simulator import NoiseModel

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_WIDTH = 0, 2, 3, 4
KINDS = ("qaoa", "qft", "bv", "qasm")


@dataclass(frozen=True)
class BenchmarkSpec:
    kind: str
    size: int | None = None
    layers: int = 1
    density: float = 0.3
    seed: int | None = None
    secret: str | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown benchmark kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "bv":
            if self.secret is None and self.size is not None:
                object.__setattr__(self, "secret", "1" * int(self.size))
            if not self.secret or set(self.secret) - {"0", "1"}:
                raise ConfigError("bv needs a bitstring secret")
        elif self.kind == "qasm":
            if not self.path:
                raise ConfigError("qasm benchmark needs a path")
        elif self.size is None or int(self.size) < 1:
            raise ConfigError(f"{self.kind} needs a positive size")
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigError("density must lie in [0, 1]")

    @classmethod
    def parse(cls, text: str) -> BenchmarkSpec:
        """``kind:size`` (``bv:<secret>``, ``qasm:<path>``) shorthand."""
        kind, _, arg = str(text).partition(":")
        kind = kind.strip().lower()
        if kind == "bv":
            return cls("bv", secret=arg or None)
        if kind == "qasm":
            return cls("qasm", path=arg)
        try:
            return cls(kind, int(arg) if arg else None)
        except ValueError:
            raise ConfigError(f"bad benchmark {text!r}") from None

    @classmethod
    def from_obj(cls, obj) -> BenchmarkSpec:
        if isinstance(obj, str):
            return cls.parse(obj)
        if not isinstance(obj, dict):
            raise ConfigError("benchmark must be a string or an object")
        allowed = {f.name for f in fields(cls)}
        extra = set(obj) - allowed
        if extra:
            raise ConfigError(f"unknown benchmark keys: {sorted(extra)}")
        if "kind" not in obj:
            raise ConfigError("benchmark needs a kind")
        try:
            return cls(**{**obj, "kind": str(obj["kind"]).lower()})
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @property
    def label(self) -> str:
        if self.kind == "bv":
            return f"bv-{self.secret}"
        if self.kind == "qasm":
            return Path(self.path).stem
        suffix = f"-p{self.layers}" if self.kind == "qaoa" and self.layers > 1 else ""
        return f"{self.kind}-{self.size}{suffix}"

    def build(self, seed: int | None = None) -> Circuit:
        """The benchmark circuit; ``seed`` drives the random graph unless the spec fixes one."""
        if self.kind == "qaoa":
            gseed = self.seed if self.seed is not None else seed
            return gen_qaoa(random_graph(int(self.size), self.density, gseed), self.layers)
        if self.kind == "qft":
            return gen_qft(int(self.size))
        if self.kind == "bv":
            return gen_bv(self.secret)
        try:
            return parse_qasm(Path(self.path).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read {self.path}: {e}") from None


@dataclass
class ExperimentConfig:
    benchmarks: list[BenchmarkSpec] = field(default_factory=list)
    modes: list[str] = field(default_factory=lambda: ["cut+SDO"])
    max_width: int | None = None
    max_cuts: int | None = None
    p1: float = 0.0
    p2: float = 0.0
    pmeas: float = 0.0
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    shots: int | None = None
    out: str | None = None
    timing: bool = False

    KEYS = ("benchmark", "benchmarks", "mode", "modes", "max_width", "max_cuts", "noise", "p1", "p2", "pmeas",
            "seeds", "shots", "out", "timing", "layers", "density")

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(d) - set(cls.KEYS)
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = cls()
        bench = d.get("benchmarks", [d["benchmark"]] if "benchmark" in d else [])
        cfg.benchmarks = [BenchmarkSpec.from_obj(b) for b in bench]
        if "modes" in d or "mode" in d:
            m = d.get("modes", d.get("mode"))
            cfg.modes = [m] if isinstance(m, str) else list(m)
        noise = d.get("noise", {})
        if not isinstance(noise, dict):
            raise ConfigError("noise must be an object")
        for key in ("p1", "p2", "pmeas"):
            if key in noise or key in d:
                setattr(cfg, key, d.get(key, noise.get(key)))
        for key in ("max_width", "max_cuts", "seeds", "shots", "out", "timing"):
            if key in d:
                setattr(cfg, key, d[key])
        for key in ("layers", "density"):
            if key in d:
                cfg.benchmarks = [replace(b, **{key: d[key]}) for b in cfg.benchmarks]
        return cfg

    def validate(self, need_seeds: bool = True) -> ExperimentConfig:
        if not self.benchmarks:
            raise ConfigError("no benchmark given")
        self.modes = [normalize_mode(m) for m in self.modes]
        for name in ("p1", "p2", "pmeas"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be a probability, got {v!r}")
        for name in ("max_width", "max_cuts", "shots"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < (2 if name == "max_width" else 0)):
                raise ConfigError(f"bad {name}: {v!r}")
        if not isinstance(self.seeds, list) or not all(isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds must be a list of integers")
        if need_seeds and len(self.seeds) < 2:
            raise ConfigError("error bars need at least two seeds")
        return self

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.p1, self.p2, self.pmeas)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--benchmark", action="append", help="kind:size, bv:<secret> or qasm:<path>; repeatable")
    common.add_argument("--layers", type=int)
    common.add_argument("--density", type=float)
    common.add_argument("--seeds", type=int, nargs="+")
    common.add_argument("--out")

    p = argparse.ArgumentParser(prog="sdocut", description="Circuit cutting with state-dependent optimization.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write a benchmark circuit as OpenQASM")
    for name, help_ in (("run", "simulate a mode under noise over seeds"),
                        ("scaling", "AGT and subcircuit counts per mode, no simulation")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--mode", action="append", help="uncut, cut, cut+SDO or nscc+SDO; repeatable")
        sp.add_argument("--max-width", type=int)
        sp.add_argument("--max-cuts", type=int)
        if name == "run":
            sp.add_argument("--p1", type=float)
            sp.add_argument("--p2", type=float)
            sp.add_argument("--pmeas", type=float)
            sp.add_argument("--shots", type=int)
            sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    return p


def load_config(args) -> ExperimentConfig:
    d = {}
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot load config {args.config}: {e}") from None
    cfg = ExperimentConfig.from_dict(d)
    if args.benchmark:
        cfg.benchmarks = [BenchmarkSpec.parse(b) for b in args.benchmark]
    for key in ("layers", "density"):
        v = getattr(args, key, None)
        if v is not None:
            cfg.benchmarks = [replace(b, **{key: v}) for b in cfg.benchmarks]
    if getattr(args, "mode", None):
        cfg.modes = list(args.mode)
    for key in ("max_width", "max_cuts", "p1", "p2", "pmeas", "seeds", "shots", "out"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "timing", False):
        cfg.timing = True
    return cfg


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(cfg: ExperimentConfig) -> str:
    cfg.validate(need_seeds=False)
    if len(cfg.benchmarks) != 1:
        raise ConfigError("gen takes exactly one benchmark")
    text = emit_qasm(cfg.benchmarks[0].build(cfg.seeds[0] if cfg.seeds else None))
    _write(text, cfg.out)
    return text


def run_records(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.validate()
    records = []
    for spec in cfg.benchmarks:
        for mode in cfg.modes:
            t0 = time.perf_counter()
            fids, agts, subs, qubits = [], [], [], 0
            for seed in cfg.seeds:
                circ = spec.build(seed)
                qubits = circ.n_qubits
                fid, rep = evaluate(circ, mode, cfg.noise, cfg.max_width, cfg.max_cuts, cfg.shots, seed)
                fids.append(fid)
                agts.append(rep.agt)
                subs.append(rep.subcircuits)
            sub = subs[0] if len(set(subs)) == 1 else float(np.mean(subs))
            records.append(ExperimentRecord(spec.label, qubits, mode, float(np.mean(agts)), sub, fids,
                                            time.perf_counter() - t0))
    return records


def cmd_run(cfg: ExperimentConfig) -> str:
    records = run_records(cfg)
    if cfg.out and cfg.out.endswith(".csv"):
        text = rows_to_csv(r.row() for r in records)
    else:
        payload = [r.to_dict(include_time=cfg.timing) for r in records]
        text = json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"
    _write(text, cfg.out)
    return text


def cmd_scaling(cfg: ExperimentConfig, modes_given: bool = False) -> str:
    cfg.validate(need_seeds=False)
    modes = cfg.modes if modes_given else ["uncut", "cut+SDO", "nscc+SDO"]
    seed = cfg.seeds[0] if cfg.seeds else 0
    rows = scaling_table([(s.label, s.build(seed)) for s in cfg.benchmarks], modes, cfg.max_width, cfg.max_cuts)
    text = rows_to_json(rows) + "\n" if cfg.out and cfg.out.endswith(".json") else rows_to_csv(rows)
    _write(text, cfg.out)
    return text


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "gen":
            cmd_gen(cfg)
        elif args.command == "run":
            cmd_run(cfg)
        else:
            modes_given = bool(args.mode) or (args.config is not None and _config_has_modes(args.config))
            cmd_scaling(cfg, modes_given)
    except InfeasibleCutError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except WidthError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_WIDTH
    except (ConfigError, CircuitError, QasmError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _config_has_modes(path: str) -> bool:
    d = json.loads(Path(path).read_text())
    return "mode" in d or "modes" in d


if __name__ == "__main__":
    sys.exit(main())
