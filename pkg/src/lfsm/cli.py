"""Command-line front end.

Subcommands ``simulate``, ``estimate`` and ``mc`` each write a JSON run
manifest (argument vector, resolved configuration, seed, version, duration);
``replay`` re-executes a manifest, reproducing its outputs bit for bit.

Exit codes: 0 success, 2 usage or domain error, 3 resource limit,
4 estimation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import sys
import time
from pathlib import Path

from .errors import DomainError, LfsmError, ResourceError, ShapeError
from .estimators import EstimatorConfig, Method, estimate
from .kernel import LfsmParams
from .montecarlo import PRESET_N, PRESETS, McConfig, preset, run_many, write_report
from .simulate import Frequency, SimConfig, read_path_csv, simulate_high, simulate_low, write_path_csv
from .stable import SeedSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_ESTIMATION = 4


class UsageError(Exception):
    """Invalid combination of command-line flags."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _write_manifest(path: Path, command: str, argv, config, seed, started: float) -> None:
    from . import __version__

    manifest = {
        "command": command,
        "argv": list(argv),
        "config": _jsonable(config),
        "master_seed": seed,
        "version": __version__,
        "duration_seconds": time.perf_counter() - started,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo runs")
    p.add_argument("--manifest", type=Path, default=None, help="where to write the run manifest")


def _sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mesh", type=int, default=SimConfig.mesh_m, help="mesh cells per unit step")
    p.add_argument("--memory", type=int, default=SimConfig.truncation_M, help="kernel truncation in unit steps")


def _est_flags(p: argparse.ArgumentParser, required_method: bool) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], required=required_method)
    p.add_argument("--p", type=float, default=None, help="primary power (0.4 continuous, -0.4 general by default)")
    p.add_argument("--p2", type=float, default=None, help="secondary power p' (required for gen_high)")
    p.add_argument("--k", type=int, default=None, help="increment order; omitted means two-stage selection")
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=2.0)
    p.add_argument("--t3", type=float, default=None)
    p.add_argument("--t4", type=float, default=None)
    p.add_argument("--p3", type=float, default=None)
    p.add_argument("--p4", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lfsm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate one path and write index,value CSV")
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--hurst", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--freq", choices=[f.value for f in Frequency], default="low")
    s.add_argument("--out", type=Path, default=Path("path.csv"))
    _sim_flags(s)
    _common(s)

    e = sub.add_parser("estimate", help="estimate (sigma, alpha, H) from an index,value CSV")
    e.add_argument("--input", type=Path, required=True)
    e.add_argument("--freq", choices=[f.value for f in Frequency], default=None,
                   help="sampling of the input (defaults to the method's)")
    e.add_argument("--out", type=Path, default=None, help="also write the JSON result here")
    _est_flags(e, required_method=True)
    _common(e)

    m = sub.add_parser("mc", help="Monte Carlo bias/std tables and densities")
    m.add_argument("--preset", choices=sorted(PRESETS), default=None)
    m.add_argument("--reps", type=int, default=5000)
    m.add_argument("--n", type=int, nargs="+", default=None, help="sample sizes (default 100 1000 10000)")
    m.add_argument("--out-dir", type=Path, default=Path("mc_out"))
    m.add_argument("--sigma", type=float, default=None)
    m.add_argument("--alpha", type=float, default=None)
    m.add_argument("--hurst", type=float, default=None)
    _est_flags(m, required_method=False)
    _sim_flags(m)
    _common(m)

    r = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    r.add_argument("manifest_file", type=Path)
    return parser


def _est_config(args) -> EstimatorConfig:
    method = Method(args.method)
    if method is Method.GEN_HIGH and args.p2 is None:
        raise UsageError("gen_high needs --p2 (the secondary power p')")
    kw = dict(p=args.p, t1=args.t1, t2=args.t2, t3=args.t3, t4=args.t4, p3=args.p3, p4=args.p4,
              k_fixed=args.k)
    if args.p2 is not None:
        kw["p_prime"] = args.p2
    return EstimatorConfig(**kw)


def _sim_config(args, stream: int = 0) -> SimConfig:
    return SimConfig(mesh_m=args.mesh, truncation_M=args.memory, seed=SeedSpec(args.seed, stream))


def _cmd_simulate(args, argv, started) -> int:
    params = LfsmParams(args.sigma, args.alpha, args.hurst)
    if args.n < 2:
        raise DomainError("--n must be at least 2")
    cfg = _sim_config(args)
    sim = simulate_high if args.freq == Frequency.HIGH.value else simulate_low
    path = sim(params, args.n, cfg)
    write_path_csv(path, args.out)
    manifest = args.manifest or args.out.with_name(args.out.name + ".manifest.json")
    _write_manifest(manifest, "simulate", argv,
                    {"params": params, "n": args.n, "freq": args.freq, "sim": cfg, "out": args.out},
                    args.seed, started)
    return EXIT_OK


def _cmd_estimate(args, argv, started) -> int:
    cfg = _est_config(args)
    method = Method(args.method)
    freq = Frequency(args.freq) if args.freq else method.frequency
    if freq is not method.frequency:
        raise UsageError(f"method {method.value} needs {method.frequency.value}-frequency input")
    try:
        path = read_path_csv(args.input, freq)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    try:
        result = estimate(path, method, cfg)
    except (ResourceError, UsageError):
        raise
    except (LfsmError, ArithmeticError) as exc:
        print(f"lfsm: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    payload = json.dumps(result.as_dict(), indent=2, sort_keys=True) + "\n"
    sys.stdout.write(payload)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(payload)
    manifest = args.manifest or (
        args.out.with_name(args.out.name + ".manifest.json") if args.out else Path("estimate.manifest.json")
    )
    _write_manifest(manifest, "estimate", argv,
                    {"input": args.input, "method": method, "freq": freq, "estimator": cfg},
                    args.seed, started)
    return EXIT_OK


def _cmd_mc(args, argv, started) -> int:
    n_values = tuple(args.n) if args.n else PRESET_N
    sim_cfg = SimConfig(mesh_m=args.mesh, truncation_M=args.memory)
    if args.preset is not None:
        configs = preset(args.preset, args.reps, args.seed, args.workers, n_values, sim_cfg)
    else:
        missing = [f for f in ("sigma", "alpha", "hurst", "method") if getattr(args, f) is None]
        if missing:
            raise UsageError("without --preset, give " + ", ".join("--" + f for f in missing))
        params = LfsmParams(args.sigma, args.alpha, args.hurst)
        configs = [McConfig(params, n_values, Method(args.method), args.reps, _est_config(args),
                            sim_cfg, args.seed, args.workers)]
    reports = run_many(configs)
    written = []
    for rep in reports:
        written += write_report(rep, args.out_dir)
    manifest = args.manifest or args.out_dir / "manifest.json"
    _write_manifest(manifest, "mc", argv,
                    {"preset": args.preset, "configs": configs, "outputs": [p.name for p in written]},
                    args.seed, started)
    for p in written:
        print(p)
    return EXIT_OK


def _cmd_replay(args) -> int:
    try:
        recorded = json.loads(args.manifest_file.read_text())
        argv = recorded["argv"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest_file}: {exc}") from exc
    return main(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        if args.command == "simulate":
            return _cmd_simulate(args, argv, started)
        if args.command == "estimate":
            return _cmd_estimate(args, argv, started)
        if args.command == "mc":
            return _cmd_mc(args, argv, started)
        return _cmd_replay(args)
    except UsageError as exc:
        print(f"lfsm: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"lfsm: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, ShapeError) as exc:
        print(f"lfsm: invalid value: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
