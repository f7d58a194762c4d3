"""Command-line front end.

    python3 -m zkspeed.cli <command> [flags]

Functional commands (gen-workload, prove, self-verify, census
--instrumented) run the field-level prover and are capped at mu = 24.
Model commands (census, dse, sweep-bandwidth, sweep-batch, dump-costs)
are analytical and accept any mu.  Every command prints one summary line;
failures print a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import time
from pathlib import Path

MAX_FUNCTIONAL_MU = 24
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Failure(Exception):
    def __init__(self, reason: str, **extra):
        super().__init__(reason)
        self.extra = extra


# --------------------------------------------------------------------------
# flag parsing

def _sparsity(text: str):
    from .mle import MleError, SparsityProfile
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--sparsity expects z,o,d fractions, got {text!r}") from None
    if len(parts) != 3:
        raise UsageError("--sparsity expects three fractions z,o,d")
    try:
        return SparsityProfile(*parts)
    except MleError as e:
        raise UsageError(str(e)) from None


def _design(text: str | None, bandwidth: int | None, domains):
    from .perf.costs import DesignError, DesignPoint
    try:
        d = DesignPoint.parse(text) if text else DesignPoint()
        if bandwidth is not None:
            d = d.with_(bandwidth_gbps=bandwidth)
        return d.validate(domains)
    except DesignError as e:
        raise UsageError(str(e)) from None


def _config(path: str | None):
    from .perf.costs import DEFAULT_COSTS, KNOB_DOMAINS, DesignError, load_config
    if path is None:
        return DEFAULT_COSTS, dict(KNOB_DOMAINS)
    try:
        return load_config(path)
    except FileNotFoundError:
        raise UsageError(f"config not found: {path}") from None
    except (DesignError, TypeError, ValueError) as e:
        raise UsageError(f"bad config {path}: {e}") from None


def _functional_mu(mu: int) -> int:
    if not 2 <= mu <= MAX_FUNCTIONAL_MU:
        raise UsageError(f"--mu must lie in [2, {MAX_FUNCTIONAL_MU}] for functional commands")
    return mu


def _model_mu(mu: int) -> int:
    if mu < 2:
        raise UsageError("--mu must be >= 2")
    return mu


def _out_dir(args) -> Path:
    p = Path(args.out or ".")
    p.mkdir(parents=True, exist_ok=True)
    return p


def _out_file(args, default: str) -> Path:
    if args.out is None:
        return Path(default)
    p = Path(args.out)
    if p.is_dir() or args.out.endswith("/"):
        p.mkdir(parents=True, exist_ok=True)
        return p / default
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _workload(args):
    from .circuit import Workload
    if getattr(args, "workload", None):
        try:
            w = Workload.load(args.workload)
        except (OSError, KeyError, ValueError) as e:
            raise UsageError(f"cannot read workload {args.workload}: {e}") from None
        _functional_mu(w.mu)
        return w
    if args.mu is None:
        raise UsageError("--mu (or --workload) is required")
    sp = _sparsity(args.sparsity) if args.sparsity else None
    kw = {"sparsity": sp} if sp else {}
    return Workload(_functional_mu(args.mu), seed=args.seed, **kw)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


# --------------------------------------------------------------------------
# functional commands

def cmd_gen_workload(args) -> int:
    w = _workload(args)
    out = _out_dir(args) / "workload.json"
    w.dump(out)
    _emit({"cmd": "gen-workload", "mu": w.mu, "seed": w.seed, "out": str(out)})
    return EXIT_OK


def _prove(args):
    from .circuit import circuit_from_workload
    from .prover import ProverKnobs, prove_all
    w = _workload(args)
    c = circuit_from_workload(w)
    t0 = time.perf_counter()
    b = prove_all(c, ProverKnobs())
    return w, c, b, time.perf_counter() - t0


def cmd_prove(args) -> int:
    from .prover import dump_bundle
    w, c, b, dt = _prove(args)
    out = _out_dir(args)
    w.dump(out / "workload.json")
    buf = dump_bundle(b)
    (out / "bundle.bin").write_bytes(buf)
    _emit({"cmd": "prove", "mu": w.mu, "seed": w.seed, "bundle_bytes": len(buf),
           "digest": b.digest.hex(), "seconds": round(dt, 3), "out": str(out)})
    return EXIT_OK


def cmd_self_verify(args) -> int:
    from .circuit import circuit_from_workload
    from .prover import ProverError, load_bundle, self_verify
    if args.bundle:
        try:
            b = load_bundle(Path(args.bundle).read_bytes())
        except OSError as e:
            raise UsageError(f"cannot read bundle {args.bundle}: {e}") from None
        except (ProverError, ValueError, IndexError, struct.error) as e:
            raise Failure("malformed bundle", detail=str(e)) from None
        c = circuit_from_workload(_workload(args))
    else:
        _, c, b, _ = _prove(args)
    rep = self_verify(b, c)
    if not rep.all_pass:
        raise Failure("self-verification failed", failed=rep.failed(),
                      detail=[ln for ln in rep.lines() if ln.startswith("FAIL")])
    _emit({"cmd": "self-verify", "mu": c.mu, "checks": len(rep.checks), "status": "pass"})
    return EXIT_OK


# --------------------------------------------------------------------------
# model commands

def cmd_census(args) -> int:
    from .perf.census import CensusParams, analytical_census, instrumented_census
    if args.instrumented:
        from .circuit import circuit_from_workload
        c = circuit_from_workload(_workload(args))
        cen, _ = instrumented_census(c)
    else:
        mu = _model_mu(args.mu if args.mu is not None else 20)
        p = CensusParams(sparsity=_sparsity(args.sparsity)) if args.sparsity else CensusParams()
        cen = analytical_census(mu, p)
    rows = {k: r.modmuls for k, r in cen.rows.items()}
    if args.out:
        path = _out_file(args, "census.json")
        path.write_text(json.dumps({"mu": cen.mu, "mode": cen.mode, "modmuls": rows,
                                    "bytes": {k: [r.bytes_in, r.bytes_out] for k, r in cen.rows.items()}},
                                   indent=2, sort_keys=True) + "\n")
    _emit({"cmd": "census", "mu": cen.mu, "mode": cen.mode, "total_modmuls": sum(rows.values()),
           "kernels": len(rows)})
    return EXIT_OK


def cmd_dse(args) -> int:
    from .perf.dse import dse, write_dse_csv
    costs, domains = _config(args.config)
    if args.bandwidth is not None:
        domains["bandwidth_gbps"] = (args.bandwidth,)
    mu = _model_mu(args.mu if args.mu is not None else 20)
    res = dse(mu, domains, costs)
    path = _out_file(args, "dse.csv")
    nrows = write_dse_csv(res, path, pareto_only=args.pareto_only)
    best = int(res.runtime_cycles.argmin())
    _emit({"cmd": "dse", "mu": mu, "designs": len(res), "pareto": int(res.pareto.sum()),
           "rows": nrows, "best_ms": round(float(res.runtime_ms[best]), 4),
           "best_design": list(map(int, res.knobs[best])), "out": str(path)})
    return EXIT_OK


def cmd_sweep_bandwidth(args) -> int:
    from .perf.dse import sweep_bandwidth, write_rows_csv
    costs, domains = _config(args.config)
    mu = _model_mu(args.mu if args.mu is not None else 20)
    base = _design(args.design, None, domains)
    bws = (args.bandwidth,) if args.bandwidth else (256, 512, 1024, 2048, 4096)
    rows = sweep_bandwidth(mu, bandwidths=bws, base=base, costs=costs)
    path = _out_file(args, "sweep_bandwidth.csv")
    write_rows_csv(rows, path, "zkspeed-sweep-bandwidth/1")
    _emit({"cmd": "sweep-bandwidth", "mu": mu, "rows": len(rows), "out": str(path)})
    return EXIT_OK


def cmd_sweep_batch(args) -> int:
    from .perf.dse import sweep_batch, write_rows_csv
    from .perf.fracmle import fracmle_batch_optimizer
    costs, _ = _config(args.config)
    rows = sweep_batch(costs)
    path = _out_file(args, "sweep_batch.csv")
    write_rows_csv(rows, path, "zkspeed-sweep-batch/1")
    _emit({"cmd": "sweep-batch", "rows": len(rows), "optimum": fracmle_batch_optimizer(costs).n,
           "out": str(path)})
    return EXIT_OK


def cmd_dump_costs(args) -> int:
    from .perf.costs import area_power_rollup
    from .perf.model import evaluate
    costs, domains = _config(args.config)
    d = _design(args.design, args.bandwidth, domains)
    mu = _model_mu(args.mu if args.mu is not None else 20)
    rep = evaluate(d, mu, costs)
    roll = area_power_rollup(d, costs, mu)
    doc = {"design": dict(zip(d.__dataclass_fields__, d.as_tuple())), "mu": mu,
           "costs": costs.to_dict(), "runtime_ms": rep.runtime_ms,
           "steps": {k: int(v) for k, v in rep.steps.items()},
           "area_power": [[k, a, p] for k, a, p in roll.table()]}
    if args.out:
        _out_file(args, "costs.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _emit({"cmd": "dump-costs", "mu": mu, "runtime_ms": round(rep.runtime_ms, 4),
           "area_mm2": round(roll.total_area, 3), "power_w": round(roll.total_power, 3)})
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

COMMANDS = {
    "gen-workload": (cmd_gen_workload, "write workload.json for a mock circuit"),
    "prove": (cmd_prove, "run the functional prover; writes workload.json and bundle.bin"),
    "self-verify": (cmd_self_verify, "prove (or load --bundle) and check every component"),
    "census": (cmd_census, "per-kernel modmul census (analytical unless --instrumented)"),
    "dse": (cmd_dse, "exhaustive design-space sweep to CSV"),
    "sweep-bandwidth": (cmd_sweep_bandwidth, "MSM/SumCheck scaling against PEs and bandwidth"),
    "sweep-batch": (cmd_sweep_batch, "FracMLE inversion batch-size sweep"),
    "dump-costs": (cmd_dump_costs, "runtime, step latencies and area/power for one design"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu", type=int, help="log2 of the gate count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--sparsity", metavar="Z,O,D", help="witness fractions zero,one,dense")
    common.add_argument("--config", help="TOML cost/knob-domain file")
    common.add_argument("--out", help="output directory or file")
    common.add_argument("--threads", type=int, default=1,
                        help="worker bound; every command runs single-threaded")
    common.add_argument("--bandwidth", type=int, help="off-chip bandwidth in GB/s")
    common.add_argument("--design", help="knob tuple or k=v list")

    ap = argparse.ArgumentParser(prog="zkspeed", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True, metavar="command")
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if name in ("gen-workload", "prove", "self-verify", "census"):
            sp.add_argument("--workload", help="read the workload from JSON instead of --mu/--seed")
        if name == "self-verify":
            sp.add_argument("--bundle", help="verify a saved bundle.bin")
        if name == "census":
            sp.add_argument("--instrumented", action="store_true",
                            help="count modmuls on a functional run")
        if name == "dse":
            sp.add_argument("--pareto-only", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    fn = COMMANDS[args.cmd][0]
    try:
        return fn(args)
    except UsageError as e:
        ap.error(str(e))
    except Failure as e:
        sys.stderr.write(json.dumps({"error": str(e), "cmd": args.cmd, **e.extra}, sort_keys=True) + "\n")
        return EXIT_FAIL
    except Exception as e:  # surfaced as a machine-readable failure rather than a traceback
        sys.stderr.write(json.dumps({"error": type(e).__name__, "detail": str(e), "cmd": args.cmd},
                                    sort_keys=True) + "\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
