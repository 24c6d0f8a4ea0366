"""Command-line interface: ``markovsw {dist,flow,color,bench}``.

Exit codes: 0 success, 2 bad flags or config, 3 file or parse errors,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .distances import KINDS, DistanceSpec
from .exact_ot import ResourceLimit
from .gradients import UnsupportedConfiguration
from .flow import FlowConfig, make_gaussian, make_s_shape, run_flow
from .measure import EmpiricalMeasure, IncompatibleInputs, InvalidMeasure, read_csv, write_csv

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

SPEC_KEYS = ("distance", "p", "L", "T", "K", "eta", "kappa", "M", "N")
DEFAULTS = {
    "distance": "sw", "p": 2.0, "L": 10, "T": 5, "K": 2, "eta": 0.1, "kappa": 50.0, "M": 0, "N": 1,
    "seed": 0, "threads": None, "no_clock": False,
}
COMMAND_DEFAULTS = {
    "dist": {},
    "flow": {"distance": "msw-i", "steps": 300, "step_size": 1e-3, "score_every": 10, "out_dir": ".",
             "fixture": None, "source": None, "target": None, "n": 100},
    "color": {"distance": "msw-i", "steps": 2000, "step_size": 1e-3, "score_every": 100, "k": 512,
              "kmeans_iters": 10, "report": None},
    "bench": {"out": None, "seed": None},
}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _seconds(value: float, clock: bool) -> float:
    return round(value, 3) if clock else 0.0


def _add_common(sp: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    sp.add_argument("--config", metavar="FILE", default=S, help="JSON file with the same keys as the flags")
    sp.add_argument("--distance", choices=KINDS, default=S)
    sp.add_argument("-p", type=float, default=S, help="order of the distance (default 2)")
    sp.add_argument("-L", type=int, default=S, help="projections / chains")
    sp.add_argument("-T", type=int, default=S, help="chain length or ascent iterations")
    sp.add_argument("-K", type=int, default=S, help="orthogonal block size")
    sp.add_argument("--eta", type=float, default=S, help="direction step size")
    sp.add_argument("--kappa", type=float, default=S, help="vMF concentration")
    sp.add_argument("-M", type=int, default=S, help="burned steps")
    sp.add_argument("-N", type=int, default=S, help="thinning interval")
    sp.add_argument("--seed", type=int, default=S)
    sp.add_argument("--threads", type=int, default=S, help="BLAS thread count (default: all cores)")
    sp.add_argument("--no-clock", dest="no_clock", action="store_true", default=S,
                    help="write 0 for every wall-clock field so outputs are byte-comparable")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="markovsw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("dist", help="distance between two point-cloud CSVs")
    sp.add_argument("first")
    sp.add_argument("second")
    _add_common(sp)

    sp = sub.add_parser("flow", help="Euler gradient flow between point clouds")
    sp.add_argument("--source", default=S)
    sp.add_argument("--target", default=S)
    sp.add_argument("--fixture", choices=("s-shape",), default=S,
                    help="generate a Gaussian source and an S-shape target")
    sp.add_argument("--n", type=int, default=S, help="fixture size")
    sp.add_argument("--steps", type=int, default=S)
    sp.add_argument("--step-size", dest="step_size", type=float, default=S)
    sp.add_argument("--score-every", dest="score_every", type=int, default=S)
    sp.add_argument("--out-dir", dest="out_dir", default=S)
    _add_common(sp)

    sp = sub.add_parser("color", help="palette color transfer between two images")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("out")
    sp.add_argument("--k", type=int, default=S)
    sp.add_argument("--steps", type=int, default=S)
    sp.add_argument("--step-size", dest="step_size", type=float, default=S)
    sp.add_argument("--score-every", dest="score_every", type=int, default=S)
    sp.add_argument("--kmeans-iters", dest="kmeans_iters", type=int, default=S)
    sp.add_argument("--report", default=S, help="also write the JSON summary to this file")
    _add_common(sp)

    sp = sub.add_parser("bench", help="timing table over a grid of estimators and sizes")
    sp.add_argument("grid", help="JSON grid: {specs: [...], n: [...], d: [...], repeats, warmup}")
    sp.add_argument("--out", default=S, help="CSV path (default: stdout)")
    _add_common(sp)
    return parser


def _resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults, the optional JSON config and explicit flags (in that order)."""
    opts = dict(DEFAULTS)
    opts.update(COMMAND_DEFAULTS[ns.command])
    given = vars(ns)
    if "config" in given:
        try:
            cfg = json.loads(Path(given["config"]).read_text())
        except OSError as exc:
            raise InputError(f"--config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"--config: invalid JSON ({exc})") from exc
        if not isinstance(cfg, dict):
            raise UsageError("--config: expected a JSON object")
        unknown = sorted(set(cfg) - set(opts))
        if unknown:
            raise UsageError(f"--config: unknown key(s) {', '.join(unknown)}")
        opts.update(cfg)
    opts.update({k: v for k, v in given.items() if k != "config"})
    return opts


def _spec(opts: dict) -> DistanceSpec:
    try:
        return DistanceSpec(opts["distance"], p=float(opts["p"]), L=int(opts["L"]), T=int(opts["T"]),
                            K=int(opts["K"]), eta=float(opts["eta"]), kappa=float(opts["kappa"]),
                            M=int(opts["M"]), N=int(opts["N"]))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"distance flags: {exc}") from exc


def _read_cloud(path) -> EmpiricalMeasure:
    try:
        return read_csv(path)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _emit(obj: dict, out=None) -> str:
    text = json.dumps(obj)
    print(text, file=out or sys.stdout)
    return text


def cmd_dist(opts: dict) -> int:
    spec = _spec(opts)
    mu, nu = _read_cloud(opts["first"]), _read_cloud(opts["second"])
    if mu.d != nu.d:
        raise InputError(f"{opts['second']}: dimension {nu.d} differs from {opts['first']} ({mu.d})")
    start = time.perf_counter()
    value = spec.evaluate(mu, nu, int(opts["seed"]))
    wall = time.perf_counter() - start
    _emit({"distance": value, "seconds": _seconds(wall, not opts["no_clock"]),
           "spec": {**spec.describe(), "seed": int(opts["seed"])}})
    return EXIT_OK


def _flow_config(opts: dict, spec: DistanceSpec) -> FlowConfig:
    try:
        return FlowConfig(steps=int(opts["steps"]), step_size=float(opts["step_size"]), distance=spec,
                          score_every=int(opts["score_every"]), seed=int(opts["seed"]))
    except ValueError as exc:
        raise UsageError(f"flow flags: {exc}") from exc


def cmd_flow(opts: dict) -> int:
    spec = _spec(opts)
    seed = int(opts["seed"])
    if opts["fixture"] == "s-shape":
        n = int(opts["n"])
        if n < 1:
            raise UsageError("--n must be >= 1")
        source = _read_cloud(opts["source"]) if opts["source"] else make_gaussian(n, seed=seed)
        target = _read_cloud(opts["target"]) if opts["target"] else make_s_shape(n, seed=seed + 1)
    elif opts["source"] and opts["target"]:
        source, target = _read_cloud(opts["source"]), _read_cloud(opts["target"])
    else:
        raise UsageError("flow needs --source and --target, or --fixture s-shape")
    if source.n != target.n or source.d != target.d:
        raise InputError("source and target must have the same number of points and dimension")
    trace = run_flow(source, target, _flow_config(opts, spec))
    out = Path(opts["out_dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        trace.write_csv(out / "trace.csv", clock=not opts["no_clock"])
        write_csv(trace.final, out / "final.csv")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    return EXIT_OK


def cmd_color(opts: dict) -> int:
    from .color import load_image, save_image, transfer_colors

    spec = _spec(opts)
    try:
        src, tgt = load_image(opts["source"]), load_image(opts["target"])
    except Exception as exc:  # PIL raises a zoo of decode errors
        raise InputError(f"cannot decode image: {exc}") from exc
    k = int(opts["k"])
    if k < 1:
        raise UsageError("--k must be >= 1")
    start = time.perf_counter()
    result = transfer_colors(src, tgt, k, _flow_config(opts, spec), seed=int(opts["seed"]),
                             kmeans_iters=int(opts["kmeans_iters"]))
    wall = time.perf_counter() - start
    try:
        save_image(result.image, opts["out"])
    except OSError as exc:
        raise InputError(str(exc)) from exc
    summary = {"w2_before": result.w2_before, "w2_after": result.w2_after, "k": result.source_palette.k,
               "seconds": _seconds(wall, not opts["no_clock"]),
               "spec": {**spec.describe(), "seed": int(opts["seed"])}}
    text = _emit(summary)
    if opts["report"]:
        Path(opts["report"]).write_text(text + "\n")
    return EXIT_OK


BENCH_KEYS = {"specs", "n", "d", "repeats", "warmup", "seed"}


def load_grid(path) -> dict:
    try:
        grid = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(grid, dict):
        raise UsageError(f"{path}: expected a JSON object")
    unknown = sorted(set(grid) - BENCH_KEYS)
    if unknown:
        raise UsageError(f"{path}: unknown key(s) {', '.join(unknown)}")
    try:
        specs = [DistanceSpec(**s) for s in grid.get("specs", [])]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: bad spec ({exc})") from exc
    return {"specs": specs, "n": [int(v) for v in grid.get("n", [])], "d": [int(v) for v in grid.get("d", [])],
            "repeats": int(grid.get("repeats", 5)), "warmup": int(grid.get("warmup", 1)),
            "seed": int(grid.get("seed", 0))}


def bench_rows(grid: dict, seed: int, clock: bool = True):
    """Yield ``(label, n, d, mean_seconds, distance)`` for every grid cell."""
    for spec in grid["specs"]:
        for n in grid["n"]:
            for d in grid["d"]:
                rng = np.random.default_rng([seed, n, d])
                mu = EmpiricalMeasure(rng.standard_normal((n, d)))
                nu = EmpiricalMeasure(rng.standard_normal((n, d)) + 0.5)
                for _ in range(grid["warmup"]):
                    spec.evaluate(mu, nu, seed)
                times = []
                for _ in range(max(grid["repeats"], 1)):
                    start = time.perf_counter()
                    value = spec.evaluate(mu, nu, seed)
                    times.append(time.perf_counter() - start)
                yield spec.label(), n, d, (float(np.mean(times)) if clock else 0.0), value


def cmd_bench(opts: dict) -> int:
    grid = load_grid(opts["grid"])
    seed = grid["seed"] if opts["seed"] is None else int(opts["seed"])
    clock = not opts["no_clock"]
    out = open(opts["out"], "w", newline="") if opts["out"] else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["spec", "n", "d", "mean_seconds", "distance"])
        for label, n, d, secs, value in bench_rows(grid, seed, clock):
            w.writerow([label, n, d, f"{secs:.6f}", repr(value)])
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


COMMANDS = {"dist": cmd_dist, "flow": cmd_flow, "color": cmd_color, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with status 2 on bad or unknown flags
    try:
        opts = _resolve(ns)
        threads = opts["threads"] or os.cpu_count() or 1
        with threadpool_limits(limits=int(threads)):
            return COMMANDS[ns.command](opts)
    except UsageError as exc:
        print(f"markovsw {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, InvalidMeasure, IncompatibleInputs, UnsupportedConfiguration, ResourceLimit) as exc:
        print(f"markovsw {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"markovsw {ns.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"markovsw {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
