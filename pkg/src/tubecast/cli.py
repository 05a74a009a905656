"""Command-line front end.

    tubecast error-cov --model m.toml --series x.csv --horizon 3
    tubecast forecast  --model m.toml --series x.csv --horizon 3
    tubecast tube-prob --model m.toml --series x.csv --horizon 2 --tube "-1.96:1.96;-1.96:1.96"
    tubecast simulate  --model m.toml --n 100 --horizon 4 --samples 100000
    tubecast validate  --model m.toml

Results are one JSON document (sorted keys, numbers at 12 significant
digits) that embeds the resolved configuration.  ``--format csv`` writes the
command's main table instead.  Exit codes: 2 malformed input, 3 dimension
mismatch, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .covariance import sigma_err_x
from .errors import DimensionError, SpecError, TubecastError
from .gaussian import (DEFAULT_SAMPLES, DEFAULT_SEED, ForecastTube, tube_probabilities,
                       tube_to_error_box)
from .model import (SeriesWindow, VarmaSpec, load_model, load_series, spec_to_dict,
                    validate_spec)
from .oracle import compare_covariance, empirical_error_covariance, simulate_paths
from .predictor import forecast_mean_arima

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SEED_ENV = "TUBECAST_SEED"
DEFAULT_PATHS = 100_000
DEFAULT_Z_THRESHOLD = 4.0
COMMANDS = ("error-cov", "forecast", "tube-prob", "simulate", "validate")


class UsageError(TubecastError):
    exit_code = 2


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _clean(obj):
    """Round every float to 12 significant digits, recursively."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (str, type(None))):
        return obj
    return _num(obj)


def _exact(obj):
    """JSON-safe copy of the configuration at full precision."""
    if isinstance(obj, dict):
        return {k: _exact(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_exact(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _exact(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return _num(obj)
    return obj


# ---------------------------------------------------------------------------
# tube parsing


def _bound(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf"):
        return math.inf
    if t == "-inf":
        return -math.inf
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"bad tube bound {text!r}") from None


def _step_from_items(items, m: int):
    """``items`` is either ``(lo, hi)`` or a list of ``(coordinate, lo, hi)`` triples."""
    lo = np.full(m, -math.inf)
    hi = np.full(m, math.inf)
    if len(items) == 2 and not isinstance(items[0], (list, tuple)):
        lo[:] = items[0]
        hi[:] = items[1]
        return lo, hi
    for trip in items:
        if len(trip) != 3:
            raise UsageError(f"tube entry {trip!r} is not a (coordinate, lower, upper) triple")
        s = int(trip[0])
        if not 1 <= s <= m:
            raise DimensionError(f"tube coordinate {s} is outside 1..{m}")
        lo[s - 1] = trip[1]
        hi[s - 1] = trip[2]
    return lo, hi


def parse_tube(arg: str, m: int) -> ForecastTube:
    """Parse ``--tube`` from a file (TOML or JSON with a ``steps`` list) or an inline string.

    Inline steps are separated by ``;``.  A step is ``lo:hi`` (shared by every
    coordinate) or comma-separated ``s@lo:hi`` triples with 1-based ``s``.
    ``inf`` and ``-inf`` are accepted everywhere.
    """
    path = Path(arg)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
        try:
            doc = json.loads(text) if path.suffix.lower() == ".json" else tomllib.loads(text)
        except (ValueError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot parse tube file {arg}: {exc}") from None
        steps = doc.get("steps") if isinstance(doc, dict) else None
        if not isinstance(steps, list) or not steps:
            raise UsageError("tube file needs a non-empty 'steps' list")
        conv = lambda v: _bound(v) if isinstance(v, str) else v  # noqa: E731
        parsed = []
        for st in steps:
            if not isinstance(st, list):
                raise UsageError(f"tube step {st!r} must be a list")
            if st and isinstance(st[0], list):
                parsed.append(_step_from_items([[t[0]] + [conv(v) for v in t[1:]] for t in st], m))
            else:
                parsed.append(_step_from_items([conv(v) for v in st], m))
    else:
        parsed = []
        for st in arg.split(";"):
            st = st.strip()
            if not st:
                continue
            if "@" in st:
                trips = []
                for part in st.split(","):
                    coord, _, rng = part.partition("@")
                    lo, sep, hi = rng.partition(":")
                    if not sep:
                        raise UsageError(f"bad tube step {part!r}")
                    try:
                        trips.append((int(coord), _bound(lo), _bound(hi)))
                    except ValueError:
                        raise UsageError(f"bad tube coordinate in {part!r}") from None
                parsed.append(_step_from_items(trips, m))
            else:
                lo, sep, hi = st.partition(":")
                if not sep:
                    raise UsageError(f"bad tube step {st!r}; expected lo:hi")
                parsed.append(_step_from_items((_bound(lo), _bound(hi)), m))
        if not parsed:
            raise UsageError("empty tube")
    lower = np.array([p[0] for p in parsed])
    upper = np.array([p[1] for p in parsed])
    if m == 1:
        lower, upper = lower[:, 0], upper[:, 0]
    return ForecastTube(lower, upper)


# ---------------------------------------------------------------------------
# commands


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _window_n(args, spec, series):
    if series is not None:
        if args.n is not None and args.n != series.n:
            raise UsageError(f"--n {args.n} disagrees with the series length {series.n}")
        return series.n
    if args.n is None:
        raise UsageError(f"{args.command} needs --series or --n")
    return args.n


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} needs --{name}")


def _series_for(args, spec):
    if args.series is None:
        return None
    try:
        series = load_series(args.series)
    except OSError as exc:
        raise UsageError(f"cannot read series {args.series}: {exc.strerror}") from None
    if isinstance(spec, VarmaSpec) and spec.m == 1 and series.values.ndim == 1:
        series = SeriesWindow(series.values[:, None])
    if series.m != spec.m:
        raise DimensionError(f"series has {series.m} columns but the model has m = {spec.m}")
    return series


def _matrix_shape(x):
    return list(np.shape(x))


def run(args) -> tuple[dict, list]:
    """Execute one request; returns the result document and the CSV table rows."""
    spec = load_model(args.model)
    config = {"command": args.command, "model": spec_to_dict(spec), "model_path": str(args.model)}
    if args.horizon is not None and args.horizon < 1:
        raise UsageError("--horizon must be at least 1")

    if args.command == "validate":
        rep = validate_spec(spec)
        result = {
            "valid": rep.valid,
            "causal": rep.causal,
            "invertible": rep.invertible,
            "ar_min_root_modulus": rep.ar_min_root_modulus,
            "ma_min_root_modulus": rep.ma_min_root_modulus,
            "warnings": list(rep.warnings),
        }
        table = [["key", "value"]] + [[k, result[k]] for k in sorted(result) if k != "warnings"]
        table += [["warning", w] for w in rep.warnings]
        return {"config": config, "result": result}, table

    _need(args, "horizon")
    series = _series_for(args, spec)
    if series is not None:
        config["series"] = series.values.tolist()
    h = args.horizon
    config["horizon"] = h

    if args.command == "error-cov":
        n = _window_n(args, spec, series)
        config["n"] = n
        dist = sigma_err_x(spec, n, h)
        ch = dist.chain
        result = {
            "covariance": dist.covariance,
            "dim": dist.dim,
            "m": dist.m,
            "stage": dist.stage,
            "chain": {
                "n_eff": ch.n_eff,
                "C1_shape": _matrix_shape(ch.C1),
                "C2_shape": _matrix_shape(ch.C2),
                "C3_shape": _matrix_shape(ch.C3),
                "CZtoErrY_shape": _matrix_shape(ch.CZtoErrY),
                "CErrYtoErrX": ch.CErrYtoErrX,
                "d": spec.d,
            },
        }
        return {"config": config, "result": result}, list(dist.covariance)

    if args.command == "forecast":
        _need(args, "series")
        series.check_for(spec)
        config["n"] = series.n
        fc = forecast_mean_arima(series, spec, h)
        dist = sigma_err_x(spec, series, h)
        sd = np.sqrt(dist.step_variances())
        values = fc.values.reshape(h, -1)
        result = {"forecast": fc.values, "std": sd if values.shape[1] > 1 else sd[:, 0]}
        header = ["step"] + [f"forecast{s + 1}" for s in range(values.shape[1])] + \
                 [f"std{s + 1}" for s in range(values.shape[1])]
        table = [header] + [[i + 1, *values[i], *sd[i]] for i in range(h)]
        return {"config": config, "result": result}, table

    if args.command == "tube-prob":
        _need(args, "series", "tube")
        series.check_for(spec)
        samples = DEFAULT_SAMPLES if args.samples is None else args.samples
        seed = _default_seed() if args.seed is None else args.seed
        if samples < 1:
            raise UsageError("--samples must be positive")
        tube = parse_tube(args.tube, spec.m)
        if tube.horizon != h:
            raise DimensionError(f"tube has {tube.horizon} steps but --horizon is {h}")
        config.update(n=series.n, samples=samples, seed=seed,
                      tube={"lower": tube.lower.tolist(), "upper": tube.upper.tolist()})
        fc = forecast_mean_arima(series, spec, h)
        # SeriesWindow for an m = 1 vector model is (n, 1); the tube is then (h, 1) too
        if fc.values.ndim == 2 and tube.lower.ndim == 1:
            tube = ForecastTube(tube.lower[:, None], tube.upper[:, None])
        box = tube_to_error_box(tube, fc)
        dist = sigma_err_x(spec, series, h)
        probs = tube_probabilities(dist, box, samples, seed)
        bp = lambda b: {"estimate": b.estimate, "standard_error": b.standard_error}  # noqa: E731
        result = {
            "forecast": fc.values,
            "error_box": {"lower": box.lower, "upper": box.upper},
            "intersection": bp(probs.intersection),
            "union": bp(probs.union),
            "marginals": [bp(b) for b in probs.marginals],
            "covariance": dist.covariance,
        }
        table = [["event", "estimate", "standard_error"],
                 ["intersection", probs.intersection.estimate, probs.intersection.standard_error],
                 ["union", probs.union.estimate, probs.union.standard_error]]
        table += [[f"step{i + 1}", b.estimate, b.standard_error] for i, b in enumerate(probs.marginals)]
        return {"config": config, "result": result}, table

    if args.command == "simulate":
        n = _window_n(args, spec, series)
        paths = DEFAULT_PATHS if args.samples is None else args.samples
        seed = _default_seed() if args.seed is None else args.seed
        if paths < 2:
            raise UsageError("--samples must be at least 2 for simulate")
        ens = simulate_paths(spec, n, h, paths, seed, keep_paths=args.dump_paths is not None)
        if args.dump_paths is not None:
            ens.to_csv(args.dump_paths)
        config.update(n=n, samples=paths, seed=seed, burn_in=ens.burn_in,
                      z_threshold=args.z_threshold)
        emp = empirical_error_covariance(ens)
        analytic = sigma_err_x(spec, n, h).covariance
        rep = compare_covariance(analytic, emp.covariance, emp.covariance_se, args.z_threshold)
        mean_z = float(np.max(np.abs(emp.mean_z)))
        result = {
            "analytic_covariance": analytic,
            "empirical_covariance": emp.covariance,
            "covariance_se": emp.covariance_se,
            "z": rep.z,
            "max_abs_z": rep.max_abs_z,
            "frobenius_rel": rep.frobenius_rel,
            "empirical_mean": emp.mean,
            "max_abs_mean_z": mean_z,
            "passed": rep.passed and mean_z <= args.z_threshold,
        }
        return {"config": config, "result": result}, list(emp.covariance)

    raise UsageError(f"unknown command {args.command!r}")


def render(doc: dict) -> str:
    doc = dict(doc)
    doc["config"] = _exact(doc["config"])
    doc["result"] = _clean(doc["result"])
    doc["tubecast_version"] = __version__
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tubecast", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--model", required=True, help="model config (TOML, or JSON by extension)")
    ap.add_argument("--series", help="CSV of observations, one row per step, m columns")
    ap.add_argument("--n", type=int, help="window length when no series is given")
    ap.add_argument("--horizon", type=int, help="number of future steps")
    ap.add_argument("--tube", help="tube bounds: a TOML/JSON file or inline 'lo:hi;lo:hi'")
    ap.add_argument("--samples", type=int,
                    help=f"Monte Carlo samples (tube-prob, default {DEFAULT_SAMPLES}) "
                         f"or paths (simulate, default {DEFAULT_PATHS})")
    ap.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    ap.add_argument("--z-threshold", type=float, default=DEFAULT_Z_THRESHOLD,
                    help="simulate: pass threshold on max |z|")
    ap.add_argument("--dump-paths", help="simulate: write the raw paths to this CSV")
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--format", choices=("doc", "csv"), default="doc")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, table = run(args)
        text = render(doc) if args.format == "doc" else render_csv(table)
    except TubecastError as exc:
        print(f"tubecast: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"tubecast: numerical failure: {exc}", file=sys.stderr)
        return 4
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
