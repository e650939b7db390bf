"""Command-line entry point: ``cgploc {anderson,lloyd,xxx,fit,geom,check}``.

Every flag of the sweep subcommands may also come from a flat ``key = value``
config file passed with ``--config``; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import run_all
from .experiments import (
    CSV_MEASURES,
    FIT_MODES,
    LOG_MODE,
    EnsembleConfig,
    fit_all,
    fit_rate,
    rate_inequality_check,
    run_geometry_sweep,
    run_sweep,
)
from .io import emit_results, read_csv, series_from_rows, summary_table, write_fits_csv, write_geometry_csv

SWEEP_DEFAULTS = {
    "anderson": {"sizes": "64,128,256", "disorder": "0.5,1.0,2.0"},
    "lloyd": {"sizes": "64,128,256", "disorder": "0.5,1.0,2.0"},
    "xxx": {"sizes": "4,6,8,10", "disorder": "0.4,1.0,3.7,9.0"},
}
COMMON_DEFAULTS = {
    "samples": 200,
    "seed": 42,
    "measures": "c2,crel",
    "log_base": "2",
    "workers": 1,
    "out": "results",
    "hx": 0.3,
    "sample_multiplier": "",
    "fit_sizes": "",
    "weighted": True,
    "fit_asymptote": False,
    "periodic": True,
    "prefix": "",
}
_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _csv_list(text, cast):
    if text in (None, ""):
        return []
    if isinstance(text, (list, tuple)):
        return [cast(v) for v in text]
    return [cast(v) for v in str(text).replace(" ", "").split(",") if v]


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _BOOL_TRUE:
        return True
    if text in _BOOL_FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def parse_multipliers(text) -> dict:
    """``"3.7:2,9.0:3"`` -> ``{3.7: 2, 9.0: 3}``."""
    out = {}
    for item in _csv_list(text, str):
        try:
            w, k = item.split(":")
            out[float(w)] = int(k)
        except ValueError as exc:
            raise ValueError(f"bad sample multiplier {item!r}; expected W:k") from exc
        if out[float(w)] < 1:
            raise ValueError(f"sample multiplier must be >= 1, got {item!r}")
    return out


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, then the config file, then explicit flags."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        unknown = set(cfg) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _add_sweep_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value file mirroring the flags")
    p.add_argument("--sizes", help="comma-separated chain lengths, e.g. 4,6,8,10")
    p.add_argument("--disorder", help="comma-separated disorder strengths (W or Gamma)")
    p.add_argument("--samples", type=int, help="realizations per (L, disorder) point")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--measures", help=f"comma-separated subset of {','.join(CSV_MEASURES)},escape_profile")
    p.add_argument("--log-base", dest="log_base", choices=["2", "e"])
    p.add_argument("--workers", type=int, help="worker processes; results do not depend on it")
    p.add_argument("--out", help="output directory")
    p.add_argument("--prefix", help="output file prefix (default: model name)")
    p.add_argument("--hx", type=float, help="transverse field (xxx only)")
    p.add_argument("--sample-multiplier", dest="sample_multiplier", help="per-disorder multipliers, e.g. 3.7:2")
    p.add_argument("--fit-sizes", dest="fit_sizes", help="restrict the rate fit to these sizes")
    p.add_argument("--unweighted", dest="weighted", action="store_const", const=False, help="ordinary least squares")
    p.add_argument("--fit-asymptote", dest="fit_asymptote", action="store_const", const=True,
                   help="also fit the asymptote alpha in 1 - mean = alpha + c 2^(-lambda L)")
    p.add_argument("--open", dest="periodic", action="store_const", const=False, help="open boundary conditions")


def build_config(model: str, opts: dict) -> EnsembleConfig:
    return EnsembleConfig(
        model=model,
        sizes=_csv_list(opts["sizes"], int),
        disorder_values=_csv_list(opts["disorder"], float),
        hx=float(opts["hx"]),
        n_samples=int(opts["samples"]),
        master_seed=int(opts["seed"]),
        measures=tuple(_csv_list(opts["measures"], str)),
        log_base=opts["log_base"],
        workers=int(opts["workers"]),
        sample_multipliers=parse_multipliers(opts["sample_multiplier"]),
        periodic=_bool(opts["periodic"]),
    )


def cmd_sweep(model: str, args) -> int:
    opts = resolve(args, {**COMMON_DEFAULTS, **SWEEP_DEFAULTS[model]})
    cfg = build_config(model, opts)
    results = run_sweep(cfg)
    window = _csv_list(opts["fit_sizes"], int) or None
    fits = fit_all(results, [m for m in CSV_MEASURES if m in cfg.measures], window,
                   weighted=_bool(opts["weighted"]), fit_asymptote=_bool(opts["fit_asymptote"]))
    inequality = rate_inequality_check(fits, results)
    paths = emit_results(results, fits, opts["out"], opts["prefix"] or None, inequality)
    sys.stdout.write(summary_table(results, fits, inequality))
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return 0


def fits_from_rows(rows, sizes=None, weighted: bool = True, fit_asymptote: bool = False) -> dict:
    fits = {}
    for m in CSV_MEASURES:
        for (model, w), series in series_from_rows(rows, m).items():
            if sizes:
                series = [p for p in series if p[0] in sizes]
            if len(series) >= 3:
                mode = FIT_MODES[m]
                fits[(model, w, m)] = fit_rate(series, mode, weighted, fit_asymptote=fit_asymptote and mode == LOG_MODE)
    return fits


def cmd_fit(args) -> int:
    rows = read_csv(args.input)
    sizes = _csv_list(args.fit_sizes, int) or None
    fits = fits_from_rows(rows, sizes, weighted=not args.unweighted, fit_asymptote=args.fit_asymptote)
    if not fits:
        print("no (model, disorder, measure) series with at least 3 sizes", file=sys.stderr)
        return 1
    out = Path(args.output or Path(args.input).with_name(Path(args.input).stem.replace("_results", "") + "_fits.csv"))
    write_fits_csv(fits, out)
    print(f"{'model':<9}{'disorder':>10}{'measure':>9}{'lambda':>12}{'stderr':>11}{'r^2':>9}")
    for (model, w, m), f in sorted(fits.items()):
        print(f"{model:<9}{w:>10.4g}{m:>9}{f.rate:>12.5f}{f.stderr:>11.2e}{f.r_squared:>9.4f}")
    for rep in rate_inequality_check(fits):
        status = "ok" if rep.holds else "VIOLATED"
        print(f"W={rep.disorder:g}: lambda_det - lambda_2/2 = {rep.difference:+.4f} (+- {rep.combined_stderr:.4f}) {status}")
    print(f"wrote fits: {out}")
    return 0


def cmd_geom(args) -> int:
    opts = resolve(args, {**COMMON_DEFAULTS, **SWEEP_DEFAULTS[args.model]})
    cfg = build_config(args.model, opts)
    rows = run_geometry_sweep(cfg)
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    path = write_geometry_csv(rows, out / f"{opts['prefix'] or args.model}_geometry.csv")
    print(f"{'L':>6}{'disorder':>10}{'g':>14}{'cond/g':>10}")
    for r in rows:
        print(f"{r['L']:>6}{r['disorder']:>10.4g}{r['g_mean']:>14.6g}{r['ratio_mean']:>10.4f}")
    print(f"wrote geometry: {path}")
    return 0


def cmd_check(args) -> int:
    reports = run_all(args.n, args.seed, args.d_max)
    for rep in reports:
        print(rep.line())
    return 0 if all(r.passed for r in reports) else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgploc", description="Coherence-generating power of localization transitions")
    sub = parser.add_subparsers(dest="command", required=True)
    for model, text in (
        ("anderson", "Anderson chain, uniform on-site disorder in [-W, W]"),
        ("lloyd", "Lloyd chain, Cauchy on-site disorder of width Gamma"),
        ("xxx", "Heisenberg XXX chain with random z fields and transverse field hx"),
    ):
        _add_sweep_flags(sub.add_parser(model, help=text))
    p = sub.add_parser("fit", help="fit decay rates to a results CSV")
    p.add_argument("input", help="results CSV written by a sweep")
    p.add_argument("--output", help="fits CSV path (default: next to the input)")
    p.add_argument("--fit-sizes", dest="fit_sizes", default="")
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--fit-asymptote", action="store_true")
    p = sub.add_parser("geom", help="fidelity metric and conductivity moment sweep")
    p.add_argument("--model", choices=sorted(SWEEP_DEFAULTS), default="xxx")
    _add_sweep_flags(p)
    p = sub.add_parser("check", help="randomized property suites over bistochastic matrices")
    p.add_argument("--n", type=int, default=1000, help="cases per suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-max", dest="d_max", type=int, default=8)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command in SWEEP_DEFAULTS:
            return cmd_sweep(args.command, args)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "geom":
            return cmd_geom(args)
        return cmd_check(args)
    except (ValueError, OSError) as exc:
        print(f"cgploc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
