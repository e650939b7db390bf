"""CSV output for sweeps and fits, replay sidecars and the summary table."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .experiments import CSV_MEASURES, DisorderEnsembleResult, ScalingFit
from .models import DisorderRecord

RESULT_COLUMNS = ["model", "L", "disorder", "hx", "n_samples", "seed"] + [
    f"{m}_{stat}" for m in CSV_MEASURES for stat in ("mean", "std")
]
FIT_COLUMNS = ["model", "disorder", "measure", "mode", "lambda", "stderr", "intercept", "r_squared", "L_min", "L_max"]
REPLAY_COLUMNS = ["model", "L", "disorder", "hx", "master_seed", "stream_index", "fields"]
GEOMETRY_COLUMNS = [
    "model", "L", "disorder", "hx", "n_samples", "seed",
    "g_mean", "g_std", "cond_mean", "cond_std", "ratio_mean", "ratio_std",
]


def fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def result_row(res: DisorderEnsembleResult) -> dict:
    row = {
        "model": res.model, "L": res.L, "disorder": res.disorder, "hx": res.hx,
        "n_samples": res.n_samples, "seed": res.seed,
    }
    for m in CSV_MEASURES:
        if m in res.samples:
            mean, std, _, _ = res.stats(m)
            row[f"{m}_mean"], row[f"{m}_std"] = mean, std
        else:
            row[f"{m}_mean"] = row[f"{m}_std"] = None
    return row


def fit_row(key, fit: ScalingFit) -> dict:
    model, disorder, measure = key
    return {
        "model": model, "disorder": disorder, "measure": measure, "mode": fit.mode,
        "lambda": fit.rate, "stderr": fit.stderr, "intercept": fit.intercept,
        "r_squared": fit.r_squared, "L_min": fit.L_min, "L_max": fit.L_max,
    }


def _write(path: Path, columns, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([fmt(row.get(c)) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def write_results_csv(results, path) -> Path:
    return _write(Path(path), RESULT_COLUMNS, [result_row(r) for r in results])


def write_fits_csv(fits: dict, path) -> Path:
    return _write(Path(path), FIT_COLUMNS, [fit_row(k, f) for k, f in sorted(fits.items())])


def write_geometry_csv(rows, path) -> Path:
    return _write(Path(path), GEOMETRY_COLUMNS, rows)


def write_replay_csv(results, path) -> Path:
    rows = []
    for res in results:
        for rec in res.records:
            rows.append({
                "model": rec.model, "L": rec.L, "disorder": rec.disorder, "hx": rec.hx,
                "master_seed": rec.master_seed, "stream_index": rec.stream_index,
                "fields": " ".join(repr(float(v)) for v in rec.fields),
            })
    return _write(Path(path), REPLAY_COLUMNS, rows)


def _parse(value: str):
    if value == "":
        return None
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def read_csv(path) -> list:
    """Rows as dicts with ints, floats or ``None`` for empty fields."""
    try:
        with open(path, newline="") as fh:
            return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def read_replay_csv(path) -> list:
    records = []
    for row in read_csv(path):
        fields = np.array([float(v) for v in str(row["fields"]).split()])
        records.append(DisorderRecord(
            row["model"], int(row["L"]), float(row["disorder"]), int(row["master_seed"]),
            int(row["stream_index"]), fields, hx=float(row["hx"]),
        ))
    return records


def series_from_rows(rows, measure: str):
    """Group result rows into ``{(model, disorder): [(L, mean, se), ...]}``."""
    out = {}
    for row in rows:
        mean, std = row.get(f"{measure}_mean"), row.get(f"{measure}_std")
        if mean is None:
            continue
        se = float(std) / math.sqrt(int(row["n_samples"]))
        out.setdefault((row["model"], float(row["disorder"])), []).append((int(row["L"]), float(mean), se))
    return {k: sorted(v) for k, v in out.items()}


def summary_table(results, fits=None, inequality=None) -> str:
    lines = []
    measures = [m for m in CSV_MEASURES if results and m in results[0].samples]
    header = f"{'model':<9}{'L':>6}{'disorder':>10}{'n':>7}{'degen':>7}" + "".join(f"{m:>22}" for m in measures)
    lines.append(header)
    for r in results:
        cells = []
        for m in measures:
            mean, _, se, _ = r.stats(m)
            cells.append(f"{mean:>12.6f} +- {se:<7.1e}")
        lines.append(f"{r.model:<9}{r.L:>6}{r.disorder:>10.4g}{r.n_samples:>7}{r.n_degenerate:>7}" + "".join(cells))
    bad = {k: v for r in results for k, v in r.violations.items() if v}
    lines.append("")
    lines.append("per-realization inequality violations: " + (str(bad) if bad else "none"))
    if fits:
        lines.append("")
        lines.append(f"{'disorder':>10}{'measure':>9}{'rate':>12}{'stderr':>11}{'r^2':>9}")
        for (model, w, m), f in sorted(fits.items()):
            lines.append(f"{w:>10.4g}{m:>9}{f.rate:>12.5f}{f.stderr:>11.2e}{f.r_squared:>9.4f}")
    if inequality:
        lines.append("")
        for rep in inequality:
            status = "ok" if rep.holds else "VIOLATED"
            lines.append(
                f"W={rep.disorder:g}: rate_det - rate_c2/2 = {rep.difference:+.4f} "
                f"(+- {rep.combined_stderr:.4f}) {status}; pointwise violations "
                f"{rep.pointwise_violations}/{rep.pointwise_checked}"
            )
    return "\n".join(lines) + "\n"


def emit_results(results, fits, path, prefix: str | None = None, inequality=None) -> dict:
    """Write ``<prefix>_results.csv``, ``<prefix>_replay.csv``, ``<prefix>_summary.txt``
    and, when ``fits`` is non-empty, ``<prefix>_fits.csv`` into directory ``path``."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    prefix = prefix or (results[0].model if results else "sweep")
    paths = {
        "results": write_results_csv(results, out / f"{prefix}_results.csv"),
        "replay": write_replay_csv(results, out / f"{prefix}_replay.csv"),
    }
    if fits:
        paths["fits"] = write_fits_csv(fits, out / f"{prefix}_fits.csv")
    summary = out / f"{prefix}_summary.txt"
    try:
        summary.write_text(summary_table(results, fits, inequality))
    except OSError as exc:
        raise OSError(f"cannot write {summary}: {exc}") from exc
    paths["summary"] = summary
    return paths
