"""Disorder-ensemble sweeps, scaling-rate fits and rate-inequality checks."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .coherence import LogBase, cgp2, cgp_rel, f_det, f_inf
from .dynamics import average_escape, time_averaged_cgp
from .geometry import conductivity_moment, fidelity_metric
from .models import build, hilbert_dim, hopping_matrix, rebuild, transverse_field_operator
from .rng import RngStream
from .spectral import eigendecompose, transition_matrix

MODELS = ("anderson", "lloyd", "xxx")
MEASURES = ("c2", "crel", "fdet", "finf", "ftime", "escape_profile")
CSV_MEASURES = ("c2", "crel", "fdet", "finf", "ftime")
LOG_MODE = "log2_of_one_minus"
LINEAR_MODE = "linear"
FIT_MODES = {"c2": LOG_MODE, "fdet": LOG_MODE, "finf": LOG_MODE, "ftime": LOG_MODE, "crel": LINEAR_MODE}
MAX_DIM = 4096
DEGENERACY_RTOL = 1e-10
INEQUALITY_SLACK = 1e-12


@dataclass
class EnsembleConfig:
    model: str
    sizes: list
    disorder_values: list
    hx: float = 0.3
    n_samples: int = 200
    master_seed: int = 42
    measures: tuple = ("c2", "crel")
    log_base: LogBase = LogBase.TWO
    workers: int = 1
    sample_multipliers: dict = field(default_factory=dict)
    periodic: bool = True
    max_dim: int = MAX_DIM

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        self.sizes = [int(s) for s in self.sizes]
        self.disorder_values = [float(w) for w in self.disorder_values]
        if not self.sizes or not self.disorder_values:
            raise ValueError("sizes and disorder values must be non-empty")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        unknown = set(self.measures) - set(MEASURES)
        if unknown:
            raise ValueError(f"unknown measures {sorted(unknown)}")
        self.measures = tuple(m for m in MEASURES if m in self.measures)
        self.log_base = LogBase.parse(self.log_base)
        if self.model != "xxx":
            self.hx = 0.0

    def samples_at(self, disorder: float) -> int:
        return self.n_samples * int(self.sample_multipliers.get(float(disorder), 1))

    def check_feasible(self):
        bad = [(self.model, L) for L in self.sizes if hilbert_dim(self.model, L) > self.max_dim]
        if bad:
            raise ValueError(f"infeasible sizes (dimension > {self.max_dim}): {bad}")


@dataclass
class DisorderEnsembleResult:
    """Per-realization measure values at one ``(model, L, disorder)`` point."""

    model: str
    L: int
    disorder: float
    hx: float
    seed: int
    samples: dict
    records: list = field(default_factory=list, repr=False)
    n_degenerate: int = 0
    violations: dict = field(default_factory=dict)
    escape_deviation: float = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.records)

    def stats(self, measure: str):
        """``(mean, std, se, n)``; ``std`` uses ``n - 1`` degrees of freedom."""
        values = self.samples[measure]
        n = len(values)
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if n > 1 else 0.0
        return mean, std, std / math.sqrt(n), n


def measure_values(x: np.ndarray, measures, log_base: LogBase) -> dict:
    out = {}
    if "c2" in measures:
        out["c2"] = cgp2(x)
    if "crel" in measures:
        out["crel"] = cgp_rel(x, log_base)
    if "fdet" in measures:
        out["fdet"] = f_det(x)
    if "finf" in measures:
        out["finf"] = f_inf(x)
    if "ftime" in measures:
        out["ftime"] = time_averaged_cgp(x)
    if "escape_profile" in measures:
        out["escape_mean"] = average_escape(x).mean
    return out


def _evaluate(task):
    model, L, disorder, hx, periodic, seed, index, measures, base = task
    h, record = build(model, L, disorder, RngStream(seed, index), hx=hx, periodic=periodic)
    decomp = eigendecompose(h)
    degenerate = decomp.min_gap < DEGENERACY_RTOL * max(decomp.width, 1.0)
    values = measure_values(transition_matrix(decomp), set(measures) | {"c2"}, LogBase(base))
    return values, record, degenerate


def _init_worker():
    threadpool_limits(1)


def _tasks(cfg: EnsembleConfig):
    for L in cfg.sizes:
        for w in cfg.disorder_values:
            for i in range(cfg.samples_at(w)):
                yield (cfg.model, L, w, cfg.hx, cfg.periodic, cfg.master_seed, i, cfg.measures, cfg.log_base.value)


def _aggregate(cfg: EnsembleConfig, outputs) -> list:
    results = []
    it = iter(outputs)
    for L in cfg.sizes:
        for w in cfg.disorder_values:
            rows = [next(it) for _ in range(cfg.samples_at(w))]
            keys = [m for m in CSV_MEASURES if m in cfg.measures]
            samples = {m: np.array([r[0][m] for r in rows]) for m in keys}
            c2 = np.array([r[0]["c2"] for r in rows])
            res = DisorderEnsembleResult(
                cfg.model, L, w, cfg.hx, cfg.master_seed, samples,
                records=[r[1] for r in rows],
                n_degenerate=sum(int(r[2]) for r in rows),
            )
            if "crel" in cfg.measures:
                crel = samples["crel"]
                bound = -cfg.log_base.log(np.maximum(1.0 - c2, 1e-300))
                res.violations["coherence_bound"] = int(np.sum(crel < bound - INEQUALITY_SLACK))
            if "fdet" in cfg.measures:
                res.violations["return_vs_det"] = int(
                    np.sum(1.0 - c2 < (1.0 - samples["fdet"]) ** 2 - INEQUALITY_SLACK)
                )
            if "escape_profile" in cfg.measures:
                esc = np.array([r[0]["escape_mean"] for r in rows])
                res.escape_deviation = float(np.max(np.abs(esc - c2)))
            results.append(res)
    return results


def run_sweep(cfg: EnsembleConfig) -> list:
    """Evaluate every requested measure on every realization of every ``(L, disorder)`` point.

    Realization ``i`` uses ``RngStream(master_seed, i)``. Aggregation follows the
    task order, so the output does not depend on ``cfg.workers``.
    """
    cfg.check_feasible()
    tasks = list(_tasks(cfg))
    if cfg.workers <= 1:
        with threadpool_limits(1):
            outputs = [_evaluate(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * cfg.workers))
        with ProcessPoolExecutor(cfg.workers, initializer=_init_worker) as pool:
            outputs = list(pool.map(_evaluate, tasks, chunksize=chunk))
    return _aggregate(cfg, outputs)


def replay_records(records, measures=("c2", "crel"), log_base=LogBase.TWO, periodic: bool = True) -> dict:
    """Recompute measures from stored disorder fields; returns ``{measure: array}``."""
    base = LogBase.parse(log_base)
    rows = [measure_values(transition_matrix(eigendecompose(rebuild(r, periodic))), measures, base) for r in records]
    return {m: np.array([row[m] for row in rows]) for m in measures if m in CSV_MEASURES}


# --------------------------------------------------------------------------- fits


@dataclass(frozen=True)
class ScalingFit:
    rate: float
    intercept: float
    stderr: float
    r_squared: float
    mode: str
    L_min: int
    L_max: int
    asymptote: float = 0.0
    asymptote_stderr: float = 0.0


def _wls(x, y, sigma, absolute_sigma: bool):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    w = np.ones_like(x) if sigma is None else 1.0 / np.asarray(sigma, float) ** 2
    a = np.column_stack([x, np.ones_like(x)])
    aw = a * w[:, None]
    normal = a.T @ aw
    coef = np.linalg.solve(normal, aw.T @ y)
    resid = y - a @ coef
    cov = np.linalg.inv(normal)
    chi2 = float(np.sum(w * resid**2))
    dof = len(x) - 2
    if not absolute_sigma:
        cov = cov * (chi2 / dof if dof > 0 else 0.0)
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    r2 = 1.0 - chi2 / ss_tot if ss_tot > 0 else 1.0
    return coef, cov, r2


def fit_rate(series, mode: str = LOG_MODE, weighted: bool = True, absolute_sigma: bool = False,
             fit_asymptote: bool = False) -> ScalingFit:
    """Fit a decay rate to a size series of ``(L, mean, se)`` triples.

    ``log2_of_one_minus`` regresses ``log2(1 - mean)`` on ``L`` and reports
    ``rate = -slope``; ``linear`` regresses ``mean`` itself and reports
    ``rate = slope``. Points are weighted by ``1/se^2`` after propagating ``se``
    through the transform (unweighted if any ``se`` is zero). ``stderr`` comes
    from the fit covariance, rescaled by the reduced chi-square unless
    ``absolute_sigma``.

    With ``fit_asymptote`` (log mode only) the ansatz ``1 - mean = a + c 2^{-rate L}``
    is fitted by nonlinear least squares instead.
    """
    pts = sorted((int(L), float(m), float(s)) for L, m, s in series)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 sizes to fit a rate, got {len(pts)}")
    L = np.array([p[0] for p in pts], float)
    mean = np.array([p[1] for p in pts])
    se = np.array([p[2] for p in pts])
    if mode == LOG_MODE:
        g = 1.0 - mean
        for Li, gi in zip(L, g):
            if not gi > 0:
                raise ValueError(f"log fit needs 1 - mean > 0; got {gi!r} at L = {int(Li)}")
        if fit_asymptote:
            return _fit_with_asymptote(L, g, se if weighted and np.all(se > 0) else None, absolute_sigma)
        y = np.log2(g)
        sigma = se / (g * math.log(2.0))
        sign = -1.0
    elif mode == LINEAR_MODE:
        y, sigma, sign = mean, se, 1.0
    else:
        raise ValueError(f"unknown fit mode {mode!r}")
    use_sigma = sigma if weighted and np.all(sigma > 0) else None
    coef, cov, r2 = _wls(L, y, use_sigma, absolute_sigma)
    return ScalingFit(
        rate=float(sign * coef[0]),
        intercept=float(coef[1]),
        stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        r_squared=float(r2),
        mode=mode,
        L_min=int(L[0]),
        L_max=int(L[-1]),
    )


def _fit_with_asymptote(L, g, sigma, absolute_sigma: bool = False):
    from scipy.optimize import curve_fit

    def model(x, a, logc, rate):
        return a + np.exp(logc) * 2.0 ** (-rate * x)

    start = fit_rate([(Li, 1 - gi, 0.0) for Li, gi in zip(L, g)], LOG_MODE, weighted=False)
    p0 = (0.0, start.intercept * math.log(2.0), start.rate)
    popt, pcov = curve_fit(model, L, g, p0=p0, sigma=sigma, absolute_sigma=absolute_sigma and sigma is not None,
                           method="trf", max_nfev=20000)
    resid = g - model(L, *popt)
    ss_tot = float(np.sum((g - g.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    perr = np.sqrt(np.clip(np.diag(pcov), 0, None))
    return ScalingFit(
        rate=float(popt[2]),
        intercept=float(popt[1] / math.log(2.0)),
        stderr=float(perr[2]),
        r_squared=r2,
        mode=LOG_MODE,
        L_min=int(L[0]),
        L_max=int(L[-1]),
        asymptote=float(popt[0]),
        asymptote_stderr=float(perr[0]),
    )


def size_series(results, measure: str, disorder: float, sizes=None):
    """``(L, mean, se)`` triples for one measure at one disorder value."""
    out = []
    for r in results:
        if r.disorder == disorder and (sizes is None or r.L in sizes) and measure in r.samples:
            mean, _, se, _ = r.stats(measure)
            out.append((r.L, mean, se))
    return sorted(out)


def fit_all(results, measures=None, sizes=None, weighted: bool = True, absolute_sigma: bool = False,
            fit_asymptote: bool = False) -> dict:
    """Fit every measure at every disorder value; keys are ``(model, disorder, measure)``.

    ``sizes`` restricts the fit window; ``fit_asymptote`` applies to log-mode measures only.
    """
    fits = {}
    for model, disorder in sorted({(r.model, r.disorder) for r in results}):
        sub = [r for r in results if r.model == model]
        for m in measures or CSV_MEASURES:
            series = size_series(sub, m, disorder, sizes)
            if len(series) >= 3:
                mode = FIT_MODES[m]
                fits[(model, disorder, m)] = fit_rate(
                    series, mode, weighted, absolute_sigma, fit_asymptote and mode == LOG_MODE
                )
    return fits


def return_det_violations(c2_values, fdet_values, slack: float = INEQUALITY_SLACK) -> int:
    """Count realizations with ``1 - C2 < (1 - f_det)^2`` beyond ``slack``."""
    c2_values = np.asarray(c2_values, float)
    fdet_values = np.asarray(fdet_values, float)
    return int(np.sum(1.0 - c2_values < (1.0 - fdet_values) ** 2 - slack))


@dataclass(frozen=True)
class RateInequalityReport:
    disorder: float
    rate_det: float
    rate_c2: float
    difference: float
    combined_stderr: float
    pointwise_violations: int
    pointwise_checked: int

    @property
    def holds(self) -> bool:
        """``rate_det >= rate_c2 / 2`` within two combined standard errors."""
        return self.difference >= -2.0 * self.combined_stderr


def rate_inequality_check(fits: dict, results=None) -> list:
    """Compare ``rate_det`` with ``rate_c2 / 2`` at every disorder value having both fits."""
    reports = []
    for (model, disorder, m), fit_c2 in sorted(fits.items()):
        if m != "c2" or (model, disorder, "fdet") not in fits:
            continue
        fit_det = fits[(model, disorder, "fdet")]
        violations = checked = 0
        for r in results or ():
            if r.model == model and r.disorder == disorder and "fdet" in r.samples and "c2" in r.samples:
                violations += return_det_violations(r.samples["c2"], r.samples["fdet"])
                checked += r.n_samples
        reports.append(
            RateInequalityReport(
                disorder=disorder,
                rate_det=fit_det.rate,
                rate_c2=fit_c2.rate,
                difference=fit_det.rate - fit_c2.rate / 2.0,
                combined_stderr=math.hypot(fit_det.stderr, fit_c2.stderr / 2.0),
                pointwise_violations=violations,
                pointwise_checked=checked,
            )
        )
    return reports


# ---------------------------------------------------------------------- geometry


def perturbation_for(model: str, L: int) -> np.ndarray:
    """Perturbation used by geometry sweeps: ``dH/dhx`` for the XXX chain, the
    hopping operator (``dH/dt`` at unit hopping) for the single-particle chains."""
    if model == "xxx":
        return transverse_field_operator(L)
    return hopping_matrix(L)


def _evaluate_geometry(task):
    model, L, disorder, hx, periodic, seed, index = task
    h, _ = build(model, L, disorder, RngStream(seed, index), hx=hx, periodic=periodic)
    decomp = eigendecompose(h)
    v = perturbation_for(model, L)
    g = fidelity_metric(decomp, v).g
    return g, conductivity_moment(decomp, v)


def run_geometry_sweep(cfg: EnsembleConfig) -> list:
    """Metric ``g`` and conductivity moment per ``(L, disorder)``; returns row dicts."""
    cfg.check_feasible()
    rows = []
    with threadpool_limits(1):
        for L in cfg.sizes:
            for w in cfg.disorder_values:
                vals = np.array([
                    _evaluate_geometry((cfg.model, L, w, cfg.hx, cfg.periodic, cfg.master_seed, i))
                    for i in range(cfg.samples_at(w))
                ])
                ratio = vals[:, 1] / vals[:, 0]
                n = len(vals)
                ddof = 1 if n > 1 else 0
                rows.append({
                    "model": cfg.model, "L": L, "disorder": w, "hx": cfg.hx, "n_samples": n,
                    "seed": cfg.master_seed,
                    "g_mean": float(vals[:, 0].mean()), "g_std": float(vals[:, 0].std(ddof=ddof)),
                    "cond_mean": float(vals[:, 1].mean()), "cond_std": float(vals[:, 1].std(ddof=ddof)),
                    "ratio_mean": float(ratio.mean()), "ratio_std": float(ratio.std(ddof=ddof)),
                })
    return rows

