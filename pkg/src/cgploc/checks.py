"""Randomized property suites over bistochastic matrices.

Each suite returns a :class:`CheckReport`. Suites marked ``asserted=False``
probe properties that are not established for the measure in question; their
violations are reported, not treated as failures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherence import (
    CONCAVE_FAMILY,
    LogBase,
    cgp2,
    cgp_rel,
    column_majorizes,
    concave_sum,
    f_det,
    f_inf,
    random_birkhoff,
    random_bistochastic,
    random_permutation_matrix,
)
from .rng import as_generator

SLACK = 1e-12
MONOTONE_SLACK = 1e-10
_SHARPNESS = (1.0, 2.0, 4.0)

MEASURE_FUNCTIONS = {"c2": cgp2, "crel": cgp_rel, "fdet": f_det, "finf": f_inf}


@dataclass(frozen=True)
class CheckReport:
    name: str
    checked: int
    violations: int
    worst_margin: float
    asserted: bool = True

    @property
    def passed(self) -> bool:
        return self.violations == 0 or not self.asserted

    def line(self) -> str:
        status = "PASS" if self.violations == 0 else ("FAIL" if self.asserted else "REPORTED")
        return (
            f"[{status}] {self.name}: {self.violations}/{self.checked} violations, "
            f"worst margin {self.worst_margin:+.3e}"
        )


def _random_matrix(gen, d: int):
    # a quarter of the draws are permutation mixtures, which sit near the boundary
    if gen.random() < 0.25:
        return random_birkhoff(d, gen)
    return random_bistochastic(d, gen, sharpness=float(gen.choice(_SHARPNESS)))


def _random_pair(gen, d_max: int):
    d = int(gen.integers(2, d_max + 1))
    return _random_matrix(gen, d), _random_matrix(gen, d)


def coherence_bound_suite(n: int = 1000, rng=0, d_max: int = 8, base=LogBase.TWO) -> CheckReport:
    """``cgp_rel(X) >= -log(1 - cgp2(X))`` in a common log base."""
    gen = as_generator(rng)
    base = LogBase.parse(base)
    margins = []
    for _ in range(n):
        x, _ = _random_pair(gen, d_max)
        margins.append(cgp_rel(x, base) + base.log(1.0 - cgp2(x)))
    margins = np.array(margins)
    return CheckReport("relative-entropy CGP >= -log(1 - C2)", n, int(np.sum(margins < -SLACK)), float(margins.min()))


def return_det_suite(n: int = 1000, rng=0, d_max: int = 8) -> CheckReport:
    """Return probability ``1 - cgp2(X)`` dominates ``(1 - f_det(X))^2``."""
    gen = as_generator(rng)
    margins = []
    for _ in range(n):
        x, _ = _random_pair(gen, d_max)
        margins.append((1.0 - cgp2(x)) - (1.0 - f_det(x)) ** 2)
    margins = np.array(margins)
    return CheckReport("1 - C2 >= (1 - f_det)^2", n, int(np.sum(margins < -SLACK)), float(margins.min()))


def monotonicity_suite(measure: str, n: int = 1000, rng=0, d_max: int = 8) -> CheckReport:
    """``f(M X) >= f(X)`` for random bistochastic ``M`` and ``X``."""
    f = MEASURE_FUNCTIONS[measure]
    gen = as_generator(rng)
    margins = []
    for _ in range(n):
        x, m = _random_pair(gen, d_max)
        margins.append(f(m @ x) - f(x))
    margins = np.array(margins)
    return CheckReport(
        f"{measure}(MX) >= {measure}(X)",
        n,
        int(np.sum(margins < -MONOTONE_SLACK)),
        float(margins.min()),
        asserted=measure in ("c2", "crel"),
    )


def permutation_invariance_suite(measure: str, n: int = 200, rng=0, d_max: int = 8) -> CheckReport:
    f = MEASURE_FUNCTIONS[measure]
    gen = as_generator(rng)
    devs = []
    for _ in range(n):
        x, _ = _random_pair(gen, d_max)
        d = x.shape[0]
        y = random_permutation_matrix(d, gen) @ x @ random_permutation_matrix(d, gen)
        devs.append(abs(f(y) - f(x)))
    devs = np.array(devs)
    return CheckReport(f"{measure}(P X P') == {measure}(X)", n, int(np.sum(devs > 1e-12)), float(-devs.max()))


def majorization_suite(n: int = 1000, rng=0, d_max: int = 8) -> CheckReport:
    """``X`` column-majorizes ``M X``, and every concave sum orders the pair accordingly."""
    gen = as_generator(rng)
    bad = 0
    worst = np.inf
    for _ in range(n):
        x, m = _random_pair(gen, d_max)
        y = m @ x
        ok = column_majorizes(x, y)
        for phi in CONCAVE_FAMILY.values():
            margin = concave_sum(y, phi) - concave_sum(x, phi)
            worst = min(worst, margin)
            ok = ok and margin >= -SLACK
        bad += not ok
    return CheckReport("X >c MX and concave sums ordered", n, bad, float(worst))


def run_all(n: int = 1000, rng=0, d_max: int = 8) -> list:
    gen = as_generator(rng)
    reports = [
        coherence_bound_suite(n, gen, d_max),
        return_det_suite(n, gen, d_max),
        majorization_suite(n, gen, d_max),
    ]
    for m in MEASURE_FUNCTIONS:
        reports.append(monotonicity_suite(m, n, gen, d_max))
    for m in MEASURE_FUNCTIONS:
        reports.append(permutation_invariance_suite(m, max(1, n // 5), gen, d_max))
    return reports
