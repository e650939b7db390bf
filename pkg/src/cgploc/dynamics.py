"""Escape and return probabilities, infinite-time averages and their numerical oracles.

Time evolution is always evaluated in the eigenbasis, where ``e^{-iHt}`` is the
phase vector ``exp(-i E t)``; no matrix exponentials are formed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .coherence import c2_state, cgp2
from .spectral import SpectralDecomposition

# constant irrational offset of the sampling grid; see oracle_times
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EscapeProfile:
    per_state: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_state))

    @property
    def return_probability(self) -> float:
        return 1.0 - self.mean


def _eigen_amplitudes(psi) -> np.ndarray:
    a = np.asarray(psi)
    return a if np.iscomplexobj(a) else a.astype(float)


def escape_probability(psi_eigen) -> float:
    """Infinite-time escape probability of a state given by its eigenbasis amplitudes."""
    return c2_state(psi_eigen)


def oracle_times(t_max: float, n_samples: int) -> np.ndarray:
    """Equally spaced times on ``[0, t_max]`` shifted by an irrational fraction of a step.

    Equal spacing turns each oscillating term into a geometric sum, which cancels
    to ``O(1/n)`` unless a frequency is commensurate with the step; the offset
    keeps ``t = 0`` out of the grid.
    """
    return (np.arange(n_samples) + _GOLDEN) * (t_max / n_samples)


def escape_time_average_oracle(decomp: SpectralDecomposition, psi, t_max: float, n_samples: int = 10_000) -> float:
    """``1 - mean_t |<psi|e^{-iHt}|psi>|^2`` over a finite sampling grid.

    ``psi`` is given in the reference (computational) basis.
    """
    if n_samples < 1000:
        raise ValueError("the oracle needs at least 1000 time samples")
    gap = decomp.min_gap
    if t_max * gap < 10:
        warnings.warn(
            f"t_max * min_gap = {t_max * gap:.3g} < 10; time average is poorly converged",
            RuntimeWarning,
            stacklevel=2,
        )
    a = decomp.eigenvectors.T @ _eigen_amplitudes(psi)
    p = np.abs(a) ** 2
    e = decomp.eigenvalues
    survival = np.empty(n_samples)
    times = oracle_times(t_max, n_samples)
    for start in range(0, n_samples, 4096):
        t = times[start : start + 4096]
        amp = np.exp(-1j * np.outer(t, e)) @ p
        survival[start : start + 4096] = np.abs(amp) ** 2
    return float(1.0 - survival.mean())


def average_escape(x) -> EscapeProfile:
    """Per-configuration escape probabilities ``1 - sum_j X_ij^2``.

    Row ``i`` of ``X`` is the eigenbasis population of configuration state ``i``.
    """
    x = np.asarray(x, dtype=float)
    return EscapeProfile(1.0 - np.sum(x * x, axis=1))


def time_averaged_cgp(x) -> float:
    """Infinite-time average of the 2-CGP of ``e^{-iHt}`` for a non-resonant ``H``.

    With ``G = X^T X`` (inner products of the eigenvector columns of ``X``)::

        1 - (2/d) sum_ij G_ij^2 + (1/d) sum_i G_ii^2
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    g = x.T @ x
    return float(1.0 - 2.0 * np.sum(g * g) / d + np.sum(np.diag(g) ** 2) / d)


def _gap_resolution(e: np.ndarray) -> float:
    """Smallest nonzero frequency in the time average of the evolved 2-CGP."""
    i, j = np.triu_indices(len(e), 1)
    gaps = np.sort(e[j] - e[i])
    return float(min(gaps[0], np.min(np.diff(gaps))))


def time_averaged_cgp_oracle(
    decomp: SpectralDecomposition, t_max: float | None = None, n_samples: int = 20_000, batch: int = 2048
) -> float:
    """Brute-force time average of ``C2(U_t)`` with respect to the computational basis.

    ``t_max`` defaults to ``1e3`` over the smallest gap or gap difference.
    """
    e = decomp.eigenvalues
    q = decomp.eigenvectors
    d = len(e)
    if t_max is None:
        t_max = 1e3 / _gap_resolution(e)
    times = oracle_times(t_max, n_samples)
    total = 0.0
    for start in range(0, n_samples, batch):
        t = times[start : start + batch]
        phases = np.exp(-1j * np.outer(t, e))
        u = np.einsum("ik,tk,jk->tij", q, phases, q)
        xt = np.abs(u) ** 2
        total += float(np.sum(1.0 - np.sum(xt * xt, axis=(1, 2)) / d))
    return total / n_samples


def pr2_effective_dimension_loschmidt(psi_eigen):
    """Second participation ratio, effective dimension of the dephased state, and
    the infinite-time Loschmidt echo (equal to PR2)."""
    a = np.asarray(psi_eigen)
    p = np.abs(a) ** 2
    pr2 = float(np.sum(p * p))
    return pr2, 1.0 / pr2, pr2


def escape_matches_cgp(x, tol: float = 1e-12) -> bool:
    """Check that the mean escape probability equals the 2-CGP of the same matrix."""
    return abs(average_escape(x).mean - cgp2(x)) <= tol
