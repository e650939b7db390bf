"""Closed-form references and localization-length based predictions."""

from __future__ import annotations

import math

import numpy as np

from .models import LloydParams, build_lloyd
from .rng import RngStream, as_generator
from .spectral import symmetric_eigenvalues

XI_INFINITE_TOL = 1e-15


def _inverse_lengths(xi) -> np.ndarray:
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(~(xi > 0)):
        raise ValueError("localization lengths must be positive")
    return 1.0 / xi  # 1/inf == 0 handles the extended-state sentinel


def c2_term(xi) -> np.ndarray:
    """Per-state return probability ``tanh^2(1/(2 xi)) / tanh(1/xi)`` of an exponential profile.

    Tends to 1 as ``xi -> 0`` and to 0 as ``xi -> inf``.
    """
    x = _inverse_lengths(xi)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.tanh(x[pos] / 2) ** 2 / np.tanh(x[pos])
    return out


def heuristic_c2(xi) -> float:
    """2-CGP predicted by exponentially localized eigenvectors with lengths ``xi``."""
    return float(1.0 - np.mean(c2_term(xi)))


def heuristic_crel(xi) -> float:
    """Relative-entropy CGP (natural log) predicted by exponentially localized eigenvectors."""
    x = _inverse_lengths(xi)
    if np.any(x == 0):
        return math.inf
    with np.errstate(over="ignore"):
        first = x / np.sinh(x)
    first = np.where(np.isfinite(first), first, 0.0)
    return float(np.mean(first - np.log(np.tanh(x / 2))))


def thouless_xi(energy, gamma):
    """Localization length of the Lloyd model at energy ``E`` from the Thouless formula.

    ``cosh(1/(2 xi)) = [sqrt((2+E)^2 + G^2) + sqrt((2-E)^2 + G^2)] / 4``. Returns
    ``inf`` where the right-hand side does not exceed 1 (clean band).
    """
    e = np.asarray(energy, dtype=float)
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("Gamma must be non-negative")
    rhs = (np.sqrt((2 + e) ** 2 + gamma**2) + np.sqrt((2 - e) ** 2 + gamma**2)) / 4
    extended = rhs <= 1 + XI_INFINITE_TOL
    with np.errstate(divide="ignore"):
        xi = np.where(extended, np.inf, 1.0 / (2.0 * np.arccosh(np.maximum(rhs, 1.0))))
    return float(xi) if xi.ndim == 0 else xi


def lloyd_density_of_states(gamma: float, L_dos: int, n_dos_samples: int, rng) -> np.ndarray:
    """Pooled eigenvalues of ``n_dos_samples`` Lloyd chains of length ``L_dos``."""
    if isinstance(rng, RngStream):
        streams = [rng.child(rng.stream_index + k) for k in range(n_dos_samples)]
    else:
        gen = as_generator(rng)
        streams = [gen] * n_dos_samples
    energies = []
    for stream in streams:
        h, _ = build_lloyd(LloydParams(L_dos, gamma), stream)
        energies.append(symmetric_eigenvalues(h))
    return np.concatenate(energies)


def lloyd_prediction_from_energies(energies, gamma: float) -> float:
    """Average the heuristic per-state term over a sampled spectrum."""
    return float(1.0 - np.mean(c2_term(thouless_xi(energies, gamma))))


def lloyd_prediction_c2(gamma: float, L_dos: int = 256, n_dos_samples: int = 40, rng=0) -> float:
    """Predicted disorder-averaged 2-CGP of the Lloyd model in the thermodynamic limit.

    The density of states is estimated empirically from sampled Lloyd spectra.
    """
    if not gamma > 0:
        raise ValueError("Gamma must be positive")
    return lloyd_prediction_from_energies(lloyd_density_of_states(gamma, L_dos, n_dos_samples, rng), gamma)


def fourier_basis(L: int) -> np.ndarray:
    """Columns ``phi_k(j) = exp(-2 pi i j k / L) / sqrt(L)``: eigenvectors of the clean chain."""
    j = np.arange(L)
    return np.exp(-2j * np.pi * np.outer(j, j) / L) / math.sqrt(L)


def reference_values(d: int) -> dict:
    """Exact 2-CGP and relative-entropy CGP values for unbiased, Haar and clean-chain intertwiners."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    mub_c2 = 1.0 - 1.0 / d
    mub_crel = math.log2(d)
    return {
        "mub_c2": mub_c2,
        "mub_crel_base2": mub_crel,
        "haar_mean_c2": 1.0 - 2.0 / (d + 1),
        "w0_fourier_c2": mub_c2,
        "w0_fourier_crel": mub_crel,
    }
