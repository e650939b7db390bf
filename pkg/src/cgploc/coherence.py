"""Coherence of states and coherence-generating power of transition matrices.

Every CGP measure here is a function of a bistochastic transition matrix ``X``
only. The convention throughout the package is ``X[i, j] = |<i|phi_j>|**2``:
rows index the reference (configuration) basis, columns the eigenbasis.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .rng import as_generator
from .spectral import check_bistochastic, symmetric_eigenvalues, symmetrize

_TINY = 1e-300
MAJORIZATION_TOL = 1e-12


class LogBase(enum.Enum):
    TWO = "2"
    NATURAL = "e"

    @classmethod
    def parse(cls, value) -> "LogBase":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("2", "two", "2.0"):
            return cls.TWO
        if text in ("e", "natural", "ln"):
            return cls.NATURAL
        raise ValueError(f"unknown log base {value!r}; use '2' or 'e'")

    def log(self, x):
        return np.log2(x) if self is LogBase.TWO else np.log(x)


def _probabilities(psi) -> np.ndarray:
    a = np.asarray(psi)
    p = np.abs(a) ** 2 if np.iscomplexobj(a) else a.astype(float) ** 2
    norm = p.sum()
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
    return p


def shannon_entropy(p, base=LogBase.TWO, axis=None):
    """Shannon entropy with the ``0 log 0 = 0`` convention."""
    p = np.asarray(p, dtype=float)
    terms = np.where(p > 0, p * LogBase.parse(base).log(np.maximum(p, _TINY)), 0.0)
    return -np.sum(terms, axis=axis)


def c2_state(psi) -> float:
    """2-coherence ``1 - sum_i |a_i|^4`` of a pure state with amplitudes ``a``."""
    p = _probabilities(psi)
    return float(1.0 - np.sum(p * p))


def crel_state(psi, base=LogBase.TWO) -> float:
    """Relative entropy of coherence of a pure state (entropy of its populations)."""
    return float(shannon_entropy(_probabilities(psi), base))


def cgp2(x) -> float:
    """2-coherence generating power ``1 - Tr(X^T X) / d``."""
    x = np.asarray(x, dtype=float)
    return float(1.0 - np.sum(x * x) / x.shape[0])


def cgp_rel(x, base=LogBase.TWO) -> float:
    """Relative-entropy CGP: ``-(1/d) sum_ij X_ij log X_ij``."""
    x = np.asarray(x, dtype=float)
    return float(shannon_entropy(x, base) / x.shape[0])


def f_det(x) -> float:
    """``1 - |det X|^(1/d)``, accumulated in log-magnitude to avoid underflow."""
    x = np.asarray(x, dtype=float)
    sign, logabs = np.linalg.slogdet(x)
    if sign == 0 or not np.isfinite(logabs):
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - math.exp(logabs / x.shape[0]))))


def f_inf(x, method: str = "lapack") -> float:
    """``||I - X^T X||_inf = 1 - s_min^2`` with ``s_min`` the smallest singular value."""
    x = np.asarray(x, dtype=float)
    smallest = symmetric_eigenvalues(symmetrize(x.T @ x), method)[0]
    return float(min(1.0, max(0.0, 1.0 - smallest)))


def concave_sum(x, phi) -> float:
    """``sum_ij phi(X_ij)``; a column-majorization monotone for concave ``phi``."""
    return float(np.sum(phi(np.asarray(x, dtype=float))))


CONCAVE_FAMILY = {
    "entropy": lambda t: -t * np.log(np.maximum(t, _TINY)),
    "linear_entropy": lambda t: t - t * t,
    "sqrt": np.sqrt,
}


def majorizes(p, q, tol: float = MAJORIZATION_TOL) -> bool:
    """``p`` majorizes ``q``: descending partial sums of ``p`` dominate those of ``q``."""
    ps = np.cumsum(np.sort(np.asarray(p, float))[::-1])
    qs = np.cumsum(np.sort(np.asarray(q, float))[::-1])
    return bool(np.all(ps >= qs - tol))


def column_majorizes(x, y, tol: float = MAJORIZATION_TOL) -> bool:
    """Column majorization: every column of ``x`` majorizes the same column of ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    xs = np.cumsum(-np.sort(-x, axis=0), axis=0)
    ys = np.cumsum(-np.sort(-y, axis=0), axis=0)
    return bool(np.all(xs >= ys - tol))


def sinkhorn(a, max_iters: int = 200_000, tol: float = 1e-12) -> np.ndarray:
    """Alternate row and column normalization of a positive matrix until bistochastic."""
    x = np.array(a, dtype=float, copy=True)
    if np.any(x <= 0):
        raise ValueError("Sinkhorn normalization needs a strictly positive matrix")
    residual = math.inf
    for _ in range(max_iters):
        x /= x.sum(axis=1, keepdims=True)
        x /= x.sum(axis=0, keepdims=True)
        residual = float(np.max(np.abs(x.sum(axis=1) - 1)))
        if residual <= tol:
            return x
    raise RuntimeError(f"Sinkhorn did not converge after {max_iters} iterations (residual {residual:.3e})")


def random_bistochastic(d: int, rng, sinkhorn_iters: int = 200_000, sharpness: float = 1.0) -> np.ndarray:
    """Random bistochastic matrix: Sinkhorn-normalized ``U**sharpness`` with ``U`` uniform.

    Larger ``sharpness`` gives matrices closer to permutations, where Sinkhorn
    convergence slows down considerably.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    gen = as_generator(rng)
    seed = gen.random((d, d)) ** sharpness + 1e-4
    x = sinkhorn(seed, max_iters=sinkhorn_iters)
    return check_bistochastic(x)


def random_permutation_matrix(d: int, rng) -> np.ndarray:
    return np.eye(d)[as_generator(rng).permutation(d)]


def random_birkhoff(d: int, rng, n_terms: int = 3, concentration: float = 0.3) -> np.ndarray:
    """Dirichlet-weighted mixture of random permutation matrices (exactly bistochastic)."""
    gen = as_generator(rng)
    weights = gen.dirichlet(np.full(n_terms, concentration))
    return sum(w * random_permutation_matrix(d, gen) for w in weights)
