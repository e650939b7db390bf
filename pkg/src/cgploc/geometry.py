"""Fidelity-susceptibility metric of the 2-CGP and related quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherence import cgp2
from .spectral import SpectralDecomposition, check_symmetric, check_unitary, eigendecompose, transition_matrix

DEGENERACY_RTOL = 1e-10
GRASSMANN_MAX_DIM = 64
PAIRING_MIN_OVERLAP = 0.9


class DegenerateSpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class MetricResult:
    g: float
    chi: np.ndarray
    min_gap: float


def _decompose(h) -> SpectralDecomposition:
    return h if isinstance(h, SpectralDecomposition) else eigendecompose(h)


def _inverse_gap_squares(decomp: SpectralDecomposition) -> np.ndarray:
    e = decomp.eigenvalues
    gap = decomp.min_gap
    if gap < DEGENERACY_RTOL * max(decomp.width, 1.0):
        raise DegenerateSpectrumError(f"spectrum is degenerate (min gap {gap:.3e})")
    diff = e[:, None] - e[None, :]
    np.fill_diagonal(diff, np.inf)
    return 1.0 / diff**2


def _v_eigen(decomp: SpectralDecomposition, v) -> np.ndarray:
    v = check_symmetric(v)
    q = decomp.eigenvectors
    return q.T @ v @ q


def fidelity_metric(h, v) -> MetricResult:
    """Perturbative fidelity susceptibilities ``chi_i = sum_{j!=i} |V_ji|^2 / (E_i - E_j)^2``.

    ``h`` is a symmetric matrix or its :class:`SpectralDecomposition`; ``v`` is the
    perturbation ``dH/dlambda``. The metric is ``g = mean(chi)``.
    """
    decomp = _decompose(h)
    w = _inverse_gap_squares(decomp)
    ve = _v_eigen(decomp, v)
    chi = np.sum(ve * ve * w, axis=0)
    return MetricResult(float(np.mean(chi)), chi, decomp.min_gap)


def finite_difference_susceptibilities(h, v, step: float = 1e-5) -> np.ndarray:
    """Susceptibilities from central differences of eigenvectors of ``H + lambda V``.

    Each shifted eigenvector is sign-aligned with the unperturbed one (the real
    parallel-transport gauge, where ``<phi|d phi> = 0``), then
    ``chi_i = <d phi_i|d phi_i> - |<phi_i|d phi_i>|^2``.
    """
    h = check_symmetric(h)
    v = check_symmetric(v)
    q0 = eigendecompose(h).eigenvectors
    shifted = []
    for sgn in (1.0, -1.0):
        q = eigendecompose(h + sgn * step * v).eigenvectors
        q = q * np.sign(np.sum(q * q0, axis=0))
        shifted.append(q)
    dq = (shifted[0] - shifted[1]) / (2.0 * step)
    overlap = np.sum(q0 * dq, axis=0)
    return np.sum(dq * dq, axis=0) - overlap**2


def pair_eigenvectors(q0: np.ndarray, q1: np.ndarray, min_overlap: float = PAIRING_MIN_OVERLAP) -> np.ndarray:
    """Reorder the columns of ``q1`` to match ``q0`` by maximal overlap."""
    overlaps = np.abs(q0.T @ q1)
    match = np.argmax(overlaps, axis=1)
    if len(set(match.tolist())) != len(match):
        raise DegenerateSpectrumError("eigenvector pairing is ambiguous (two states claim the same partner)")
    worst = float(np.min(overlaps[np.arange(len(match)), match]))
    if worst < min_overlap:
        raise DegenerateSpectrumError(f"eigenvector pairing is ambiguous (best overlap {worst:.3f} < {min_overlap})")
    return q1[:, match]


def cgp_of_infinitesimal_intertwiner(h, v, dlambda: float) -> float:
    """2-CGP of the unitary mapping the eigenbasis of ``H`` to that of ``H + dlambda V``."""
    h = check_symmetric(h)
    if dlambda == 0:
        return 0.0
    q0 = eigendecompose(h).eigenvectors
    q1 = pair_eigenvectors(q0, eigendecompose(h + dlambda * check_symmetric(v)).eigenvectors)
    return cgp2(transition_matrix(q1, basis=q0))


def conductivity_moment(h, v) -> float:
    """``(1/pi) int sigma_VV(w) / w^2 dw = (2/d) sum_{n!=m} |V_nm|^2 / (E_m - E_n)^2``."""
    decomp = _decompose(h)
    w = _inverse_gap_squares(decomp)
    ve = _v_eigen(decomp, v)
    return float(2.0 * np.sum(ve * ve * w) / decomp.dim)


def thermal_metric(h, v, temperature: float) -> float:
    """Gibbs-weighted susceptibility ``sum_i p_i chi_i``; ``math.inf`` gives ``g``."""
    decomp = _decompose(h)
    chi = fidelity_metric(decomp, v).chi
    if math.isinf(temperature):
        return float(np.mean(chi))
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    logw = -(decomp.eigenvalues - decomp.eigenvalues[0]) / temperature
    p = np.exp(logw - np.max(logw))
    p /= p.sum()
    return float(p @ chi)


def dephaser(basis) -> np.ndarray:
    """Matrix of the dephasing superoperator of ``basis`` on row-major vectorized operators."""
    b = np.asarray(basis)
    d = b.shape[0]
    # vec(|b_i><b_i|) as rows
    vecs = np.einsum("ai,bi->iab", b, b.conj()).reshape(d, d * d)
    return vecs.T @ vecs.conj()


def grassmannian_distance(basis, u) -> float:
    """Hilbert-Schmidt distance between the dephasers of ``basis`` and of ``u @ basis``."""
    b = check_unitary(np.asarray(basis), name="basis")
    u = check_unitary(np.asarray(u), name="intertwiner")
    d = b.shape[0]
    if d > GRASSMANN_MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the superoperator cap {GRASSMANN_MAX_DIM}")
    diff = dephaser(b) - dephaser(u @ b)
    return float(np.linalg.norm(diff))
