"""Disordered Hamiltonians: Anderson (uniform), Lloyd (Cauchy) and the XXX chain.

Spin basis convention for the XXX chain: basis index ``s`` has bit ``i`` equal to
the state of site ``i`` (site 0 is the least significant bit), and bit value 0
means sigma^z = +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream, as_generator, open_uniform

XXX_MAX_SITES = 14


@dataclass(frozen=True)
class AndersonParams:
    L: int
    W: float
    periodic: bool = True

    def __post_init__(self):
        if self.L < 3:
            raise ValueError(f"Anderson chain needs L >= 3, got {self.L}")
        if self.W < 0:
            raise ValueError(f"disorder W must be non-negative, got {self.W}")


@dataclass(frozen=True)
class LloydParams:
    L: int
    Gamma: float
    periodic: bool = True

    def __post_init__(self):
        if self.L < 3:
            raise ValueError(f"Lloyd chain needs L >= 3, got {self.L}")
        if not self.Gamma > 0:
            raise ValueError(f"Cauchy scale Gamma must be positive, got {self.Gamma}")


@dataclass(frozen=True)
class XXXParams:
    L: int
    hx: float
    W: float
    periodic: bool = True

    def __post_init__(self):
        if not 2 <= self.L <= XXX_MAX_SITES:
            raise ValueError(f"XXX chain supports 2 <= L <= {XXX_MAX_SITES}, got {self.L}")
        if self.hx < 0 or self.W < 0:
            raise ValueError("hx and W must be non-negative")

    @property
    def dim(self) -> int:
        return 1 << self.L


@dataclass
class DisorderRecord:
    """The random fields drawn for one realization, enough to rebuild it exactly."""

    model: str
    L: int
    disorder: float
    master_seed: int
    stream_index: int
    fields: np.ndarray = field(repr=False)
    hx: float = 0.0


def _stream_ids(rng):
    if isinstance(rng, RngStream):
        return rng.master_seed, rng.stream_index
    return -1, -1


def hopping_matrix(L: int, periodic: bool = True) -> np.ndarray:
    """``-sum_i (|i><i+1| + h.c.)`` on a chain of ``L`` sites."""
    h = np.zeros((L, L))
    idx = np.arange(L if periodic else L - 1)
    nxt = (idx + 1) % L
    h[idx, nxt] = -1.0
    h[nxt, idx] = -1.0
    return h


def chain_hamiltonian(onsite, periodic: bool = True) -> np.ndarray:
    onsite = np.asarray(onsite, dtype=float)
    h = hopping_matrix(onsite.shape[0], periodic)
    h[np.diag_indices_from(h)] = onsite
    return h


def build_anderson(p: AndersonParams, rng):
    """Anderson chain with on-site energies uniform on ``[-W, W]``."""
    gen = as_generator(rng)
    eps = p.W * (2.0 * gen.random(p.L) - 1.0)
    seed, index = _stream_ids(rng)
    record = DisorderRecord("anderson", p.L, p.W, seed, index, eps)
    return chain_hamiltonian(eps, p.periodic), record


def build_lloyd(p: LloydParams, rng):
    """Lloyd chain: Cauchy on-site energies by inverse-CDF sampling."""
    gen = as_generator(rng)
    u = open_uniform(gen, p.L)
    eps = p.Gamma * np.tan(np.pi * (u - 0.5))
    seed, index = _stream_ids(rng)
    record = DisorderRecord("lloyd", p.L, p.Gamma, seed, index, eps)
    return chain_hamiltonian(eps, p.periodic), record


def _bonds(L: int, periodic: bool):
    if periodic:
        return [(i, (i + 1) % L) for i in range(L)]
    return [(i, i + 1) for i in range(L - 1)]


def xxx_hamiltonian(L: int, hx: float, fields, periodic: bool = True) -> np.ndarray:
    """Dense XXX Hamiltonian with transverse field ``hx`` and z-fields ``fields``.

    With periodic boundaries the bond sum runs over ``i = 0..L-1`` with wraparound,
    so at ``L = 2`` the single bond is counted twice.
    """
    fields = np.asarray(fields, dtype=float)
    d = 1 << L
    states = np.arange(d)
    z = 1 - 2 * ((states[:, None] >> np.arange(L)) & 1)  # sigma^z eigenvalues, shape (d, L)
    h = np.zeros((d, d))
    diag = z @ fields
    for i, j in _bonds(L, periodic):
        diag = diag + 0.5 * z[:, i] * z[:, j]
        # (1/2)(XX + YY) = S+S- + S-S+: amplitude 1 between antiparallel neighbours
        flip = states ^ ((1 << i) | (1 << j))
        anti = z[:, i] != z[:, j]
        np.add.at(h, (states[anti], flip[anti]), 1.0)
    if hx != 0.0:
        for i in range(L):
            h[states, states ^ (1 << i)] += hx
    h[states, states] += diag
    return h


def build_xxx(p: XXXParams, rng):
    """XXX chain with z-fields uniform on ``[-W, W]``, in the sigma^z product basis."""
    gen = as_generator(rng)
    w = p.W * (2.0 * gen.random(p.L) - 1.0)
    seed, index = _stream_ids(rng)
    record = DisorderRecord("xxx", p.L, p.W, seed, index, w, hx=p.hx)
    return xxx_hamiltonian(p.L, p.hx, w, p.periodic), record


def transverse_field_operator(L: int) -> np.ndarray:
    """``sum_i sigma^x_i``, the derivative of the XXX Hamiltonian with respect to ``hx``."""
    return xxx_hamiltonian(L, 1.0, np.zeros(L), periodic=True) - xxx_hamiltonian(
        L, 0.0, np.zeros(L), periodic=True
    )


def rebuild(record: DisorderRecord, periodic: bool = True) -> np.ndarray:
    """Rebuild a Hamiltonian from the fields stored in a :class:`DisorderRecord`."""
    if record.model in ("anderson", "lloyd"):
        return chain_hamiltonian(record.fields, periodic)
    if record.model == "xxx":
        return xxx_hamiltonian(record.L, record.hx, record.fields, periodic)
    raise ValueError(f"unknown model {record.model!r}")


def build(model: str, L: int, disorder: float, rng, hx: float = 0.0, periodic: bool = True):
    """Dispatch on the model name; returns ``(H, DisorderRecord)``."""
    if model == "anderson":
        return build_anderson(AndersonParams(L, disorder, periodic), rng)
    if model == "lloyd":
        return build_lloyd(LloydParams(L, disorder, periodic), rng)
    if model == "xxx":
        return build_xxx(XXXParams(L, hx, disorder, periodic), rng)
    raise ValueError(f"unknown model {model!r}")


def hilbert_dim(model: str, L: int) -> int:
    return 1 << L if model == "xxx" else L
