"""Dense real-symmetric eigenproblems and transition matrices.

Two solvers sit behind :func:`eigendecompose`:

* ``"householder_ql"`` reduces ``H`` to tridiagonal form with Householder
  reflections and diagonalizes it with implicitly shifted QL sweeps. It is written
  here from scratch and is the reference for the conventions below.
* ``"lapack"`` (default) calls ``numpy.linalg.eigh``. It is used for the sweeps
  because the Python-level QL loop is too slow at ``d = 1024``.

Both return eigenvalues in ascending order and eigenvectors in a fixed sign gauge:
in every column the entry of largest magnitude is positive, ties going to the
lowest row index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import as_generator

ORTHO_TOL = 1e-10
BISTOCHASTIC_TOL = 1e-10


class EigenConvergenceError(RuntimeError):
    """The QL iteration did not converge within its iteration cap."""

    def __init__(self, dim: int, residual: float):
        self.dim = dim
        self.residual = residual
        super().__init__(
            f"eigensolver did not converge for a {dim}x{dim} matrix "
            f"(off-diagonal residual {residual:.3e})"
        )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and gauge-fixed orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def min_gap(self) -> float:
        return float(np.min(np.diff(self.eigenvalues)))

    @property
    def width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def check_symmetric(h) -> np.ndarray:
    """Return ``h`` as a float array after checking it is a valid real symmetric operator."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] < 2:
        raise ValueError("dimension must be at least 2")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(h, h.T):
        raise ValueError("matrix is not exactly symmetric")
    return h


def symmetrize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2


def fix_sign_gauge(q: np.ndarray) -> np.ndarray:
    """Flip columns so that each column's largest-magnitude entry is positive."""
    q = np.array(q, dtype=float, copy=True)
    pivots = np.argmax(np.abs(q), axis=0)  # argmax returns the first maximum
    signs = np.sign(q[pivots, np.arange(q.shape[1])])
    signs[signs == 0] = 1.0
    return q * signs


def householder_tridiagonalize(h: np.ndarray):
    """Reduce a symmetric matrix to tridiagonal form.

    Returns
    -------
    diag, offdiag, z
        ``h == z @ T @ z.T`` with ``T`` tridiagonal, ``diag`` its main diagonal and
        ``offdiag`` (length ``n - 1``) its first off-diagonal.
    """
    a = np.array(h, dtype=float, copy=True)
    n = a.shape[0]
    z = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1 :, k]
        norm = math.sqrt(float(x @ x))
        if norm == 0.0:
            continue
        alpha = -norm if x[0] >= 0 else norm
        v = x.copy()
        v[0] -= alpha
        vnorm = math.sqrt(float(v @ v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        block = a[k + 1 :, k + 1 :]
        p = block @ v
        q = p - (v @ p) * v
        block -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        a[k + 1 :, k] = 0.0
        a[k, k + 1 :] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        z[:, k + 1 :] -= 2.0 * np.outer(z[:, k + 1 :] @ v, v)
    return np.diag(a).copy(), np.diag(a, 1).copy(), z


def tridiagonal_ql(diag, offdiag, z, max_sweeps: int = 30):
    """Implicitly shifted QL on a symmetric tridiagonal matrix.

    Rotations are accumulated into the columns of ``z`` (modified in place).
    Returns unsorted eigenvalues.
    """
    d = np.array(diag, dtype=float, copy=True)
    n = d.shape[0]
    e = np.zeros(n)
    e[: n - 1] = offdiag
    eps = np.finfo(float).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise EigenConvergenceError(n, float(np.max(np.abs(e))))
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def eigendecompose(h, method: str = "lapack") -> SpectralDecomposition:
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    h : array_like
        Exactly symmetric ``d x d`` matrix with finite entries.
    method : {"lapack", "householder_ql"}

    Raises
    ------
    EigenConvergenceError
        If the iteration does not converge.
    """
    h = check_symmetric(h)
    n = h.shape[0]
    if method == "householder_ql":
        diag, off, z = householder_tridiagonalize(h)
        vals = tridiagonal_ql(diag, off, z)
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], z[:, order]
    elif method == "lapack":
        try:
            vals, vecs = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            off = h - np.diag(np.diag(h))
            raise EigenConvergenceError(n, float(np.max(np.abs(off)))) from exc
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return SpectralDecomposition(np.ascontiguousarray(vals), fix_sign_gauge(vecs))


def symmetric_eigenvalues(h, method: str = "lapack") -> np.ndarray:
    """Ascending eigenvalues only (cheaper than a full decomposition with LAPACK)."""
    h = check_symmetric(h)
    if method == "lapack":
        return np.linalg.eigvalsh(h)
    return eigendecompose(h, method).eigenvalues


def check_unitary(u, tol: float = ORTHO_TOL, name: str = "matrix") -> np.ndarray:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"{name} must be square, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValueError(f"{name} is not unitary (max deviation {err:.3e})")
    return u


def check_bistochastic(x, tol: float = BISTOCHASTIC_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {x.shape}")
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise ValueError("transition matrix entries must lie in [0, 1]")
    rows = np.max(np.abs(x.sum(axis=1) - 1))
    cols = np.max(np.abs(x.sum(axis=0) - 1))
    if max(rows, cols) > tol:
        raise ValueError(f"matrix is not bistochastic (row dev {rows:.2e}, column dev {cols:.2e})")
    return x


def transition_matrix(vectors, basis=None) -> np.ndarray:
    """Squared overlaps ``X[i, j] = |<b_i|v_j>|**2``.

    ``vectors`` is a :class:`SpectralDecomposition` (its eigenvectors are used) or
    a unitary matrix whose columns are the vectors ``v_j``. ``basis`` holds the
    reference vectors ``b_i`` as columns; the computational basis by default.
    """
    if isinstance(vectors, SpectralDecomposition):
        v = vectors.eigenvectors
    else:
        v = check_unitary(vectors, name="vector matrix")
    if basis is not None:
        b = check_unitary(basis, name="basis")
        if b.shape != v.shape:
            raise ValueError(f"basis shape {b.shape} does not match {v.shape}")
        v = b.conj().T @ v
    return np.abs(v) ** 2 if np.iscomplexobj(v) else v * v


def check_nonresonance(decomp, tol: float = 1e-8):
    """Check that all energy gaps ``E_k - E_l`` (k > l) are distinct.

    Returns
    -------
    ok : bool
    violations : list of tuple
        Quadruples ``(k, l, m, n)`` with ``|(E_k - E_l) - (E_m - E_n)| <= tol``.
        A degenerate pair ``E_k == E_l`` is reported as ``(k, l, k, k)``.
    """
    e = decomp.eigenvalues if isinstance(decomp, SpectralDecomposition) else np.asarray(decomp, float)
    pairs = [(k, l) for k in range(len(e)) for l in range(k)]
    gaps = np.array([e[k] - e[l] for k, l in pairs])
    violations = [(k, l, k, k) for (k, l), g in zip(pairs, gaps) if g <= tol]
    order = np.argsort(gaps, kind="stable")
    sorted_gaps = gaps[order]
    # a cluster of near-equal gaps: compare each gap with its neighbours within tol
    for a in range(len(order)):
        b = a + 1
        while b < len(order) and sorted_gaps[b] - sorted_gaps[a] <= tol:
            violations.append(pairs[order[a]] + pairs[order[b]])
            b += 1
    return not violations, violations


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-random ``d x d`` unitary from the QR decomposition of a Ginibre matrix."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    gen = as_generator(rng)
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_orthogonal(d: int, rng) -> np.ndarray:
    """Haar-random real orthogonal matrix (same phase-corrected QR construction)."""
    gen = as_generator(rng)
    q, r = np.linalg.qr(gen.standard_normal((d, d)))
    return q * np.sign(np.diag(r))

