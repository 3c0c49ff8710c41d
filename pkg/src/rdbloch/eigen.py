"""Dense symmetric / Hermitian eigensolver.

Householder reduction to tridiagonal form followed by implicit-shift QL
iteration.  Complex Hermitian input is reduced by complex Householder
reflections; a diagonal phase similarity then makes the tridiagonal real.
The alternative ``method="embed"`` solves the real symmetric matrix
``[[A, -B], [B, A]]`` for ``A + iB``, whose spectrum is that of the
Hermitian matrix with every eigenvalue doubled, and pairs the copies off.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import ConvergenceError, HermiticityError

MAX_SWEEPS = 64


@njit(cache=True)
def _householder(a, want_vectors):
    # Top-down reduction A = Q T Q^T.  Returns diagonal, sub-diagonal, Q.
    n = a.shape[0]
    a = a.copy()
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        norm = math.sqrt(np.dot(x, x))
        if norm == 0.0:
            continue
        alpha = -norm if x[0] >= 0.0 else norm
        v = x.copy()
        v[0] -= alpha
        vnorm = math.sqrt(np.dot(v, v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = 2.0 * (np.ascontiguousarray(sub) @ v)
        w = p - np.dot(v, p) * v
        for i in range(sub.shape[0]):
            for j in range(sub.shape[1]):
                sub[i, j] -= v[i] * w[j] + w[i] * v[j]
        a[k + 1, k] = alpha
        a[k, k + 1] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
        if want_vectors:
            qs = q[:, k + 1:]
            qv = 2.0 * (np.ascontiguousarray(qs) @ v)
            for i in range(n):
                for j in range(qs.shape[1]):
                    qs[i, j] -= qv[i] * v[j]
    d = np.empty(n)
    e = np.zeros(n)
    for i in range(n):
        d[i] = a[i, i]
    for i in range(n - 1):
        e[i] = a[i + 1, i]
    return d, e, q


@njit(cache=True)
def _householder_complex(a, want_vectors):
    # Hermitian a -> real tridiagonal (d, e) with a = Z T Z^H, Z = Q diag(phase).
    n = a.shape[0]
    a = a.copy()
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        norm = math.sqrt(np.vdot(x, x).real)
        if norm == 0.0:
            continue
        ax0 = abs(x[0])
        phase = x[0] / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * norm
        v = x.copy()
        v[0] -= alpha
        vnorm = math.sqrt(np.vdot(v, v).real)
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = 2.0 * (np.ascontiguousarray(sub) @ v)
        w = p - np.vdot(v, p) * v
        for i in range(sub.shape[0]):
            for j in range(sub.shape[1]):
                sub[i, j] -= v[i] * np.conj(w[j]) + w[i] * np.conj(v[j])
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        for i in range(k + 2, n):
            a[i, k] = 0.0
            a[k, i] = 0.0
        if want_vectors:
            qs = q[:, k + 1:]
            qv = 2.0 * (np.ascontiguousarray(qs) @ v)
            for i in range(n):
                for j in range(qs.shape[1]):
                    qs[i, j] -= qv[i] * np.conj(v[j])
    d = np.empty(n)
    e = np.zeros(n)
    phases = np.ones(n, dtype=np.complex128)
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        t = a[i + 1, i]
        e[i] = abs(t)
        phases[i + 1] = phases[i] * (t / e[i]) if e[i] > 0.0 else phases[i]
    if want_vectors:
        for j in range(n):
            for i in range(n):
                q[i, j] *= phases[j]
    return d, e, q


@njit(cache=True)
def _ql_implicit(d, e, z, want_vectors, max_sweeps):
    # e[i] couples d[i] and d[i+1]; e[n-1] is unused.  Returns 0 or the
    # index of the eigenvalue that failed to converge, plus one.
    n = d.shape[0]
    eps = np.finfo(np.float64).eps
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
            if sweeps == max_sweeps:
                return l + 1
            sweeps += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
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
                if want_vectors:
                    for k in range(z.shape[0]):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def eigh_real(a: np.ndarray, vectors: bool = False, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix, ascending order."""
    a = np.ascontiguousarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise HermiticityError("matrix is not symmetric")
    n = a.shape[0]
    if n == 1:
        return (a[0].copy(), np.ones((1, 1))) if vectors else a[0].copy()
    # graded ordering (small diagonal first) keeps the small eigenvalues of
    # Bloch matrices accurate relative to themselves, not to ||A||
    perm = np.argsort(np.diag(a), kind="stable")
    d, e, q = _householder(np.ascontiguousarray(a[np.ix_(perm, perm)]), vectors)
    status = _ql_implicit(d, e, q, vectors, max_sweeps)
    if status:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {status - 1} "
                               f"within {max_sweeps} sweeps")
    order = np.argsort(d, kind="stable")
    if vectors:
        z = np.empty_like(q)
        z[perm] = q[:, order]
        return d[order], z
    return d[order]


def eigh_hermitian(h: np.ndarray, vectors: bool = False, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a complex Hermitian matrix, ascending order."""
    h = np.ascontiguousarray(h, dtype=complex)
    n = h.shape[0]
    if n == 1:
        return (h[0].real.copy(), np.ones((1, 1), dtype=complex)) if vectors else h[0].real.copy()
    perm = np.argsort(h.diagonal().real, kind="stable")
    d, e, z = _householder_complex(np.ascontiguousarray(h[np.ix_(perm, perm)]), vectors)
    status = _ql_implicit(d, e, z, vectors, max_sweeps)
    if status:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {status - 1} "
                               f"within {max_sweeps} sweeps")
    order = np.argsort(d, kind="stable")
    if vectors:
        out = np.empty_like(z)
        out[perm] = z[:, order]
        return d[order], out
    return d[order]


def eigh(h: np.ndarray, vectors: bool = False, max_sweeps: int = MAX_SWEEPS,
         method: str = "householder"):
    """Eigenvalues (and unit-norm eigenvectors) of a Hermitian matrix, ascending.

    Real input, or complex input with vanishing imaginary part, always goes
    through the real symmetric path.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.abs(h).max())) if h.size else 1.0
    if not np.allclose(h, h.conj().T, rtol=0.0, atol=1e-12 * scale):
        raise HermiticityError("matrix is not Hermitian")
    if not np.iscomplexobj(h) or not np.any(h.imag):
        out = eigh_real(h.real, vectors, max_sweeps)
        if vectors:
            return out[0], out[1].astype(complex)
        return out
    if method == "householder":
        return eigh_hermitian(0.5 * (h + h.conj().T), vectors, max_sweeps)
    if method != "embed":
        raise ValueError(f"unknown method {method!r}")

    n = h.shape[0]
    re, im = h.real, h.imag
    big = np.block([[re, -im], [im, re]])
    big = 0.5 * (big + big.T)
    if vectors:
        w, v = eigh_real(big, True, max_sweeps)
    else:
        w = eigh_real(big, False, max_sweeps)
    pair_tol = 1e-12 * scale * n
    gaps = np.abs(w[0::2] - w[1::2])
    if np.any(gaps > pair_tol):
        raise HermiticityError(f"embedded spectrum not paired (max gap {gaps.max():.3g})")
    vals = 0.5 * (w[0::2] + w[1::2])
    if not vectors:
        return vals

    # each real eigenvector (x, y) maps to x + iy; a cluster of 2d real
    # vectors spans a d-dimensional complex eigenspace
    z = v[:n] + 1j * v[n:]
    vecs = np.empty((n, n), dtype=complex)
    cluster_tol = max(1e-10 * scale, 2.0 * pair_tol)
    start = 0
    while start < 2 * n:
        stop = start + 1
        while stop < 2 * n and w[stop] - w[stop - 1] <= cluster_tol:
            stop += 1
        if (stop - start) % 2:
            # odd cluster: take the partner of the last vector along
            stop += 1
        u, _, _ = np.linalg.svd(z[:, start:stop], full_matrices=False)
        vecs[:, start // 2:stop // 2] = u[:, :(stop - start) // 2]
        start = stop
    return vals, vecs
