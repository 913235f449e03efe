"""Vectorized grid scan of the split-system amplification matrix.

For wave-number pair (x, z) the amplification matrix is

    R(x, z) = I3 - i (b^T ox xN + bhat^T ox zS) M^-1 (1_r ox I3),
    M = I_3r + A ox ixN + Ahat ox izS,

with N and S the fixed 3x3 coupling matrices.  M is block lower triangular
with diagonal blocks I3 + i z ahat_jj S, which invert in closed form, so the
solve is a short block forward substitution.  The spectral radius of each
3x3 result comes from the characteristic cubic in closed form, polished by a
Newton step per root.

Everything here is broadcast over a flat array of (x, z) points; the
compiled kernel implements the same recursion pointwise.
"""
from __future__ import annotations

import numpy as np

N_MATRIX = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
S_MATRIX = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])


def _apply_diag_inverse(c: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (I3 + c S) X = rhs for a batch; c has shape (P,), rhs (P,3,3)."""
    det = 1.0 - c * c  # det of the lower 2x2 block [[1, c], [c, 1]]
    out = np.empty_like(rhs)
    out[:, 0, :] = rhs[:, 0, :]
    inv = 1.0 / det
    out[:, 1, :] = (rhs[:, 1, :] - c[:, None] * rhs[:, 2, :]) * inv[:, None]
    out[:, 2, :] = (rhs[:, 2, :] - c[:, None] * rhs[:, 1, :]) * inv[:, None]
    return out


def amplification_batch(
    A: np.ndarray, b: np.ndarray, Ahat: np.ndarray, bhat: np.ndarray,
    x: np.ndarray, z: np.ndarray,
) -> np.ndarray:
    """R(x, z) for flat arrays of points; returns (P, 3, 3) complex."""
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    P = x.size
    r = A.shape[0]
    eye = np.broadcast_to(np.eye(3, dtype=complex), (P, 3, 3))

    NG = np.empty((r, P, 3, 3), dtype=complex)
    SG = np.empty((r, P, 3, 3), dtype=complex)
    acc = np.zeros((P, 3, 3), dtype=complex)
    for j in range(r):
        rhs = eye.astype(complex, copy=True)
        for k in range(j):
            if A[j, k] != 0.0:
                rhs -= (1j * A[j, k]) * x[:, None, None] * NG[k]
            if Ahat[j, k] != 0.0:
                rhs -= (1j * Ahat[j, k]) * z[:, None, None] * SG[k]
        if Ahat[j, j] != 0.0:
            G = _apply_diag_inverse(1j * Ahat[j, j] * z, rhs)
        else:
            G = rhs
        NG[j] = N_MATRIX @ G
        SG[j] = S_MATRIX @ G
        if b[j] != 0.0:
            acc += (1j * b[j]) * x[:, None, None] * NG[j]
        if bhat[j] != 0.0:
            acc += (1j * bhat[j]) * z[:, None, None] * SG[j]
    return np.eye(3, dtype=complex) - acc


def spectral_radius_batch(m: np.ndarray) -> np.ndarray:
    """Max eigenvalue modulus of a (P, 3, 3) complex batch via the cubic."""
    tr = m[:, 0, 0] + m[:, 1, 1] + m[:, 2, 2]
    # Sum of principal 2x2 minors and the determinant.
    minors = (
        m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        + m[:, 0, 0] * m[:, 2, 2] - m[:, 0, 2] * m[:, 2, 0]
        + m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1]
    )
    det = (
        m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
        - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
        + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0])
    )
    roots = _cubic_roots(tr, minors, det)
    # One Newton polish pass per root on f = l^3 - tr l^2 + minors l - det.
    for _ in range(2):
        f = ((roots - tr[:, None]) * roots + minors[:, None]) * roots - det[:, None]
        fp = (3.0 * roots - 2.0 * tr[:, None]) * roots + minors[:, None]
        ok = np.abs(fp) > 1e-30
        roots = roots - np.where(ok, f / np.where(ok, fp, 1.0), 0.0)
    return np.abs(roots).max(axis=1)


def _cubic_roots(tr: np.ndarray, m2: np.ndarray, det: np.ndarray) -> np.ndarray:
    """Roots of l^3 - tr l^2 + m2 l - det = 0, shape (P, 3) complex."""
    h = tr / 3.0
    p = m2 - 3.0 * h * h
    q = ((h - tr) * h + m2) * h - det  # f(h): depressed cubic t^3 + p t + q
    disc = np.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3 + 0j)
    u1 = -q / 2.0 + disc
    u2 = -q / 2.0 - disc
    u = np.where(np.abs(u1) >= np.abs(u2), u1, u2)
    C = u ** (1.0 / 3.0)
    omega = np.exp(2j * np.pi / 3.0)
    ts = []
    small = np.abs(C) < 1e-300
    Csafe = np.where(small, 1.0, C)
    for k in range(3):
        Ck = Csafe * omega**k
        t = Ck - p / (3.0 * Ck)
        ts.append(np.where(small, 0.0, t))
    return np.stack(ts, axis=1) + h[:, None]


def scan(
    A: np.ndarray, b: np.ndarray, Ahat: np.ndarray, bhat: np.ndarray,
    xs: np.ndarray, zs: np.ndarray, chunk: int = 16384,
) -> np.ndarray:
    """Spectral radii over the tensor grid xs x zs, shape (len(xs), len(zs))."""
    xs = np.asarray(xs, dtype=float)
    zs = np.asarray(zs, dtype=float)
    X, Z = np.meshgrid(xs, zs, indexing="ij")
    xf, zf = X.ravel(), Z.ravel()
    rho = np.empty(xf.size)
    for start in range(0, xf.size, chunk):
        sl = slice(start, min(start + chunk, xf.size))
        R = amplification_batch(A, b, Ahat, bhat, xf[sl], zf[sl])
        rho[sl] = spectral_radius_batch(R)
    return rho.reshape(xs.size, zs.size)
