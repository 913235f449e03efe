# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pointwise grid scan of the split-system amplification matrix.

Same block-forward-substitution recursion as the numpy fallback, performed
per grid point with stack-local 3x3 complex blocks; the spectral radius
comes from the closed-form characteristic cubic with Newton polish.
"""

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex csqrt(double complex)
    double complex cexp(double complex)
    double complex clog(double complex)

cdef double complex J = 1j
# exp(2 pi i / 3)
cdef double complex OMEGA = -0.5 + 0.86602540378443864676j


cdef inline double complex _cbrt(double complex v) noexcept nogil:
    if v == 0:
        return 0
    return cexp(clog(v) / 3.0)


cdef double _spectral_radius3(double complex* m) noexcept nogil:
    """Max root modulus of det(m - lambda I) for a row-major 3x3 block."""
    cdef double complex tr, m2, det, h, p, q, disc, u1, u2, u, c, ck, t, f, fp
    cdef double complex roots[3]
    cdef double best, cand
    cdef int k, it

    tr = m[0] + m[4] + m[8]
    m2 = (m[0] * m[4] - m[1] * m[3]
          + m[0] * m[8] - m[2] * m[6]
          + m[4] * m[8] - m[5] * m[7])
    det = (m[0] * (m[4] * m[8] - m[5] * m[7])
           - m[1] * (m[3] * m[8] - m[5] * m[6])
           + m[2] * (m[3] * m[7] - m[4] * m[6]))
    h = tr / 3.0
    p = m2 - 3.0 * h * h
    q = ((h - tr) * h + m2) * h - det
    disc = csqrt((q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0))
    u1 = -q / 2.0 + disc
    u2 = -q / 2.0 - disc
    u = u1 if cabs(u1) >= cabs(u2) else u2
    if cabs(u) < 1e-300:
        roots[0] = h
        roots[1] = h
        roots[2] = h
    else:
        c = _cbrt(u)
        ck = c
        for k in range(3):
            roots[k] = ck - p / (3.0 * ck) + h
            ck = ck * OMEGA
    best = 0.0
    for k in range(3):
        t = roots[k]
        for it in range(2):
            f = ((t - tr) * t + m2) * t - det
            fp = (3.0 * t - 2.0 * tr) * t + m2
            if cabs(fp) > 1e-30:
                t = t - f / fp
        cand = cabs(t)
        if cand > best:
            best = cand
    return best


def scan(const double[:, ::1] A, const double[::1] b,
         const double[:, ::1] Ahat, const double[::1] bhat,
         const double[::1] xs, const double[::1] zs,
         double[:, ::1] out):
    """Fill out[i, j] with the spectral radius at (xs[i], zs[j])."""
    cdef Py_ssize_t nx = xs.shape[0], nz = zs.shape[0], r = A.shape[0]
    if r > 16:
        raise ValueError("stage count above compiled kernel limit (16)")
    cdef Py_ssize_t i, j, s, k, col
    cdef double x, z, dinv
    cdef double complex G[16][9]
    cdef double complex NG[16][9]
    cdef double complex SG[16][9]
    cdef double complex rhs[9]
    cdef double complex R[9]
    cdef double complex cax, caz, cd, t1, t2

    with nogil:
        for i in range(nx):
            x = xs[i]
            for j in range(nz):
                z = zs[j]
                for k in range(9):
                    R[k] = 0
                R[0] = 1
                R[4] = 1
                R[8] = 1
                for s in range(r):
                    for k in range(9):
                        rhs[k] = 0
                    rhs[0] = 1
                    rhs[4] = 1
                    rhs[8] = 1
                    for k in range(s):
                        if A[s, k] != 0.0:
                            cax = J * (A[s, k] * x)
                            for col in range(9):
                                rhs[col] = rhs[col] - cax * NG[k][col]
                        if Ahat[s, k] != 0.0:
                            caz = J * (Ahat[s, k] * z)
                            for col in range(9):
                                rhs[col] = rhs[col] - caz * SG[k][col]
                    # Solve (I + i z ahat_ss S) G_s = rhs; only rows 1 and 2 mix.
                    if Ahat[s, s] != 0.0:
                        cd = J * (Ahat[s, s] * z)
                        dinv = 1.0 / (1.0 + (Ahat[s, s] * z) * (Ahat[s, s] * z))
                        for col in range(3):
                            G[s][col] = rhs[col]
                            t1 = (rhs[3 + col] - cd * rhs[6 + col]) * dinv
                            t2 = (rhs[6 + col] - cd * rhs[3 + col]) * dinv
                            G[s][3 + col] = t1
                            G[s][6 + col] = t2
                    else:
                        for col in range(9):
                            G[s][col] = rhs[col]
                    # N swaps rows 0 and 2 and zeroes row 1; S swaps rows 1 and 2
                    # and zeroes row 0.
                    for col in range(3):
                        NG[s][col] = G[s][6 + col]
                        NG[s][3 + col] = 0
                        NG[s][6 + col] = G[s][col]
                        SG[s][col] = 0
                        SG[s][3 + col] = G[s][6 + col]
                        SG[s][6 + col] = G[s][3 + col]
                    if b[s] != 0.0:
                        cax = J * (b[s] * x)
                        for col in range(9):
                            R[col] = R[col] - cax * NG[s][col]
                    if bhat[s] != 0.0:
                        caz = J * (bhat[s] * z)
                        for col in range(9):
                            R[col] = R[col] - caz * SG[s][col]
                out[i, j] = _spectral_radius3(R)
