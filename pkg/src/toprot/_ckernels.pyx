# cython: language_level=3
"""Compiled numerical kernels; same contracts as ``toprot._pykernels``."""

from libc.math cimport sqrt, fabs, sin, cos, asin, cosh, tanh, hypot, copysign, M_PI, nextafter, INFINITY
from libc.stdlib cimport malloc, free

cdef double _EPS = 2.220446049250313e-16
cdef int _AGM_MAX_ITER = 60
cdef int _LANDEN_MAX_DEPTH = 16
cdef int _QL_MAX_ITER = 60


cdef inline double _ulp(double x) nogil:
    x = fabs(x)
    return nextafter(x, INFINITY) - x


cpdef double ellipk(double m) except? -1.0:
    cdef double a = 1.0
    cdef double b = sqrt(1.0 - m)
    cdef double t
    cdef int k
    for k in range(_AGM_MAX_ITER):
        if fabs(a - b) <= 4.0 * _ulp(a):
            return M_PI / (2.0 * a)
        t = 0.5 * (a + b)
        b = sqrt(a * b)
        a = t
    raise ArithmeticError(f"AGM did not converge for m={m!r}")


cpdef tuple ellipj(double u, double m):
    cdef double a[17]
    cdef double c[17]
    cdef double b, twon, an, phi, cn, s
    cdef int n = 0
    if m == 1.0:
        s = 1.0 / cosh(u)
        return tanh(u), s, s
    a[0] = 1.0
    c[0] = sqrt(m)
    b = sqrt(1.0 - m)
    twon = 1.0
    while fabs(c[n] / a[n]) > _EPS:
        if n >= _LANDEN_MAX_DEPTH:
            raise ArithmeticError(f"Landen recursion did not converge for m={m!r}")
        an = a[n]
        c[n + 1] = 0.5 * (an - b)
        a[n + 1] = 0.5 * (an + b)
        b = sqrt(an * b)
        twon *= 2.0
        n += 1
    phi = twon * a[n] * u
    if n == 0:
        cn = cos(phi)
        return sin(phi), cn, sqrt((1.0 - m) + m * cn * cn)
    while n > 0:
        phi = 0.5 * (asin(c[n] * sin(phi) / a[n]) + phi)
        n -= 1
    cn = cos(phi)
    return sin(phi), cn, sqrt((1.0 - m) + m * cn * cn)


cdef int _tql(double* d, double* e, int n) nogil:
    cdef int l, m, i, it, underflow
    cdef double dd, g, r, s, c, p, f, bb
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > _QL_MAX_ITER:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = 0
            i = m - 1
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = 1
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tridiag_eigenvalues(diag, offdiag):
    cdef int n = len(diag)
    cdef int i, status
    cdef double* d = <double*> malloc(max(n, 1) * sizeof(double))
    cdef double* e = <double*> malloc(max(n, 1) * sizeof(double))
    if d == NULL or e == NULL:
        free(d)
        free(e)
        raise MemoryError()
    try:
        for i in range(n):
            d[i] = diag[i]
            e[i] = offdiag[i] if i < n - 1 else 0.0
        with nogil:
            status = _tql(d, e, n)
        if status != 0:
            raise ArithmeticError("QL iteration did not converge")
        out = [d[i] for i in range(n)]
    finally:
        free(d)
        free(e)
    out.sort()
    return out


def sturm_count(diag, offdiag, double x):
    cdef int n = len(diag)
    cdef int i, count = 0
    cdef double q = 1.0, b2, di
    for i in range(n):
        di = diag[i]
        b2 = offdiag[i - 1] * offdiag[i - 1] if i > 0 else 0.0
        q = di - x - b2 / q
        if q == 0.0:
            q = _EPS * (fabs(di) + fabs(x) + _EPS)
        if q < 0.0:
            count += 1
    return count
