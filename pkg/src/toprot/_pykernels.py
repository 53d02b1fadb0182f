"""Pure-Python numerical kernels.

Reference implementation of the hot loops. ``_ckernels.pyx`` mirrors every
function here line for line; the two must agree to rounding.

Callers are expected to validate arguments; these functions only guard
against non-convergence.
"""

import math

_EPS = 2.220446049250313e-16
_AGM_MAX_ITER = 60
_LANDEN_MAX_DEPTH = 16
_QL_MAX_ITER = 60


def ellipk(m):
    """Complete elliptic integral of the first kind by the AGM, 0 <= m < 1."""
    a = 1.0
    b = math.sqrt(1.0 - m)
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) <= 4.0 * math.ulp(a):
            return math.pi / (2.0 * a)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise ArithmeticError(f"AGM did not converge for m={m!r}")


def ellipj(u, m):
    """Jacobi elliptic functions (sn, cn, dn) by descending Landen/AGM."""
    if m == 1.0:
        s = 1.0 / math.cosh(u)
        return math.tanh(u), s, s
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    twon = 1.0
    n = 0
    while abs(c[n] / a[n]) > _EPS:
        if n >= _LANDEN_MAX_DEPTH:
            raise ArithmeticError(f"Landen recursion did not converge for m={m!r}")
        an = a[n]
        c.append(0.5 * (an - b))
        a.append(0.5 * (an + b))
        b = math.sqrt(an * b)
        twon *= 2.0
        n += 1
    phi = twon * a[n] * u
    if n == 0:
        sn = math.sin(phi)
        cn = math.cos(phi)
        return sn, cn, math.sqrt((1.0 - m) + m * cn * cn)
    while n > 0:
        phi = 0.5 * (math.asin(c[n] * math.sin(phi) / a[n]) + phi)
        n -= 1
    cn = math.cos(phi)
    # both terms are non-negative, so no cancellation near cn = 0
    return math.sin(phi), cn, math.sqrt((1.0 - m) + m * cn * cn)


def tridiag_eigenvalues(diag, offdiag):
    """Eigenvalues of a real symmetric tridiagonal matrix, ascending.

    Implicit-shift QL iteration; ``offdiag[i]`` couples rows i and i+1.
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > _QL_MAX_ITER:
                raise ArithmeticError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
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
    d.sort()
    return d


def sturm_count(diag, offdiag, x):
    """Number of eigenvalues strictly below ``x`` (Sturm sequence)."""
    count = 0
    q = 1.0
    for i in range(len(diag)):
        b2 = offdiag[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - b2 / q
        if q == 0.0:
            q = _EPS * (abs(diag[i]) + abs(x) + _EPS)
        if q < 0.0:
            count += 1
    return count
