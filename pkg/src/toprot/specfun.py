"""Complete elliptic integral K(m) and Jacobi elliptic functions.

Both use the parameter convention m = k^2. Arguments are validated here and
the arithmetic is delegated to the selected kernel backend.
"""

import math

import numpy as np

from toprot._backend import kernels
from toprot.errors import DomainError


def complete_elliptic_K(m):
    """Complete elliptic integral of the first kind, K(m) for 0 <= m < 1.

    Computed from the arithmetic-geometric mean, K(m) = pi / (2 AGM(1, sqrt(1-m))).
    ``m = 1`` is rejected: K diverges there and callers on the separatrix
    have to branch explicitly.
    """
    m = float(m)
    if not math.isfinite(m) or m < 0.0 or m >= 1.0:
        raise DomainError(f"complete_elliptic_K requires 0 <= m < 1, got m={m!r}")
    return kernels.ellipk(m)


def jacobi_elliptic(u, m):
    """Return ``(sn, cn, dn)`` at argument ``u`` and parameter ``0 <= m <= 1``.

    ``u`` may be a scalar or an array; arrays are evaluated elementwise and
    the three results have the shape of ``u``. At ``m = 1`` the hyperbolic
    limits (tanh u, sech u, sech u) are returned.
    """
    m = float(m)
    if not math.isfinite(m) or m < 0.0 or m > 1.0:
        raise DomainError(f"jacobi_elliptic requires 0 <= m <= 1, got m={m!r}")
    if np.ndim(u) == 0:
        u = float(u)
        if not math.isfinite(u):
            raise DomainError(f"jacobi_elliptic requires finite u, got u={u!r}")
        return kernels.ellipj(u, m)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("jacobi_elliptic requires finite u")
    out = np.empty((3,) + u.shape)
    flat = out.reshape(3, -1)
    for i, x in enumerate(u.ravel()):
        flat[:, i] = kernels.ellipj(float(x), m)
    return out[0], out[1], out[2]
