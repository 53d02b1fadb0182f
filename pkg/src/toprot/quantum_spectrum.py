"""Rotational spectrum of the rigid asymmetric top.

The Hamiltonian h^2 (A Jx^2 + B Jy^2 + C Jz^2) couples body-frame projections
k and k +- 2 only. In the Wang basis (|j,k> +- |j,-k>)/sqrt(2) it splits into
four real symmetric tridiagonal blocks, labelled by the parity of k (E/O)
and the sign of the combination (+/-).
"""

import math
from dataclasses import dataclass

import numpy as np

from toprot._backend import kernels
from toprot.errors import DomainError

BLOCK_LABELS = ("E+", "E-", "O+", "O-")


@dataclass(frozen=True)
class SpectrumLevel:
    j: int
    Ka: int
    Kc: int
    E: float
    h: float

    @property
    def J(self):
        """Classical angular momentum attached to the level, h (j + 1/2)."""
        return self.h * (self.j + 0.5)


@dataclass(frozen=True)
class WangBlock:
    diagonal: tuple
    offdiagonal: tuple
    symmetry_label: str

    def __post_init__(self):
        if len(self.offdiagonal) != max(len(self.diagonal) - 1, 0):
            raise DomainError("offdiagonal must have one entry fewer than diagonal")

    def __len__(self):
        return len(self.diagonal)

    def dense(self):
        n = len(self)
        mat = np.diag(np.asarray(self.diagonal, dtype=float))
        if n > 1:
            off = np.asarray(self.offdiagonal, dtype=float)
            mat[np.arange(n - 1), np.arange(1, n)] = off
            mat[np.arange(1, n), np.arange(n - 1)] = off
        return mat


def _check_args(j, h):
    if isinstance(j, bool) or int(j) != j or j < 0:
        raise DomainError(f"j must be a non-negative integer, got {j!r}")
    if not (math.isfinite(h) and h > 0.0):
        raise DomainError(f"h must be positive and finite, got {h!r}")
    return int(j)


def build_blocks(mol, j, h=1.0):
    """Four Wang blocks of the Hamiltonian for angular momentum ``j``.

    Returns a dict keyed by "E+", "E-", "O+", "O-". Empty blocks (for small
    j) are included with zero size.
    """
    j = _check_args(j, h)
    A, B, C = mol.A, mol.B, mol.C
    h2 = h * h
    jj = j * (j + 1)

    def diag(k):
        return h2 * (0.5 * (A + B) * (jj - k * k) + C * k * k)

    def coupling(k):
        # <k+2|H|k>
        return h2 * 0.25 * (A - B) * math.sqrt((jj - k * (k + 1)) * (jj - (k + 1) * (k + 2)))

    even = list(range(0, j + 1, 2))
    odd = list(range(1, j + 1, 2))
    blocks = {}

    d = [diag(k) for k in even]
    e = [coupling(k) for k in even[:-1]]
    if len(e) > 0:
        e[0] *= math.sqrt(2.0)  # |0> couples to |2,+> only, with weight sqrt(2)
    blocks["E+"] = WangBlock(tuple(d), tuple(e), "E+")
    blocks["E-"] = WangBlock(tuple(diag(k) for k in even[1:]), tuple(coupling(k) for k in even[1:-1]), "E-")
    for sign, label in ((1.0, "O+"), (-1.0, "O-")):
        d = [diag(k) for k in odd]
        if d:
            # <1|H|-1> folds onto the k = 1 diagonal
            d[0] += sign * h2 * 0.25 * (A - B) * jj
        blocks[label] = WangBlock(tuple(d), tuple(coupling(k) for k in odd[:-1]), label)
    return blocks


def eigen_tridiagonal(block):
    """Ascending eigenvalues of a Wang block (in-house implicit QL)."""
    diag = [float(x) for x in block.diagonal]
    off = [float(x) for x in block.offdiagonal]
    if not all(math.isfinite(x) for x in diag + off):
        raise DomainError("tridiagonal matrix has non-finite entries")
    if not diag:
        return []
    return list(kernels.tridiag_eigenvalues(diag, off))


def count_below(block, x):
    """Number of eigenvalues of ``block`` strictly below ``x`` (Sturm sequence)."""
    return kernels.sturm_count([float(v) for v in block.diagonal], [float(v) for v in block.offdiagonal], float(x))


def bisect_eigenvalue(block, index, tol=None):
    """``index``-th smallest eigenvalue by Sturm bisection."""
    n = len(block)
    if not 0 <= index < n:
        raise DomainError(f"eigenvalue index {index} out of range for block of size {n}")
    diag = np.asarray(block.diagonal, dtype=float)
    off = np.abs(np.asarray(block.offdiagonal, dtype=float))
    radius = np.zeros(n)
    radius[:-1] += off
    radius[1:] += off
    lo, hi = float(np.min(diag - radius)), float(np.max(diag + radius))
    scale = max(abs(lo), abs(hi), 1e-300)
    tol = 4 * np.finfo(float).eps * scale if tol is None else tol
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count_below(block, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def energies(mol, j, h=1.0):
    """All 2j+1 energies for angular momentum ``j`` in ascending order."""
    blocks = build_blocks(mol, j, h)
    values = []
    for label in BLOCK_LABELS:
        values.extend(eigen_tridiagonal(blocks[label]))
    return np.sort(np.array(values))


def structural_labels(j):
    """(Ka, Kc) for the 2j+1 levels of ``j`` listed by ascending energy."""
    i = np.arange(2 * j + 1)
    return (i + 1) // 2, j - i // 2


def spectrum(mol, j, h=1.0):
    """Levels of angular momentum ``j`` with structural (Ka, Kc) labels."""
    j = _check_args(j, h)
    es = energies(mol, j, h)
    ka, kc = structural_labels(j)
    return [SpectrumLevel(j, int(a), int(c), float(e), float(h)) for a, c, e in zip(ka, kc, es)]
