"""Quantum rotation number on the energy-momentum lattice.

Levels of angular momentum j sit at J = h (j + 1/2). Within each j they are
labelled by an integer p so that the two members of a quasi-degenerate
doublet share p. Below the separatrix doublets are formed by levels with a
common Kc and p counts doublets upward from E = A J^2 (oscillating
convention); above it they share Ka and p counts downward from E = C J^2
(rotating convention). The rotation number of the cell (j, p) is

    Theta_Q = (E[j+1, p] - E[j, p]) / (E[j, p+1] - E[j, p])

with the denominator oriented along the convention's direction of increasing
p, and tends to Theta_cl / 2 pi as h -> 0.
"""

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from toprot.classical import Regime, classify
from toprot.errors import (
    DegenerateCellError,
    DomainError,
    IncompleteLatticeError,
    ToprotError,
    UndefinedCellError,
)
from toprot.quantum_spectrum import spectrum
from toprot.rotnum_classical import Definition, separatrix_asymptote, theta_cl

DEGENERATE_RTOL = 1e-14
REPRESENTATIVES = ("mean", "lower", "upper")


class Convention(str, enum.Enum):
    OSCILLATING = "Oscillating"
    ROTATING = "Rotating"

    @property
    def orientation(self):
        """+1 if energy grows with p, -1 if it decreases."""
        return 1 if self is Convention.OSCILLATING else -1


def _convention(value):
    if isinstance(value, Convention):
        return value
    try:
        return Convention(str(getattr(value, "value", value)).capitalize())
    except ValueError:
        raise DomainError(f"unknown labelling convention {value!r}") from None


def thread_count():
    """Worker threads for grid scans, from TOPROT_THREADS (0 or unset = auto)."""
    raw = os.environ.get("TOPROT_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"TOPROT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError("TOPROT_THREADS must be >= 0")
    return n if n > 0 else min(8, os.cpu_count() or 1)


def p_labels(j, convention):
    """p for the 2j+1 levels of ``j`` listed by ascending energy."""
    i = np.arange(2 * j + 1)
    if _convention(convention) is Convention.OSCILLATING:
        # doublets share Kc; p = j - Kc
        return i // 2
    # doublets share Ka; p = j - Ka
    return j - (i + 1) // 2


@dataclass(frozen=True)
class LabeledLattice:
    """Levels of the lattice grouped by (j, p).

    ``groups[(j, p)]`` holds the one or two SpectrumLevels carrying that label.
    """

    h: float
    convention: Convention
    groups: dict
    js: tuple
    representative: str = "mean"
    shear: int = 0

    def energy(self, j, p):
        try:
            members = self.groups[(j, p)]
        except KeyError:
            raise UndefinedCellError(f"no level labelled (j={j}, p={p})") from None
        values = [lvl.E for lvl in members]
        if self.representative == "lower":
            return min(values)
        if self.representative == "upper":
            return max(values)
        return sum(values) / len(values)

    def p_values(self, j):
        return sorted(p for (jj, p) in self.groups if jj == j)

    def with_representative(self, representative):
        if representative not in REPRESENTATIVES:
            raise DomainError(f"representative must be one of {REPRESENTATIVES}, got {representative!r}")
        return replace(self, representative=representative)

    def sheared(self, n):
        """Relabel p -> p + n j, the quantum counterpart of I -> I + n J."""
        n = int(n)
        groups = {(j, p + n * j): members for (j, p), members in self.groups.items()}
        return replace(self, groups=groups, shear=self.shear + n)


def assign_p(spectra, convention, representative="mean"):
    """Label spectra (mapping or sequence of per-j level lists) with p.

    Raises:
        IncompleteLatticeError: if the j values are not contiguous.
    """
    convention = _convention(convention)
    if representative not in REPRESENTATIVES:
        raise DomainError(f"representative must be one of {REPRESENTATIVES}, got {representative!r}")
    per_j = {}
    items = spectra.values() if isinstance(spectra, dict) else spectra
    hs = set()
    for levels in items:
        levels = sorted(levels, key=lambda lvl: lvl.E)
        if not levels:
            continue
        j = levels[0].j
        if any(lvl.j != j for lvl in levels) or len(levels) != 2 * j + 1:
            raise IncompleteLatticeError(f"level list for j={j} is not a complete multiplet")
        if j in per_j:
            raise IncompleteLatticeError(f"duplicate spectrum for j={j}")
        per_j[j] = levels
        hs.update(lvl.h for lvl in levels)
    if not per_j:
        raise IncompleteLatticeError("no spectra supplied")
    js = sorted(per_j)
    missing = sorted(set(range(js[0], js[-1] + 1)) - set(js))
    if missing:
        raise IncompleteLatticeError(f"missing j values {missing}")
    if len(hs) != 1:
        raise IncompleteLatticeError("spectra were computed with different h")
    groups = {}
    for j in js:
        for lvl, p in zip(per_j[j], p_labels(j, convention)):
            groups.setdefault((j, int(p)), []).append(lvl)
    groups = {key: tuple(members) for key, members in groups.items()}
    return LabeledLattice(hs.pop(), convention, groups, tuple(js), representative)


def compute_spectra(mol, jmin, jmax, h, threads=None):
    js = range(jmin, jmax + 1)
    threads = thread_count() if threads is None else threads
    if threads > 1 and len(js) > 8:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda j: spectrum(mol, j, h), js))
    return [spectrum(mol, j, h) for j in js]


def build_lattice(mol, jmax, h, convention, representative="mean", jmin=0, threads=None):
    return assign_p(compute_spectra(mol, jmin, jmax, h, threads), convention, representative)


@dataclass
class RotationCell:
    j: int
    p: int
    convention: Convention
    theta_q: float
    E_anchor: float
    J_anchor: float
    gamma_anchor: float
    classical_ref: float = None
    near_separatrix: bool = False
    status: str = "ok"
    message: str = ""

    @property
    def error(self):
        if self.classical_ref is None or not math.isfinite(self.theta_q):
            return None
        return abs(self.theta_q - self.classical_ref)


def separatrix_band(mol, j, h):
    """Half-width in gamma of the band where Theta_Q is flagged unreliable."""
    if not mol.is_asymmetric or j <= 0:
        return 0.0
    return h * separatrix_asymptote(mol).beta / (4.0 * math.pi * j)


def classical_reference(mol, E, J, convention):
    """Theta_cl / 2 pi at (E, J) with the definition matching ``convention``.

    Returns None where no classical value exists: symmetric tops, points
    outside the diagram, on the separatrix, or a rotating-convention cell
    below the separatrix.
    """
    if not mol.is_asymmetric:
        return None
    try:
        pt = classify(mol, E, J)
        if pt.regime is Regime.SEPARATRIX:
            return None
        definition = Definition(_convention(convention).value)
        if definition is Definition.ROTATING and pt.regime is not Regime.ROTATING:
            return None
        return theta_cl(mol, pt, definition).theta_cl / (2.0 * math.pi)
    except ToprotError:
        return None


def theta_q(lattice, j, p, mol=None):
    """Quantum rotation number of cell (j, p).

    If ``mol`` is given the cell carries the classical reference and the
    near-separatrix flag.

    Raises:
        UndefinedCellError: if (j, p), (j+1, p) or (j, p+1) is missing.
        DegenerateCellError: if the p spacing vanishes relative to the energy.
    """
    e_jp = lattice.energy(j, p)
    e_up = lattice.energy(j + 1, p)
    e_side = lattice.energy(j, p + 1)
    num = e_up - e_jp
    den = lattice.convention.orientation * (e_side - e_jp)
    if abs(den) < DEGENERATE_RTOL * max(abs(e_jp), abs(e_side)):
        raise DegenerateCellError(f"cell (j={j}, p={p}) has a vanishing p spacing")
    J = lattice.h * (j + 0.5)
    cell = RotationCell(
        j=j,
        p=p,
        convention=lattice.convention,
        theta_q=num / den,
        E_anchor=e_jp,
        J_anchor=J,
        gamma_anchor=float("nan"),
    )
    if mol is not None:
        _attach_classical(cell, mol, lattice)
    return cell


def _attach_classical(cell, mol, lattice):
    cell.gamma_anchor = cell.E_anchor / (mol.B * cell.J_anchor**2) - 1.0
    if lattice.shear == 0:
        ref = classical_reference(mol, cell.E_anchor, cell.J_anchor, cell.convention)
    else:
        ref = None
    cell.classical_ref = ref
    # the band is defined for physical j; sheared labels do not move levels
    cell.near_separatrix = abs(cell.gamma_anchor) < separatrix_band(mol, cell.j, lattice.h)
    if cell.near_separatrix:
        cell.status = "near-separatrix"
        cell.message = "Theta_Q unreliable this close to the separatrix"


def _cell_or_flag(lattice, j, p, mol):
    try:
        return theta_q(lattice, j, p, mol)
    except (UndefinedCellError, DegenerateCellError) as exc:
        status = "degenerate" if isinstance(exc, DegenerateCellError) else "undefined"
        try:
            e = lattice.energy(j, p)
        except UndefinedCellError:
            e = float("nan")
        J = lattice.h * (j + 0.5)
        return RotationCell(
            j,
            p,
            lattice.convention,
            float("nan"),
            e,
            J,
            e / (mol.B * J * J) - 1.0,
            None,
            False,
            status,
            str(exc),
        )


def em_lattice(mol, jmax, h=1.0):
    """Levels for j = 0..jmax and the boundary curves at J = h (j + 1/2).

    Returns ``(levels, curves)``: ``levels`` has rows (j, J, E, Ka, Kc);
    ``curves`` has rows (J, E_A, E_B, E_C) for E = A J^2, B J^2, C J^2.
    """
    if jmax < 0:
        raise DomainError(f"jmax must be >= 0, got {jmax!r}")
    levels = []
    curves = []
    for spec in compute_spectra(mol, 0, jmax, h):
        j = spec[0].j
        J = h * (j + 0.5)
        levels.extend((j, J, lvl.E, lvl.Ka, lvl.Kc) for lvl in spec)
        curves.append((J, mol.A * J * J, mol.B * J * J, mol.C * J * J))
    return levels, curves


def theta_q_grid(mol, jmax, h, convention, representative="mean", jmin=1):
    """Theta_Q for every cell with j in [jmin, jmax - 1].

    Cells that cannot be evaluated are kept with ``status`` "undefined" or
    "degenerate" and a NaN value.
    """
    if jmax < 1 or jmax <= jmin:
        return []
    lattice = build_lattice(mol, jmax, h, convention, representative, jmin=jmin)
    cells = []
    for j in range(jmin, jmax):
        for p in range(j):
            cells.append(_cell_or_flag(lattice, j, p, mol))
    return cells


@dataclass
class ConvergenceRow:
    h: float
    target_gamma: float
    target_J: float
    cell: RotationCell = None
    status: str = "ok"

    @property
    def error(self):
        return None if self.cell is None else self.cell.error


def nearest_cell(mol, gamma, J, h, convention=Convention.OSCILLATING, representative="mean"):
    """Defined cell closest to (gamma, J): nearest j first, then nearest gamma."""
    j0 = max(int(round(J / h - 0.5)), 1)
    lattice = build_lattice(mol, j0 + 1, h, convention, representative, jmin=j0, threads=1)
    best = None
    for p in range(j0):
        cell = _cell_or_flag(lattice, j0, p, mol)
        if cell.status in ("undefined", "degenerate") or cell.classical_ref is None:
            continue
        if best is None or abs(cell.gamma_anchor - gamma) < abs(best.gamma_anchor - gamma):
            best = cell
    return best


def convergence_study(mol, probes, h_list, convention=Convention.OSCILLATING, representative="mean"):
    """|Theta_Q - Theta_cl/2 pi| at the cell nearest each probe, for each h.

    Probes without a defined cell at some h are reported with status
    "missing" rather than raising.
    """
    h_list = [float(h) for h in h_list]
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise DomainError("h_list must be strictly descending")
    rows = []
    for gamma, J in probes:
        for h in h_list:
            cell = nearest_cell(mol, gamma, J, h, convention, representative)
            rows.append(ConvergenceRow(h, gamma, J, cell, "ok" if cell is not None else "missing"))
    return rows


def scan_cells(mol, jmax, h, convention, lo, hi, gamma_max=None, representative="mean"):
    """Cells whose Theta_Q lies in [lo, hi], optionally within |gamma| <= gamma_max."""
    found = []
    for cell in theta_q_grid(mol, jmax, h, convention, representative):
        if not math.isfinite(cell.theta_q):
            continue
        if gamma_max is not None and abs(cell.gamma_anchor) > gamma_max:
            continue
        if lo <= cell.theta_q <= hi:
            found.append(cell)
    return found
