"""Node-interval weights and the non-integer filling factors they induce.

Within Landau level k the density of states vanishes at the k zeros of the
level's oscillator profile.  The probability weight between consecutive
nodes,

    Delta_{k,j} = integral of |u_k|^2 over (xi_{k,j-1}, xi_{k,j}),

with xi_{k,0} = -inf and xi_{k,k+1} = +inf, splits the level into k+1
sublevels; partial fillings kappa_{k,j} = k + Delta_{k,1} + ... + Delta_{k,j}
mark plateau-like features between the integer quantum Hall steps.  With a
finite g-factor the two spin branches interleave on the energy axis and the
plateau index f counts sublevels of both branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import specfun
from .errors import IndexOutOfRange

__all__ = [
    "FillingRecord",
    "PlateauEntry",
    "delta_intervals",
    "kappa",
    "plateau_table",
    "records",
]

#: two features closer than this (in units of hbar*omega_L) on the energy
#: axis are reported as one, flagged degenerate
_MERGE_TOL = 1e-9


@dataclass(frozen=True)
class FillingRecord:
    """Interval weight and cumulative filling of one node interval."""

    k: int
    j: int            # 1..k+1
    delta: float
    kappa: float


@dataclass(frozen=True)
class PlateauEntry:
    """One expected Hall plateau: resistivity 2*pi*hbar / (f e^2)."""

    f: float
    kind: str             # "gap" or "node"
    spin: str             # "both", "up" or "down"
    k: int
    j: int | None         # node index within the level, gaps carry None
    energy_scale: float   # feature position in units of hbar*omega_L
    label: str | None     # nearby simple fraction, display only
    degenerate: bool = False


@lru_cache(maxsize=None)
def _deltas(k: int) -> tuple:
    zeros = specfun.hermite_zeros(k).zeros
    edge = math.sqrt(2.0 * k + 1.0) + 10.0  # tail beyond is < 1e-20
    knots = (-edge, *zeros, edge)
    return tuple(
        specfun.integrate_adaptive(
            lambda x: specfun.osc_density(k, x), knots[i], knots[i + 1], tol=1e-13)
        for i in range(len(knots) - 1))


def delta_intervals(k) -> list[float]:
    """The k+1 node-interval weights of level k; positive, summing to 1."""
    if k != int(k) or k < 0:
        raise ValueError(f"level index must be a non-negative integer, got {k!r}")
    return list(_deltas(int(k)))


def kappa(k, j) -> float:
    """Cumulative filling factor kappa_{k,j} = k + sum of the first j weights."""
    if k != int(k) or k < 0:
        raise ValueError(f"level index must be a non-negative integer, got {k!r}")
    k = int(k)
    if j != int(j) or not 0 <= j <= k + 1:
        raise IndexOutOfRange(f"node interval index must lie in [0, {k + 1}], got {j!r}")
    j = int(j)
    if j == 0:
        return float(k)
    if j == k + 1:
        return float(k + 1)
    return k + math.fsum(_deltas(k)[:j])


def _fraction_label(f: float) -> str | None:
    frac = Fraction(f).limit_denominator(10)
    if abs(float(frac) - f) <= 5e-3:
        return f"{frac.numerator}/{frac.denominator}" if frac.denominator > 1 else str(frac.numerator)
    return None


def records(k_max: int) -> list[FillingRecord]:
    """All (k, j) interval records through level k_max."""
    out = []
    for k in range(int(k_max) + 1):
        deltas = _deltas(k)
        run = float(k)
        for j, d in enumerate(deltas, start=1):
            run += d
            out.append(FillingRecord(k=k, j=j, delta=d, kappa=run))
    return out


def _table_zero_g(k_max: int) -> list[PlateauEntry]:
    entries = []
    for k in range(k_max + 1):
        center = 2.0 * k + 1.0
        zeros = specfun.hermite_zeros(k).zeros
        run = float(k)
        for j, d in enumerate(_deltas(k)[:-1], start=1):
            run += d
            f = 2.0 * run
            entries.append(PlateauEntry(
                f=f, kind="node", spin="both", k=k, j=j,
                energy_scale=center, label=_fraction_label(f)))
        f = 2.0 * (k + 1)
        entries.append(PlateauEntry(
            f=f, kind="gap", spin="both", k=k, j=None,
            energy_scale=center, label=_fraction_label(f)))
    return entries


def plateau_table(g_factor: float, k_max) -> list[PlateauEntry]:
    """Expected plateau indices f through level k_max, both spin branches.

    For g = 0 the branches are degenerate and f = 2*kappa over all (k, j).
    Otherwise the sublevels of the branches, shifted by -+ (g/2) in units
    of hbar*omega_L, are merged on the energy axis; a node or gap of one
    branch is indexed by its own partial filling plus the number of
    other-branch sublevels below it.  Features of the two branches that
    coincide in energy are merged and flagged degenerate.
    """
    if k_max != int(k_max) or k_max < 0:
        raise ValueError(f"k_max must be a non-negative integer, got {k_max!r}")
    if g_factor < 0:
        raise ValueError("g_factor must be non-negative")
    k_max = int(k_max)
    if g_factor == 0.0:
        return sorted(_table_zero_g(k_max), key=lambda p: p.f)

    branches = {"up": -0.5 * g_factor, "down": +0.5 * g_factor}
    centers = {name: [(2 * k + 1) + off for k in range(k_max + 1)]
               for name, off in branches.items()}

    def below(other: str, energy: float) -> tuple[int, bool]:
        cnt = sum(1 for c in centers[other] if c < energy - _MERGE_TOL)
        tied = any(abs(c - energy) <= _MERGE_TOL for c in centers[other])
        return cnt, tied

    entries = []
    for name in branches:
        other = "down" if name == "up" else "up"
        for k in range(k_max + 1):
            c = centers[name][k]
            n_other, tied = below(other, c)
            run = float(k)
            for j, d in enumerate(_deltas(k)[:-1], start=1):
                run += d
                f = n_other + run
                entries.append(PlateauEntry(
                    f=f, kind="node", spin=name, k=k, j=j, energy_scale=c,
                    label=_fraction_label(f), degenerate=tied))
            f = float(n_other + k + 1)
            entries.append(PlateauEntry(
                f=f, kind="gap", spin=name, k=k, j=None, energy_scale=c,
                label=_fraction_label(f), degenerate=tied))

    entries.sort(key=lambda p: (p.f, p.energy_scale))
    # merge branch features that coincide in f (within the energy merge tol)
    merged: list[PlateauEntry] = []
    for entry in entries:
        if merged and abs(entry.f - merged[-1].f) <= _MERGE_TOL:
            prev = merged[-1]
            merged[-1] = PlateauEntry(
                f=prev.f, kind=prev.kind, spin="both", k=prev.k, j=prev.j,
                energy_scale=prev.energy_scale, label=prev.label, degenerate=True)
        else:
            merged.append(entry)
    return merged
