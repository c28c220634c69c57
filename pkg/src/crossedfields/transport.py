"""Drude magnetotransport: conductivity and resistivity tensors, Hall-field
self-consistency, plateau matching and breakdown of the quantized regime.

In strong fields (omega_C tau >> 1) the transverse conductivity mirrors the
integrated density of states, sigma_xy = (e/B) N(E_F), while the
longitudinal conductivity is carried by states within ~k_B T of the Fermi
energy, sigma_xx ~ k_B T (e/B) n(E_F) omega_C tau / (1 + omega_C^2 tau^2).
The Fermi occupation itself is sharp (T enters only through that
prefactor), and the relaxation time is evaluated at E_F only; both are the
operational forms the strong-field limit justifies.

The measured Hall field obeys E_y = rho_xy(B, E_y, E_F) * j_x: the Hall
field that broadens the Landau levels is itself set by the resistivity it
produces.  ``solve_hall_field`` resolves this fixed point by damped
iteration with a bracketing-bisection fallback, warm-started from the
previous sweep point (continuation) so a field sweep follows one
continuous solution branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import dos as dos_mod
from .constants import BOLTZMANN, ELEMENTARY_CHARGE, HBAR, VON_KLITZING
from .dos import FieldConfiguration, scale
from .errors import IndexOutOfRange, NoConvergence, SingularTensor

__all__ = [
    "MaterialParams",
    "Tensor2",
    "TransportPoint",
    "HallFieldResult",
    "sigma_energy",
    "sigma_xy_total",
    "sigma_xx_total",
    "rho_from_sigma",
    "classical_rho_xy",
    "solve_hall_field",
    "critical_field",
    "overlap_ratio",
    "match_plateau",
]


@dataclass(frozen=True)
class MaterialParams:
    """Sample parameters: relaxation time at E_F, temperature, drive, E_F."""

    tau_EF: float        # s
    temperature: float   # K
    j_x: float           # A/m
    E_F: float           # J

    def __post_init__(self):
        if not self.tau_EF > 0.0:
            raise ValueError("tau_EF must be positive")
        if self.temperature < 0.0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class Tensor2:
    """2x2 transport tensor in the isotropic Hall form (xx = yy, yx = -xy)."""

    xx: float
    xy: float
    yx: float
    yy: float

    @classmethod
    def hall(cls, xx: float, xy: float) -> "Tensor2":
        return cls(xx=xx, xy=xy, yx=-xy, yy=xx)


@dataclass(frozen=True)
class HallFieldResult:
    """Solution of the Hall-field fixed point at one sweep point."""

    E_y: float
    residual: float        # E_y - rho_xy(E_y) j_x
    iterations: int
    method: str            # "trivial", "fixed-point" or "bisection"
    roots: tuple = ()      # all bracketed roots seen (bisection path)


@dataclass(frozen=True)
class TransportPoint:
    """Transport observables at one point of a magnetic-field sweep."""

    B: float
    E_y: float
    sigma: Tensor2
    rho: Tensor2
    N: float                      # carriers per m^2
    plateau_f: float | None = None


def sigma_energy(config: FieldConfiguration, E, tau: float,
                 spin: bool = True) -> Tensor2:
    """Energy-resolved Drude conductivity tensor at energy E.

    Uses the both-spin DOS when ``spin`` is set; xy/xx = omega_C tau by
    construction.
    """
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    sp = scale(config)
    n = dos_mod.spin_dos(config, E) if spin else dos_mod.total_dos(config, E)
    wct = sp.omega_C * tau
    pref = ELEMENTARY_CHARGE ** 2 * n * tau / (config.m_eff * (1.0 + wct * wct))
    return Tensor2.hall(xx=pref, xy=pref * wct)


def sigma_xy_total(config: FieldConfiguration, mat: MaterialParams,
                   spin: bool = True) -> float:
    """Transverse conductivity (e/B) N(E_F) of the occupied sea."""
    return ELEMENTARY_CHARGE / config.B * dos_mod.idos(config, mat.E_F, spin=spin)


def sigma_xx_total(config: FieldConfiguration, mat: MaterialParams,
                   spin: bool = True) -> float:
    """Longitudinal conductivity from states within k_B T of E_F."""
    sp = scale(config)
    n = (dos_mod.spin_dos(config, mat.E_F) if spin
         else dos_mod.total_dos(config, mat.E_F))
    wct = sp.omega_C * mat.tau_EF
    return (BOLTZMANN * mat.temperature * ELEMENTARY_CHARGE / config.B
            * n * wct / (1.0 + wct * wct))


def rho_from_sigma(sigma: Tensor2) -> Tensor2:
    """Invert a Hall-form conductivity tensor (an involution)."""
    denom = sigma.xx * sigma.xx + sigma.xy * sigma.xy
    if denom == 0.0:
        raise SingularTensor("sigma_xx = sigma_xy = 0 cannot be inverted")
    return Tensor2.hall(xx=sigma.xx / denom, xy=sigma.xy / denom)


def classical_rho_xy(B: float, n2d: float) -> float:
    """Classical Hall resistivity B / (e n2d) of a fixed carrier density."""
    if not n2d > 0.0:
        raise ValueError("carrier density must be positive")
    return B / (ELEMENTARY_CHARGE * n2d)


def critical_field(B: float, k, m_eff: float) -> float:
    """In-plane field closing the gap between levels k-1 and k.

    sqrt(e hbar)/m * B**1.5 / (sqrt(2k-1) + sqrt(2k+1)); beyond it the
    broadened levels overlap and the k-th plateau disappears.
    """
    if k != int(k) or k < 1:
        raise IndexOutOfRange(f"breakdown is defined between levels k-1, k with k >= 1, got {k!r}")
    if not B > 0.0:
        raise ValueError("B must be positive")
    k = int(k)
    return (math.sqrt(ELEMENTARY_CHARGE * HBAR) / m_eff * B ** 1.5
            / (math.sqrt(2.0 * k - 1.0) + math.sqrt(2.0 * k + 1.0)))


def overlap_ratio(config: FieldConfiguration, k) -> float:
    """Half-widths of levels k-1, k over their spacing; 1 at breakdown."""
    if k != int(k) or k < 1:
        raise IndexOutOfRange(f"overlap is defined between levels k-1, k with k >= 1, got {k!r}")
    if not config.B > 0.0:
        raise ValueError("B must be positive")
    k = int(k)
    return (config.m_eff * (math.sqrt(2.0 * k - 1.0) + math.sqrt(2.0 * k + 1.0))
            * config.E_perp / (math.sqrt(ELEMENTARY_CHARGE * HBAR) * config.B ** 1.5))


def match_plateau(rho_xy: float, f_values, rtol: float = 0.005) -> float | None:
    """The plateau index f with 2*pi*hbar/(f e^2) within rtol of rho_xy."""
    best = None
    best_dev = rtol
    for f in f_values:
        target = VON_KLITZING / f
        dev = abs(rho_xy - target) / target
        if dev <= best_dev:
            best, best_dev = f, dev
    return best


def _rho_xy_at(config: FieldConfiguration, mat: MaterialParams, E_y: float,
               spin: bool) -> float:
    cfg = replace(config, E_perp=E_y)
    sxy = sigma_xy_total(cfg, mat, spin=spin)
    sxx = sigma_xx_total(cfg, mat, spin=spin)
    denom = sxx * sxx + sxy * sxy
    if denom == 0.0:
        raise SingularTensor(
            "no carriers below E_F at this field point; rho_xy diverges")
    return sxy / denom


def _collect_roots(g, lo: float, hi: float, n_scan: int = 80):
    """Sign-change brackets of g on a log grid over [lo, hi]."""
    grid = np.geomspace(lo, hi, n_scan)
    vals = [g(x) for x in grid]
    return [(float(grid[i]), float(grid[i + 1]))
            for i in range(len(grid) - 1)
            if vals[i] == 0.0 or (vals[i] < 0.0) != (vals[i + 1] < 0.0)]


def _bisect_root(g, lo: float, hi: float, rtol: float, atol: float):
    glo = g(lo)
    iters = 0
    for _ in range(200):
        iters += 1
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= max(rtol * mid, atol) or (hi - lo) <= 1e-14 * hi:
            return mid, gm, iters
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return mid, gm, iters


def solve_hall_field(config: FieldConfiguration, mat: MaterialParams,
                     spin: bool = True, E_y0: float | None = None,
                     rtol: float = 1e-9, atol: float = 1e-6,
                     max_iter: int = 80) -> HallFieldResult:
    """Solve E_y = rho_xy(B, E_y, E_F) j_x for the Hall field.

    ``config.E_perp`` is ignored; the returned field is the one the sample
    itself sustains at drive j_x.  A warm start E_y0 selects the solution
    branch continuously connected to the previous sweep point.  Damped
    fixed-point iteration handles the plateau regions where rho_xy is
    locally flat; when it cycles, the residual is bracketed on
    [0, ~10 x classical estimate] and bisected, and every bracketed root is
    reported so branch ambiguity near plateau edges is visible.
    """
    if mat.j_x < 0.0:
        raise ValueError("j_x must be non-negative")
    if mat.j_x == 0.0:
        return HallFieldResult(E_y=0.0, residual=0.0, iterations=0, method="trivial")

    # classical scale: constant DOS of both branches (one if spinless)
    mult = 2.0 if spin else 1.0
    n2d = mult * config.m_eff * mat.E_F / (2.0 * math.pi * HBAR * HBAR)
    if n2d <= 0.0:
        raise NoConvergence("E_F <= 0 leaves no classical carrier scale")
    e_classical = classical_rho_xy(config.B, n2d) * mat.j_x
    floor = 1e-9 * e_classical

    def rho(e_y: float) -> float:
        return _rho_xy_at(config, mat, max(e_y, floor), spin)

    e_y = E_y0 if E_y0 is not None and E_y0 > 0.0 else e_classical
    alpha = 0.5
    best = (math.inf, e_y)
    for it in range(1, max_iter + 1):
        target = rho(e_y) * mat.j_x
        resid = e_y - target
        if abs(resid) <= max(rtol * abs(e_y), atol):
            return HallFieldResult(E_y=e_y, residual=resid, iterations=it,
                                   method="fixed-point")
        if abs(resid) < best[0]:
            best = (abs(resid), e_y)
        e_y = (1.0 - alpha) * e_y + alpha * target

    # cycling: bracket the residual and bisect toward the warm-start branch
    def g(e):
        return e - rho(e) * mat.j_x

    hi = 2.0 * e_classical
    expansions = 0
    while g(hi) < 0.0 and expansions < 6:
        hi *= 2.0
        expansions += 1
    brackets = _collect_roots(g, floor, hi)
    if not brackets:
        raise NoConvergence(
            f"no Hall-field root found in [0, {hi:.3e}] V/m at B = {config.B} T",
            brackets=[])
    anchor = E_y0 if E_y0 is not None and E_y0 > 0.0 else best[1]
    lo, hi = min(brackets, key=lambda br: abs(0.5 * (br[0] + br[1]) - anchor))
    root, resid, iters = _bisect_root(g, lo, hi, rtol, atol)
    if abs(resid) > max(rtol * root, atol):
        raise NoConvergence(
            f"bisection stalled at residual {resid:.3e} V/m", brackets=brackets)
    roots = tuple(0.5 * (a + b) for a, b in brackets)
    return HallFieldResult(E_y=root, residual=resid, iterations=max_iter + iters,
                           method="bisection", roots=roots)


def transport_point(config: FieldConfiguration, mat: MaterialParams,
                    spin: bool = True, E_y0: float | None = None,
                    plateau_fs=None) -> TransportPoint:
    """Self-consistent transport observables at one magnetic-field point."""
    sol = solve_hall_field(config, mat, spin=spin, E_y0=E_y0)
    if sol.E_y > 0.0:
        cfg = replace(config, E_perp=sol.E_y)
        sxx = sigma_xx_total(cfg, mat, spin=spin)
        sxy = sigma_xy_total(cfg, mat, spin=spin)
        n_carriers = sxy * config.B / ELEMENTARY_CHARGE
    else:
        # undriven sample: zero-broadening limit, delta lines below E_F
        sp = scale(config)
        shift = 0.5 * config.g_factor * HBAR * sp.omega_L
        count = 0
        for s in ((+shift, -shift) if spin else (0.0,)):
            count += max(0, int(math.floor(
                ((mat.E_F + s) / (HBAR * sp.omega_L) + 1.0) / 2.0)))
        n_carriers = count * ELEMENTARY_CHARGE * config.B / (2.0 * math.pi * HBAR)
        sxy = ELEMENTARY_CHARGE / config.B * n_carriers
        sxx = 0.0
    sigma = Tensor2.hall(xx=sxx, xy=sxy)
    rho = rho_from_sigma(sigma)
    f = match_plateau(rho.xy, plateau_fs) if plateau_fs else None
    return TransportPoint(B=config.B, E_y=sol.E_y, sigma=sigma, rho=rho,
                          N=n_carriers, plateau_f=f)
