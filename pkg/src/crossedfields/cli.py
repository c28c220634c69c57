"""Command-line front end: DOS and Hall sweeps, filling tables, breakdown.

Subcommands
-----------
dos-sweep      energy sweep of n(E) and N(E), one CSV per in-plane field
hall-sweep     magnetic-field sweep with self-consistent Hall field
filling-table  node-interval weights and filling factors per level
breakdown      critical in-plane field and overlap ratio per level

Every CSV starts with a ``#`` metadata block that echoes the full
configuration; feeding those lines back through parse_config reproduces
the run.  Output is deterministic: the same configuration writes the same
bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import __version__, filling, transport
from . import config as config_mod
from . import dos as dos_mod
from .config import RunConfig, SweepSpec, canonical_echo, parse_config
from .constants import ELEMENTARY_CHARGE, HBAR
from .errors import (InvalidField, NoConvergence, NonConvergence, ParseError,
                     ValidationError)

__all__ = [
    "main",
    "run_dos_sweep",
    "run_hall_sweep",
    "run_filling_table",
    "run_breakdown_report",
]

#: levels carried in the hall-sweep plateau lookup table; features beyond
#: f ~ 2*(cap+1) are too narrow to resolve in a field sweep anyway
_PLATEAU_K_CAP = 25


def _write_csv(path: Path, cfg: RunConfig, columns, rows) -> None:
    lines = [f"# crossedfields {__version__}", "# config:"]
    lines += [f"# {line}" for line in canonical_echo(cfg).splitlines()]
    lines.append(f"# columns: {','.join(columns)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # plain repr even for numpy scalars
    return str(value)


def run_dos_sweep(cfg: RunConfig, out_dir: str | None = None, si: bool = False):
    """Energy sweep of the DOS and integrated DOS, one file per E_perp.

    Default grid: 4000 points on E/(hbar omega_L) in [0, 16].  Scaled
    columns are E/(hbar omega_L), n in units of e B/(2 pi hbar^2 omega_L)
    and N in units of e B/(2 pi hbar); ``si`` switches to raw SI columns.
    """
    if cfg.B is None:
        raise ValidationError("dos-sweep needs B")
    e_perps = cfg.E_perp_list or ((cfg.E_perp,) if cfg.E_perp else ())
    if not e_perps:
        raise ValidationError("dos-sweep needs E_perp or E_perp_list")
    sweep = cfg.sweep
    base = dos_mod.scale(cfg.field_config(E_perp=e_perps[0]))
    hwl = HBAR * base.omega_L
    if sweep is None:
        sweep = SweepSpec(variable="energy", start=0.0, stop=16.0 * hwl, points=4000)
    if sweep.variable != "energy":
        raise ValidationError("dos-sweep requires sweep variable 'energy'")
    energies = np.linspace(sweep.start, sweep.stop, sweep.points)
    out = Path(out_dir or cfg.out_dir)

    n_unit = dos_mod._weight(cfg.field_config(E_perp=e_perps[0])) / hwl
    big_n_unit = dos_mod._weight(cfg.field_config(E_perp=e_perps[0]))
    results = []
    for e_perp in e_perps:
        field = cfg.field_config(E_perp=e_perp)
        curve = dos_mod.dos_curve(field, energies, k_cap=cfg.k_cap)
        n_int = dos_mod.idos(field, energies, k_cap=cfg.k_cap)
        if si:
            columns = ["E_J", "n_per_J_m2", "N_per_m2"]
            rows = zip(energies, curve.total, n_int)
        else:
            columns = ["E_over_hbar_omegaL", "n_scaled", "N_scaled"]
            rows = zip(energies / hwl, curve.total / n_unit, n_int / big_n_unit)
        path = out / f"dos_sweep_Eperp_{e_perp:g}Vpm.csv"
        run_cfg = config_mod.RunConfig(**{**_as_kwargs(cfg), "E_perp": e_perp,
                                          "E_perp_list": None, "sweep": sweep})
        _write_csv(path, run_cfg, columns, rows)
        results.append((e_perp, curve, n_int, path))
    return results


def _as_kwargs(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in dataclass_fields(RunConfig)}


def run_hall_sweep(cfg: RunConfig, out_dir: str | None = None, si: bool = False):
    """Magnetic-field sweep of the self-consistent Hall response.

    Points are solved from high field to low so each solution warm-starts
    the next (continuation); rows are emitted in ascending B.  A point
    whose fixed point cannot be resolved is recorded in the error column
    and the sweep continues.
    """
    sweep = cfg.sweep
    if sweep is None or sweep.variable != "B":
        raise ValidationError("hall-sweep requires a sweep over variable 'B'")
    if sweep.start <= 0.0:
        raise ValidationError("hall-sweep needs strictly positive fields")
    mat = cfg.material()
    if mat.E_F <= 0.0:
        raise ValidationError("hall-sweep needs E_F > 0")

    b_grid = np.linspace(sweep.start, sweep.stop, sweep.points)
    hwl_min = HBAR * ELEMENTARY_CHARGE * sweep.start / (2.0 * cfg.m_eff)
    k_needed = int(mat.E_F / (2.0 * hwl_min)) + 2
    table = filling.plateau_table(cfg.g_factor, min(k_needed, _PLATEAU_K_CAP))
    f_values = [p.f for p in table]

    n2d = 2.0 * cfg.m_eff * mat.E_F / (2.0 * math.pi * HBAR * HBAR)
    points, errors = [], []
    warm = None
    for b in b_grid[::-1]:
        field = cfg.field_config(B=float(b), E_perp=0.0)
        try:
            tp = transport.transport_point(field, mat, spin=True, E_y0=warm,
                                           plateau_fs=f_values)
            warm = tp.E_y if tp.E_y > 0.0 else warm
            points.append(tp)
            errors.append(None)
        except (NoConvergence, NonConvergence) as exc:
            points.append(None)
            # semicolons: the message lands in one CSV cell
            errors.append(f"{type(exc).__name__}: {exc}".replace(",", ";"))
    points.reverse()
    errors.reverse()

    columns = ["B_T", "E_y_V_per_m", "rho_xy_ohm", "rho_xx_ohm",
               "classical_rho_xy_ohm", "plateau_f", "error"]
    want_sigma = "sigma" in sweep.outputs
    if want_sigma:
        columns[5:5] = ["sigma_xx_S", "sigma_xy_S"]
    rows = []
    for b, tp, err in zip(b_grid, points, errors):
        classical = transport.classical_rho_xy(float(b), n2d)
        if tp is None:
            row = [float(b), None, None, None, classical, None, err]
            if want_sigma:
                row[5:5] = [None, None]
        else:
            row = [tp.B, tp.E_y, tp.rho.xy, tp.rho.xx, classical,
                   tp.plateau_f, err]
            if want_sigma:
                row[5:5] = [tp.sigma.xx, tp.sigma.xy]
        rows.append(row)
    path = Path(out_dir or cfg.out_dir) / "hall_sweep.csv"
    _write_csv(path, cfg, columns, rows)
    return points, path


def run_filling_table(cfg: RunConfig, k_max: int, out_dir: str | None = None):
    """Interval weights, filling factors and plateau indices through k_max."""
    if k_max < 0:
        raise ValidationError("k_max must be non-negative")
    table = filling.plateau_table(cfg.g_factor, k_max)
    by_node = {(p.spin, p.k, p.j): p.f for p in table if p.kind == "node"}
    rows = []
    for rec in filling.records(k_max):
        f_spinless = 2.0 * rec.kappa
        if rec.j <= rec.k:  # interior node bounded above by interval j
            if cfg.g_factor == 0.0:
                f_up = f_down = by_node.get(("both", rec.k, rec.j))
            else:
                f_up = by_node.get(("up", rec.k, rec.j))
                f_down = by_node.get(("down", rec.k, rec.j))
        else:
            f_up = f_down = None  # last interval ends at the gap, not a node
        rows.append([rec.k, rec.j, rec.delta, rec.kappa, f_spinless, f_up, f_down])
    columns = ["k", "j", "delta", "kappa", "f_spinless", "f_up_with_g", "f_down_with_g"]
    path = Path(out_dir or cfg.out_dir) / "filling_table.csv"
    _write_csv(path, cfg, columns, rows)
    return rows, path


def run_breakdown_report(cfg: RunConfig, k_max: int, out_dir: str | None = None):
    """Critical in-plane fields and overlap ratios at the configured state."""
    if k_max < 1:
        raise ValidationError("breakdown needs k_max >= 1")
    if cfg.B is None:
        raise ValidationError("breakdown needs B")
    field = cfg.field_config()
    rows = []
    for k in range(1, k_max + 1):
        e_crit = transport.critical_field(cfg.B, k, cfg.m_eff)
        rows.append([k, e_crit, transport.overlap_ratio(field, k)])
    columns = ["k", "E_crit_V_per_m", "overlap_ratio"]
    path = Path(out_dir or cfg.out_dir) / "breakdown.csv"
    _write_csv(path, cfg, columns, rows)
    return rows, path


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    for key in config_mod._KEYS:
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, dest=f"cfg_{key}", metavar="VALUE",
                            help=f"override config key {key}")


def _load_config(args) -> RunConfig:
    text = ""
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
    overrides = []
    for key in config_mod._KEYS:
        value = getattr(args, f"cfg_{key}", None)
        if value is not None:
            overrides.append(f"{key} = {value}")
    if overrides:
        # overrides win: drop overridden keys from the file text
        keep = []
        names = {o.split("=")[0].strip() for o in overrides}
        for line in text.splitlines():
            body = line.strip()
            if body and not body.startswith("#"):
                key = body.partition("=")[0].strip()
                if key in names:
                    continue
            keep.append(line)
        text = "\n".join(keep + overrides)
    return parse_config(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossedfields",
        description="Landau-level DOS and quantum Hall transport in crossed fields")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--out", help="output directory (default from config)")
        p.add_argument("--si", action="store_true", help="emit raw SI columns")
        _add_override_flags(p)

    common(sub.add_parser("dos-sweep", help="energy sweep of n(E) and N(E)"))
    common(sub.add_parser("hall-sweep", help="B sweep with self-consistent Hall field"))
    p_fill = sub.add_parser("filling-table", help="interval weights and filling factors")
    common(p_fill)
    p_fill.add_argument("--k-max", type=int, default=4)
    p_break = sub.add_parser("breakdown", help="critical fields per level")
    common(p_break)
    p_break.add_argument("--k-max", type=int, default=6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "dos-sweep":
            results = run_dos_sweep(cfg, out_dir=args.out, si=args.si)
            for _, _, _, path in results:
                print(path)
        elif args.command == "hall-sweep":
            _, path = run_hall_sweep(cfg, out_dir=args.out, si=args.si)
            print(path)
        elif args.command == "filling-table":
            _, path = run_filling_table(cfg, args.k_max, out_dir=args.out)
            print(path)
        elif args.command == "breakdown":
            _, path = run_breakdown_report(cfg, args.k_max, out_dir=args.out)
            print(path)
        return 0
    except (ParseError, ValidationError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except (InvalidField, NoConvergence, NonConvergence, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
