"""Density of states and quantum Hall transport of a 2D electron gas in
crossed electric and magnetic fields."""

__version__ = "0.1.0"

from .constants import (BOLTZMANN, ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR,
                        PLANCK, VON_KLITZING)
from .dos import (DosCurve, FieldConfiguration, LevelLine, ScaledParameters,
                  dos_curve, dos_free, dos_pure_b, dos_pure_e, effective_shift,
                  idos, oracle_dos_time_integral, partial_dos, scale, spin_dos,
                  total_dos)
from .errors import (IndexOutOfRange, InvalidField, NoConvergence,
                     NonConvergence, ParseError, SingularTensor,
                     ValidationError)
from .filling import (FillingRecord, PlateauEntry, delta_intervals, kappa,
                      plateau_table)
from .specfun import (ZeroSet, airy_ai, airy_ai1, erfc, hermite_phys,
                      hermite_zeros, integrate_adaptive, laguerre, osc_cumulative,
                      osc_density)
from .transport import (HallFieldResult, MaterialParams, Tensor2,
                        TransportPoint, classical_rho_xy, critical_field,
                        match_plateau, overlap_ratio, rho_from_sigma,
                        sigma_energy, sigma_xx_total, sigma_xy_total,
                        solve_hall_field, transport_point)
from .config import RunConfig, SweepSpec, canonical_echo, parse_config
