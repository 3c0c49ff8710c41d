"""Linear stability of periodic steady states of reaction-diffusion equations via Bloch spectra."""
from .core import (NormConvention, PeriodicFunction, constant, derivative, fluctuation, from_closed_form,
                   inner, mathieu_potential, max_value, mean, norm_sq, read_csv, to_csv)
from .criteria import (AbcDiagnostic, CriterionReport, KatoForm, Verdict, abc_diagnostic, evaluate,
                       kato_lower_bound)
from .errors import (BlowUpError, BrillouinZoneError, ConvergenceError, GridError, HermiticityError,
                     InsufficientRangeError, PreconditionError, RDBlochError, ResolutionError,
                     SeriesValidityError)
from .mathieu import (BoundaryKind, MathieuProblem, QConvention, StabilityBoundary, kato_boundary,
                      numeric_boundary, region_scan, series_boundary, theorem1_boundary)
from .sim import Mode, RDProblem, SimState, allen_cahn_problem, measure_decay_rate, step
from .spectrum import BandStructure, BlochMatrix, GroundState, assemble, band_structure, eigen_all, lambda00

__version__ = "0.1.0"
