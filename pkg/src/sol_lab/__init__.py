"""Sol lattices, connecting curves and non-blockability certificates."""

from .connections import CosetPoint, SearchWindow, blocking_check, eval_curve, log_set, midpoint_set
from .exactnum import QuadRat, quad_arith, quad_to_float
from .lattice import (
    ExactSolPoint,
    LatticePresentation,
    SemidirectLattice,
    SL2ZMatrix,
    build_lattice,
    eigen_data,
    embed,
    membership,
    normalize_lattice,
    verify_presentation,
)
from .solcore import SolPoint, TangentVector, metric_at, one_param, sol_exp, sol_inv, sol_log, sol_mul
from .witness import WitnessConfig, certify_nonblockable, density_probe, mirrored_case

__version__ = "0.1.0"
