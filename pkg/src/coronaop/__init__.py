"""Pseudodifferential operators on concretely representable compact abelian
groups, with certified lower bounds for distances to corona-indexed
operator ideals."""

from .group import (Cyclic, DualPoint, GroupPoint, GroupSpec, Torus, character,
                    haar_integrate, negate, translate, translate_samples)
from .fourier import (band_limit, dual_norm, fourier, inv_fourier, space_norm)
from .symbols import (CoronaFilter, D_omega, DualFunction, LevelEstimate, OSC,
                      OscillationReport, Symbol, cone_corona, d_omega,
                      full_corona, gallery, intersection_corona, make_filter,
                      make_symbol, osc, union_corona, vo_diagnostic)
from .quantize import (LinOp, NormEstimate, Op_apply, hs_norm, kernel_apply,
                       kernel_of, op_quantize, operator_norm, right_quantize,
                       symbol_l2_norm)
from .crossed import (CrossedElement, WindowEscapeError, bridge_residual,
                      compose, involution, partial_fourier, partial_fourier_inv,
                      sch)
from .gohberg import (DecayCheck, SandwichConfig, SandwichReport,
                      TestVectorFamily, ideal_approximants, ideal_decay_check,
                      lower_bound_estimate, make_test_vectors, sandwich,
                      symbol_freeze_check)

__version__ = "0.1.0"
