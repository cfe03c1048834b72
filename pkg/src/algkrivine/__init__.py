"""Algebraic lambda-calculus, resource terms and quantitative Krivine machines."""

from .combination import Combination
from .head_machine import AlgState, run_K, run_K_detailed, trace_K
from .lambda_syntax import alpha_eq, canonicalize, embed, parse_alg, print_alg, print_canonical
from .qkam import QKAM, PairedConfig, ResState, coefficient, enumerate_support, k_hat, trace_pair
from .resource_reduction import beta_step, coeff_c0, linear_subst, normal_form
from .resource_syntax import Bag, multiplicity_m, parse_bag, parse_res, print_res
from .scalar import BOOL, NAT, RATIONAL, PolySemiring, get_semiring
from .taylor import (CoefficientReport, generate_corpus, taylor_coeff, taylor_expand, taylor_support,
                     verify_theorem, weight_w)

__version__ = "0.1.0"
