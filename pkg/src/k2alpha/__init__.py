"""Exact arithmetic for the height-2 stabilizer action on Morava E-theory
and the alpha-family chart at the prime 2.

Layers, bottom up: witt (W(F4)/2^N), series (W[[u1]] and graded E_*), poly
(multi-variable series), fgl (deformation and fiber group laws), stabilizer
(the order W<T>/(T^2=-2, aT=Ta^sigma)), action (the deformation action
solver), rings (invariant-ring bases), linalg (Z/2^N kernels), adss (the
first differential, its generators, and the verification batteries),
anss_chart (family bookkeeping and chart emission), cli.
"""

from .action import StarIso, act_on, galois_act, lift_action, named_iso
from .adss import (
    D1Context,
    DetectionRecord,
    b_class,
    bockstein_detect,
    cokernel_order_check,
    d1_apply,
    kernel_in_degree,
    verify_suite,
)
from .anss_chart import (
    AlphaClass,
    ChartPage,
    alpha_classes,
    apply_d3,
    build_e2,
    emit_chart,
    x1n_image,
)
from .config import Config
from .fgl import Fgl2, deformation_fgl, formal_digit_extract, gamma_endo, n_series, special_fiber_fgl, weierstrass_fgl
from .rings import C6Expr, G24Expr, basis_in_degree, expand_c6, expand_g24, express_in_c6_basis, modular
from .series import GradedElem, USeries, congruent_mod, divide_by_2pow, in_ideal, monomial_v, ser_invert
from .stabilizer import StabElem, det, embed_witt, is_in_S21, named, s_inv, s_mul
from .witt import WittElem, frobenius, hensel_unit_solve, norm, teich_expand, teich_lift

__version__ = "0.1.0"
