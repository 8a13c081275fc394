"""Exact truncated q-series, Bailey pairs and Hecke-Rogers identity verification."""

from .bailey import (
    BaileyPair,
    ConjugateBaileyPair,
    bailey_transform_check,
    chain,
    chain_step,
    pair_family_A,
    pair_family_B,
    pair_family_C,
    pair_slater_A,
    pair_slater_B,
    pair_slater_C,
    transform_sides,
    verify_bailey_pair,
    verify_conjugate_pair,
    warnaar_conjugate_pair,
)
from .catalog import (
    IdentityCase,
    family_lhs,
    identity,
    identity_ids,
    series_g2_cleared,
    series_g3_cleared,
    series_H,
    series_K,
    series_R,
    theta_correction_sums,
    verify,
)
from .errors import (
    BaileyForgeError,
    BoundViolation,
    InsufficientOrder,
    NotAUnit,
    PreconditionError,
    RelMismatch,
    UnknownIdentity,
)
from .hecke_rogers import DoubleSumSpec, double_sum
from .qproducts import PochSpec, poch, poch_inverse, qpoch, qpoch_inverse
from .report import VerificationReport
from .series import (
    HalfExp,
    Monomial,
    QSeries,
    ZPolynomial,
    add,
    equal_up_to,
    eval_z_one,
    invert_unit,
    make,
    mul,
    mul_monomial,
    subst_q_square,
    subst_z_inverse,
)

__version__ = "0.1.0"
