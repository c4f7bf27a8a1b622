"""Decision engine for embeddings between Morrey-type smoothness spaces.

The package works on the sequence side: wavelet coefficient sequences indexed by
dyadic cubes of the unit cube, with weights ``phi`` described by symbolic
families carrying exact decay rates.
"""

from __future__ import annotations

from .indices import (
    Dominance,
    DominanceReport,
    Interval,
    Membership,
    PairContext,
    Tri,
    alpha_rate,
    alpha_seq,
    dominance_check,
    ellq_membership,
    qstar,
    sigma,
    sigma_bar,
    sigma_bar_numeric,
    sigma_inf,
    sigma_inf_numeric,
    sigma_numeric,
    slope_interval,
)
from .phi import (
    InvLog,
    LogBlend,
    PhiProduct,
    PhiSpec,
    PiecewisePower,
    Power,
    PowerLog,
    PsiCritical,
    Tabulated,
    dyadic_samples,
    eval_phi,
    normalize,
    phi_from_json,
    phi_to_json,
    smallest_intc_epsilon,
    validate_gp,
    validate_intc,
)
from .rates import Confidence, RateTerm
from .seqspace import (
    DyadicIndex,
    DyadicSeq,
    NormParams,
    b_norm,
    besov_sup_norm,
    n_norm_morrey,
    n_norm_star,
)
from .verdict import (
    InvariantViolation,
    Scale,
    SpaceSpec,
    Verdict,
    decide,
    decide_b,
    decide_e,
    decide_morrey,
    decide_n,
    decide_special,
)
from .witness import (
    ProbeReport,
    Scaling,
    WitnessFamily,
    WitnessUnavailable,
    build_family_binf,
    build_family_filling,
    build_family_single_cube,
    gn_check,
    probe_compactness,
    random_seq,
    select_witness,
)

__all__ = [n for n in dir() if not n.startswith("_") and n != "annotations"]
