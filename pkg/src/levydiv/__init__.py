"""Optimal dividend barriers for spectrally negative Levy processes.

Scale functions for four model families, the fluctuation identities built
on them, barrier strategy values, the optimal classical and bail-out
barriers, and Monte Carlo simulators used as independent oracles.
"""

from .barriers import (
    BarrierSolution,
    HjbReport,
    Method,
    bailout_criterion,
    bailout_ratio,
    generator_apply,
    optimal_bailout_barrier,
    optimal_classical_barrier,
    verify_hjb_bailout,
    verify_hjb_classical,
)
from .exceptions import ConfigError, ConsistencyError, DomainError, NumericalFailure, UnsupportedOperation
from .exits import (
    PotentialDensity,
    doubly_reflected_potential,
    exit_up_transform,
    overshoot_reflected,
    overshoot_ruin,
    reflected_at_infimum_entrance,
    reflected_at_supremum_entrance,
)
from .models import (
    BrownianDrift,
    CramerLundbergExp,
    HyperExpJumpDiffusion,
    LevyModel,
    StableSpectralNeg,
    VariationClass,
    model_from_dict,
    phi,
    psi,
)
from .policies import (
    BailoutBarrierValue,
    ClassicalBarrierValue,
    PolicyValueReport,
    bailout_barrier_value,
    classical_barrier_value,
    dividends_doubly,
    injections_doubly,
)
from .scale import InversionConfig, ScaleEval, scale_eval, scale_functions, w_derivatives, w_numeric
from .simulate import Estimand, MCEstimate, Scheme, SimConfig
from .verification import CheckResult, run_suite

__version__ = "0.1.0"
