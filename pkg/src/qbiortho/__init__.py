"""Biorthogonal polynomial families: exact discrete q-Racah type, continuous q-family, classical limits."""

from .errors import (
    BudgetExceeded,
    ConfigError,
    DenominatorPole,
    DomainError,
    GridTooCoarse,
    InvalidParameters,
    ModeMismatch,
    NonConvergent,
    NonTerminating,
    PoleError,
    QBiorthoError,
    TolNotReached,
)
from .qcore import QBase, SeriesSpec, h_factor, phi_series, qpochhammer, qpochhammer_inf
from .qracah import RacahParams, inner_product, racah_F, racah_G, racah_norm, racah_weight, validate_params
from .qwilson import ContinuousParams, TorusPoint, inner_product_closed, qP, qPbar, total_weight_closed, weight_q
from .report import VerificationReport

__version__ = "0.1.0"
