"""Mean-field descriptions: fully-mixed ODEs and the degree-based pair approximation."""

from .fully_mixed import FM_STATE, FullyMixedModel, FullyMixedResult, beta_star, fully_mixed_rhs
from .integrate import IntegrationResult, integrate
from .pair_approx import (
    BetaHatScheme,
    BetaHatTelemetry,
    PAResult,
    PAState,
    PairApproximation,
    beta_hat,
    beta_hat_matrix,
    close_triple_cross_layer,
    close_triple_same_layer,
    init_pa_state,
    pa_rhs,
)

__all__ = [
    "FM_STATE", "FullyMixedModel", "FullyMixedResult", "beta_star", "fully_mixed_rhs",
    "IntegrationResult", "integrate",
    "BetaHatScheme", "BetaHatTelemetry", "PAResult", "PAState", "PairApproximation",
    "beta_hat", "beta_hat_matrix", "close_triple_cross_layer", "close_triple_same_layer",
    "init_pa_state", "pa_rhs",
]
