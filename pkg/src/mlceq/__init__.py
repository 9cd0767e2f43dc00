"""Multilevel coding with per-layer LMMSE equalization for ISI channels."""

from .allocation import (ConvergenceError, PowerAllocation, equal_distance,
                         equal_power, equal_rate)
from .capacity import (RatioCurve, Theorem1Config, isi_gaussian_capacity,
                       isi_rate_with_interference, lmmse_filtered_rate,
                       theorem1_curve)
from .channel import (ChannelModel, ConvolutionMatrix, LayeredSignal,
                      build_convolution_matrix, generate_layers, transmit)
from .lmmse import (EquivalentChannel, LmmseDesign, SingularCovarianceError,
                    SinrEvaluator, analytic_layer_rate, design_filter,
                    equivalent_channels_to_json, estimate_symbol)
from .mlc import (MultistageResult, RateProfile, app, cancel_layers,
                  estimate_rate_profile, monte_carlo_layer_rate,
                  run_multistage)

__all__ = [
    "ChannelModel", "ConvolutionMatrix", "LayeredSignal",
    "build_convolution_matrix", "generate_layers", "transmit",
    "LmmseDesign", "EquivalentChannel", "SingularCovarianceError",
    "SinrEvaluator", "design_filter", "estimate_symbol", "analytic_layer_rate",
    "equivalent_channels_to_json",
    "Theorem1Config", "RatioCurve", "isi_gaussian_capacity",
    "isi_rate_with_interference", "lmmse_filtered_rate", "theorem1_curve",
    "RateProfile", "MultistageResult", "app", "cancel_layers",
    "monte_carlo_layer_rate", "estimate_rate_profile", "run_multistage",
    "PowerAllocation", "ConvergenceError", "equal_power", "equal_distance",
    "equal_rate",
]
