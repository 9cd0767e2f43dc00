"""Multistage receiver: interference cancellation, per-layer APP computation
and Monte Carlo estimation of each layer's achievable rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import expit

from .channel import (ChannelModel, LayeredSignal, build_convolution_matrix,
                      convolve_block, generate_layers, guard_length, transmit)
from .lmmse import LmmseDesign, design_filter

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class RateProfile:
    """Per-layer achievable rates with the estimator's metadata and the
    equivalent-channel parameters used to score the symbols."""

    per_layer: np.ndarray   # bits/symbol, clipped to [0, 1]
    stderr: np.ndarray
    gains: np.ndarray
    noise_variances: np.ndarray
    sinrs: np.ndarray
    samples: int
    seed: int

    @property
    def total(self) -> float:
        """R_MLC = sum of the layer rates."""
        return float(self.per_layer.sum())

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# samples={self.samples} seed={self.seed}\n")
            fh.write("layer,rate_bits,stderr,alpha,sigma_zeta2,sinr\n")
            for m in range(self.per_layer.size):
                fh.write(f"{m + 1},{self.per_layer[m]:.12g},{self.stderr[m]:.12g},"
                         f"{self.gains[m]:.12g},{self.noise_variances[m]:.12g},"
                         f"{self.sinrs[m]:.12g}\n")

    def to_json(self) -> dict:
        return {
            "total_rate_bits": self.total,
            "samples": self.samples,
            "seed": self.seed,
            "layers": [
                {"layer": m + 1,
                 "rate_bits": float(self.per_layer[m]),
                 "stderr": float(self.stderr[m]),
                 "alpha": float(self.gains[m]),
                 "sigma_zeta2": float(self.noise_variances[m]),
                 "sinr": float(self.sinrs[m])}
                for m in range(self.per_layer.size)
            ],
        }


@dataclass(frozen=True)
class MultistageResult:
    decisions: np.ndarray       # M x N hard symbols, +/- sqrt(P_m)
    profile: RateProfile
    error_counts: np.ndarray    # per layer, interior symbols only
    guard: int


def cancel_layers(received, channel: ChannelModel, prior_decisions) -> np.ndarray:
    """Subtract the channel-filtered contribution of already-decoded layers:
    y_m(k) = y(k) - sum_{j<m} sum_i h(i) xhat_j(k-i)."""
    residual = np.array(received, dtype=float)
    for decisions in prior_decisions:
        decisions = np.asarray(decisions, dtype=float)
        if decisions.size != residual.size:
            raise ValueError("decision vector length must match the received block")
        residual -= convolve_block(decisions, channel)
    return residual


def apply_filter(design: LmmseDesign, received) -> np.ndarray:
    """Slide the LMMSE window over the block: out[k] = g . y(k-L_g .. k+L_g),
    zero-padded at the edges (edge samples are guard symbols anyway)."""
    received = np.asarray(received, dtype=float)
    half = (design.filter.size - 1) // 2
    full = fftconvolve(received, design.filter[::-1])
    return full[half : half + received.size]


def log_likelihood_ratio(design: LmmseDesign, estimate):
    """LLR of the layer bit given x_tilde under the Gaussian equivalent
    channel: 2 * alpha * sqrt(P_m) * x_tilde / sigma_zeta^2."""
    if design.noise_variance <= 0.0:
        raise ValueError("APP needs a positive equivalent noise variance")
    scale = 2.0 * design.gain * np.sqrt(design.layer_power) / design.noise_variance
    return scale * np.asarray(estimate, dtype=float)


def app(design: LmmseDesign, estimate: float) -> tuple[float, float]:
    """A-posteriori probabilities (p_plus, p_minus) of the layer symbol.

    p_plus is computed through a numerically stable logistic of the LLR and
    p_minus as its exact complement, so the pair always sums to 1.
    """
    llr = log_likelihood_ratio(design, estimate)
    p_plus = float(expit(llr))
    return p_plus, 1.0 - p_plus


def _score_bits(design: LmmseDesign, estimates: np.ndarray,
                true_symbols: np.ndarray) -> np.ndarray:
    """-log2 P(x_true | x_tilde) per symbol, evaluated in the log domain."""
    scale = 2.0 * design.gain / design.noise_variance
    z = scale * estimates * true_symbols  # LLR * sign(x_true)
    return np.logaddexp(0.0, -z) / _LN2


def _rate_from_scores(scores: np.ndarray) -> tuple[float, float]:
    rate = 1.0 - float(scores.mean())
    stderr = float(scores.std(ddof=1) / np.sqrt(scores.size)) if scores.size > 1 else 0.0
    return min(max(rate, 0.0), 1.0), stderr


def monte_carlo_layer_rate(channel: ChannelModel, powers, layer_index: int,
                           half_window: int, samples: int, seed: int) -> float:
    """Monte Carlo estimate of R_m = 1 - E[-log2 P(x_m | x_tilde_m)] with
    genie-aided cancellation of layers below `layer_index` (1-based).

    Guard symbols at both block edges are excluded; the estimate is clipped
    to [0, 1].
    """
    rate, _ = monte_carlo_layer_rate_with_stderr(channel, powers, layer_index,
                                                 half_window, samples, seed)
    return rate


def monte_carlo_layer_rate_with_stderr(channel: ChannelModel, powers,
                                       layer_index: int, half_window: int,
                                       samples: int, seed: int) -> tuple[float, float]:
    powers = np.atleast_1d(np.asarray(powers, dtype=float))
    m = layer_index
    if not 1 <= m <= powers.size:
        raise ValueError("layer_index must be in 1..M")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    guard = guard_length(channel, half_window)
    block = samples + 2 * guard
    signal = generate_layers(powers.size, block, powers, seed)
    y = transmit(signal, channel, seed)
    residual = cancel_layers(y, channel, signal.layer_symbols[: m - 1])
    conv = build_convolution_matrix(channel, half_window)
    design = design_filter(conv, powers[m - 1:], channel.noise_variance,
                           layer_index=m)
    estimates = apply_filter(design, residual)
    interior = slice(guard, guard + samples)
    scores = _score_bits(design, estimates[interior],
                         signal.layer_symbols[m - 1, interior])
    return _rate_from_scores(scores)


def estimate_rate_profile(channel: ChannelModel, powers, half_window: int,
                          samples: int, seed: int) -> RateProfile:
    """One simulation pass scoring every layer with genie-aided cancellation;
    equivalent to calling monte_carlo_layer_rate for each layer but reusing
    the transmitted block."""
    powers = np.atleast_1d(np.asarray(powers, dtype=float))
    guard = guard_length(channel, half_window)
    block = samples + 2 * guard
    signal = generate_layers(powers.size, block, powers, seed)
    y = transmit(signal, channel, seed)
    conv = build_convolution_matrix(channel, half_window)
    interior = slice(guard, guard + samples)

    rates, errs, gains, nvars, sinrs = [], [], [], [], []
    residual = np.array(y)
    for m in range(1, powers.size + 1):
        design = design_filter(conv, powers[m - 1:], channel.noise_variance,
                               layer_index=m)
        estimates = apply_filter(design, residual)
        scores = _score_bits(design, estimates[interior],
                             signal.layer_symbols[m - 1, interior])
        rate, stderr = _rate_from_scores(scores)
        rates.append(rate)
        errs.append(stderr)
        gains.append(design.gain)
        nvars.append(design.noise_variance)
        sinrs.append(design.sinr)
        residual -= convolve_block(signal.layer_symbols[m - 1], channel)
    return RateProfile(per_layer=np.array(rates), stderr=np.array(errs),
                       gains=np.array(gains), noise_variances=np.array(nvars),
                       sinrs=np.array(sinrs), samples=samples, seed=seed)


def run_multistage(received, channel: ChannelModel, allocation, half_window: int,
                   feedback_mode: str = "genie", seed: int = 0,
                   signal: LayeredSignal | None = None) -> MultistageResult:
    """Run the full multistage receiver over one block.

    `allocation` is anything with a `powers` attribute or a plain power
    vector.  The true layers are regenerated from `seed` unless `signal` is
    given; genie mode feeds them back in place of the hard decisions.
    """
    if feedback_mode not in ("genie", "hard-decision"):
        raise ValueError(f"unknown feedback_mode {feedback_mode!r}")
    received = np.asarray(received, dtype=float)
    powers = np.atleast_1d(np.asarray(getattr(allocation, "powers", allocation),
                                      dtype=float))
    num_layers = powers.size
    if signal is None:
        signal = generate_layers(num_layers, received.size, powers, seed)
    if signal.block_length != received.size or signal.num_layers != num_layers:
        raise ValueError("signal shape does not match the received block")

    conv = build_convolution_matrix(channel, half_window)
    guard = guard_length(channel, half_window)
    interior = slice(guard, max(received.size - guard, guard))

    decisions = np.empty_like(signal.layer_symbols)
    error_counts = np.zeros(num_layers, dtype=int)
    rates, errs, gains, nvars, sinrs = [], [], [], [], []
    residual = np.array(received)
    for m in range(1, num_layers + 1):
        design = design_filter(conv, powers[m - 1:], channel.noise_variance,
                               layer_index=m)
        estimates = apply_filter(design, residual)
        amp = np.sqrt(powers[m - 1])
        hard = np.where(estimates >= 0.0, amp, -amp)
        decisions[m - 1] = hard
        truth = signal.layer_symbols[m - 1]
        error_counts[m - 1] = int(np.count_nonzero(hard[interior] != truth[interior]))
        scores = _score_bits(design, estimates[interior], truth[interior])
        rate, stderr = _rate_from_scores(scores)
        rates.append(rate)
        errs.append(stderr)
        gains.append(design.gain)
        nvars.append(design.noise_variance)
        sinrs.append(design.sinr)
        feedback = truth if feedback_mode == "genie" else hard
        residual -= convolve_block(feedback, channel)

    n_interior = interior.stop - interior.start
    profile = RateProfile(per_layer=np.array(rates), stderr=np.array(errs),
                          gains=np.array(gains), noise_variances=np.array(nvars),
                          sinrs=np.array(sinrs), samples=n_interior, seed=seed)
    return MultistageResult(decisions=decisions, profile=profile,
                            error_counts=error_counts, guard=guard)
