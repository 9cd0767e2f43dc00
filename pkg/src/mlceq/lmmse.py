"""Per-layer LMMSE filter design and the equivalent scalar channel it
induces (gain, residual-noise variance, SINR)."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .channel import ConvolutionMatrix


class SingularCovarianceError(ValueError):
    """Raised when the observation covariance is not positive definite
    (noiseless channel with rank-deficient H H^T)."""


@dataclass(frozen=True)
class LmmseDesign:
    """Layer-m LMMSE filter g and the scalar channel x_tilde = gain*x + zeta
    it produces."""

    filter: np.ndarray
    gain: float
    noise_variance: float  # var(zeta): residual self-ISI + undecoded layers + filtered AWGN
    sinr: float
    layer_index: int
    layer_power: float


@dataclass(frozen=True)
class EquivalentChannel:
    """The AWGN abstraction a layer's decoder sees; exported for code design."""

    layer: int
    gain: float
    noise_variance: float
    layer_power: float


def design_filter(conv: ConvolutionMatrix, powers, noise_variance: float,
                  ridge: float = 0.0, layer_index: int = 1) -> LmmseDesign:
    """Design g = P_m (sum_{j>=m} P_j H H^T + sigma_w^2 I)^{-1} h_k.

    `powers` lists the target layer's power first, then every undecoded
    layer's power.  The residual variance is the explicit three-term sum
    (self-ISI + interference + noise); the LMMSE identity alpha(1-alpha)P_m
    is left to the caller as a cross-check.
    """
    powers = np.atleast_1d(np.asarray(powers, dtype=float))
    if powers.size == 0 or np.any(powers < 0.0):
        raise ValueError("powers must be nonnegative with the target layer first")
    if noise_variance < 0.0 or ridge < 0.0:
        raise ValueError("noise_variance and ridge must be >= 0")

    h = conv.full
    hk = conv.center
    p_m = powers[0]
    total = powers.sum()
    cov = total * (h @ h.T)
    diag = noise_variance + ridge
    cov[np.diag_indices_from(cov)] += diag
    try:
        factor = cho_factor(cov, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            "observation covariance is singular; supply noise_variance > 0 "
            "or an explicit ridge"
        ) from exc
    g = p_m * cho_solve(factor, hk, check_finite=False)

    alpha = float(g @ hk)
    gh_isi = conv.isi.T @ g
    gh = h.T @ g
    interference = float(powers[1:].sum())
    sigma_zeta2 = (
        p_m * float(gh_isi @ gh_isi)
        + interference * float(gh @ gh)
        + noise_variance * float(g @ g)
    )
    signal_power = alpha * alpha * p_m
    sinr = signal_power / sigma_zeta2 if sigma_zeta2 > 0.0 else 0.0
    return LmmseDesign(filter=g, gain=alpha, noise_variance=sigma_zeta2,
                       sinr=sinr, layer_index=layer_index, layer_power=p_m)


def estimate_symbol(design: LmmseDesign, window) -> float:
    """Scalar LMMSE estimate x_tilde = g . window for one output window."""
    window = np.asarray(window, dtype=float)
    if window.shape != design.filter.shape:
        raise ValueError(
            f"window length {window.size} does not match filter length "
            f"{design.filter.size}"
        )
    return float(design.filter @ window)


def analytic_layer_rate(design: LmmseDesign) -> float:
    """Gaussian-input rate of the equivalent scalar channel, bits/symbol."""
    return 0.5 * np.log2(1.0 + design.sinr)


class SinrEvaluator:
    """Cached-eigendecomposition path for evaluating the LMMSE gain and SINR
    of one channel window under many power hypotheses.

    Each query costs O(filter length) after a one-time eigh of H H^T; used by
    the equal-rate power search, which calls thousands of times per layer.
    """

    def __init__(self, conv: ConvolutionMatrix):
        self._conv = conv
        eigvals, eigvecs = eigh(conv.full @ conv.full.T)
        self._eigvals = np.maximum(eigvals, 0.0)
        self._eigvecs = eigvecs
        self._proj = eigvecs.T @ conv.center  # h_k in the eigenbasis

    def gain(self, signal_power: float, interference_power: float,
             noise_variance: float) -> float:
        """alpha = P_m h_k^T ((P_m + T) H H^T + sigma^2 I)^{-1} h_k."""
        denom = (signal_power + interference_power) * self._eigvals + noise_variance
        if np.any(denom <= 0.0):
            raise SingularCovarianceError("covariance not positive definite")
        return signal_power * float(np.sum(self._proj ** 2 / denom))

    def sinr(self, signal_power: float, interference_power: float,
             noise_variance: float) -> float:
        alpha = self.gain(signal_power, interference_power, noise_variance)
        return alpha / (1.0 - alpha) if alpha < 1.0 else np.inf

    def rate(self, signal_power: float, interference_power: float,
             noise_variance: float) -> float:
        """Gaussian-input rate 0.5*log2(1+SINR) = -0.5*log2(1-alpha)."""
        alpha = self.gain(signal_power, interference_power, noise_variance)
        return -0.5 * np.log2(1.0 - alpha)

    def design(self, signal_power: float, interference_power: float,
               noise_variance: float, layer_index: int = 1) -> LmmseDesign:
        """Full design through the eigenbasis; equivalent to design_filter."""
        denom = (signal_power + interference_power) * self._eigvals + noise_variance
        if np.any(denom <= 0.0):
            raise SingularCovarianceError("covariance not positive definite")
        g = signal_power * (self._eigvecs @ (self._proj / denom))
        conv = self._conv
        alpha = float(g @ conv.center)
        gh_isi = conv.isi.T @ g
        gh = conv.full.T @ g
        sigma_zeta2 = (
            signal_power * float(gh_isi @ gh_isi)
            + interference_power * float(gh @ gh)
            + noise_variance * float(g @ g)
        )
        signal = alpha * alpha * signal_power
        sinr = signal / sigma_zeta2 if sigma_zeta2 > 0.0 else 0.0
        return LmmseDesign(filter=g, gain=alpha, noise_variance=sigma_zeta2,
                           sinr=sinr, layer_index=layer_index,
                           layer_power=signal_power)


def equivalent_channel(design: LmmseDesign) -> EquivalentChannel:
    return EquivalentChannel(layer=design.layer_index, gain=design.gain,
                             noise_variance=design.noise_variance,
                             layer_power=design.layer_power)


def equivalent_channels_to_json(designs, path=None) -> str:
    """Serialize the per-layer AWGN abstractions for external code-design
    tools; returns the JSON text and optionally writes it."""
    records = [asdict(equivalent_channel(d)) for d in designs]
    text = json.dumps(records, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
