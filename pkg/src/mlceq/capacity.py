"""Spectral-integral rate oracles for the ISI channel and the low-SNR
information-losslessness convergence experiment (ratio of the LMMSE-filtered
rate to the full ISI channel rate)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .channel import ChannelModel, build_convolution_matrix
from .lmmse import design_filter, analytic_layer_rate

_QUAD_TOL = 1e-10  # absolute tolerance handed to the adaptive quadrature


def power_spectrum(channel: ChannelModel, omega):
    """|H(e^{j w})|^2 for real taps; even in w."""
    taps = channel.taps
    omega = np.asarray(omega, dtype=float)
    phases = np.exp(-1j * np.outer(omega, np.arange(taps.size)))
    values = np.abs(phases @ taps) ** 2
    return float(values[0]) if omega.ndim == 0 else values


def isi_gaussian_capacity(channel: ChannelModel, input_power: float) -> float:
    """i.i.d. Gaussian capacity of the ISI channel, bits/symbol:
    (1/2pi) integral of 0.5*log2(1 + P |H(w)|^2 / sigma_w^2) over [-pi, pi].
    """
    if input_power < 0.0:
        raise ValueError("input_power must be >= 0")
    if channel.noise_variance <= 0.0:
        raise ValueError("capacity integral requires noise_variance > 0")
    if input_power == 0.0:
        return 0.0
    return isi_rate_with_interference(channel, input_power, 0.0)


def isi_rate_with_interference(channel: ChannelModel, signal_variance: float,
                               interference_variance: float) -> float:
    """Gaussian mutual-information rate of the ISI channel when an i.i.d.
    Gaussian interferer of variance sigma_z^2 enters through the same filter:
    (1/2pi) integral of 0.5*log2(1 + sx^2 |H|^2 / (sz^2 |H|^2 + sw^2)).
    """
    if signal_variance < 0.0 or interference_variance < 0.0:
        raise ValueError("variances must be >= 0")
    sw2 = channel.noise_variance
    if sw2 + interference_variance <= 0.0:
        raise ValueError("needs noise or interference power in the denominator")
    if signal_variance == 0.0:
        return 0.0

    def integrand(w):
        h2 = power_spectrum(channel, w)
        return 0.5 * np.log2(1.0 + signal_variance * h2
                             / (interference_variance * h2 + sw2))

    # real taps -> even integrand, integrate half the band
    value, _ = quad(integrand, 0.0, np.pi, epsabs=_QUAD_TOL, limit=400)
    return value / np.pi


@dataclass(frozen=True)
class Theorem1Config:
    """One interference setting of the convergence experiment: Gaussian
    signal and interference through the same FIR channel, swept over the
    input-SINR grid sx^2/(sz^2+sw^2) in dB."""

    channel: ChannelModel
    interference_variance: float
    half_window: int
    sinr_grid_db: np.ndarray
    signal_variance: float = 1.0

    def __post_init__(self):
        grid = np.atleast_1d(np.asarray(self.sinr_grid_db, dtype=float))
        if grid.size == 0 or np.any(np.diff(grid) >= 0.0):
            raise ValueError("sinr_grid_db must be nonempty and strictly decreasing")
        if self.interference_variance < 0.0 or self.signal_variance < 0.0:
            raise ValueError("variances must be >= 0")
        object.__setattr__(self, "sinr_grid_db", grid)


@dataclass(frozen=True)
class RatioCurve:
    """Rows of (input_sinr_db, lmmse_rate, isi_rate, ratio) for one
    sigma_z^2/sigma_w^2 setting."""

    interference_to_noise: float
    points: np.ndarray  # shape (n, 4)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError("points must be (n, 4)")
        if np.any(pts[:, 3] < 0.0) or np.any(pts[:, 3] > 1.0 + 1e-9):
            raise ValueError("ratio column must lie in [0, 1 + 1e-9]")
        object.__setattr__(self, "points", pts)

    @property
    def ratios(self) -> np.ndarray:
        return self.points[:, 3]


def lmmse_filtered_rate(config: Theorem1Config, signal_variance: float | None = None,
                        conv=None) -> float:
    """Gaussian rate of the scalar channel at the output of the windowed
    LMMSE filter designed for the configured channel and interference."""
    sx2 = config.signal_variance if signal_variance is None else float(signal_variance)
    if conv is None:
        conv = build_convolution_matrix(config.channel, config.half_window)
    design = design_filter(conv, [sx2, config.interference_variance],
                           config.channel.noise_variance)
    return analytic_layer_rate(design)


def theorem1_curve(config: Theorem1Config) -> RatioCurve:
    """Evaluate lmmse_filtered_rate / isi_rate_with_interference over the
    input-SINR grid."""
    conv = build_convolution_matrix(config.channel, config.half_window)
    sz2 = config.interference_variance
    sw2 = config.channel.noise_variance
    rows = []
    for sinr_db in config.sinr_grid_db:
        sx2 = 10.0 ** (sinr_db / 10.0) * (sz2 + sw2)
        num = lmmse_filtered_rate(config, sx2, conv=conv)
        den = isi_rate_with_interference(config.channel, sx2, sz2)
        rows.append((sinr_db, num, den, num / den))
    ratio = sz2 / sw2 if sw2 > 0.0 else np.inf
    return RatioCurve(interference_to_noise=ratio, points=np.array(rows))
