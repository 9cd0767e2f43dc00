"""FIR ISI channel model, layered BPSK signal generation and the windowed
convolution (Toeplitz) matrix used by the equalizer design."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Stream tag for the AWGN draw, kept clear of plausible layer indices so the
# noise stream never collides with a layer stream under the same master seed.
_NOISE_STREAM = 0x5EED_0001


@dataclass(frozen=True)
class ChannelModel:
    """Time-invariant causal FIR channel h(0..L_h) with AWGN of variance
    noise_variance."""

    taps: np.ndarray
    noise_variance: float = 1.0

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps, dtype=float))
        if taps.ndim != 1 or taps.size == 0:
            raise ValueError("channel taps must be a nonempty 1-D vector")
        if not np.all(np.isfinite(taps)):
            raise ValueError("channel taps must be finite")
        if not np.any(taps != 0.0):
            raise ValueError("channel needs at least one nonzero tap")
        nv = float(self.noise_variance)
        if not np.isfinite(nv) or nv < 0.0:
            raise ValueError(f"noise_variance must be finite and >= 0, got {nv}")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "noise_variance", nv)

    @property
    def order(self) -> int:
        """Filter order L_h (number of taps minus one)."""
        return self.taps.size - 1


@dataclass(frozen=True)
class LayeredSignal:
    """M independent BPSK layers; row j of layer_symbols holds x_j(k) in
    {-sqrt(P_j), +sqrt(P_j)}."""

    layer_symbols: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        sym = np.asarray(self.layer_symbols, dtype=float)
        pw = np.atleast_1d(np.asarray(self.powers, dtype=float))
        if sym.ndim != 2:
            raise ValueError("layer_symbols must be an M x N matrix")
        if pw.shape != (sym.shape[0],):
            raise ValueError("powers length must match the number of layers")
        if np.any(pw <= 0.0):
            raise ValueError("layer powers must be positive")
        amp = np.sqrt(pw)[:, None]
        if not np.all(np.abs(sym) == amp):
            raise ValueError("row j symbols must have magnitude exactly sqrt(P_j)")
        object.__setattr__(self, "layer_symbols", sym)
        object.__setattr__(self, "powers", pw)

    @property
    def num_layers(self) -> int:
        return self.layer_symbols.shape[0]

    @property
    def block_length(self) -> int:
        return self.layer_symbols.shape[1]

    def combined(self) -> np.ndarray:
        """The transmitted sequence x(k) = sum_j x_j(k)."""
        return self.layer_symbols.sum(axis=0)


@dataclass(frozen=True)
class ConvolutionMatrix:
    """Windowed convolution matrix H of shape (2L_g+1) x (2L_g+L_h+1).

    Row i maps the symbol window x(k-L_g-L_h .. k+L_g), ordered oldest to
    newest, onto the noiseless sample y(k-L_g+i).  The center column (index
    L_g+L_h) multiplies the in-window symbol x(k); dropping it leaves the
    self-ISI part [left, right].
    """

    full: np.ndarray
    half_window: int
    channel_order: int

    @property
    def center_index(self) -> int:
        return self.half_window + self.channel_order

    @property
    def left(self) -> np.ndarray:
        """H_1: columns for x(k-L_g-L_h .. k-1)."""
        return self.full[:, : self.center_index]

    @property
    def center(self) -> np.ndarray:
        """h_k: the column multiplying x(k)."""
        return self.full[:, self.center_index]

    @property
    def right(self) -> np.ndarray:
        """H_2: columns for x(k+1 .. k+L_g)."""
        return self.full[:, self.center_index + 1 :]

    @property
    def isi(self) -> np.ndarray:
        """[H_1, H_2]: the matrix hitting the self-ISI symbols."""
        return np.hstack([self.left, self.right])


def build_convolution_matrix(channel: ChannelModel, half_window: int) -> ConvolutionMatrix:
    """Build the banded Toeplitz matrix relating a (2L_g+1)-sample output
    window to the (2L_g+L_h+1)-symbol input window.

    full[i, c] = h(i - c + L_h) when 0 <= i - c + L_h <= L_h, else 0.
    """
    if half_window < 0:
        raise ValueError("half_window must be >= 0")
    lh = channel.order
    rows = 2 * half_window + 1
    cols = 2 * half_window + lh + 1
    full = np.zeros((rows, cols))
    rev = channel.taps[::-1]  # h(L_h) .. h(0)
    for i in range(rows):
        full[i, i : i + lh + 1] = rev
    return ConvolutionMatrix(full=full, half_window=half_window, channel_order=lh)


def generate_layers(num_layers: int, block_length: int, powers,
                    rng_seed: int, block_index: int = 0) -> LayeredSignal:
    """Draw M independent equiprobable BPSK layers, row j scaled to sqrt(P_j).

    Each layer uses its own stream keyed by (rng_seed, layer, block_index), so
    regenerating any subset of layers is deterministic and order-independent.
    """
    powers = np.atleast_1d(np.asarray(powers, dtype=float))
    if num_layers < 1 or block_length < 1:
        raise ValueError("num_layers and block_length must be >= 1")
    if powers.shape != (num_layers,):
        raise ValueError("powers must have one entry per layer")
    if np.any(powers <= 0.0):
        raise ValueError("layer powers must be positive")
    symbols = np.empty((num_layers, block_length))
    for j in range(num_layers):
        rng = np.random.default_rng([rng_seed, j, block_index])
        bits = rng.integers(0, 2, size=block_length)
        symbols[j] = np.sqrt(powers[j]) * (2.0 * bits - 1.0)
    return LayeredSignal(layer_symbols=symbols, powers=powers)


def convolve_block(symbols: np.ndarray, channel: ChannelModel) -> np.ndarray:
    """Causal convolution with h assuming zero initial state; output length
    equals the input length."""
    symbols = np.asarray(symbols, dtype=float)
    return np.convolve(symbols, channel.taps)[: symbols.size]


def transmit(signal: LayeredSignal, channel: ChannelModel, rng_seed: int,
             block_index: int = 0) -> np.ndarray:
    """Pass the layer sum through the channel and add AWGN:
    y(k) = sum_j sum_i h(i) x_j(k-i) + w(k), with x(k<=0) = 0."""
    y = convolve_block(signal.combined(), channel)
    if channel.noise_variance > 0.0:
        rng = np.random.default_rng([rng_seed, _NOISE_STREAM, block_index])
        y = y + rng.normal(0.0, np.sqrt(channel.noise_variance), size=y.size)
    return y


def guard_length(channel: ChannelModel, half_window: int) -> int:
    """Symbols to discard at each block edge before computing statistics
    (the LMMSE window plus the channel memory)."""
    return half_window + channel.order
