import numpy as np
import pytest

from mlceq.channel import (ChannelModel, LayeredSignal, build_convolution_matrix,
                           convolve_block, generate_layers, transmit)
from mlceq.experiments import NAMED_CHANNELS


def test_channel_model_validation():
    with pytest.raises(ValueError):
        ChannelModel([], 1.0)
    with pytest.raises(ValueError):
        ChannelModel([0.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        ChannelModel([1.0, np.inf], 1.0)
    with pytest.raises(ValueError):
        ChannelModel([1.0], -0.5)
    ch = ChannelModel([1.0, -0.4], 0.0)
    assert ch.order == 1


def test_identity_channel_matrix():
    conv = build_convolution_matrix(ChannelModel([1.0]), half_window=1)
    assert np.array_equal(conv.full, np.eye(3))
    assert np.array_equal(conv.center, [0.0, 1.0, 0.0])


def test_two_tap_matrix():
    conv = build_convolution_matrix(ChannelModel([1.0, 1.0]), half_window=1)
    expected = np.array([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]], dtype=float)
    assert np.array_equal(conv.full, expected)
    assert np.array_equal(conv.center, [0.0, 1.0, 1.0])


def test_long_channel_matrix_shape():
    # 401-tap window over the 10-tap long channel
    ch = ChannelModel(NAMED_CHANNELS["h2"])
    conv = build_convolution_matrix(ch, half_window=200)
    assert conv.full.shape == (401, 410)
    assert conv.left.shape == (401, 209)
    assert conv.right.shape == (401, 200)


def test_toeplitz_rule_and_partition():
    rng = np.random.default_rng(3)
    ch = ChannelModel(rng.standard_normal(6))
    conv = build_convolution_matrix(ch, half_window=4)
    lh = ch.order
    for i in range(conv.full.shape[0]):
        for c in range(conv.full.shape[1]):
            want = ch.taps[i - c + lh] if 0 <= i - c + lh <= lh else 0.0
            assert conv.full[i, c] == want
    rebuilt = np.hstack([conv.left, conv.center[:, None], conv.right])
    assert np.array_equal(rebuilt, conv.full)


def test_negative_half_window_rejected():
    with pytest.raises(ValueError):
        build_convolution_matrix(ChannelModel([1.0]), -1)


def test_transmit_identity_noiseless():
    sig = LayeredSignal(np.array([[1.0, -1.0]]), [1.0])
    y = transmit(sig, ChannelModel([1.0], 0.0), 0)
    assert np.array_equal(y, [1.0, -1.0])


def test_transmit_two_layers_by_hand():
    sig = LayeredSignal(np.array([[2.0], [-1.0]]), [4.0, 1.0])
    y = transmit(sig, ChannelModel([1.0], 0.0), 0)
    assert y[0] == 2.0 - 1.0


def test_transmit_convolution_boundary():
    sig = LayeredSignal(np.array([[1.0, 1.0]]), [1.0])
    y = transmit(sig, ChannelModel([1.0, 1.0], 0.0), 0)
    assert np.array_equal(y, [1.0, 2.0])  # zero initial state


def test_generate_layers_reproducible():
    a = generate_layers(1, 4, [1.0], rng_seed=5)
    b = generate_layers(1, 4, [1.0], rng_seed=5)
    assert np.array_equal(a.layer_symbols, b.layer_symbols)
    assert set(np.unique(a.layer_symbols)) <= {-1.0, 1.0}
    c = generate_layers(1, 4, [1.0], rng_seed=6)
    assert not np.array_equal(a.layer_symbols, c.layer_symbols)


def test_generate_layers_magnitudes():
    sig = generate_layers(2, 100, [4.0, 1.0], rng_seed=1)
    assert np.all(np.abs(sig.layer_symbols[0]) == 2.0)
    assert np.all(np.abs(sig.layer_symbols[1]) == 1.0)


def test_generate_layers_rejects_bad_powers():
    with pytest.raises(ValueError):
        generate_layers(2, 4, [1.0, 0.0], 0)
    with pytest.raises(ValueError):
        generate_layers(2, 4, [1.0], 0)


def test_layer_empirical_mean_clt_bound():
    n = 10 ** 5
    sig = generate_layers(3, n, [1.0, 2.0, 0.5], rng_seed=8)
    for j in range(3):
        sigma = np.sqrt(sig.powers[j])
        assert abs(sig.layer_symbols[j].mean()) <= 4.0 * sigma / np.sqrt(n)


def test_transmit_linearity_noiseless():
    ch = ChannelModel([0.7, -0.3, 1.1], 0.0)
    a = generate_layers(1, 50, [1.0], 10)
    b = generate_layers(1, 50, [2.0], 11)
    ya = transmit(a, ch, 0)
    yb = transmit(b, ch, 0)
    both = LayeredSignal(np.vstack([a.layer_symbols, b.layer_symbols]), [1.0, 2.0])
    assert np.allclose(transmit(both, ch, 0), ya + yb, rtol=0, atol=1e-15)


def test_windowed_consistency():
    # interior output windows equal H @ symbol-window for a single layer
    ch = ChannelModel([0.5, 1.0, -0.25], 0.0)
    lg = 3
    conv = build_convolution_matrix(ch, lg)
    sig = generate_layers(1, 64, [1.0], 21)
    y = transmit(sig, ch, 21)
    x = sig.layer_symbols[0]
    lh = ch.order
    for k in range(lg + lh, 64 - lg):
        window = x[k - lg - lh : k + lg + 1]
        assert np.allclose(y[k - lg : k + lg + 1], conv.full @ window,
                           rtol=0, atol=1e-12)


def test_convolve_block_length():
    ch = ChannelModel([1.0, 2.0, 3.0], 0.0)
    out = convolve_block(np.ones(5), ch)
    assert out.shape == (5,)
    assert np.array_equal(out, [1.0, 3.0, 6.0, 6.0, 6.0])
