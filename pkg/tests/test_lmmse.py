import json

import numpy as np
import pytest

from mlceq.channel import (ChannelModel, build_convolution_matrix,
                           generate_layers, transmit)
from mlceq.lmmse import (SingularCovarianceError, SinrEvaluator,
                         analytic_layer_rate, design_filter,
                         equivalent_channels_to_json, estimate_symbol)
from mlceq.mlc import apply_filter

from oracles import dense_inverse_filter


def random_design(rng, max_order=10, max_half_window=50, max_layers=8):
    lh = int(rng.integers(0, max_order + 1))
    lg = int(rng.integers(0, max_half_window + 1))
    m = int(rng.integers(1, max_layers + 1))
    taps = rng.standard_normal(lh + 1)
    noise = float(rng.uniform(0.1, 10.0))
    powers = rng.uniform(0.1, 10.0, m)
    channel = ChannelModel(taps, noise)
    conv = build_convolution_matrix(channel, lg)
    return conv, powers, noise


def test_scalar_wiener_filter():
    conv = build_convolution_matrix(ChannelModel([1.0]), 0)
    d = design_filter(conv, [1.0], 1.0)
    assert d.filter == pytest.approx([0.5])
    assert d.gain == pytest.approx(0.5)
    assert d.noise_variance == pytest.approx(0.25)
    assert d.sinr == pytest.approx(1.0)


def test_two_tap_design_against_hand_solution():
    conv = build_convolution_matrix(ChannelModel([1.0, 1.0]), 1)
    d = design_filter(conv, [1.0], 1.0)
    assert d.filter == pytest.approx(np.array([-2.0, 6.0, 5.0]) / 21.0, rel=1e-12)
    assert d.gain == pytest.approx(11.0 / 21.0, rel=1e-12)
    assert d.noise_variance == pytest.approx(110.0 / 441.0, rel=1e-12)


def test_vanishing_signal_power():
    conv = build_convolution_matrix(ChannelModel([1.0, -0.5]), 2)
    d = design_filter(conv, [1e-12, 1.0], 1.0)
    assert d.gain < 1e-11
    assert d.sinr < 1e-11


def test_estimate_symbol():
    conv = build_convolution_matrix(ChannelModel([1.0]), 0)
    d = design_filter(conv, [1.0], 1.0)
    assert estimate_symbol(d, [2.0]) == pytest.approx(1.0)
    assert estimate_symbol(d, [0.0]) == 0.0

    conv2 = build_convolution_matrix(ChannelModel([1.0, 1.0]), 1)
    d2 = design_filter(conv2, [1.0], 1.0)
    assert estimate_symbol(d2, [1.0, 1.0, 1.0]) == pytest.approx(9.0 / 21.0)
    with pytest.raises(ValueError):
        estimate_symbol(d2, [1.0, 1.0])


def test_analytic_layer_rate():
    conv = build_convolution_matrix(ChannelModel([1.0]), 0)
    base = design_filter(conv, [1.0], 1.0)
    assert analytic_layer_rate(base) == pytest.approx(0.5)  # SINR = 1
    for sinr, want in [(0.0, 0.0), (3.0, 1.0)]:
        d = base.__class__(filter=base.filter, gain=base.gain,
                           noise_variance=base.noise_variance, sinr=sinr,
                           layer_index=1, layer_power=1.0)
        assert analytic_layer_rate(d) == pytest.approx(want)


def test_lmmse_identities_randomized():
    rng = np.random.default_rng(123)
    for _ in range(50):
        conv, powers, noise = random_design(rng, max_half_window=20)
        d = design_filter(conv, powers, noise)
        p = powers[0]
        assert d.noise_variance == pytest.approx(d.gain * (1 - d.gain) * p, rel=1e-9)
        assert d.sinr == pytest.approx(d.gain / (1 - d.gain), rel=1e-9)
        assert 0.0 < d.gain < 1.0


def test_solver_matches_dense_inverse_oracle():
    rng = np.random.default_rng(456)
    for _ in range(30):
        conv, powers, noise = random_design(rng, max_half_window=10)  # <= 21x21
        d = design_filter(conv, powers, noise)
        oracle = dense_inverse_filter(conv, powers, noise)
        assert np.max(np.abs(d.filter - oracle)) < 1e-8
        eig = SinrEvaluator(conv).design(powers[0], powers[1:].sum(), noise)
        assert np.max(np.abs(eig.filter - oracle)) < 1e-8
        assert eig.gain == pytest.approx(d.gain, rel=1e-9)


def test_scaling_covariance():
    conv = build_convolution_matrix(ChannelModel([1.0, 0.3, -0.6]), 5)
    powers = np.array([2.0, 1.0, 0.5])
    base = design_filter(conv, powers, 0.8)
    for c in (0.01, 7.0, 1e4):
        scaled = design_filter(conv, c * powers, c * 0.8)
        assert np.allclose(scaled.filter, base.filter, rtol=1e-9)
        assert scaled.gain == pytest.approx(base.gain, rel=1e-9)
        assert scaled.sinr == pytest.approx(base.sinr, rel=1e-9)
        assert scaled.noise_variance == pytest.approx(c * base.noise_variance,
                                                      rel=1e-9)


def test_singular_covariance_raises():
    conv = build_convolution_matrix(ChannelModel([1.0, 1.0], 0.0), 1)
    with pytest.raises(SingularCovarianceError):
        design_filter(conv, [0.0], 0.0)
    # an explicit ridge restores solvability
    d = design_filter(conv, [0.0], 0.0, ridge=1e-6)
    assert d.gain == 0.0


def test_orthogonality_statistical():
    # sample correlation of (x_tilde - alpha x) with x is 0 within 5 SE
    ch = ChannelModel([1.0, 0.5, -0.2], 1.0)
    lg = 4
    n = 10 ** 5
    conv = build_convolution_matrix(ch, lg)
    powers = np.array([1.0, 0.5])
    sig = generate_layers(2, n, powers, 2024)
    y = transmit(sig, ch, 2024)
    d = design_filter(conv, powers, ch.noise_variance)
    xt = apply_filter(d, y)
    guard = lg + ch.order
    x = sig.layer_symbols[0, guard:-guard]
    resid = xt[guard:-guard] - d.gain * x
    corr = np.corrcoef(resid, x)[0, 1]
    assert abs(corr) < 5.0 / np.sqrt(x.size)


def test_equivalent_channel_json(tmp_path):
    conv = build_convolution_matrix(ChannelModel([1.0, 1.0]), 1)
    designs = [design_filter(conv, [1.0, 0.5], 1.0, layer_index=1),
               design_filter(conv, [0.5], 1.0, layer_index=2)]
    path = tmp_path / "equiv.json"
    text = equivalent_channels_to_json(designs, path)
    records = json.loads(path.read_text())
    assert records == json.loads(text)
    assert [r["layer"] for r in records] == [1, 2]
    assert set(records[0]) == {"layer", "gain", "noise_variance", "layer_power"}
    assert records[0]["noise_variance"] > 0
