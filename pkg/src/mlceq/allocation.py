"""Power allocation across layers: equal power, equal distance (uniform ASK)
and the simulation-based equal-rate search."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, build_convolution_matrix
from .lmmse import SinrEvaluator
from .mlc import monte_carlo_layer_rate

MAX_BISECTION_ITERATIONS = 200
TOTAL_POWER_REL_TOL = 1e-4


class ConvergenceError(RuntimeError):
    """Equal-rate search failed to converge or the total power is infeasible."""


@dataclass(frozen=True)
class PowerAllocation:
    """Ordered per-layer powers P_1..P_M; layer 1 is decoded first."""

    powers: np.ndarray
    total: float
    scheme: str
    target_rate: float | None = None

    def __post_init__(self):
        powers = np.atleast_1d(np.asarray(self.powers, dtype=float))
        if np.any(powers <= 0.0):
            raise ValueError("all layer powers must be positive")
        if not np.isclose(powers.sum(), self.total, rtol=1e-9, atol=0.0):
            raise ValueError("powers must sum to the stated total")
        object.__setattr__(self, "powers", powers)

    @property
    def num_layers(self) -> int:
        return self.powers.size

    def to_json(self) -> str:
        return json.dumps({
            "scheme": self.scheme,
            "M": self.num_layers,
            "total_power": self.total,
            "target_rate": self.target_rate,
            "powers": self.powers.tolist(),
        }, indent=2)


def equal_power(num_layers: int, total: float) -> PowerAllocation:
    """P_j = P/M for every layer."""
    if num_layers < 1 or total <= 0.0:
        raise ValueError("need num_layers >= 1 and total > 0")
    powers = np.full(num_layers, total / num_layers)
    return PowerAllocation(powers=powers, total=total, scheme="equal-power")


def equal_distance(num_layers: int, total: float) -> PowerAllocation:
    """Geometric powers with P_j = 4 P_{j+1}, normalized to the total; the
    summed constellation is a uniform 2^M-ASK."""
    if num_layers < 1 or total <= 0.0:
        raise ValueError("need num_layers >= 1 and total > 0")
    weights = 4.0 ** np.arange(num_layers - 1, -1, -1)
    powers = total * weights / weights.sum()
    return PowerAllocation(powers=powers, total=total, scheme="equal-distance")


def analytic_rate_evaluator(channel: ChannelModel, half_window: int):
    """Gaussian-approximation per-layer rate: 0.5*log2(1+SINR) of the LMMSE
    equivalent channel, with undecoded layers as interference."""
    evaluator = SinrEvaluator(build_convolution_matrix(channel, half_window))
    noise = channel.noise_variance

    def rate(layer_power: float, interference_power: float) -> float:
        return evaluator.rate(layer_power, interference_power, noise)

    return rate


def monte_carlo_rate_evaluator(channel: ChannelModel, half_window: int,
                               samples: int, seed: int):
    """High-fidelity evaluator scoring actual BPSK blocks.  The seed is held
    fixed across calls (common random numbers) so the rate stays monotone in
    the candidate power during bisection."""

    def rate(layer_power: float, interference_power: float) -> float:
        # two effective layers: the target plus one lumped interferer
        if interference_power > 0.0:
            powers = [layer_power, interference_power]
        else:
            powers = [layer_power]
        return monte_carlo_layer_rate(channel, powers, 1, half_window,
                                      samples, seed)

    return rate


def _solve_layer_powers(num_layers, total, rate, target_rate, tolerance):
    """Solve P_M..P_1 so each layer's rate equals target_rate, treating the
    already-solved higher layers as interference.  Returns None when even
    P_m = total cannot reach the target (the outer loop then lowers it).

    The bracket is narrowed well past the rate tolerance (to a power interval
    small against the outer loop's total-power tolerance) so the power sum is
    a smooth function of the target and the outer bisection can converge.
    """
    power_tol = 0.1 * TOTAL_POWER_REL_TOL * total / num_layers
    powers = np.zeros(num_layers)
    interference = 0.0
    for m in range(num_layers - 1, -1, -1):
        if rate(total, interference) < target_rate:
            return None
        lo, hi = 0.0, total
        for _ in range(MAX_BISECTION_ITERATIONS):
            p = 0.5 * (lo + hi)
            r = rate(p, interference)
            if hi - lo <= power_tol and abs(r - target_rate) <= tolerance:
                break
            if r < target_rate:
                lo = p
            else:
                hi = p
        else:
            raise ConvergenceError(
                f"bisection for layer {m + 1} did not reach the target rate "
                f"within {MAX_BISECTION_ITERATIONS} iterations")
        powers[m] = p
        interference += p
    return powers


def equal_rate(num_layers: int, total: float, channel: ChannelModel,
               half_window: int, rate_evaluator=None,
               tolerance: float = 1e-3) -> PowerAllocation:
    """Allocate powers so every layer's achievable rate equals a common
    R_const, solved from layer M down to layer 1.

    Nested bisection: the inner loop solves each P_m for a candidate R_const
    (rate is monotone in P_m with the other powers fixed); the outer loop
    bisects R_const in (0, 1) until the powers sum to the requested total.
    """
    if num_layers < 1 or total <= 0.0:
        raise ValueError("need num_layers >= 1 and total > 0")
    if tolerance <= 0.0:
        raise ValueError("tolerance must be > 0")
    if rate_evaluator is None:
        rate_evaluator = analytic_rate_evaluator(channel, half_window)

    lo, hi = 0.0, 1.0
    best = None
    achieved = None
    for _ in range(MAX_BISECTION_ITERATIONS):
        r_const = 0.5 * (lo + hi)
        powers = _solve_layer_powers(num_layers, total, rate_evaluator,
                                     r_const, tolerance)
        power_sum = np.inf if powers is None else powers.sum()
        if powers is not None:
            best, achieved = powers, r_const
            if abs(power_sum - total) <= TOTAL_POWER_REL_TOL * total:
                break
        if power_sum > total:
            hi = r_const
        else:
            lo = r_const
    else:
        if best is None or not np.isclose(best.sum(), total,
                                          rtol=10 * TOTAL_POWER_REL_TOL):
            raise ConvergenceError(
                f"equal-rate search did not converge for M={num_layers}, "
                f"total={total}")
    # snap the converged powers onto the exact total (<= 1e-4 relative nudge)
    best = best * (total / best.sum())
    return PowerAllocation(powers=best, total=total, scheme="equal-rate",
                           target_rate=achieved)
