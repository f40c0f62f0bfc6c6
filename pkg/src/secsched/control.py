"""Admission control and power/split allocation by drift-plus-penalty.

Each user keeps a data backlog; a single virtual queue tracks average power
spent above its budget.  Per slot the controller first thresholds admissions
against the backlogs, then picks one (user, power, data fraction) action
maximizing backlog-weighted secrecy rate minus the power price, from finite
grids.  Both steps are the exact per-slot minimizers of the drift-plus-penalty
upper bound, which is what yields the queue and power guarantees.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import ConfigError
from .secrecy import (
    INSTANTANEOUS,
    PARTIAL,
    SecrecyRegime,
    capacity_grids,
    channel_stats,
    rate_cost_table,
    secrecy_rate_grid,
)


@dataclass
class QueueState:
    """Per-user data backlogs plus the virtual average-power queue."""

    data: np.ndarray
    power_virtual: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 1:
            raise ValueError("data backlog must be a flat per-user vector")
        if np.any(self.data < 0) or self.power_virtual < 0:
            raise ValueError("queue lengths are nonnegative")


@dataclass
class ControlWeights:
    """Tradeoff weight V and per-user admission priorities."""

    v: float
    theta: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if self.v <= 0:
            raise ValueError(f"V must be positive, got {self.v}")
        if self.theta.ndim != 1 or np.any(self.theta <= 0):
            raise ValueError("priorities must be positive, one per user")


@dataclass
class SlotDecision:
    """One slot's allocation; `user` is the argmax even when idling at zero power."""

    user: int
    power: float
    data_fraction: float
    codeword_rate: float
    rate_cost: float
    secrecy_rate: float
    objective: float
    admissions: np.ndarray | None = None

    @property
    def transmitting(self) -> bool:
        return self.secrecy_rate > 0.0

    @property
    def served_user(self) -> int | None:
        return self.user if self.transmitting else None


def admit(arrivals: np.ndarray, queues: QueueState, weights: ControlWeights) -> np.ndarray:
    """Admit all of a user's arrivals iff its backlog is at or below V*theta.

    This is the minimizer of sum (U_i - V theta_i) R_i over 0 <= R_i <= A_i;
    the boundary goes to full admission.  Together with the allocation step it
    caps every backlog at V theta_i + A_max deterministically.
    """
    arrivals = np.asarray(arrivals, dtype=float)
    if arrivals.shape != queues.data.shape or arrivals.shape != weights.theta.shape:
        raise ValueError("arrivals, queues and priorities must agree on the user count")
    if np.any(arrivals < 0):
        raise ValueError("arrivals are nonnegative")
    return np.where(queues.data <= weights.v * weights.theta, arrivals, 0.0)


def ascending_grid(values, name: str, unit_interval: bool = False,
                   require_zero: bool = False) -> np.ndarray:
    arr = np.sort(np.asarray(values, dtype=float).ravel())
    if arr.size == 0:
        raise ConfigError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} entries must be finite")
    if np.unique(arr).size != arr.size:
        raise ConfigError(f"{name} entries must be distinct")
    if unit_interval and (arr[0] < 0.0 or arr[-1] > 1.0):
        raise ConfigError(f"{name} entries must lie in [0, 1]")
    if not unit_interval and arr[0] < 0.0:
        raise ConfigError(f"{name} entries must be nonnegative")
    if require_zero and arr[0] != 0.0:
        raise ConfigError(f"{name} must contain 0 so idling is always available")
    return arr


def allocate(realization: ChannelRealization, queues: QueueState,
             power_grid, ratio_grid, regime: SecrecyRegime,
             cost_table: np.ndarray | None = None) -> SlotDecision:
    """Exhaustive maximization of U_i * r_s(i, P, eps) - X * P over the grids.

    Ties break toward the lowest user index, then the lowest power, then the
    lowest data fraction, so an all-zero score reports (user 0, P=0, eps=0).
    The zero-power action always scores 0, hence the objective is never
    negative.  With `cost_table` supplied (partial CSI), the per-fraction
    inversions are reused instead of recomputed.
    """
    power = ascending_grid(power_grid, "power grid", require_zero=True)
    fraction = ascending_grid(ratio_grid, "ratio grid", unit_interval=True)
    if queues.data.shape[0] != realization.n_users:
        raise ValueError("queue vector does not match the realization's user count")
    if regime.csi == PARTIAL and cost_table is None:
        cost_table = rate_cost_table(fraction, regime, realization.n_antennas, realization.n_eves)
    if cost_table is not None and len(cost_table) != fraction.size:
        raise ValueError("rate-cost table does not match the ratio grid")

    stats = channel_stats(realization.legit, realization.eves, regime.colluding)
    cap_users, cap_eves = capacity_grids(stats, power, fraction)
    rates = secrecy_rate_grid(cap_users, cap_eves, regime, cost_table)
    score = queues.data[:, None, None] * rates - queues.power_virtual * power[:, None]
    user, p_idx, f_idx = np.unravel_index(int(np.argmax(score)), score.shape)
    if regime.csi == INSTANTANEOUS:
        cost = float(cap_eves[user, p_idx, f_idx])
    else:
        cost = float(cost_table[f_idx])
    return SlotDecision(
        user=int(user),
        power=float(power[p_idx]),
        data_fraction=float(fraction[f_idx]),
        codeword_rate=float(cap_users[user, p_idx, f_idx]),
        rate_cost=cost,
        secrecy_rate=float(rates[user, p_idx, f_idx]),
        objective=float(score[user, p_idx, f_idx]),
    )


def update_data_queue(queue: float, served_rate: float, served: bool, admitted: float) -> float:
    """Backlog recursion: serve first (never below zero), then add admissions."""
    if queue < 0 or served_rate < 0 or admitted < 0:
        raise ValueError("queue, rate and admissions are nonnegative")
    return max(queue - (served_rate if served else 0.0), 0.0) + admitted


def update_power_queue(queue: float, power: float, p_av: float) -> float:
    """Virtual power queue: drain the budget, add what was actually spent."""
    if queue < 0 or power < 0 or p_av < 0:
        raise ValueError("queue, power and budget are nonnegative")
    return max(queue - p_av, 0.0) + power


@dataclass(frozen=True)
class PerformanceBounds:
    """Constants in the stability/optimality guarantees of the controller."""

    queue_drift_bound: float   # quadratic arrival/service term, B
    power_drift_bound: float   # quadratic power term, C
    queue_caps: np.ndarray     # deterministic per-user backlog caps
    power_cap: float           # virtual power-queue cap, needs an empirical gamma
    gamma: float               # best observed secrecy rate per unit power
    optimality_gap: float      # utility gap shrinking as 1/V


def compute_bounds(config, rate_max: float, gamma: float) -> PerformanceBounds:
    """Evaluate the guarantee constants for a scenario.

    `rate_max` bounds the served secrecy rate, `gamma` the secrecy rate per
    unit transmit power; both come from the scenario or from a run's
    empirical maxima.  The backlog caps are hard; the power cap is a
    diagnostic since gamma is estimated.
    """
    if rate_max < 0 or gamma < 0:
        raise ValueError("rate and gamma bounds are nonnegative")
    theta = np.asarray(config.theta, dtype=float)
    p_max = float(max(config.power_grid))
    queue_drift = (config.n_users * config.a_max**2 + rate_max**2) / 2.0
    power_drift = (p_max**2 + config.p_av**2) / 2.0
    caps = config.v * theta + config.a_max
    power_cap = gamma * config.v * float(np.max(theta)) + gamma * config.a_max + p_max
    return PerformanceBounds(
        queue_drift_bound=queue_drift,
        power_drift_bound=power_drift,
        queue_caps=caps,
        power_cap=power_cap,
        gamma=gamma,
        optimality_gap=(queue_drift + power_drift) / config.v,
    )


def choose_v(delay_targets, theta, a_max: float) -> float:
    """Largest V meeting per-user backlog targets D_i via V theta_i + A_max <= D_i."""
    targets = np.asarray(delay_targets, dtype=float)
    priorities = np.asarray(theta, dtype=float)
    if targets.shape != priorities.shape or targets.ndim != 1:
        raise ValueError("targets and priorities must be flat vectors of equal length")
    if np.any(priorities <= 0):
        raise ValueError("priorities must be positive")
    if np.any(targets <= a_max):
        bad = int(np.argmin(targets - a_max))
        raise ConfigError(
            f"backlog target {targets[bad]} for user {bad} is not achievable: "
            f"targets must exceed the arrival bound {a_max}"
        )
    return float(np.min((targets - a_max) / priorities))
