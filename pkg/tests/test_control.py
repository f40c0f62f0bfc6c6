"""Admission threshold, grid allocation, queue recursions, guarantee constants."""
import itertools
import math

import numpy as np
import pytest

from secsched import (
    ConfigError,
    ControlWeights,
    QueueState,
    RngStreams,
    SecrecyRegime,
    TransmitParams,
    admit,
    allocate,
    choose_v,
    compute_bounds,
    sample_complex_gaussian,
    secrecy_rate,
    update_data_queue,
    update_power_queue,
)
from secsched.channel import ChannelRealization
from secsched.control import ascending_grid
from secsched.simulator import ScenarioConfig


def _draw(seed, n_users=2, n_eves=3, n=6):
    s = RngStreams(seed)
    return ChannelRealization(
        legit=sample_complex_gaussian((n_users, n), s.legit),
        eves=sample_complex_gaussian((n_eves, n), s.eves),
    )


# --- admission ----------------------------------------------------------------

def test_admit_thresholds_on_backlog():
    weights = ControlWeights(v=100.0, theta=np.array([1.0, 2.0]))
    queues = QueueState(data=np.array([100.0, 200.1]))
    arrivals = np.array([7.0, 9.0])
    out = admit(arrivals, queues, weights)
    # user 0 sits exactly on V*theta, which still admits; user 1 is just above
    assert np.array_equal(out, [7.0, 0.0])


def test_admit_is_the_linear_program_minimizer():
    # the admission step claims to minimize sum (U_i - V theta_i) R_i over the
    # box [0, A_i]; a linear objective is minimized at a vertex, so enumerate
    # all of them and compare
    rng = np.random.default_rng(0)
    for _ in range(200):
        k = int(rng.integers(1, 5))
        weights = ControlWeights(v=float(rng.uniform(1, 50)),
                                 theta=rng.uniform(0.5, 3.0, size=k))
        queues = QueueState(data=rng.uniform(0, 100, size=k))
        arrivals = rng.integers(0, 10, size=k).astype(float)
        chosen = admit(arrivals, queues, weights)
        coeff = queues.data - weights.v * weights.theta
        best = min(np.dot(coeff, np.where(mask, arrivals, 0.0))
                   for mask in itertools.product([False, True], repeat=k))
        assert np.dot(coeff, chosen) <= best + 1e-12


def test_admit_validation():
    weights = ControlWeights(v=10.0, theta=np.ones(2))
    queues = QueueState(data=np.zeros(2))
    with pytest.raises(ValueError):
        admit(np.array([1.0]), queues, weights)
    with pytest.raises(ValueError):
        admit(np.array([-1.0, 0.0]), queues, weights)


def test_state_validation():
    with pytest.raises(ValueError):
        QueueState(data=np.array([-1.0]))
    with pytest.raises(ValueError):
        QueueState(data=np.zeros(2), power_virtual=-0.5)
    with pytest.raises(ValueError):
        ControlWeights(v=0.0, theta=np.ones(2))
    with pytest.raises(ValueError):
        ControlWeights(v=5.0, theta=np.array([1.0, 0.0]))


# --- queue recursions -----------------------------------------------------------

def test_data_queue_update():
    assert update_data_queue(10.0, 4.0, True, 3.0) == 9.0
    assert update_data_queue(2.0, 4.0, True, 3.0) == 3.0  # service floors at zero
    assert update_data_queue(2.0, 4.0, False, 3.0) == 5.0
    with pytest.raises(ValueError):
        update_data_queue(-1.0, 0.0, False, 0.0)


def test_power_queue_update():
    assert update_power_queue(50.0, 300.0, 200.0) == 300.0
    assert update_power_queue(100.0, 0.0, 200.0) == 0.0
    assert update_power_queue(500.0, 100.0, 200.0) == 400.0
    with pytest.raises(ValueError):
        update_power_queue(1.0, -1.0, 2.0)


# --- grids ----------------------------------------------------------------------

def test_ascending_grid_rules():
    assert np.array_equal(ascending_grid((3.0, 0.0, 1.0), "g"), [0.0, 1.0, 3.0])
    with pytest.raises(ConfigError):
        ascending_grid((), "g")
    with pytest.raises(ConfigError):
        ascending_grid((0.0, 0.0, 1.0), "g")
    with pytest.raises(ConfigError):
        ascending_grid((0.0, np.inf), "g")
    with pytest.raises(ConfigError):
        ascending_grid((-1.0, 0.0), "g")
    with pytest.raises(ConfigError):
        ascending_grid((0.0, 1.5), "g", unit_interval=True)
    with pytest.raises(ConfigError):
        ascending_grid((1.0, 2.0), "g", require_zero=True)


# --- allocation -------------------------------------------------------------------

def _brute_force(real, queues, power, fraction, regime):
    best = None
    for user, p, f in itertools.product(range(real.n_users), power, fraction):
        res = secrecy_rate(real, user, TransmitParams(p, f, real.n_antennas), regime)
        score = queues.data[user] * res.secrecy_rate - queues.power_virtual * p
        if best is None or score > best[0]:
            best = (score, user, p, f, res)
    return best


@pytest.mark.parametrize("csi,colluding", [
    ("instantaneous", False), ("instantaneous", True),
    ("partial", False), ("partial", True),
])
def test_allocate_matches_brute_force(csi, colluding):
    eta = 0.25 if csi == "partial" else 0.0
    regime = SecrecyRegime(csi=csi, colluding=colluding, eta=eta)
    power = (0.0, 100.0, 200.0, 300.0)
    fraction = tuple(np.linspace(0.0, 1.0, 11))
    rng = np.random.default_rng(1)
    for trial in range(10):
        real = _draw(1000 + trial)
        queues = QueueState(data=rng.uniform(0, 120, size=2),
                            power_virtual=float(rng.uniform(0, 400)))
        dec = allocate(real, queues, power, fraction, regime)
        score, user, p, f, res = _brute_force(real, queues, power, fraction, regime)
        assert (dec.user, dec.power, dec.data_fraction) == (user, p, f)
        assert dec.objective == pytest.approx(max(score, 0.0), abs=1e-9)
        assert dec.secrecy_rate == pytest.approx(res.secrecy_rate, abs=1e-9)
        assert dec.codeword_rate == pytest.approx(res.codeword_rate, abs=1e-9)


def test_allocate_tie_breaks_to_first_action():
    real = _draw(7)
    regime = SecrecyRegime(csi="instantaneous", colluding=False)
    queues = QueueState(data=np.zeros(2), power_virtual=10.0)
    dec = allocate(real, queues, (0.0, 100.0), (0.0, 0.5, 1.0), regime)
    assert (dec.user, dec.power, dec.data_fraction) == (0, 0.0, 0.0)
    assert dec.objective == 0.0
    assert not dec.transmitting and dec.served_user is None


def test_allocate_objective_never_negative():
    regime = SecrecyRegime(csi="instantaneous", colluding=True)
    rng = np.random.default_rng(5)
    for trial in range(20):
        real = _draw(2000 + trial)
        queues = QueueState(data=rng.uniform(0, 50, size=2),
                            power_virtual=float(rng.uniform(0, 1000)))
        dec = allocate(real, queues, (0.0, 50.0, 300.0), (0.0, 0.25, 0.75), regime)
        assert dec.objective >= 0.0


def test_allocate_grid_requirements():
    real = _draw(9)
    regime = SecrecyRegime(csi="instantaneous", colluding=False)
    queues = QueueState(data=np.ones(2))
    with pytest.raises(ConfigError):
        allocate(real, queues, (100.0, 200.0), (0.0, 0.5), regime)  # no idle power
    with pytest.raises(ConfigError):
        allocate(real, queues, (0.0, 100.0), (0.0, 1.5), regime)
    with pytest.raises(ValueError):
        allocate(ChannelRealization(legit=real.legit[:1], eves=real.eves),
                 queues, (0.0, 100.0), (0.0, 0.5), regime)


def test_allocate_accepts_precomputed_cost_table():
    from secsched import rate_cost_table
    real = _draw(13)
    regime = SecrecyRegime(csi="partial", colluding=False, eta=0.3)
    queues = QueueState(data=np.array([40.0, 70.0]), power_virtual=20.0)
    fraction = tuple(np.linspace(0.0, 1.0, 11))
    table = rate_cost_table(np.asarray(fraction), regime, 6, 3)
    a = allocate(real, queues, (0.0, 100.0, 300.0), fraction, regime)
    b = allocate(real, queues, (0.0, 100.0, 300.0), fraction, regime, cost_table=table)
    assert (a.user, a.power, a.data_fraction, a.objective) == \
           (b.user, b.power, b.data_fraction, b.objective)
    with pytest.raises(ValueError):
        allocate(real, queues, (0.0, 100.0), fraction, regime, cost_table=table[:3])


def test_allocate_serves_dominant_queue():
    # one hugely backlogged user and no power price: the busy user wins
    real = _draw(21)
    regime = SecrecyRegime(csi="instantaneous", colluding=False)
    queues = QueueState(data=np.array([0.0, 500.0]), power_virtual=0.0)
    dec = allocate(real, queues, (0.0, 100.0, 300.0), (0.0, 0.25, 0.5, 0.75), regime)
    assert dec.user == 1 and dec.power > 0.0 and dec.secrecy_rate > 0.0


# --- guarantee constants -----------------------------------------------------------

def test_bound_constants_for_the_standard_setup():
    config = ScenarioConfig()
    bounds = compute_bounds(config, rate_max=10.0, gamma=0.1)
    assert bounds.queue_drift_bound == (2 * 30**2 + 10**2) / 2.0  # 950
    assert bounds.power_drift_bound == (300**2 + 200**2) / 2.0    # 65000
    assert np.array_equal(bounds.queue_caps, [130.0, 130.0])
    assert bounds.power_cap == 0.1 * 100.0 * 1.0 + 0.1 * 30 + 300.0
    assert bounds.optimality_gap == (950.0 + 65000.0) / 100.0
    with pytest.raises(ValueError):
        compute_bounds(config, rate_max=-1.0, gamma=0.1)


def test_choose_v():
    assert choose_v(np.array([130.0, 130.0]), np.array([1.0, 1.0]), 30.0) == 100.0
    # the tightest (target - a_max) / theta wins
    assert choose_v(np.array([130.0, 230.0]), np.array([1.0, 4.0]), 30.0) == 50.0
    with pytest.raises(ConfigError):
        choose_v(np.array([30.0, 130.0]), np.array([1.0, 1.0]), 30.0)
    with pytest.raises(ValueError):
        choose_v(np.array([130.0]), np.array([1.0, 1.0]), 30.0)
    with pytest.raises(ValueError):
        choose_v(np.array([130.0]), np.array([-1.0]), 30.0)
