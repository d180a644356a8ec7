import math
import warnings

import pytest

from ergorisk.errors import DomainError
from ergorisk.hazard import PulseLognormal
from ergorisk.probcore import LognormalSpec as LN
from ergorisk.probcore import lognormal_quantile
from ergorisk.pulse_oracle import (
    BLOCK_SIZE,
    PulseSimConfig,
    RareEventWarning,
    SimEstimate,
    simulate,
    simulate_rate,
)
from ergorisk.riskengine import back_calc_rate, lifetime_exact, lifetime_from_rate
from ergorisk.toymodel import ToyProblem

TOY = ToyProblem()


def test_no_pulses():
    est = simulate(PulseSimConfig(ToyProblem(eta=0.0), n_structures=10_000))
    assert est.pf_hat == 0.0 and est.std_error == 0.0


def test_std_error_formula():
    est = SimEstimate.from_counts(37, 1000)
    assert est.std_error == math.sqrt(0.037 * 0.963 / 1000)


def test_bitwise_determinism():
    cfg = PulseSimConfig(TOY, n_structures=300_000, seed=99)
    assert simulate(cfg) == simulate(cfg)


def test_worker_invariance(monkeypatch):
    cfg = PulseSimConfig(TOY, n_structures=5 * BLOCK_SIZE + 123, seed=4)
    one = simulate(cfg, workers=1)
    assert simulate(cfg, workers=3) == one
    monkeypatch.setenv("ERGORISK_THREADS", "8")
    assert simulate(cfg) == one


def test_seed_change_within_error():
    a = simulate(PulseSimConfig(TOY, n_structures=1_000_000, seed=1))
    b = simulate(PulseSimConfig(TOY, n_structures=1_000_000, seed=2))
    assert a != b
    assert abs(a.pf_hat - b.pf_hat) < 4 * math.hypot(a.std_error, b.std_error)


def test_std_error_scaling():
    base = simulate(PulseSimConfig(TOY, n_structures=500_000, seed=3))
    double = simulate(PulseSimConfig(TOY, n_structures=1_000_000, seed=3))
    quad = simulate(PulseSimConfig(TOY, n_structures=2_000_000, seed=3))
    assert double.std_error / base.std_error == pytest.approx(1 / math.sqrt(2), rel=0.2)
    assert quad.std_error / base.std_error == pytest.approx(0.5, rel=0.2)


def test_annual_probability_matches_pipeline():
    est = simulate_rate(PulseSimConfig(TOY, n_structures=1_000_000, seed=5))
    hz = PulseLognormal(TOY.eta, TOY.s)
    lam = back_calc_rate(lifetime_exact(TOY.x, TOY.y, hz, 1.0), 1.0)
    assert abs(est.pf_hat - lifetime_from_rate(lam, 1.0)) < 3 * est.std_error


def test_unreachable_barrier():
    n = 200_000
    s = LN(1, 1)
    cap = 2 * lognormal_quantile(s, 1 - 1 / n)
    p = ToyProblem(eta=1.0, s=s, x=LN(cap, 0.0), y=LN(1.0, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RareEventWarning)
        est = simulate_rate(PulseSimConfig(p, n_structures=n, seed=8))
    assert est.pf_hat <= 5 / n


def test_rare_event_warning():
    with pytest.warns(RareEventWarning):
        simulate_rate(PulseSimConfig(TOY, n_structures=10_000, seed=1))


def test_non_ergodic_below_ergodic():
    ne = simulate(PulseSimConfig(TOY, n_structures=2_000_000, seed=11))
    er = simulate(PulseSimConfig(TOY, n_structures=2_000_000, seed=12, y_mode="ergodic"))
    assert ne.pf_hat + 3 * math.hypot(ne.std_error, er.std_error) < er.pf_hat


@pytest.mark.parametrize("kwargs", [dict(n_structures=0), dict(t_D=0.0), dict(y_mode="other"), dict(seed=-1)])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        PulseSimConfig(TOY, **kwargs)


def test_pulse_count_limit():
    with pytest.raises(DomainError):
        simulate(PulseSimConfig(ToyProblem(eta=1.0), t_D=50.0, n_structures=10))
