"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import dqr


def test_pinball_and_s_pair():
    assert dqr.pinball_loss(10, 4, 0.9) == pytest.approx(5.4)
    assert dqr.pinball_loss(4, 10, 0.9) == pytest.approx(0.6)
    assert dqr.pinball_loss(7, 7, 0.3) == 0.0
    sm, sp = dqr.s_pair(10, 4, 0.9)
    assert (sm, sp) == (pytest.approx(-3.6), pytest.approx(6.4))
    with pytest.raises(ValueError):
        dqr.pinball_loss(1, 2, 1.5)


def test_phi_family_and_bregman():
    assert dqr.tweedie_phi(2, 3, 0) == pytest.approx(9.0)
    assert dqr.tweedie_phi(0, 1, 0) == 0.0
    assert dqr.bregman_loss(2, 1, 2) == pytest.approx(1.0)
    assert dqr.bregman_loss(5, 5, 2) == 0.0


def test_empirical_functionals():
    sample = list(range(1, 11))
    qs = dqr.empirical_quantile_set(sample, 0.5)
    assert (qs.lower, qs.upper) == (5.0, 6.0)
    lo, hi = dqr.empirical_es(sample, 0.5)
    assert (lo, hi) == (pytest.approx(3.0), pytest.approx(8.0))
    lo2, hi2 = dqr.es_via_minimization(sample, 0.5, dqr.GridSpec(1.0, 10.0, 0.01))
    assert lo2 == pytest.approx(lo, abs=0.011)
    assert hi2 == pytest.approx(hi, abs=0.011)


def test_gamma_triplet_exponential():
    t = dqr.gamma_triplet(dqr.GammaParams(1.0, 1.0), 0.9)
    assert t.v == pytest.approx(math.log(10.0), abs=1e-8)
    assert t.e_plus == pytest.approx(math.log(10.0) + 1.0, abs=1e-8)
    assert 0.9 * t.e_minus + 0.1 * t.e_plus == pytest.approx(1.0, abs=1e-10)


def test_composite_score_is_consistent_scoring_function():
    spec = dqr.ScoreSpec.additive(dqr.PhiIndex(2.0, 2.0), dqr.PhiIndex(0.0, 2.0), 1.0, 0.5)
    t = dqr.CompositeTriplet(3.0, 5.5, 8.0)
    assert dqr.composite_score(4.0, t, spec) > 0.0
    assert dqr.composite_score(4.0, dqr.CompositeTriplet(4.0, 4.0, 4.0), spec) == pytest.approx(0.0, abs=1e-12)
    g = dqr.composite_score_gradient(4.0, t, spec)
    assert len(g) == 3


def test_calibration_report():
    preds = [dqr.CompositeTriplet(3.0, 5.5, 8.0)] * 10
    obs = [float(v) for v in range(1, 11)]
    rep = dqr.calibration_report(preds, obs, 0.5)
    assert rep.coverage == 0.5
    assert rep.v_minus == 0.0
    assert rep.v_plus == 0.0


def test_simulate_and_fit_roundtrip():
    data = dqr.simulate_gamma(400, seed=3, coeff_mu=[0.0, 0.6], gamma_shape=2.0, tau=0.9)
    assert data.features.shape == (400, 2)
    assert np.all(data.responses > 0)
    truth = data.truth
    assert truth.shape == (400, 3)
    # Recombination identity row-wise.
    mu = 0.9 * truth[:, 0] + 0.1 * truth[:, 2]
    assert np.allclose(mu, np.exp(data.features @ np.array([0.0, 0.6])), atol=1e-10)

    cfg = dqr.NetworkConfig()
    cfg.input_dim = 1
    cfg.hidden_dims = [4, 3]
    cfg.head = dqr.HeadKind.CompositeAdditive
    cfg.levels = [0.9]
    spec = dqr.ScoreSpec.additive(dqr.PhiIndex(2.0, 2.0), dqr.PhiIndex(0.0, 2.0), 1.0, 0.9)
    tcfg = dqr.TrainConfig()
    tcfg.batch_size = 64
    tcfg.max_epochs = 40
    tcfg.patience = 10
    tcfg.n_starts = 1
    tcfg.seed = 5
    report = dqr.fit(data, cfg, tcfg, dqr.Objective.composite(spec))
    preds = report.eval_predictions
    assert preds.shape[1] == 3
    assert np.all(preds[:, 0] < preds[:, 1])
    assert np.all(preds[:, 1] < preds[:, 2])
    assert np.all(preds[:, 0] > 0)
