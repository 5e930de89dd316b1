import math

import numpy as np
import pytest

import ppinfer


def toy():
    return ppinfer.EventSeries(1.0, [[0.1, 0.2, 0.7], [0.3]])


def test_event_series_sorts_and_counts():
    data = ppinfer.EventSeries(2.0, [[1.5, 0.2], []])
    assert data.replicates == [[0.2, 1.5], []]
    assert data.total_events == 2
    assert data.replicate_count == 2
    assert ppinfer.bin_counts(data, 2) == [1, 1]


def test_out_of_range_event_raises():
    with pytest.raises(ppinfer.DataError):
        ppinfer.EventSeries(1.0, [[1.5]])
    with pytest.raises(ppinfer.Error):
        ppinfer.EventSeries(1.0, [[1.5]])


def test_conjugate_band_mean():
    band = ppinfer.conjugate_band(toy(), 2, alpha=2.0, beta=1.0, levels=[0.9])
    assert band["mean"] == pytest.approx([5.0 / 2.0, 3.0 / 2.0])
    lo, hi = band["bands"][0]["lower"], band["bands"][0]["upper"]
    assert all(l < m < h for l, m, h in zip(lo, band["mean"], hi))


def test_marginal_likelihood_by_hand():
    a, b = 1.0, 1.0
    expected = 2.0 + 2 * (a * math.log(b) - math.lgamma(a))
    expected += math.lgamma(a + 3) - (a + 3) * math.log(1 + b)
    expected += math.lgamma(a + 1) - (a + 1) * math.log(1 + b)
    assert ppinfer.log_marginal_likelihood(toy(), 2, a, b) == pytest.approx(expected, rel=1e-13)


def test_rule_of_thumb():
    assert ppinfer.rule_of_thumb_bins(191) == 48
    assert ppinfer.rule_of_thumb_bins(215) == 50


def test_simulate_is_seeded():
    a = ppinfer.simulate("bart_simpson", 20, seed=3)
    assert a == ppinfer.simulate("bart_simpson", 20, seed=3)
    assert a.horizon == 6.0


def test_gmc_chain_shape():
    data = ppinfer.simulate("constant:5", 4, seed=1)
    out = ppinfer.run_gmc(data, 5, seed=2, iterations=600, burn_in=100)
    assert out["psi"].shape == (500, 5)
    assert out["alpha"].shape == (500,)
    assert 0.0 <= out["acceptance_rate"] <= 1.0
    assert np.all(out["psi"] > 0)


def test_rj_matches_exact_posterior():
    data = toy()
    freq = np.array(ppinfer.run_rj(data, 4, seed=5, iterations=60000, burn_in=5000), dtype=float)
    exact = np.array([p for _, p in ppinfer.exact_model_posterior(data, 4)])
    assert freq.sum() == 55000
    assert 0.5 * np.abs(freq / freq.sum() - exact).sum() < 0.03


def test_fit_report_schema():
    report = ppinfer.fit(toy(), method="gmc", bins=3, seed=4, iterations=400)
    assert len(report["mean"]) == 3
    assert report["replicates"] == 2
    with pytest.raises(ppinfer.Error):
        ppinfer.fit(toy(), method="nope")
