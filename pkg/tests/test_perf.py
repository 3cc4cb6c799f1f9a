"""Ambiguity surfaces, error metrics, and the rate/distortion trade-off.

The ambiguity function is checked against a direct double-sum oracle; the
distortion identity is exercised as a property over random rate/duty/size
triples.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrcsim.perf import (AfSurface, TradeoffSpec, ambiguity_function, ber,
                         check_rate_identity, crlb_proxy, default_af_grids,
                         dmse_eff, jrc_objective, mmse_from_rate,
                         peak_sidelobe_ratio, rmse, trace_log2, write_af_csv,
                         write_af_tensor, write_cut_csv)
from jrcsim.sigcore import aperiodic_autocorr
from jrcsim.tensorio import read_csv_rows, read_tensor

BARKER_13 = np.array([1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1], dtype=float)


def af_oracle(x, lags, dopplers, fs):
    """Direct double-sum ambiguity magnitude, normalized by energy."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    energy = np.sum(np.abs(x) ** 2)
    out = np.zeros((len(lags), len(dopplers)))
    for i, d in enumerate(lags):
        for j, nu in enumerate(dopplers):
            acc = 0.0 + 0.0j
            for k in range(n):
                if 0 <= k + d < n:
                    acc += x[k + d] * np.conj(x[k]) * np.exp(
                        2j * np.pi * nu * k / fs)
            out[i, j] = abs(acc)
    return out / energy


# ---------------------------------------------------------------------------
# Ambiguity function
# ---------------------------------------------------------------------------


def test_af_matches_double_sum_oracle():
    rng = np.random.default_rng(3)
    x = rng.normal(size=18) + 1j * rng.normal(size=18)
    fs = 2e9
    lags = np.arange(-17, 18)
    delays = lags / fs
    dopplers = np.linspace(-fs / 18, fs / 18, 9)
    surface = ambiguity_function(x, delays, dopplers, fs)
    expected = af_oracle(x, lags, dopplers, fs)
    assert np.max(np.abs(surface.magnitude - expected)) < 1e-10


def test_af_origin_is_one():
    rng = np.random.default_rng(4)
    x = rng.normal(size=64) + 1j * rng.normal(size=64)
    surface = ambiguity_function(x, [0.0], [0.0])
    assert abs(surface.magnitude[0, 0] - 1.0) < 1e-12


def test_af_zero_doppler_cut_is_normalized_autocorr():
    rng = np.random.default_rng(5)
    x = (1 - 2 * rng.integers(0, 2, size=32)).astype(float)
    delays, dopplers = default_af_grids(32, 1.0, n_doppler=3)
    surface = ambiguity_function(x, delays, dopplers, 1.0)
    _, cut = surface.zero_doppler_cut()
    expected = np.abs(aperiodic_autocorr(x)) / 32
    assert np.allclose(cut, expected, atol=1e-12)


def test_af_rectangular_pulse_triangle():
    n = 16
    x = np.ones(n)
    delays = np.arange(-(n - 1), n) / 1.0
    surface = ambiguity_function(x, delays, [0.0], 1.0)
    lags = np.arange(-(n - 1), n)
    assert np.allclose(surface.magnitude[:, 0], (n - np.abs(lags)) / n,
                       atol=1e-12)


def test_af_symmetry_under_joint_negation():
    rng = np.random.default_rng(6)
    x = rng.normal(size=20) + 1j * rng.normal(size=20)
    delays, dopplers = default_af_grids(20, 1.0, n_doppler=11)
    mag = ambiguity_function(x, delays, dopplers, 1.0).magnitude
    assert np.allclose(mag, mag[::-1, ::-1], atol=1e-10)


def test_af_single_tone_doppler_null():
    n = 25
    x = np.exp(2j * np.pi * 0.12 * np.arange(n))
    surface = ambiguity_function(x, [0.0], [0.0, 1.0 / n, 2.0 / n], 1.0)
    assert surface.magnitude[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert surface.magnitude[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert surface.magnitude[0, 2] == pytest.approx(0.0, abs=1e-12)


def test_af_lag_beyond_waveform_is_zero():
    x = np.ones(4)
    surface = ambiguity_function(x, [-6.0, 6.0], [0.0], 1.0)
    assert np.all(surface.magnitude == 0.0)


def test_af_rejects_off_sample_delays():
    with pytest.raises(ValueError):
        ambiguity_function(np.ones(8), [0.4], [0.0], 1.0)


def test_af_rejects_empty_or_silent_waveform():
    with pytest.raises(ValueError):
        ambiguity_function([], [0.0], [0.0])
    with pytest.raises(ValueError):
        ambiguity_function(np.zeros(8), [0.0], [0.0])


def test_af_surface_validation():
    with pytest.raises(ValueError):
        AfSurface(delays_s=np.arange(3.0), dopplers_hz=np.arange(2.0),
                  magnitude=np.zeros((2, 3)))
    with pytest.raises(ValueError):
        AfSurface(delays_s=np.array([0.0, 0.0]), dopplers_hz=np.array([0.0]),
                  magnitude=np.zeros((2, 1)))


def test_af_cuts_pick_grid_point_nearest_zero():
    mag = np.arange(12.0).reshape(4, 3)
    surface = AfSurface(delays_s=np.array([-3.0, -1.0, 2.0, 5.0]),
                        dopplers_hz=np.array([-2.0, 0.5, 3.0]),
                        magnitude=mag)
    dopplers, row = surface.zero_delay_cut()
    assert np.array_equal(row, mag[1])
    delays, col = surface.zero_doppler_cut()
    assert np.array_equal(col, mag[:, 1])


def test_default_af_grids():
    delays, dopplers = default_af_grids(32, 4e9)
    assert delays.size == 63
    assert delays[0] == -31 / 4e9 and delays[-1] == 31 / 4e9
    assert dopplers.size == 65
    assert dopplers[0] == pytest.approx(-4e9 / 64)
    assert dopplers[-1] == pytest.approx(4e9 / 64)
    short, _ = default_af_grids(32, 4e9, max_lag=5)
    assert short.size == 11


# ---------------------------------------------------------------------------
# Peak sidelobe ratio
# ---------------------------------------------------------------------------


def test_psl_barker_13():
    delays, _ = default_af_grids(13, 1.0)
    surface = ambiguity_function(BARKER_13, delays, [0.0], 1.0)
    _, cut = surface.zero_doppler_cut()
    assert peak_sidelobe_ratio(cut) == pytest.approx(-22.3, abs=0.1)


def test_psl_triangle_has_no_sidelobes():
    cut = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 0.75, 0.5, 0.25, 0.0])
    assert peak_sidelobe_ratio(cut) == -np.inf


def test_psl_hand_built_cut():
    cut = np.array([0.1, 0.2, 1.0, 0.5, 0.4, 0.45])
    assert peak_sidelobe_ratio(cut) == pytest.approx(20 * np.log10(0.45),
                                                     abs=1e-12)


def test_psl_monotone_ramp_is_all_mainlobe():
    assert peak_sidelobe_ratio(np.linspace(0.1, 1.0, 10)) == -np.inf


def test_psl_validation():
    with pytest.raises(ValueError):
        peak_sidelobe_ratio([1.0, 0.5])
    with pytest.raises(ValueError):
        peak_sidelobe_ratio([1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        peak_sidelobe_ratio(np.zeros(5))


# ---------------------------------------------------------------------------
# Error metrics
# ---------------------------------------------------------------------------


def test_rmse_hand_values():
    assert rmse([1.0, 2.0, 3.0], [1.0, 1.0, 5.0]) == pytest.approx(
        np.sqrt(5.0 / 3.0))
    assert rmse([1j], [0.0]) == pytest.approx(1.0)
    assert rmse([2.0], [2.0]) == 0.0


def test_ber_hand_values():
    assert ber([0, 1, 1, 0], [0, 1, 0, 0]) == 0.25
    assert ber([1, 1], [1, 1]) == 0.0


def test_metric_validation():
    with pytest.raises(ValueError):
        rmse([], [])
    with pytest.raises(ValueError):
        rmse([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        ber([0], [0, 1])


# ---------------------------------------------------------------------------
# Distortion-MMSE identity and trade-off objective
# ---------------------------------------------------------------------------


def test_trace_log2_forms():
    assert trace_log2(8.0) == pytest.approx(3.0)
    assert trace_log2([2.0, 4.0]) == pytest.approx(3.0)
    assert trace_log2(np.diag([2.0, 4.0, 8.0])) == pytest.approx(6.0)


def test_trace_log2_general_symmetric_matrix():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    w = rng.uniform(0.1, 2.0, size=5)
    a = (q * w) @ q.T
    assert trace_log2(a) == pytest.approx(np.sum(np.log2(w)), abs=1e-10)


def test_trace_log2_validation():
    with pytest.raises(ValueError):
        trace_log2(-1.0)
    with pytest.raises(ValueError):
        trace_log2(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        trace_log2(np.zeros((2, 2, 2)))


def test_mmse_from_rate():
    m = mmse_from_rate(2.0, 4)
    assert np.allclose(m, 0.25)
    assert check_rate_identity(m, 2.0) == 0.0
    with pytest.raises(ValueError):
        mmse_from_rate(-1.0)
    with pytest.raises(ValueError):
        mmse_from_rate(1.0, 0)


def test_dmse_eff_scalar_vector_matrix():
    assert dmse_eff(0.25, 0.5) == pytest.approx(0.5)
    assert np.allclose(dmse_eff(np.array([0.25, 0.0625]), 0.5), [0.5, 0.25])
    out = dmse_eff(np.diag([0.25, 0.0625]), 0.5)
    assert np.allclose(out, np.diag([0.5, 0.25]), atol=1e-12)
    with pytest.raises(ValueError):
        dmse_eff(0.25, 0.0)
    with pytest.raises(ValueError):
        dmse_eff(0.25, 1.5)


def test_dmse_eff_matrix_powers_eigenvalues():
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    w = rng.uniform(0.05, 1.0, size=4)
    a = (q * w) @ q.T
    out = dmse_eff(a, 0.3)
    got = np.sort(np.linalg.eigvalsh(out))
    assert np.allclose(got, np.sort(w ** 0.3), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(rate=st.floats(0.0, 12.0), delta=st.floats(0.01, 1.0),
       n=st.integers(1, 64))
def test_distortion_identity_property(rate, delta, n):
    mmse = mmse_from_rate(rate, n)
    eff = dmse_eff(mmse, delta)
    residual = abs(trace_log2(eff) / n + delta * rate)
    assert residual <= 1e-12


def test_rate_identity_matrix_form():
    rng = np.random.default_rng(9)
    rates = rng.uniform(0.0, 8.0, size=6)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    a = (q * 2.0 ** (-rates)) @ q.T
    assert check_rate_identity(a, float(np.mean(rates))) < 1e-9


def test_check_rate_identity_nonzero_residual():
    assert check_rate_identity(np.array([0.5]), 2.0) == pytest.approx(1.0)


def test_tradeoff_spec_validation():
    good = dict(rate=4.0, delta=0.5, code_length=16,
                mmse=mmse_from_rate(4.0, 16), crlb=np.diag([1.0]),
                n_targets=1, weight=0.5)
    TradeoffSpec(**good)
    for bad in (dict(delta=0.0), dict(weight=1.5), dict(code_length=0),
                dict(n_targets=-1), dict(bandwidth_hz=0.0)):
        with pytest.raises(ValueError):
            TradeoffSpec(**{**good, **bad})


def test_effective_rate():
    spec = TradeoffSpec(rate=6.0, delta=0.5, code_length=8,
                        mmse=mmse_from_rate(6.0, 8), crlb=np.diag([1.0]),
                        n_targets=1, weight=1.0)
    assert spec.effective_rate == 3.0


def test_jrc_objective_pure_comm_equals_negative_effective_rate():
    spec = TradeoffSpec(rate=5.0, delta=0.4, code_length=32,
                        mmse=mmse_from_rate(5.0, 32), crlb=np.diag([1.0]),
                        n_targets=0, weight=1.0)
    assert jrc_objective(spec) == pytest.approx(-2.0, abs=1e-12)


def test_jrc_objective_affine_in_weight():
    crlb = np.diag([1e-18, 1e4, 1e-2])
    base = dict(rate=4.0, delta=0.5, code_length=16,
                mmse=mmse_from_rate(4.0, 16), crlb=crlb, n_targets=3)
    at = {w: jrc_objective(TradeoffSpec(weight=w, **base))
          for w in (0.0, 0.25, 0.5, 0.75, 1.0)}
    for w in (0.25, 0.5, 0.75):
        blended = w * at[1.0] + (1 - w) * at[0.0]
        assert abs(at[w] - blended) <= 1e-12


def test_jrc_objective_radar_term_requires_targets():
    spec = TradeoffSpec(rate=4.0, delta=0.5, code_length=16,
                        mmse=mmse_from_rate(4.0, 16), crlb=np.diag([1.0]),
                        n_targets=0, weight=0.5)
    with pytest.raises(ValueError):
        jrc_objective(spec)


# ---------------------------------------------------------------------------
# Observed-information proxy
# ---------------------------------------------------------------------------


def test_crlb_proxy_tone_frequency():
    n = 64
    amp = 1.3
    sigma2 = 0.5
    t = np.arange(n)

    def model(theta):
        return amp * np.exp(2j * np.pi * theta[0] * t)

    bound = crlb_proxy(model, [0.1], sigma2, steps=[1e-7])
    expected = sigma2 / (2 * amp ** 2 * (2 * np.pi) ** 2 * np.sum(t ** 2))
    assert bound[0, 0] == pytest.approx(expected, rel=1e-4)


def test_crlb_proxy_joint_amplitude_frequency():
    n = 32
    sigma2 = 0.25
    t = np.arange(n)

    def model(theta):
        return theta[0] * np.exp(2j * np.pi * theta[1] * t)

    bound = crlb_proxy(model, [0.8, 0.07], sigma2, steps=[1e-6, 1e-8])
    fim = np.diag([2 * n / sigma2,
                   2 * 0.8 ** 2 * (2 * np.pi) ** 2 * np.sum(t ** 2) / sigma2])
    expected = np.linalg.inv(fim)
    assert bound[0, 0] == pytest.approx(expected[0, 0], rel=1e-3)
    assert bound[1, 1] == pytest.approx(expected[1, 1], rel=1e-3)
    assert abs(bound[0, 1]) < 1e-6 * np.sqrt(bound[0, 0] * bound[1, 1])


def test_crlb_proxy_validation():
    def model(theta):
        return np.exp(2j * np.pi * theta[0] * np.arange(8))

    with pytest.raises(ValueError):
        crlb_proxy(model, [0.1], 0.0)
    with pytest.raises(ValueError):
        crlb_proxy(model, [0.1], 1.0, steps=[1e-6, 1e-6])
    with pytest.raises(ValueError):
        crlb_proxy(model, [0.1], 1.0, steps=[-1e-6])


# ---------------------------------------------------------------------------
# Export helpers
# ---------------------------------------------------------------------------


def test_write_af_csv_round_trip(tmp_path):
    surface = AfSurface(delays_s=np.array([-1.0, 0.0, 1.0]),
                        dopplers_hz=np.array([-0.5, 0.5]),
                        magnitude=np.array([[0.1, 0.2], [1.0, 0.9],
                                            [0.3, 0.4]]))
    path = tmp_path / "af.csv"
    write_af_csv(path, surface)
    header, rows = read_csv_rows(path)
    assert header == ["delay_s", "doppler_-0.5", "doppler_0.5"]
    assert len(rows) == 3
    got = np.array([[float(c) for c in row] for row in rows])
    assert np.array_equal(got[:, 0], surface.delays_s)
    assert np.array_equal(got[:, 1:], surface.magnitude)


def test_write_af_tensor_round_trip(tmp_path):
    surface = AfSurface(delays_s=np.array([0.0, 1.0]),
                        dopplers_hz=np.array([0.0]),
                        magnitude=np.array([[1.0], [0.25]]))
    path = tmp_path / "af.jrct"
    write_af_tensor(path, surface)
    back = read_tensor(path)
    assert np.array_equal(back, surface.magnitude.astype(complex))


def test_write_cut_csv(tmp_path):
    path = tmp_path / "cut.csv"
    write_cut_csv(path, [0.0, 1.0, 2.0], [1.0, 0.5, 0.25], "delay_s")
    header, rows = read_csv_rows(path)
    assert header == ["delay_s", "magnitude"]
    assert [float(r[1]) for r in rows] == [1.0, 0.5, 0.25]
    with pytest.raises(ValueError):
        write_cut_csv(path, [0.0, 1.0], [1.0], "delay_s")
