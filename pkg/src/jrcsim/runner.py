"""Monte-Carlo experiment orchestration over (multiplex, SNR) sweep points.

Each trial is fully self-contained and seeded counter-style from
(master seed, point index, trial index), so results do not depend on how
trials are spread over workers.  Within a trial the generator is consumed
in a fixed order: payload bits first, then the noise draw inside the
receive synthesizer.  Aggregation is single-threaded over the original
trial order, and every float is written via its shortest round-trip form,
which makes reruns byte-identical.

Per-sample SNR convention: the sweep's SNR point fixes the noise variance
as sigma^2 = sum_q |d_q|^2 / snr_linear, where d_q are the scatterers'
nominal composite amplitudes (explicit values, or the link-budget-derived
magnitude with unit fading).  A null SNR point keeps the scene's own
noise_variance verbatim instead.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .alloc import detection_probability
from .channel import complex_awgn, scatterer_amplitude
from .config import ScenarioConfig, config_hash
from .estim import (golay_cef_waveform, golay_range_estimate, ofdma_decode,
                    ofdma_range_doppler_angle, ofdma_refine, pmcw_decode,
                    pmcw_range_doppler, pmcw_refine, profile_peaks)
from .ofdma import build_symbol_grid, grid_capacity_bits, ofdma_pilot_mask, \
    ofdma_receive_cube, ofdma_transmit
from .perf import ambiguity_function, crlb_proxy, dmse_eff, mmse_from_rate, \
    peak_sidelobe_ratio, trace_log2
from .pmcw import PmcwConfig, payload_capacity_bits, pmcw_frame_symbols, \
    pmcw_receive_cube, pmcw_schedule
from .sigcore import CodeSequence, golay_pair
from .tensorio import write_table_csv


@dataclass(frozen=True)
class SweepPoint:
    """One cell of the sweep grid; None fields mean 'leave as configured'."""

    index: int
    mu_percent: float | None
    snr_db: float | None


@dataclass
class TrialOutcome:
    """Raw per-trial bookkeeping, one row per true scatterer when it ran."""

    point: int
    trial: int
    failed: bool = False
    message: str = ""
    true_delays: list = field(default_factory=list)
    true_dopplers: list = field(default_factory=list)
    true_angles: list = field(default_factory=list)
    est_delays: list = field(default_factory=list)
    est_dopplers: list = field(default_factory=list)
    est_angles: list = field(default_factory=list)
    ref_delays: list = field(default_factory=list)
    ref_dopplers: list = field(default_factory=list)
    ref_angles: list = field(default_factory=list)
    n_bits: int = 0
    bit_errors: int = 0


@dataclass
class PointResult:
    """Aggregates of one sweep point, as written to the CSV tables."""

    mu_percent: float
    snr_db: float | None
    n_trials: int
    n_failures: int
    example_failure: str
    rmse_delay_s: float
    rmse_doppler_hz: float
    rmse_angle_rad: float
    refined_rmse_delay_s: float
    refined_rmse_doppler_hz: float
    refined_rmse_angle_rad: float
    n_bits: int
    n_bit_errors: int
    ber: float
    psl_db: float
    p_detect: float


@dataclass
class RunReport:
    """Everything run_scenario produced, minus the bulk trial rows."""

    config_hash: str
    seed: int
    waveform: str
    points: list
    tradeoff: list
    outputs: list
    wall_clock_s: float


# ---------------------------------------------------------------------------
# Scenario plumbing shared by trials and aggregation
# ---------------------------------------------------------------------------


def build_code(config: ScenarioConfig, wavecfg: PmcwConfig) -> CodeSequence:
    """The scenario's fast-time code (shared by every trial)."""
    if config.code_kind == "mseq":
        order = int(wavecfg.code_length + 1).bit_length() - 1
        if 2 ** order - 1 != wavecfg.code_length:
            raise ValueError("code_kind 'mseq' needs code_length = 2^m - 1")
        return CodeSequence.mseq(order)
    return CodeSequence.random_binary(wavecfg.code_length, config.code_seed)


def _effective_config(config: ScenarioConfig, point: SweepPoint):
    wavecfg = config.waveform_config
    if point.mu_percent is not None and config.waveform in ("pmcw", "ofdma"):
        wavecfg = replace(wavecfg, mu_percent=point.mu_percent)
    return wavecfg


def _nominal_amplitudes(config: ScenarioConfig, wavecfg) -> np.ndarray:
    """Per-scatterer composite amplitudes with unit fading."""
    if config.waveform == "golay":
        return np.array([sc.amplitude if sc.amplitude is not None else 1.0
                         for sc in config.scene.scatterers], dtype=complex)
    geom = wavecfg.geometry
    return np.array([
        scatterer_amplitude(sc, wavecfg.carrier_hz, geom.n_tx, fading=1.0)
        for sc in config.scene.scatterers], dtype=complex)


def _noise_variance(config: ScenarioConfig, point: SweepPoint,
                    amplitudes: np.ndarray) -> float:
    if point.snr_db is None:
        return config.scene.noise_variance
    signal_power = float(np.sum(np.abs(amplitudes) ** 2))
    if signal_power == 0:
        raise ValueError("SNR sweep needs at least one nonzero scatterer")
    return signal_power / 10.0 ** (point.snr_db / 10.0)


def _true_parameters(config: ScenarioConfig, wavecfg):
    delays = np.array([sc.delay_s for sc in config.scene.scatterers])
    if config.waveform == "golay":
        dopplers = np.full(delays.size, math.nan)
        angles = np.full(delays.size, math.nan)
    else:
        dopplers = np.array([sc.resolve_doppler(wavecfg.wavelength)
                             for sc in config.scene.scatterers])
        angles = np.array([sc.angle_rad for sc in config.scene.scatterers])
    return delays, dopplers, angles


def _associate(outcome: TrialOutcome, truths, targets, scales):
    """Match every truth to its nearest detection and log both sides."""
    delays, dopplers, angles = truths
    d_scale, f_scale, a_scale = scales
    for q in range(delays.size):
        best = min(targets, key=lambda t: (
            abs(t.delay_s - delays[q]) / d_scale
            + (0.0 if math.isnan(dopplers[q])
               else abs(t.doppler_hz - dopplers[q]) / f_scale)
            + (0.0 if math.isnan(angles[q])
               else abs(t.angle_rad - angles[q]) / a_scale)))
        outcome.true_delays.append(float(delays[q]))
        outcome.true_dopplers.append(float(dopplers[q]))
        outcome.true_angles.append(float(angles[q]))
        outcome.est_delays.append(float(best.delay_s))
        outcome.est_dopplers.append(float(best.doppler_hz))
        outcome.est_angles.append(float(best.angle_rad))


def _log_refined(outcome: TrialOutcome, truths, targets, scales):
    delays, dopplers, angles = truths
    d_scale, f_scale, a_scale = scales
    for q in range(delays.size):
        best = min(targets, key=lambda t: (
            abs(t.delay_s - delays[q]) / d_scale
            + (0.0 if math.isnan(dopplers[q])
               else abs(t.doppler_hz - dopplers[q]) / f_scale)
            + (0.0 if math.isnan(angles[q])
               else abs(t.angle_rad - angles[q]) / a_scale)))
        outcome.ref_delays.append(float(best.delay_s))
        outcome.ref_dopplers.append(float(best.doppler_hz))
        outcome.ref_angles.append(float(best.angle_rad))


def _pmcw_trial(config, wavecfg, point, trial, outcome, rng):
    sched = pmcw_schedule(wavecfg)
    code = build_code(config, wavecfg)
    capacity = payload_capacity_bits(sched, config.symbol_order)
    payload = rng.integers(0, 2, capacity).astype(np.int64)
    symbols = pmcw_frame_symbols(sched, payload, config.symbol_order)

    amps = _nominal_amplitudes(config, wavecfg)
    scene = replace(config.scene,
                    noise_variance=_noise_variance(config, point, amps))
    cube = pmcw_receive_cube(scene, wavecfg, code, symbols, rng=rng,
                             cpi_index=trial)
    coarse = pmcw_range_doppler(cube, code, config.estimator)
    bits_hat, _, full_symbols = pmcw_decode(cube, code, coarse.targets,
                                            config.symbol_order)
    refined = pmcw_refine(cube, code, full_symbols,
                          config.estimator.refined(config.refine_factor))

    truths = _true_parameters(config, wavecfg)
    scales = (wavecfg.chip_time,
              1.0 / (wavecfg.n_frames * wavecfg.block_time),
              1.0 / max(wavecfg.geometry.n_rx, 1))
    _associate(outcome, truths, coarse.targets, scales)
    _log_refined(outcome, truths, refined.targets, scales)
    outcome.n_bits = int(payload.size)
    outcome.bit_errors = int(np.sum(bits_hat != payload))


def _ofdma_trial(config, wavecfg, point, trial, outcome, rng):
    capacity = grid_capacity_bits(wavecfg, config.symbol_order)
    payload = rng.integers(0, 2, capacity).astype(np.int64)
    grid = build_symbol_grid(wavecfg, payload, config.symbol_order)

    amps = _nominal_amplitudes(config, wavecfg)
    scene = replace(config.scene,
                    noise_variance=_noise_variance(config, point, amps))
    cube = ofdma_receive_cube(scene, wavecfg, grid, rng=rng, cpi_index=trial)
    coarse = ofdma_range_doppler_angle(cube, grid, config.estimator)
    bits_hat, _, full_symbols = ofdma_decode(cube, grid, coarse.targets)
    refined = ofdma_refine(cube, full_symbols,
                           config.estimator.refined(config.refine_factor))

    truths = _true_parameters(config, wavecfg)
    scales = (wavecfg.sample_time,
              1.0 / (wavecfg.n_symbols * wavecfg.symbol_duration),
              1.0 / max(wavecfg.geometry.n_rx, 1))
    _associate(outcome, truths, coarse.targets, scales)
    _log_refined(outcome, truths, refined.targets, scales)
    outcome.n_bits = int(payload.size)
    outcome.bit_errors = int(np.sum(bits_hat != payload))


def _golay_received(config, wavecfg, amplitudes, noise_variance, rng):
    pair = golay_pair(wavecfg.log2_length)
    cef = golay_cef_waveform(pair, wavecfg.guard_samples)
    rx = np.zeros(cef.size, dtype=complex)
    for sc, amp in zip(config.scene.scatterers, amplitudes):
        shift = int(round(sc.delay_s / wavecfg.sample_time_s))
        if not 0 <= shift < wavecfg.guard_samples:
            raise ValueError("path delay must fall inside the guard window")
        rx[shift:] += amp * cef[:cef.size - shift]
    if noise_variance > 0:
        rx += complex_awgn(rng, rx.shape, noise_variance)
    return pair, rx


def _golay_trial(config, wavecfg, point, trial, outcome, rng):
    amps = _nominal_amplitudes(config, wavecfg)
    sigma2 = _noise_variance(config, point, amps)
    pair, rx = _golay_received(config, wavecfg, amps, sigma2, rng)
    profile = golay_range_estimate(rx, pair, wavecfg.guard_samples)
    bins = profile_peaks(np.abs(profile), config.estimator.max_targets,
                         config.estimator.threshold_db)
    if not bins:
        raise ValueError("no delay profile peak above threshold")

    delays = np.array([sc.delay_s for sc in config.scene.scatterers])
    for q in range(delays.size):
        best = min(bins, key=lambda b: abs(b * wavecfg.sample_time_s
                                           - delays[q]))
        outcome.true_delays.append(float(delays[q]))
        outcome.true_dopplers.append(math.nan)
        outcome.true_angles.append(math.nan)
        outcome.est_delays.append(best * wavecfg.sample_time_s)
        outcome.est_dopplers.append(math.nan)
        outcome.est_angles.append(math.nan)
    outcome.ref_delays = list(outcome.est_delays)
    outcome.ref_dopplers = list(outcome.est_dopplers)
    outcome.ref_angles = list(outcome.est_angles)


_TRIAL_FNS = {"pmcw": _pmcw_trial, "ofdma": _ofdma_trial,
              "golay": _golay_trial}


def _run_single_trial(args) -> TrialOutcome:
    """Worker entry point; must stay module-level for process pools."""
    config, point, trial = args
    outcome = TrialOutcome(point=point.index, trial=trial)
    rng = np.random.default_rng([config.seed, point.index, trial])
    try:
        wavecfg = _effective_config(config, point)
        _TRIAL_FNS[config.waveform](config, wavecfg, point, trial,
                                    outcome, rng)
    except Exception as exc:
        outcome.failed = True
        outcome.message = f"{type(exc).__name__}: {exc}"
        outcome.true_delays = []
        outcome.true_dopplers = []
        outcome.true_angles = []
        outcome.est_delays = []
        outcome.est_dopplers = []
        outcome.est_angles = []
        outcome.ref_delays = []
        outcome.ref_dopplers = []
        outcome.ref_angles = []
        outcome.n_bits = 0
        outcome.bit_errors = 0
    return outcome


# ---------------------------------------------------------------------------
# Point-level extras: waveform PSL and model detection probability
# ---------------------------------------------------------------------------


def _point_waveform_samples(config: ScenarioConfig, wavecfg,
                            point: SweepPoint) -> np.ndarray:
    """Trial-0 transmit samples of this sweep point (payload included)."""
    rng = np.random.default_rng([config.seed, point.index, 0])
    if config.waveform == "pmcw":
        sched = pmcw_schedule(wavecfg)
        code = build_code(config, wavecfg)
        payload = rng.integers(
            0, 2, payload_capacity_bits(sched, config.symbol_order))
        symbols = pmcw_frame_symbols(sched, payload.astype(np.int64),
                                     config.symbol_order)
        return (symbols[:, None] * code.chips()[None, :]).ravel()
    if config.waveform == "ofdma":
        payload = rng.integers(
            0, 2, grid_capacity_bits(wavecfg, config.symbol_order))
        grid = build_symbol_grid(wavecfg, payload.astype(np.int64),
                                 config.symbol_order)
        return ofdma_transmit(wavecfg, grid)[0].ravel()
    pair = golay_pair(wavecfg.log2_length)
    return golay_cef_waveform(pair, wavecfg.guard_samples).astype(complex)


def _point_psl_db(config: ScenarioConfig, wavecfg,
                  point: SweepPoint) -> float:
    samples = _point_waveform_samples(config, wavecfg, point)
    lags = np.arange(-(samples.size - 1), samples.size, dtype=float)
    try:
        surface = ambiguity_function(samples, lags, np.zeros(1))
        return peak_sidelobe_ratio(surface.magnitude[:, 0])
    except ValueError:
        return math.nan


def _integration_gain(config: ScenarioConfig, wavecfg) -> float:
    if config.waveform == "pmcw":
        sched = pmcw_schedule(wavecfg)
        return wavecfg.code_length * max(sched.n_radar, 1)
    if config.waveform == "ofdma":
        radar_rows = int(np.count_nonzero(ofdma_pilot_mask(wavecfg)))
        return max(radar_rows, 1) * wavecfg.n_symbols
    return 2.0 * 2 ** wavecfg.log2_length


def _point_p_detect(config: ScenarioConfig, wavecfg, point: SweepPoint,
                    amplitudes: np.ndarray) -> float:
    """Detection probability of the closed-form detector model.

    Uses the coherent integration gain over the radar-only resources on
    top of the per-sample SNR; noiseless points saturate to 1.
    """
    if amplitudes.size == 0:
        return math.nan
    sigma2 = _noise_variance(config, point, amplitudes)
    if sigma2 == 0:
        return 1.0
    snr = float(np.sum(np.abs(amplitudes) ** 2)) / sigma2
    return detection_probability(snr * _integration_gain(config, wavecfg),
                                 config.false_alarm)


def scenario_waveform_samples(config: ScenarioConfig):
    """(samples, sample_rate_hz) of the scenario's trial-0 waveform.

    This is what the ambiguity-surface export runs on; the payload is the
    seed-derived trial-0 draw so reruns produce identical files.
    """
    point = SweepPoint(index=0, mu_percent=None, snr_db=None)
    wavecfg = config.waveform_config
    samples = _point_waveform_samples(config, wavecfg, point)
    if config.waveform == "pmcw":
        rate = 1.0 / wavecfg.chip_time
    elif config.waveform == "ofdma":
        rate = 1.0 / wavecfg.sample_time
    else:
        rate = 1.0 / wavecfg.sample_time_s
    return samples, rate


# ---------------------------------------------------------------------------
# Trade-off bookkeeping (weight sweep)
# ---------------------------------------------------------------------------


def _comm_fraction(config: ScenarioConfig, wavecfg) -> float:
    if config.waveform == "pmcw":
        sched = pmcw_schedule(wavecfg)
        return (sched.n_frames - sched.n_radar) / sched.n_frames
    if config.waveform == "ofdma":
        return float(np.mean(~ofdma_pilot_mask(wavecfg)))
    return 0.0


def _crlb_model(config: ScenarioConfig, wavecfg):
    """Continuous-parameter noiseless response for the Fisher proxy."""
    if config.waveform == "pmcw":
        code = build_code(config, wavecfg)
        spectrum = np.fft.fft(code.chips())
        freqs = np.fft.fftfreq(wavecfg.code_length,
                               d=1.0 / wavecfg.code_length)
        l_idx = np.arange(wavecfg.code_length)
        m_idx = np.arange(wavecfg.n_frames)
        p_idx = np.arange(wavecfg.geometry.n_rx)

        def model(theta):
            tau, doppler, angle = theta
            frac = tau / wavecfg.chip_time
            shifted = np.fft.ifft(
                spectrum * np.exp(-2j * np.pi * freqs * frac
                                  / wavecfg.code_length))
            slow = np.exp(-2j * np.pi * doppler * m_idx * wavecfg.block_time)
            fast = np.exp(-2j * np.pi * doppler * l_idx * wavecfg.chip_time)
            steer = np.exp(-2j * np.pi * wavecfg.geometry.spacing_over_lambda
                           * np.sin(angle) * p_idx)
            block = slow[:, None] * (fast * shifted)[None, :]
            return block[:, :, None] * steer[None, None, :]

        return model
    n_idx = np.arange(wavecfg.n_subcarriers)
    m_idx = np.arange(wavecfg.n_symbols)
    p_idx = np.arange(wavecfg.geometry.n_rx)

    def model(theta):
        tau, doppler, angle = theta
        phase_n = np.exp(-2j * np.pi * n_idx
                         * wavecfg.subcarrier_spacing_hz * tau)
        phase_m = np.exp(2j * np.pi * m_idx * wavecfg.symbol_duration
                         * doppler)
        steer = np.exp(2j * np.pi * wavecfg.geometry.spacing_over_lambda
                       * np.sin(angle) * p_idx)
        return (phase_n[:, None] * phase_m[None, :])[:, :, None] \
            * steer[None, None, :]

    return model


def _tradeoff_rows(config: ScenarioConfig, wavecfg, point: SweepPoint,
                   mu_value: float, amplitudes: np.ndarray) -> list:
    """One (objective) row per sweep weight, where the terms are defined."""
    if not config.weights or config.waveform == "golay":
        return []
    delta = _comm_fraction(config, wavecfg)
    if delta == 0 or not config.scene.scatterers:
        return []
    sigma2 = _noise_variance(config, point, amplitudes)
    if sigma2 == 0:
        return []
    rate = math.log2(config.symbol_order)
    n_len = (wavecfg.code_length if config.waveform == "pmcw"
             else wavecfg.n_subcarriers)
    mmse = mmse_from_rate(rate, n_len)
    comm_term = trace_log2(dmse_eff(mmse, delta)) / n_len

    sc = config.scene.scatterers[0]
    doppler = sc.resolve_doppler(wavecfg.wavelength)
    theta = np.array([sc.delay_s, doppler, sc.angle_rad])
    if config.waveform == "pmcw":
        steps = np.array([wavecfg.chip_time / 64,
                          1.0 / (64 * wavecfg.n_frames * wavecfg.block_time),
                          1e-3])
    else:
        steps = np.array([wavecfg.sample_time / 64,
                          1.0 / (64 * wavecfg.n_symbols
                                 * wavecfg.symbol_duration),
                          1e-3])
    amp0 = abs(amplitudes[0]) if amplitudes.size else 1.0
    model = _crlb_model(config, wavecfg)
    crlb = crlb_proxy(lambda th: amp0 * model(th), theta, sigma2, steps)
    radar_term = trace_log2(crlb) / max(len(config.scene.scatterers), 1)

    rows = []
    for w in config.weights:
        objective = w * comm_term + (1.0 - w) * radar_term
        rows.append([mu_value, _snr_field(point.snr_db), w, delta, rate,
                     objective])
    return rows


# ---------------------------------------------------------------------------
# Aggregation and file output
# ---------------------------------------------------------------------------


def _safe_rmse(est: list, true: list) -> float:
    if not est:
        return math.nan
    e = np.asarray(est)
    t = np.asarray(true)
    keep = ~(np.isnan(e) | np.isnan(t))
    if not keep.any():
        return math.nan
    return float(np.sqrt(np.mean((e[keep] - t[keep]) ** 2)))


def _snr_field(snr_db) -> float:
    return math.nan if snr_db is None else float(snr_db)


def _aggregate_point(config: ScenarioConfig, point: SweepPoint,
                     outcomes: list) -> PointResult:
    wavecfg = _effective_config(config, point)
    mu_value = getattr(wavecfg, "mu_percent", 0.0)
    amps = _nominal_amplitudes(config, wavecfg)

    ok = [o for o in outcomes if not o.failed]
    failures = [o for o in outcomes if o.failed]

    def gather(name):
        return [v for o in ok for v in getattr(o, name)]

    n_bits = sum(o.n_bits for o in ok)
    n_errors = sum(o.bit_errors for o in ok)
    return PointResult(
        mu_percent=float(mu_value),
        snr_db=point.snr_db,
        n_trials=len(outcomes),
        n_failures=len(failures),
        example_failure=failures[0].message if failures else "",
        rmse_delay_s=_safe_rmse(gather("est_delays"), gather("true_delays")),
        rmse_doppler_hz=_safe_rmse(gather("est_dopplers"),
                                   gather("true_dopplers")),
        rmse_angle_rad=_safe_rmse(gather("est_angles"),
                                  gather("true_angles")),
        refined_rmse_delay_s=_safe_rmse(gather("ref_delays"),
                                        gather("true_delays")),
        refined_rmse_doppler_hz=_safe_rmse(gather("ref_dopplers"),
                                           gather("true_dopplers")),
        refined_rmse_angle_rad=_safe_rmse(gather("ref_angles"),
                                          gather("true_angles")),
        n_bits=n_bits,
        n_bit_errors=n_errors,
        ber=(n_errors / n_bits) if n_bits else math.nan,
        psl_db=_point_psl_db(config, wavecfg, point),
        p_detect=_point_p_detect(config, wavecfg, point, amps),
    )


def _write_outputs(out_dir: Path, config: ScenarioConfig, results: list,
                   outcomes_by_point: list, tradeoff_rows: list) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    rmse_path = out_dir / "rmse_vs_snr.csv"
    write_table_csv(rmse_path, [
        "mu_percent", "snr_db", "n_trials", "n_failures",
        "rmse_delay_s", "rmse_doppler_hz", "rmse_angle_rad",
        "refined_rmse_delay_s", "refined_rmse_doppler_hz",
        "refined_rmse_angle_rad"],
        [[r.mu_percent, _snr_field(r.snr_db), r.n_trials, r.n_failures,
          r.rmse_delay_s, r.rmse_doppler_hz, r.rmse_angle_rad,
          r.refined_rmse_delay_s, r.refined_rmse_doppler_hz,
          r.refined_rmse_angle_rad] for r in results])
    outputs.append(rmse_path.name)

    ber_path = out_dir / "ber_vs_snr.csv"
    write_table_csv(ber_path, [
        "mu_percent", "snr_db", "n_trials", "n_bits", "n_bit_errors", "ber"],
        [[r.mu_percent, _snr_field(r.snr_db), r.n_trials, r.n_bits,
          r.n_bit_errors, r.ber] for r in results])
    outputs.append(ber_path.name)

    est_path = out_dir / "estimates.csv"
    rows = []
    for result, outcomes in zip(results, outcomes_by_point):
        for o in outcomes:
            if o.failed:
                continue
            trial_ber = (o.bit_errors / o.n_bits) if o.n_bits else math.nan
            for q in range(len(o.true_delays)):
                rows.append([
                    result.mu_percent, _snr_field(result.snr_db), o.trial, q,
                    o.true_delays[q], o.est_delays[q], o.ref_delays[q],
                    o.true_dopplers[q], o.est_dopplers[q], o.ref_dopplers[q],
                    o.true_angles[q], o.est_angles[q], o.ref_angles[q],
                    trial_ber])
    write_table_csv(est_path, [
        "mu_percent", "snr_db", "trial", "scatterer",
        "true_delay_s", "est_delay_s", "refined_delay_s",
        "true_doppler_hz", "est_doppler_hz", "refined_doppler_hz",
        "true_angle_rad", "est_angle_rad", "refined_angle_rad", "ber"], rows)
    outputs.append(est_path.name)

    if tradeoff_rows:
        tr_path = out_dir / "tradeoff.csv"
        write_table_csv(tr_path, [
            "mu_percent", "snr_db", "weight", "comm_fraction",
            "rate_bits", "objective"], tradeoff_rows)
        outputs.append(tr_path.name)
    return outputs


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def run_scenario(config: ScenarioConfig, *, out_dir=None,
                 workers: int = 1) -> RunReport:
    """Execute the sweep, write the output tables, return the report.

    ``workers`` > 1 fans trials out to a process pool; aggregates are
    identical for any worker count because trials are seeded by index.
    """
    started = time.time()
    destination = Path(out_dir) if out_dir is not None else Path(config.out_dir)

    mus = config.mu_sweep if config.mu_sweep else (None,)
    points = [SweepPoint(index=i, mu_percent=mu, snr_db=snr)
              for i, (mu, snr) in enumerate(
                  (m, s) for m in mus for s in config.snr_db)]

    if config.waveform == "pmcw":
        build_code(config, config.pmcw)

    outcomes_by_point = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for point in points:
                tasks = [(config, point, t) for t in range(config.trials)]
                chunk = max(1, config.trials // (4 * workers))
                outcomes_by_point.append(
                    list(pool.map(_run_single_trial, tasks, chunksize=chunk)))
    else:
        for point in points:
            outcomes_by_point.append(
                [_run_single_trial((config, point, t))
                 for t in range(config.trials)])

    results = [_aggregate_point(config, point, outcomes)
               for point, outcomes in zip(points, outcomes_by_point)]

    tradeoff_rows = []
    for point, result in zip(points, results):
        wavecfg = _effective_config(config, point)
        amps = _nominal_amplitudes(config, wavecfg)
        tradeoff_rows.extend(
            _tradeoff_rows(config, wavecfg, point, result.mu_percent, amps))

    outputs = _write_outputs(destination, config, results,
                             outcomes_by_point, tradeoff_rows)

    report = RunReport(
        config_hash=config_hash(config),
        seed=config.seed,
        waveform=config.waveform,
        points=results,
        tradeoff=tradeoff_rows,
        outputs=outputs,
        wall_clock_s=time.time() - started)

    report_path = Path(destination) / "report.json"
    payload = {
        "config_hash": report.config_hash,
        "seed": report.seed,
        "waveform": report.waveform,
        "wall_clock_s": report.wall_clock_s,
        "outputs": report.outputs,
        "points": [
            {k: _json_safe(v) for k, v in vars(r).items()}
            for r in report.points],
        "tradeoff": [[_json_safe(v) for v in row]
                     for row in report.tradeoff],
    }
    with open(report_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    report.outputs.append(report_path.name)
    return report
