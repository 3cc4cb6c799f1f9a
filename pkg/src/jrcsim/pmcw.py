"""Phase-modulated continuous-wave transmit/receive modeling.

A CPI holds M frames of the same L-chip phase code; each frame is scaled by
one slow-time DPSK symbol a_m.  A leading block of frames is reserved for
radar-only operation (known symbols), the remainder carries data.  The
receive data cube stacks the per-antenna M x L frame matrices; each
scatterer contributes

    d_q * Diag(a) [ (b_q ⊙ P_{k_q} s)^T ⊗ e_q ] * c_q^(p-1)

with e_q, b_q the slow/fast-time Doppler phasors (negative-exponent
baseband convention), P_k the cyclic delay by k chips and c_q the receive
steering phasor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import SPEED_OF_LIGHT, Scene, complex_awgn, scatterer_amplitude
from .sigcore import (ArrayGeometry, CodeSequence, cyclic_shift, dpsk_encode,
                      steering_vector)


class RangeAmbiguityError(ValueError):
    """A target delay falls outside the unambiguous single-block window."""


@dataclass(frozen=True)
class PmcwConfig:
    """Dimensions and timing of one PMCW CPI."""

    code_length: int
    n_frames: int
    chip_time: float
    carrier_hz: float
    mu_percent: float = 50.0
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)

    def __post_init__(self):
        if self.code_length < 1:
            raise ValueError("code_length must be >= 1")
        if self.n_frames < 1:
            raise ValueError("n_frames must be >= 1")
        if self.chip_time <= 0:
            raise ValueError("chip_time must be positive")
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if not 0 <= self.mu_percent <= 100:
            raise ValueError("mu_percent must lie in [0, 100]")

    @property
    def block_time(self) -> float:
        """Frame duration t_b = L * t_c."""
        return self.code_length * self.chip_time

    @property
    def cpi_duration(self) -> float:
        return self.n_frames * self.block_time

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def unambiguous_doppler_hz(self) -> float:
        """Half the slow-time sampling rate, +/- 1/(2 t_b)."""
        return 1.0 / (2 * self.block_time)


@dataclass(frozen=True)
class FrameSchedule:
    """Radar/communication split of the M frames in one CPI.

    The radar-only frames come first so their slow-time block is contiguous.
    ``identifiable`` is False when no frame is radar-only, in which case
    delay/Doppler cannot be separated from the unknown data symbols.
    """

    is_radar: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.is_radar, dtype=bool)
        if mask.ndim != 1 or mask.size < 1:
            raise ValueError("schedule needs at least one frame")
        object.__setattr__(self, "is_radar", mask)

    @property
    def n_frames(self) -> int:
        return int(self.is_radar.size)

    @property
    def n_radar(self) -> int:
        return int(np.count_nonzero(self.is_radar))

    @property
    def n_comm(self) -> int:
        return self.n_frames - self.n_radar

    @property
    def identifiable(self) -> bool:
        return self.n_radar > 0

    def labels(self) -> list[str]:
        return ["X_r" if r else "X_rc" for r in self.is_radar]


def pmcw_schedule(config: PmcwConfig) -> FrameSchedule:
    """Time-division multiplex: the first round(mu*M/100) frames are radar-only."""
    m = config.n_frames
    n_radar = int(np.floor(config.mu_percent * m / 100.0 + 0.5))
    n_radar = min(n_radar, m)
    mask = np.zeros(m, dtype=bool)
    mask[:n_radar] = True
    return FrameSchedule(mask)


def payload_capacity_bits(schedule: FrameSchedule, order: int = 2) -> int:
    """Number of payload bits one CPI can carry.

    Data rides on the differential transitions of the comm frames; with no
    radar frame the first comm frame is burned as the phase reference.
    """
    k = int(np.log2(order))
    n_data = schedule.n_comm if schedule.n_radar else max(schedule.n_comm - 1, 0)
    return n_data * k


def pmcw_frame_symbols(schedule: FrameSchedule, payload_bits, order: int = 2) -> np.ndarray:
    """Slow-time symbol vector a for one CPI.

    Radar-only frames carry the known symbol 1; the communication frames
    carry a DPSK chain whose reference is the last radar frame (or, when
    there is none, the first comm frame).
    """
    bits = np.asarray(payload_bits, dtype=np.int64)
    expected = payload_capacity_bits(schedule, order)
    if bits.size != expected:
        raise ValueError(f"expected {expected} payload bits, got {bits.size}")
    a = np.ones(schedule.n_frames, dtype=complex)
    if schedule.n_comm == 0:
        return a
    stream = dpsk_encode(bits, order)
    if schedule.n_radar:
        a[schedule.n_radar:] = stream.symbols[1:]
    else:
        a[:] = stream.symbols
    return a


def pmcw_transmit(config: PmcwConfig, code: CodeSequence, symbols,
                  beam_angle_rad: float = 0.0) -> np.ndarray:
    """Per-antenna baseband transmit samples, shape (N_t, M, L).

    Sample (i, m, l) = a_m * exp(j zeta_l) * exp(+j k d sin(beta) i).
    """
    symbols = np.asarray(symbols, dtype=complex)
    if code.length != config.code_length:
        raise ValueError("code length does not match the configuration")
    if symbols.size != config.n_frames:
        raise ValueError("need one slow-time symbol per frame")
    chips = code.chips()
    steer = steering_vector(config.geometry, beam_angle_rad,
                            config.geometry.n_tx, "tx")
    return steer[:, None, None] * symbols[None, :, None] * chips[None, None, :]


def delay_to_chips(delay_s: float, config: PmcwConfig, mode: str = "error"):
    """Map a target delay to an integer chip shift k in [0, L).

    The block-circular model is defined on integer chip lags only; a
    fractional delay raises by default, or is rounded with the residual
    reported when ``mode="round"``.
    """
    if mode not in ("error", "round"):
        raise ValueError("mode must be 'error' or 'round'")
    if delay_s < 0:
        raise ValueError("delay must be >= 0")
    k_float = delay_s / config.chip_time
    k = int(np.rint(k_float))
    residual = (k_float - k) * config.chip_time
    if mode == "error" and abs(residual) > 1e-9 * config.chip_time:
        raise ValueError(
            f"delay {delay_s} s is not an integer number of chips "
            f"(residual {residual:.3e} s); pass mode='round' to quantize"
        )
    if k >= config.code_length:
        raise RangeAmbiguityError(
            f"delay {delay_s} s spans {k} chips, beyond the unambiguous "
            f"window of {config.code_length} chips"
        )
    return k, residual


@dataclass(frozen=True)
class PmcwCube:
    """Receive data cube: per-antenna slow/fast-time matrices.

    ``data[m, l, p]`` is frame m, chip l, receive element p; the schedule
    says which frames are radar-only.
    """

    data: np.ndarray
    schedule: FrameSchedule
    config: PmcwConfig
    delay_residuals: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        expected = (self.config.n_frames, self.config.code_length,
                    self.config.geometry.n_rx)
        if d.shape != expected:
            raise ValueError(f"cube shape {d.shape} != expected {expected}")
        object.__setattr__(self, "data", d)

    def antenna(self, p: int) -> np.ndarray:
        """The M x L matrix Y_p seen by receive element p."""
        return self.data[:, :, p]


def pmcw_receive_cube(scene: Scene, config: PmcwConfig, code: CodeSequence,
                      symbols, rng: np.random.Generator | None = None, *,
                      cpi_index: int = 0, intra_block_doppler: bool = True,
                      delay_mode: str = "error") -> PmcwCube:
    """Synthesize the noisy receive cube for one CPI (matrix-model path).

    Every scatterer adds Diag(a) [(b ⊙ P_k s)^T ⊗ e] scaled by its composite
    gain and the receive steering powers; noise is per-sample circular
    complex Gaussian of the scene's variance.  ``intra_block_doppler``
    controls the fast-time Doppler phasor b (the model is exact with it on;
    switching it off freezes Doppler within each frame).
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.size != config.n_frames:
        raise ValueError("need one slow-time symbol per frame")
    if code.length != config.code_length:
        raise ValueError("code length does not match the configuration")
    if scene.noise_variance > 0 and rng is None:
        raise ValueError("a Generator is required when noise_variance > 0")

    m_count, l_count = config.n_frames, config.code_length
    n_rx = config.geometry.n_rx
    chips = code.chips()
    t_b, t_c = config.block_time, config.chip_time
    fading = scene.fading_gains(cpi_index)
    data = np.zeros((m_count, l_count, n_rx), dtype=complex)
    residuals = np.zeros(scene.n_scatterers)

    for q, sc in enumerate(scene.scatterers):
        k_q, residuals[q] = delay_to_chips(sc.delay_s, config, delay_mode)
        f_q = sc.resolve_doppler(config.wavelength)
        d_q = scatterer_amplitude(sc, config.carrier_hz, config.geometry.n_tx,
                                  fading[q])
        e_q = np.exp(-2j * np.pi * f_q * t_b * np.arange(m_count))
        if intra_block_doppler:
            b_q = np.exp(-2j * np.pi * f_q * t_c * np.arange(l_count))
        else:
            b_q = np.ones(l_count)
        row = b_q * cyclic_shift(chips, k_q)
        block = (symbols * e_q)[:, None] * row[None, :]
        c_q = steering_vector(config.geometry, sc.angle_rad, n_rx, "rx")
        data += d_q * block[:, :, None] * c_q[None, None, :]

    if scene.noise_variance > 0:
        data += complex_awgn(rng, data.shape, scene.noise_variance)
    return PmcwCube(data=data, schedule=pmcw_schedule(config), config=config,
                    delay_residuals=residuals)
