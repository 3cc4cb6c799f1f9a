"""OFDMA transmit/receive modeling with subcarrier-level multiplexing.

A fraction of the N_c subcarriers is reserved as radar pilots (known
symbols on every OFDM symbol); the rest carry DPSK data differentially
encoded along slow time.  The receive data cube lives in the subcarrier
domain: entry (n, m, p) of a scatterer's contribution is

    d_q * a_{n,m} * exp(-j 2 pi n df tau_q) * exp(+j 2 pi m T f_D)
        * exp(+j 2 pi (d/lambda) sin(psi) p)

sampled at t_s = 1/(N_c df) so the IFFT length equals the fast-time sample
count.  The cyclic prefix is stripped before cube formation; target delays
beyond the CP only draw a warning because the sampled-sum model stays
well defined.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import SPEED_OF_LIGHT, Scene, complex_awgn, scatterer_amplitude
from .sigcore import ArrayGeometry, dpsk_encode, steering_vector


class IsiWarning(UserWarning):
    """A target delay exceeds the cyclic prefix."""


@dataclass(frozen=True)
class OfdmaConfig:
    """Dimensions and numerology of one OFDMA CPI."""

    n_subcarriers: int
    n_symbols: int
    subcarrier_spacing_hz: float
    carrier_hz: float
    cp_samples: int = 0
    mu_percent: float = 50.0
    pilot_seed: int = 0
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be >= 1")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier_spacing_hz must be positive")
        if self.carrier_hz <= 0:
            raise ValueError("carrier_hz must be positive")
        if self.cp_samples < 0:
            raise ValueError("cp_samples must be >= 0")
        if not 0 <= self.mu_percent <= 100:
            raise ValueError("mu_percent must lie in [0, 100]")

    @property
    def symbol_duration(self) -> float:
        """Core symbol length T = 1/df, excluding the CP."""
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def sample_time(self) -> float:
        """Fast-time sampling interval t_s = 1/(N_c df)."""
        return 1.0 / (self.n_subcarriers * self.subcarrier_spacing_hz)

    @property
    def bandwidth_hz(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing_hz

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def unambiguous_doppler_hz(self) -> float:
        return 0.5 / self.symbol_duration


def ofdma_pilot_mask(config: OfdmaConfig) -> np.ndarray:
    """Boolean mask of radar-pilot subcarriers, evenly interleaved.

    round(mu*N_c/100) rows are pilots, spread uniformly starting at row 0 so
    the pilot comb alone supports unaliased range recovery within the comb's
    shortened unambiguous window.
    """
    n = config.n_subcarriers
    n_radar = int(np.floor(config.mu_percent * n / 100.0 + 0.5))
    n_radar = min(n_radar, n)
    mask = np.zeros(n, dtype=bool)
    if n_radar:
        idx = (np.arange(n_radar) * n) // n_radar
        mask[idx] = True
    return mask


def pilot_comb_spacing(mask) -> int:
    """Largest step of the pilot comb (1 when every row is a pilot)."""
    idx = np.flatnonzero(np.asarray(mask, dtype=bool))
    if idx.size == 0:
        raise ValueError("mask has no pilot rows")
    if idx.size == 1:
        return int(len(np.asarray(mask)))
    return int(np.max(np.diff(idx)))


@dataclass(frozen=True)
class SymbolGrid:
    """The N_c x N_s modulation grid with its radar-row bookkeeping."""

    symbols: np.ndarray
    radar_rows: np.ndarray
    order: int = 4

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=complex)
        mask = np.asarray(self.radar_rows, dtype=bool)
        if sym.ndim != 2:
            raise ValueError("symbols must be an N_c x N_s matrix")
        if mask.shape != (sym.shape[0],):
            raise ValueError("radar_rows must have one flag per subcarrier")
        if np.any(np.abs(np.abs(sym) - 1) > 1e-9):
            raise ValueError("grid symbols must be unit modulus")
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "radar_rows", mask)

    @property
    def n_subcarriers(self) -> int:
        return int(self.symbols.shape[0])

    @property
    def n_symbols(self) -> int:
        return int(self.symbols.shape[1])

    @property
    def n_radar(self) -> int:
        return int(np.count_nonzero(self.radar_rows))


def pilot_symbols(config: OfdmaConfig, n_rows: int) -> np.ndarray:
    """Known pseudorandom QPSK pilots, reproducible from the pilot seed."""
    rng = np.random.default_rng([int(config.pilot_seed) & 0xFFFFFFFF, 0x9170])
    phases = rng.integers(0, 4, size=(n_rows, config.n_symbols))
    return np.exp(2j * np.pi * (phases + 0.5) / 4)


def grid_capacity_bits(config: OfdmaConfig, order: int = 4) -> int:
    """Payload bits per CPI: each data row spends its first symbol as reference."""
    k = int(np.log2(order))
    n_comm = config.n_subcarriers - int(np.count_nonzero(ofdma_pilot_mask(config)))
    if config.n_symbols < 2:
        return 0
    return n_comm * (config.n_symbols - 1) * k


def build_symbol_grid(config: OfdmaConfig, payload_bits, order: int = 4) -> SymbolGrid:
    """Fill the modulation grid: pilot rows known, data rows DPSK along slow time."""
    bits = np.asarray(payload_bits, dtype=np.int64)
    expected = grid_capacity_bits(config, order)
    if bits.size != expected:
        raise ValueError(f"expected {expected} payload bits, got {bits.size}")
    mask = ofdma_pilot_mask(config)
    n_c, n_s = config.n_subcarriers, config.n_symbols
    grid = np.ones((n_c, n_s), dtype=complex)
    grid[mask] = pilot_symbols(config, int(np.count_nonzero(mask)))
    k = int(np.log2(order))
    per_row = (n_s - 1) * k if n_s >= 2 else 0
    comm_rows = np.flatnonzero(~mask)
    for i, n in enumerate(comm_rows):
        if per_row == 0:
            break
        row_bits = bits[i * per_row:(i + 1) * per_row]
        grid[n] = dpsk_encode(row_bits, order).symbols
    return SymbolGrid(symbols=grid, radar_rows=mask, order=order)


def ofdma_transmit(config: OfdmaConfig, grid: SymbolGrid,
                   beam_angle_rad: float = 0.0) -> np.ndarray:
    """Per-antenna time-domain transmit samples, shape (N_t, N_s, N_c + CP).

    Each symbol is the unnormalized inverse DFT of its subcarrier column,
    x_m[l] = sum_n a_{n,m} exp(j 2 pi n l / N_c), with the cyclic prefix
    prepended.
    """
    if grid.n_subcarriers != config.n_subcarriers or grid.n_symbols != config.n_symbols:
        raise ValueError("grid dimensions do not match the configuration")
    n_c = config.n_subcarriers
    core = n_c * np.fft.ifft(grid.symbols, axis=0).T  # (N_s, N_c)
    if config.cp_samples:
        if config.cp_samples > n_c:
            raise ValueError("cp_samples cannot exceed the symbol length")
        core = np.concatenate([core[:, n_c - config.cp_samples:], core], axis=1)
    steer = steering_vector(config.geometry, beam_angle_rad,
                            config.geometry.n_tx, "tx")
    return steer[:, None, None] * core[None, :, :]


@dataclass(frozen=True)
class OfdmaCube:
    """Subcarrier-domain receive cube, shape (N_c, N_s, N_r)."""

    data: np.ndarray
    radar_rows: np.ndarray
    config: OfdmaConfig

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        expected = (self.config.n_subcarriers, self.config.n_symbols,
                    self.config.geometry.n_rx)
        if d.shape != expected:
            raise ValueError(f"cube shape {d.shape} != expected {expected}")
        object.__setattr__(self, "data", d)
        object.__setattr__(self, "radar_rows",
                           np.asarray(self.radar_rows, dtype=bool))

    def slow_time_slice(self, m: int, view: str = "subcarrier") -> np.ndarray:
        """The N_c x N_r slice of OFDM symbol m.

        ``view="subcarrier"`` returns the cube slice as stored;
        ``view="time"`` applies the unnormalized IDFT matrix
        F[l, n] = exp(j 2 pi n l / N_c) to recover the time-domain samples.
        """
        sl = self.data[:, m, :]
        if view == "subcarrier":
            return sl
        if view == "time":
            n_c = self.config.n_subcarriers
            grid_n = np.arange(n_c)
            f_mat = np.exp(2j * np.pi * np.outer(grid_n, grid_n) / n_c)
            return f_mat @ sl
        raise ValueError("view must be 'subcarrier' or 'time'")

    def subcarrier_slice(self, n: int) -> np.ndarray:
        """The N_s x N_r slow-time slice of subcarrier n."""
        return self.data[n, :, :]


def ofdma_receive_cube(scene: Scene, config: OfdmaConfig, grid: SymbolGrid,
                       rng: np.random.Generator | None = None, *,
                       cpi_index: int = 0) -> OfdmaCube:
    """Synthesize the noisy subcarrier-domain receive cube for one CPI."""
    if grid.n_subcarriers != config.n_subcarriers or grid.n_symbols != config.n_symbols:
        raise ValueError("grid dimensions do not match the configuration")
    if scene.noise_variance > 0 and rng is None:
        raise ValueError("a Generator is required when noise_variance > 0")

    n_c, n_s = config.n_subcarriers, config.n_symbols
    n_rx = config.geometry.n_rx
    df = config.subcarrier_spacing_hz
    t_sym = config.symbol_duration
    cp_duration = config.cp_samples * config.sample_time
    fading = scene.fading_gains(cpi_index)
    data = np.zeros((n_c, n_s, n_rx), dtype=complex)

    for q, sc in enumerate(scene.scatterers):
        if sc.delay_s > cp_duration:
            warnings.warn(
                f"scatterer {q} delay {sc.delay_s:.3e} s exceeds the cyclic "
                f"prefix ({cp_duration:.3e} s); inter-symbol interference is "
                "not modeled",
                IsiWarning,
                stacklevel=2,
            )
        f_q = sc.resolve_doppler(config.wavelength)
        d_q = scatterer_amplitude(sc, config.carrier_hz, config.geometry.n_tx,
                                  fading[q])
        phase_n = np.exp(-2j * np.pi * np.arange(n_c) * df * sc.delay_s)
        phase_m = np.exp(2j * np.pi * np.arange(n_s) * t_sym * f_q)
        # The OFDMA receive model carries the positive steering exponent
        # exp(+j k d sin(psi) p), opposite to the PMCW receive phasor.
        steer = steering_vector(config.geometry, sc.angle_rad, n_rx, "tx")
        data += (d_q * grid.symbols[:, :, None]
                 * phase_n[:, None, None]
                 * phase_m[None, :, None]
                 * steer[None, None, :])

    if scene.noise_variance > 0:
        data += complex_awgn(rng, data.shape, scene.noise_variance)
    return OfdmaCube(data=data, radar_rows=grid.radar_rows, config=config)
