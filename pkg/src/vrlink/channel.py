"""Per-subcarrier channel synthesis.

UL links are scalar path-loss channels with a unit-modulus per-subcarrier
factor; DL links are rank-1 matrices built from free-space path loss, a
delay-tap decay sum, and ULA steering vectors at the departure/arrival
azimuths.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateGeometryError, InvalidInputError
from .topology import (
    AccessPoint,
    NetworkTopology,
    Position3D,
    UserNode,
    departure_arrival_angles,
    distance,
)

SPEED_OF_LIGHT = 299_792_458.0  # m/s

GAIN_MODES = ("deterministic", "gaussian")


@dataclass(frozen=True)
class SubcarrierGrid:
    """OFDM frequency plan: subcarrier count, carrier, and total bandwidth."""

    n_sc: int
    carrier_frequency: float  # Hz
    total_bandwidth: float    # Hz

    def __post_init__(self):
        if self.n_sc < 1:
            raise ConfigurationError(f"n_sc must be >= 1, got {self.n_sc}")
        if not self.carrier_frequency > 0:
            raise ConfigurationError(f"carrier frequency must be positive, got {self.carrier_frequency}")
        if not self.total_bandwidth > 0:
            raise ConfigurationError(f"total bandwidth must be positive, got {self.total_bandwidth}")

    @property
    def subcarrier_bandwidth(self) -> float:
        return self.total_bandwidth / self.n_sc

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def sample_period(self) -> float:
        """Delay-tap spacing: one sample of the total-bandwidth waveform."""
        return 1.0 / self.total_bandwidth


def subcarrier_phase_ramp(n_sc: int) -> np.ndarray:
    """Unit-modulus factor per subcarrier, exp(j*n*pi/180) with n = 1..n_sc."""
    if n_sc < 1:
        raise InvalidInputError(f"n_sc must be >= 1, got {n_sc}")
    n = np.arange(1, n_sc + 1, dtype=float)
    return np.exp(1j * n * np.pi / 180.0)


def subcarrier_gains(n_sc: int, mode: str = "deterministic", rng=None) -> np.ndarray:
    """Per-subcarrier complex gain factors.

    deterministic reproduces the unit-modulus phase ramp; gaussian draws
    circularly-symmetric CN(0,1) samples from the supplied generator.
    """
    if mode == "deterministic":
        return subcarrier_phase_ramp(n_sc)
    if mode == "gaussian":
        if rng is None:
            raise ConfigurationError("gaussian gain mode needs a seeded generator")
        if n_sc < 1:
            raise InvalidInputError(f"n_sc must be >= 1, got {n_sc}")
        re = rng.standard_normal(n_sc)
        im = rng.standard_normal(n_sc)
        return (re + 1j * im) / math.sqrt(2.0)
    raise ConfigurationError(f"unknown gain mode {mode!r}, expected one of {GAIN_MODES}")


def ul_channel(d: float, w: float, ramp_n: complex) -> complex:
    """Single-subcarrier UL coefficient: per-subcarrier factor times d^-w."""
    if not d > 0:
        raise DegenerateGeometryError(f"distance must be positive, got {d}")
    if not w > 0:
        raise InvalidInputError(f"path-loss exponent must be positive, got {w}")
    return ramp_n * d ** (-w)


def fspl_db(d: float, wavelength: float) -> float:
    """Free-space path loss 20*log10(wavelength / (4*pi*d)) in dB."""
    if not d > 0:
        raise DegenerateGeometryError(f"distance must be positive, got {d}")
    if not wavelength > 0:
        raise InvalidInputError(f"wavelength must be positive, got {wavelength}")
    return 20.0 * math.log10(wavelength / (4.0 * math.pi * d))


@dataclass(frozen=True)
class PathGain:
    """Per-subcarrier path gain split into a dB magnitude and a phase."""

    gain_db: np.ndarray    # identical across subcarriers, distance-only
    phase_rad: np.ndarray  # the per-subcarrier ramp angle

    def complex_amplitude(self) -> np.ndarray:
        """Amplitude entering the DL matrix: 10^(gain_db/10) * exp(j*phase)."""
        return 10.0 ** (self.gain_db / 10.0) * np.exp(1j * self.phase_rad)


def path_gain_per_subcarrier(d: float, grid: SubcarrierGrid) -> PathGain:
    """FSPL magnitude plus the per-subcarrier ramp phase for one link."""
    gain = fspl_db(d, grid.wavelength)
    n = np.arange(1, grid.n_sc + 1, dtype=float)
    return PathGain(
        gain_db=np.full(grid.n_sc, gain),
        phase_rad=n * np.pi / 180.0,
    )


def tap_decay_sum(tau_s: float, tap_count: int, tap_spacing_s: float) -> float:
    """Sum over taps k = 0..T-1 of exp(-(k*dt)/tau)."""
    if tap_count < 1:
        raise InvalidInputError(f"tap count must be >= 1, got {tap_count}")
    if not tau_s > 0:
        raise DegenerateGeometryError(f"propagation delay must be positive, got {tau_s}")
    if not tap_spacing_s > 0:
        raise InvalidInputError(f"tap spacing must be positive, got {tap_spacing_s}")
    k = np.arange(tap_count, dtype=float)
    return float(np.sum(np.exp(-(k * tap_spacing_s) / tau_s)))


def steering_vector(n_elements: int, azimuth_deg: float, spacing_over_wavelength: float = 0.5) -> np.ndarray:
    """ULA response, element k = (1/sqrt(N)) * exp(-j*k*2*pi*(d/lambda)*sin(az))."""
    if n_elements < 1:
        raise InvalidInputError(f"element count must be >= 1, got {n_elements}")
    if not spacing_over_wavelength > 0:
        raise InvalidInputError(f"spacing ratio must be positive, got {spacing_over_wavelength}")
    k = np.arange(n_elements, dtype=float)
    phase = -2.0 * np.pi * spacing_over_wavelength * math.sin(math.radians(azimuth_deg)) * k
    return np.exp(1j * phase) / math.sqrt(n_elements)


def dl_channel_matrix(
    tx: Position3D,
    rx: Position3D,
    n: int,
    n_tx: int,
    n_rx: int,
    grid: SubcarrierGrid,
    tap_count: int = 4,
    tap_spacing_s: float = None,
    gain: complex = None,
    spacing_over_wavelength: float = 0.5,
) -> np.ndarray:
    """Rank-1 DL matrix (n_rx x n_tx) for subcarrier n (1-based).

    H = 10^(pg/10) * tap_sum * gain_n * a_rx(aoa) a_tx(aod)^H, with gain_n
    defaulting to the deterministic phase ramp exp(j*n*pi/180).
    """
    if n < 1:
        raise InvalidInputError(f"subcarrier index is 1-based, got {n}")
    d = distance(tx, rx)
    if d <= 0.0:
        raise DegenerateGeometryError("transmitter and receiver coincide")
    aod_az, aoa_az = departure_arrival_angles(tx, rx)
    if tap_spacing_s is None:
        tap_spacing_s = grid.sample_period
    if gain is None:
        gain = np.exp(1j * n * np.pi / 180.0)
    tau = d / SPEED_OF_LIGHT
    amp = 10.0 ** (fspl_db(d, grid.wavelength) / 10.0) * tap_decay_sum(tau, tap_count, tap_spacing_s)
    a_tx = steering_vector(n_tx, aod_az, spacing_over_wavelength)
    a_rx = steering_vector(n_rx, aoa_az, spacing_over_wavelength)
    return amp * gain * np.outer(a_rx, a_tx.conj())


@dataclass(frozen=True)
class UlChannelCoeffs:
    """UL scalar coefficients for every (user, AP, subcarrier) triple.

    coeffs is indexed [user, ap, subcarrier] in topology order; the modulus
    of every entry along the subcarrier axis is d^-w for that link.
    """

    coeffs: np.ndarray  # complex, shape (U, B, n_sc)

    def aggregate(self) -> np.ndarray:
        """Sum over subcarriers, shape (U, B)."""
        return self.coeffs.sum(axis=2)


@dataclass(frozen=True)
class DlChannelSet:
    """DL matrices plus per-link propagation delay and per-subcarrier gain."""

    matrices: np.ndarray   # complex, shape (U, B, n_sc, n_rx, n_tx)
    tau_s: np.ndarray      # seconds, shape (U, B)
    gain_db: np.ndarray    # dB, shape (U, B, n_sc)

    @property
    def n_sc(self) -> int:
        return self.matrices.shape[2]

    def link_matrices(self, user_idx: int, ap_idx: int) -> np.ndarray:
        """All subcarrier matrices for one (user, AP) link, shape (n_sc, n_rx, n_tx)."""
        return self.matrices[user_idx, ap_idx]


def synthesize_ul(
    topology: NetworkTopology,
    grid: SubcarrierGrid,
    w: float,
    mode: str = "deterministic",
    rng=None,
) -> UlChannelCoeffs:
    """UL coefficients for every (user, AP) pair on the grid."""
    coeffs = np.zeros((topology.n_users, topology.n_aps, grid.n_sc), dtype=complex)
    for i, user in enumerate(topology.users):
        for j, ap in enumerate(topology.aps):
            gains = subcarrier_gains(grid.n_sc, mode, rng)
            d = distance(user.position, ap.position)
            if d <= 0.0:
                raise DegenerateGeometryError(
                    f"user {user.user_id} and AP {ap.ap_id} coincide"
                )
            coeffs[i, j] = gains * d ** (-w)
    return UlChannelCoeffs(coeffs=coeffs)


def synthesize_dl(
    topology: NetworkTopology,
    grid: SubcarrierGrid,
    n_tx: int,
    n_rx: int,
    tap_count: int = 4,
    tap_spacing_s: float = None,
    mode: str = "deterministic",
    rng=None,
    spacing_over_wavelength: float = 0.5,
) -> DlChannelSet:
    """DL matrices for every (user, AP) pair, all subcarriers."""
    u, b = topology.n_users, topology.n_aps
    mats = np.zeros((u, b, grid.n_sc, n_rx, n_tx), dtype=complex)
    tau = np.zeros((u, b))
    gain_db = np.zeros((u, b, grid.n_sc))
    for i, user in enumerate(topology.users):
        for j, ap in enumerate(topology.aps):
            gains = subcarrier_gains(grid.n_sc, mode, rng)
            pg = path_gain_per_subcarrier(distance(ap.position, user.position), grid)
            gain_db[i, j] = pg.gain_db
            tau[i, j] = distance(ap.position, user.position) / SPEED_OF_LIGHT
            for n in range(1, grid.n_sc + 1):
                mats[i, j, n - 1] = dl_channel_matrix(
                    ap.position,
                    user.position,
                    n,
                    n_tx,
                    n_rx,
                    grid,
                    tap_count=tap_count,
                    tap_spacing_s=tap_spacing_s,
                    gain=gains[n - 1],
                    spacing_over_wavelength=spacing_over_wavelength,
                )
    return DlChannelSet(matrices=mats, tau_s=tau, gain_db=gain_db)
