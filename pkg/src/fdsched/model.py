"""System configuration, Rayleigh channel snapshots, and instantaneous rates.

Channels are stored as real power gains |h|^2, never as complex
coefficients: every quantity downstream consumes only magnitude-squared
gains, so phases would be untestable dead weight.  All powers are linear
milliwatts; conversion from dBm / noise-figure inputs lives in
:func:`config_from_db`.
"""

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .scheduling import Schedule

THERMAL_NOISE_DBM_PER_HZ = -174.0
LN2 = math.log(2.0)


@dataclass(frozen=True)
class SystemConfig:
    """Operating point of one full-duplex cell, all in linear units (mW)."""

    p0_max: float     # maximum BS (DL) transmit power
    pu_max: float     # maximum UL terminal transmit power
    sigma0_sq: float  # AWGN power at the BS receiver
    sigmaD_sq: float  # AWGN power at every DL terminal (common by assumption)
    si_gain: float    # residual self-interference power gain, dimensionless
    k_u: int          # number of UL candidate terminals
    k_d: int          # number of DL candidate terminals

    def __post_init__(self):
        for name in ("p0_max", "pu_max", "sigma0_sq", "sigmaD_sq", "si_gain"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        if self.p0_max <= 0.0 and self.pu_max <= 0.0:
            raise ValueError("at least one of p0_max, pu_max must be positive")
        if self.sigma0_sq <= 0.0 or self.sigmaD_sq <= 0.0:
            raise ValueError("noise powers must be positive")
        if self.k_u < 1 or self.k_d < 1:
            raise ValueError("k_u and k_d must be >= 1")


def config_from_db(
    p0_dbm,
    pu_dbm,
    si_cancellation_db,
    noise_figure_bs_db=13.0,
    noise_figure_mt_db=9.0,
    bandwidth_hz=1e7,
    k_u=5,
    k_d=5,
):
    """Build a :class:`SystemConfig` from dB-domain quantities.

    Powers convert as 10^(dBm/10) mW.  Noise powers follow the thermal
    floor: sigma^2 = 10^((-174 + 10 log10 B + NF)/10) mW.  The residual
    self-interference gain is 10^(-cancellation_dB/10).  The bandwidth has
    no canonical value in this model; 10 MHz is the documented default.
    """
    if not (math.isfinite(bandwidth_hz) and bandwidth_hz > 0.0):
        raise ValueError(f"bandwidth_hz must be positive and finite, got {bandwidth_hz!r}")
    if not (math.isfinite(si_cancellation_db) and si_cancellation_db >= 0.0):
        raise ValueError(f"si_cancellation_db must be >= 0, got {si_cancellation_db!r}")

    def noise_mw(nf_db):
        return 10.0 ** ((THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + nf_db) / 10.0)

    return SystemConfig(
        p0_max=10.0 ** (p0_dbm / 10.0),
        pu_max=10.0 ** (pu_dbm / 10.0),
        sigma0_sq=noise_mw(noise_figure_bs_db),
        sigmaD_sq=noise_mw(noise_figure_mt_db),
        si_gain=10.0 ** (-si_cancellation_db / 10.0),
        k_u=int(k_u),
        k_d=int(k_d),
    )


@dataclass(frozen=True)
class ChannelRealization:
    """One snapshot of every magnitude-squared channel gain.

    Arrays are copied and frozen on construction, so a realization can be
    shared freely across concurrent workers.
    """

    g_ul: np.ndarray  # (k_u,)      UL gains |h_{0,u}|^2
    g_dl: np.ndarray  # (k_d,)      DL gains |h_{d,0}|^2
    g_x: np.ndarray   # (k_d, k_u)  inter-terminal interference gains |h_{d,u}|^2
    si_gain: float    # residual self-interference gain at the BS

    def __post_init__(self):
        g_ul = np.array(self.g_ul, dtype=float, copy=True)
        g_dl = np.array(self.g_dl, dtype=float, copy=True)
        g_x = np.array(self.g_x, dtype=float, copy=True)
        if g_ul.ndim != 1 or g_dl.ndim != 1 or g_x.shape != (g_dl.size, g_ul.size):
            raise ValueError(
                f"inconsistent shapes: g_ul {g_ul.shape}, g_dl {g_dl.shape}, g_x {g_x.shape}"
            )
        if g_ul.size < 1 or g_dl.size < 1:
            raise ValueError("empty user set")
        for name, arr in (("g_ul", g_ul), ("g_dl", g_dl), ("g_x", g_x)):
            if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
                raise ValueError(f"{name} entries must be finite and >= 0")
        if not (math.isfinite(self.si_gain) and self.si_gain >= 0.0):
            raise ValueError(f"si_gain must be finite and >= 0, got {self.si_gain!r}")
        for name, arr in (("g_ul", g_ul), ("g_dl", g_dl), ("g_x", g_x)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "si_gain", float(self.si_gain))


def draw_realization(config, rng):
    """Sample one channel snapshot: every gain is Exp(1) (unit-mean-square
    Rayleigh amplitude), independently; the SI gain is copied from config.

    Draw order is g_ul, then g_dl, then g_x row-major, which pins the
    realization to the generator state: the same stream state always yields
    the bit-identical snapshot.
    """
    g_ul = rng.standard_exponential(config.k_u)
    g_dl = rng.standard_exponential(config.k_d)
    g_x = rng.standard_exponential((config.k_d, config.k_u))
    return ChannelRealization(g_ul=g_ul, g_dl=g_dl, g_x=g_x, si_gain=config.si_gain)


def sinr_ul(ch, u, p0, pu, sigma0_sq):
    """UL SINR: desired UL power over residual self-interference plus noise."""
    if not 0 <= u < ch.g_ul.shape[0]:
        raise IndexError(f"UL index {u} out of range for {ch.g_ul.shape[0]} users")
    return pu * float(ch.g_ul[u]) / (p0 * ch.si_gain + sigma0_sq)


def sinr_dl(ch, d, u, p0, pu, sigmaD_sq):
    """DL SINR: desired DL power over inter-terminal interference plus noise.

    ``u is None`` means no UL transmitter is active; ``pu`` must then be 0
    and the interference term vanishes.
    """
    if not 0 <= d < ch.g_dl.shape[0]:
        raise IndexError(f"DL index {d} out of range for {ch.g_dl.shape[0]} users")
    if u is None:
        if pu > 0.0:
            raise ValueError("pu must be 0 when no UL user is scheduled")
        interference = 0.0
    else:
        if not 0 <= u < ch.g_ul.shape[0]:
            raise IndexError(f"UL index {u} out of range for {ch.g_ul.shape[0]} users")
        interference = pu * float(ch.g_x[d, u])
    return p0 * float(ch.g_dl[d]) / (interference + sigmaD_sq)


@dataclass(frozen=True)
class RateBreakdown:
    """Instantaneous spectral efficiencies in bps/Hz."""

    r_ul: float
    r_dl: float
    r_sum: float


def rates(ch, schedule, config):
    """Instantaneous UL/DL/sum rates of a schedule.

    A link contributes log2(1 + SINR) only when its user is scheduled with
    positive transmit power; an absent link contributes exactly 0 (the
    half-duplex corner of the sum-rate objective).
    """
    r_ul = 0.0
    r_dl = 0.0
    ul_active = schedule.ul is not None and schedule.pu > 0.0
    if ul_active:
        r_ul = math.log1p(
            sinr_ul(ch, schedule.ul, schedule.p0, schedule.pu, config.sigma0_sq)
        ) / LN2
    if schedule.dl is not None and schedule.p0 > 0.0:
        u = schedule.ul if ul_active else None
        pu = schedule.pu if ul_active else 0.0
        r_dl = math.log1p(
            sinr_dl(ch, schedule.dl, u, schedule.p0, pu, config.sigmaD_sq)
        ) / LN2
    return RateBreakdown(r_ul=r_ul, r_dl=r_dl, r_sum=r_ul + r_dl)
