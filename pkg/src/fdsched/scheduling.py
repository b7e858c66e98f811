"""User-pair selection rules and the exhaustive-search / half-duplex baselines.

The three low-complexity selectors pick the UL and DL user in two decoupled
steps: A1 takes the strongest raw gain on both links, A2 refines the DL
choice by its SINR given the already-chosen UL user, A3 refines the UL
choice by its signal-to-leakage ratio toward the already-chosen DL user.
Selection metrics are always evaluated at maximum transmit powers; power
allocation happens afterwards (see :mod:`fdsched.power`).

Ties resolve to the lowest index (lexicographic for pair searches) so every
rule is deterministic.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import LN2, RateBreakdown, rates


class DuplexMode(enum.Enum):
    FD = "fd"
    HD_UL = "hd-ul"
    HD_DL = "hd-dl"


@dataclass(frozen=True)
class Schedule:
    """One scheduling decision: which users transmit, at what powers, in
    which duplex mode."""

    ul: Optional[int]
    dl: Optional[int]
    p0: float
    pu: float
    mode: DuplexMode

    def __post_init__(self):
        if self.p0 < 0.0 or self.pu < 0.0:
            raise ValueError("powers must be >= 0")
        if self.mode is DuplexMode.FD:
            if self.ul is None or self.dl is None or self.p0 <= 0.0 or self.pu <= 0.0:
                raise ValueError("FD schedule needs both users and positive powers")
        elif self.mode is DuplexMode.HD_UL:
            if self.ul is None or self.p0 != 0.0:
                raise ValueError("HD-UL schedule needs an UL user and p0 = 0")
        elif self.mode is DuplexMode.HD_DL:
            if self.dl is None or self.pu != 0.0:
                raise ValueError("HD-DL schedule needs a DL user and pu = 0")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")


def _check(ch, config):
    if ch.g_ul.size < 1 or ch.g_dl.size < 1:
        raise ValueError("empty user set")
    if config.p0_max <= 0.0 or config.pu_max <= 0.0:
        raise ValueError("full-duplex selection needs positive p0_max and pu_max")


def select_a1(ch, config):
    """Strongest raw gain on both links, chosen independently."""
    _check(ch, config)
    return Schedule(
        ul=int(np.argmax(ch.g_ul)),
        dl=int(np.argmax(ch.g_dl)),
        p0=config.p0_max,
        pu=config.pu_max,
        mode=DuplexMode.FD,
    )


def select_a2(ch, config):
    """Strongest-gain UL user, then the DL user with the best SINR given
    that UL user's leakage.  Reads only column u* of the cross-gain matrix."""
    _check(ch, config)
    ul = int(np.argmax(ch.g_ul))
    metric = config.p0_max * ch.g_dl / (config.pu_max * ch.g_x[:, ul] + config.sigmaD_sq)
    return Schedule(
        ul=ul,
        dl=int(np.argmax(metric)),
        p0=config.p0_max,
        pu=config.pu_max,
        mode=DuplexMode.FD,
    )


def select_a3(ch, config):
    """Strongest-gain DL user, then the UL user with the best
    signal-to-leakage ratio toward it.  Reads only row d* of the cross-gain
    matrix."""
    _check(ch, config)
    dl = int(np.argmax(ch.g_dl))
    metric = config.pu_max * ch.g_ul / (config.pu_max * ch.g_x[dl, :] + config.sigma0_sq)
    return Schedule(
        ul=int(np.argmax(metric)),
        dl=dl,
        p0=config.p0_max,
        pu=config.pu_max,
        mode=DuplexMode.FD,
    )


def select_es_fd(ch, config):
    """Exhaustive search over all (UL, DL) pairs at maximum powers."""
    _check(ch, config)
    r_ul = np.log1p(
        config.pu_max * ch.g_ul / (config.p0_max * ch.si_gain + config.sigma0_sq)
    ) / LN2
    gamma_dl = config.p0_max * ch.g_dl[:, None] / (config.pu_max * ch.g_x + config.sigmaD_sq)
    r_sum = r_ul[:, None] + (np.log1p(gamma_dl) / LN2).T  # (k_u, k_d), pair (u, d)
    u, d = np.unravel_index(int(np.argmax(r_sum)), r_sum.shape)
    return Schedule(
        ul=int(u), dl=int(d), p0=config.p0_max, pu=config.pu_max, mode=DuplexMode.FD
    )


def select_es_fdhd(ch, config):
    """Best of the exhaustive FD pairing and the two full-power single-link
    half-duplex corners.  Tie preference: FD, then HD-UL, then HD-DL."""
    _check(ch, config)
    fd = select_es_fd(ch, config)
    r_fd = rates(ch, fd, config).r_sum
    best_ul = int(np.argmax(ch.g_ul))
    best_dl = int(np.argmax(ch.g_dl))
    r_hd_ul = math.log1p(config.pu_max * float(ch.g_ul[best_ul]) / config.sigma0_sq) / LN2
    r_hd_dl = math.log1p(config.p0_max * float(ch.g_dl[best_dl]) / config.sigmaD_sq) / LN2
    if r_fd >= r_hd_ul and r_fd >= r_hd_dl:
        return fd
    if r_hd_ul >= r_hd_dl:
        return Schedule(ul=best_ul, dl=None, p0=0.0, pu=config.pu_max, mode=DuplexMode.HD_UL)
    return Schedule(ul=None, dl=best_dl, p0=config.p0_max, pu=0.0, mode=DuplexMode.HD_DL)


def select_hd_tdd(ch, config):
    """Half-duplex TDD benchmark rate.

    Convention: the best UL and the best DL user each get half of the
    resource at full power, with no self- or inter-terminal interference.
    The equal split is deliberately isolated here so an alternative HD
    accounting can be swapped in without touching anything else.
    """
    if ch.g_ul.size < 1 or ch.g_dl.size < 1:
        raise ValueError("empty user set")
    r_ul = 0.5 * math.log1p(config.pu_max * float(np.max(ch.g_ul)) / config.sigma0_sq) / LN2
    r_dl = 0.5 * math.log1p(config.p0_max * float(np.max(ch.g_dl)) / config.sigmaD_sq) / LN2
    return RateBreakdown(r_ul=r_ul, r_dl=r_dl, r_sum=r_ul + r_dl)
