"""Propagation quantities: effective dispersion, loss profiles, power transfer, SRS fit."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from .model import FiberParams, FrequencyTable, Link, LossModel, Span, WdmComb

__all__ = [
    "SigmaPolicy",
    "SrsFit",
    "SrsFitConfig",
    "alpha_profile",
    "beta2_eff",
    "fiber_power_transfer",
    "fit_srs_params",
    "link_transfer",
    "lumped_gain",
    "span_power_transfer",
]


def beta2_eff(fiber: FiberParams, f_nch: float, f_cut: float) -> float:
    """Dispersion seen by the (interferer, CUT) pair, absorbing the slope term."""
    return fiber.beta2 + math.pi * fiber.beta3 * (f_nch + f_cut - 2.0 * fiber.f_c)


def alpha_profile(loss: LossModel, f: float, z: float) -> float:
    if z < 0:
        raise ValueError("z must be >= 0")
    return loss.alpha0(f) + loss.alpha1(f) * math.exp(-loss.sigma(f) * z)


def fiber_power_transfer(span: Span, f: float) -> float:
    """exp(-2 * integral of alpha(f, z) over the span), without the lumped gain."""
    a0, a1, s = span.loss.alpha0(f), span.loss.alpha1(f), span.loss.sigma(f)
    length = span.fiber.length
    return math.exp(-2.0 * a0 * length + 2.0 * a1 * math.expm1(-s * length) / s)


def lumped_gain(span: Span, f: float) -> float:
    if span.transparent:
        return 1.0 / fiber_power_transfer(span, f)
    return span.lumped_gain(f)


def span_power_transfer(span: Span, f: float) -> float:
    """Power transfer of one span, fiber plus end-of-span lumped gain."""
    if span.transparent:
        return 1.0
    return span.lumped_gain(f) * fiber_power_transfer(span, f)


def link_transfer(link: Link, f: float, from_span: int, to_span: int) -> float:
    """Product of span transfers over the 1-based inclusive range ``from_span..to_span``.

    ``from_span == to_span + 1`` is the empty product and returns exactly 1.
    """
    n = len(link.spans)
    if not (1 <= from_span <= to_span + 1 <= n + 1):
        raise IndexError(f"invalid span range {from_span}..{to_span} for a {n}-span link")
    out = 1.0
    for span in link.spans[from_span - 1:to_span]:
        out *= span_power_transfer(span, f)
    return out


class SigmaPolicy(enum.Enum):
    UNIFORM_AVERAGE = "uniform_average"
    PER_CHANNEL_OVERRIDE = "per_channel_override"


@dataclass(frozen=True)
class SrsFitConfig:
    """Triangular Raman-gain parametrization.

    ``raman_slope`` is the power-domain gain slope C_r in 1/(W m Hz): a pump
    at ``df`` Hz above a probe raises the probe's power gain coefficient by
    ``C_r * P_pump * df``.
    """

    raman_slope: float
    sigma_policy: SigmaPolicy = SigmaPolicy.UNIFORM_AVERAGE
    sigma_override: FrequencyTable | None = None
    link_wide: bool = False  # fit once on the first span's comb and reuse it

    def __post_init__(self):
        if not (self.raman_slope >= 0):
            raise ValueError("raman_slope must be >= 0")
        if self.sigma_policy is SigmaPolicy.PER_CHANNEL_OVERRIDE and self.sigma_override is None:
            raise ValueError("per_channel_override policy needs a sigma table")


@dataclass(frozen=True)
class SrsFit:
    frequencies: tuple[float, ...]
    alpha0: tuple[float, ...]
    alpha1: tuple[float, ...]
    sigma: tuple[float, ...]
    flagged: tuple[int, ...] = field(default_factory=tuple)

    def loss_model(self) -> LossModel:
        pairs = sorted(zip(self.frequencies, self.alpha0, self.alpha1, self.sigma))
        freqs = tuple(p[0] for p in pairs)
        return LossModel(FrequencyTable(freqs, tuple(p[1] for p in pairs)),
                         FrequencyTable(freqs, tuple(p[2] for p in pairs)),
                         FrequencyTable(freqs, tuple(p[3] for p in pairs)))


def fit_srs_params(comb: WdmComb, baseline_alpha0: Sequence[float],
                   cfg: SrsFitConfig) -> SrsFit:
    """Fit the SRS perturbation alpha1 and its decay sigma at each channel center.

    alpha1_i = -(C_r / 2) * sum_j P_j (f_j - f_i) in the field convention, so
    low-frequency channels see gain and sum_i P_i alpha1_i = 0.
    Channels where |alpha1| >= alpha0 are returned in ``flagged``.
    """
    channels = comb.channels
    if len(baseline_alpha0) != len(channels):
        raise ValueError("need one baseline alpha0 per channel")
    powers = [ch.power for ch in channels]
    total = math.fsum(powers)
    if not total > 0:
        raise ValueError("SRS fit needs a comb with nonzero total power")
    half_slope = 0.5 * cfg.raman_slope
    alpha1 = tuple(
        -half_slope * math.fsum(p * (other.center - ch.center) for p, other in zip(powers, channels))
        + 0.0  # no negative zeros
        for ch in channels
    )
    if cfg.sigma_policy is SigmaPolicy.UNIFORM_AVERAGE:
        mean_a0 = math.fsum(p * a for p, a in zip(powers, baseline_alpha0)) / total
        sigma = (2.0 * mean_a0,) * len(channels)
    else:
        sigma = tuple(cfg.sigma_override(ch.center) for ch in channels)
    flagged = tuple(i for i, (a0, a1) in enumerate(zip(baseline_alpha0, alpha1))
                    if not abs(a1) < a0)
    return SrsFit(tuple(ch.center for ch in channels), tuple(float(a) for a in baseline_alpha0),
                  alpha1, sigma, flagged)
