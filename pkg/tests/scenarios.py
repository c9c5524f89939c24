"""Shared link builders and random draws for the test suite."""
from __future__ import annotations

import math

import numpy as np

from ign_nli.engine import IslandParams
from ign_nli.model import (AUTO_GAIN, Channel, FiberParams, Link, LossModel, Span, WdmComb,
                           db_per_km_to_field_alpha)
from ign_nli.physics import SrsFitConfig, fit_srs_params

F_C = 193.4e12
SMF = dict(gamma=1.3e-3, beta2=-2.13e-26, beta3=1.2e-40, f_c=F_C)

# parameter ranges of the random island draws
ALPHA0_RANGE = (1.5e-5, 7e-5)
ALPHA1_RATIO = (-0.3, 0.3)
SIGMA_RATIO = (1.0, 4.0)
BETA2_RANGE = (1e-28, 3e-26)
BW_RANGE = (10e9, 150e9)
OFFSET_RANGE = (25e9, 5e12)


def fiber(length=80e3, **kw) -> FiberParams:
    return FiberParams(**{**SMF, **kw, "length": length})


def comb(n=5, spacing=100e9, bandwidth=32e9, power=1e-3, f0=None, cut=None) -> WdmComb:
    f0 = F_C - spacing * (n // 2) if f0 is None else f0
    chans = tuple(Channel(f0 + k * spacing, bandwidth, power / bandwidth) for k in range(n))
    return WdmComb(chans, n // 2 if cut is None else cut)


def span(c: WdmComb, a0_db=0.2, alpha1=0.0, sigma=None, length=80e3, gain=AUTO_GAIN,
         **fiber_kw) -> Span:
    a0 = db_per_km_to_field_alpha(a0_db)
    loss = LossModel.flat(a0, alpha1, 2 * a0 if sigma is None else sigma)
    return Span(fiber(length, **fiber_kw), loss, c, gain)


def srs_scenario(n_spans=3, n_ch=9, ratio=0.1) -> Link:
    """80 km SMF spans, 9 x 100 GHz channels, SRS slope set so max |alpha1|/alpha0 = ratio."""
    a0 = db_per_km_to_field_alpha(0.2)
    c = comb(n_ch, 100e9, 32e9, 1e-3)
    probe = fit_srs_params(c, [a0] * n_ch, SrsFitConfig(1.0))
    slope = ratio * a0 / max(abs(x) for x in probe.alpha1)
    fit = fit_srs_params(c, [a0] * n_ch, SrsFitConfig(slope))
    s = Span(fiber(), fit.loss_model(), c)
    return Link((s,) * n_spans)


def _log_uniform(rng, lo, hi):
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def random_island(rng: np.random.Generator, sci=False, alpha1_zero=False) -> IslandParams:
    a0 = rng.uniform(*ALPHA0_RANGE)
    a1 = 0.0 if alpha1_zero else rng.uniform(*ALPHA1_RATIO) * a0
    sigma = rng.uniform(*SIGMA_RATIO) * a0
    big_b = 4 * math.pi ** 2 * _log_uniform(rng, *BETA2_RANGE) * rng.choice([-1.0, 1.0])
    b_cut = rng.uniform(*BW_RANGE)
    if sci:
        return IslandParams(a0, a1, sigma, big_b, 0.0, b_cut, b_cut)
    b_nch = rng.uniform(*BW_RANGE)
    off = _log_uniform(rng, max(OFFSET_RANGE[0], (b_nch + b_cut) / 2), OFFSET_RANGE[1])
    return IslandParams(a0, a1, sigma, big_b, off * rng.choice([-1.0, 1.0]), b_nch, b_cut)
