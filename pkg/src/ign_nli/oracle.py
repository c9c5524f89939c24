"""Quadrature references for the closed-form NLI formulas.

Three integrand tiers, from most to least approximated:

``rational``
    |first-order-in-alpha1 kernel|^2, a rational function of f1*f2.
``matched``
    The exact spatial integral with dispersion and loss held constant over
    each channel (sampled at the interferer center), infinite span length by
    default.
``full``
    The exact phase mismatch of a cubic propagation constant and all four
    loss terms, with loss tables interpolated linearly in frequency, over the
    finite span length.

Frequencies inside this module are offsets from the CUT center unless a
parameter name says otherwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .engine import NLI_PREFACTOR, IslandParams, island_params
from .model import Link, LinkValidationError, NliReport, Span, SpanContribution, validate_link
from .physics import fiber_power_transfer, link_transfer, span_power_transfer
from .quadrature import gauss_kronrod_2d

__all__ = [
    "DeltaAlpha",
    "OracleTier",
    "QuadratureConfig",
    "island_quadrature",
    "kernel_sq",
    "link_nli_quadrature",
    "rho_sq",
    "spatial_integral",
    "span_nli_quadrature",
]


class OracleTier(str, enum.Enum):
    RATIONAL = "rational"
    MATCHED = "matched"
    FULL = "full"


class DeltaAlpha(str, enum.Enum):
    """Sign pattern of the four-frequency loss combination in the full tier.

    ``consistent``: alpha(f1) + alpha(f2) + alpha(f1+f2-f) - alpha(f), as the
    conjugated propagation constant requires. ``as_printed`` keeps the same
    alpha0 signs but adds alpha1(f) exp(-sigma z) instead of subtracting it.
    """

    CONSISTENT = "consistent"
    AS_PRINTED = "as_printed"


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    max_subdivisions: int = 4000  # intervals per axis
    contour_nodes: int = 12       # Gauss-Legendre nodes per panel of the spatial contour

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.max_subdivisions < 1 or self.contour_nodes < 2:
            raise ValueError("quadrature sizes must be positive")


# Panels in the contour variable s = kappa * z; the weight exp(-s) is below 1e-27 past 64.
_CONTOUR_EDGES = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
_contour_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _contour_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _contour_cache:
        x, w = np.polynomial.legendre.leggauss(n)
        nodes, weights = [], []
        for a, b in zip(_CONTOUR_EDGES, _CONTOUR_EDGES[1:]):
            nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
            weights.append(0.5 * (b - a) * w)
        _contour_cache[n] = (np.concatenate(nodes), np.concatenate(weights))
    return _contour_cache[n]


def _ray_integral(kappa, coeffs, sigmas, n_nodes):
    # int_0^inf exp(-kappa z - sum_i c_i (1 - exp(-sigma_i z))) dz along z = s / kappa
    s, w = _contour_rule(n_nodes)
    kappa = np.asarray(kappa, dtype=complex)[..., None]
    expo = -s
    for c, sig in zip(coeffs, sigmas):
        c = np.asarray(c, dtype=float)[..., None]
        sig = np.asarray(sig, dtype=float)[..., None]
        expo = expo - c * (-np.expm1(-sig * s / kappa))
    return (np.exp(expo) @ w) / kappa[..., 0]


def spatial_integral(kappa, coeffs=(), sigmas=(), length: float | None = None,
                     n_nodes: int = 12):
    """Integral of exp(-phi(z)) over [0, length] (or [0, inf) when ``length`` is None).

    phi(z) = kappa z + sum_i c_i (1 - exp(-sigma_i z)), Re(kappa) > 0, sigma_i > 0.
    The integrand is analytic and bounded in the right half plane, so the path
    is rotated onto the ray where kappa z is real; there the integrand decays
    as exp(-s) without oscillating. Inputs broadcast elementwise.
    """
    kappa = np.asarray(kappa, dtype=complex)
    if np.any(kappa.real <= 0):
        raise ValueError("spatial integral needs Re(kappa) > 0")
    coeffs = [np.asarray(c, dtype=float) for c in coeffs]
    sigmas = [np.asarray(s, dtype=float) for s in sigmas]
    head = _ray_integral(kappa, coeffs, sigmas, n_nodes)
    if length is None:
        return head
    decay = [np.exp(-s * length) for s in sigmas]
    phi_end = kappa * length + sum(c * (1.0 - d) for c, d in zip(coeffs, decay))
    tail = _ray_integral(kappa, [c * d for c, d in zip(coeffs, decay)], sigmas, n_nodes)
    return head - np.exp(-phi_end) * tail


def _rational_kernel(p: IslandParams, f1, f2):
    a0, a1, s = p.alpha0, p.alpha1, p.sigma
    y = (f1 * f2 * p.big_b) ** 2
    return ((2 * a0 - 2 * a1 + s) ** 2 + y) / ((4 * a0 ** 2 + y) * ((2 * a0 + s) ** 2 + y))


def _matched_kernel(p: IslandParams, f1, f2, length, n_nodes):
    omega = p.big_b * f1 * f2
    kappa = 2 * p.alpha0 - 1j * omega
    c = np.broadcast_to(2 * p.alpha1 / p.sigma, np.shape(kappa))
    val = spatial_integral(kappa, [c], [np.broadcast_to(p.sigma, np.shape(kappa))],
                           length=length, n_nodes=n_nodes)
    return np.abs(val) ** 2


def _full_kernel(span: Span, f1, f2, delta_alpha: DeltaAlpha, n_nodes):
    fiber, loss = span.fiber, span.loss
    f_cut = span.comb.cut.center
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    f1, f2 = np.broadcast_arrays(f1, f2)
    # exact mismatch of the cubic propagation constant, written in CUT offsets
    d_beta = -4 * math.pi ** 2 * f1 * f2 * (
        fiber.beta2 + math.pi * fiber.beta3 * (f1 + f2 + 2 * f_cut - 2 * fiber.f_c))
    freqs = (f_cut + f1, f_cut + f2, f_cut + f1 + f2, np.full_like(f1, f_cut))
    a0 = [loss.alpha0.interp(f) for f in freqs]
    a1 = [loss.alpha1.interp(f) for f in freqs]
    sig = [loss.sigma.interp(f) for f in freqs]
    sign0 = (1.0, 1.0, 1.0, -1.0)
    sign1 = sign0 if DeltaAlpha(delta_alpha) is DeltaAlpha.CONSISTENT else (1.0, 1.0, 1.0, 1.0)
    kappa = sum(sg * a for sg, a in zip(sign0, a0)) + 1j * d_beta
    coeffs = [sg * a / s for sg, a, s in zip(sign1, a1, sig)]
    val = spatial_integral(kappa, coeffs, sig, length=fiber.length, n_nodes=n_nodes)
    return np.abs(val) ** 2


def kernel_sq(f1, f2, p: IslandParams, span: Span | None, tier: OracleTier | str,
              cfg: QuadratureConfig = QuadratureConfig(), *, truncate: bool = False,
              delta_alpha: DeltaAlpha | str = DeltaAlpha.CONSISTENT):
    """|rho|^2 without the CUT's outer span loss factor, at CUT offsets (f1, f2).

    ``p`` supplies the per-island sampled parameters used by the rational and
    matched tiers; the full tier reads everything from ``span``.
    ``truncate`` ends the matched-tier spatial integral at the span length.
    """
    tier = OracleTier(tier)
    if tier is OracleTier.RATIONAL:
        return _rational_kernel(p, np.asarray(f1, float), np.asarray(f2, float))
    if tier is OracleTier.MATCHED:
        if truncate and span is None:
            raise ValueError("truncated matched tier needs the span length")
        length = span.fiber.length if truncate else None
        return _matched_kernel(p, np.asarray(f1, float), np.asarray(f2, float), length,
                               cfg.contour_nodes)
    if span is None:
        raise ValueError("full tier needs the span")
    return _full_kernel(span, f1, f2, delta_alpha, cfg.contour_nodes)


def _island_of(span: Span, f1: float, f2: float) -> int:
    comb = span.comb
    cut = comb.cut
    other = f2 if cut.contains(f1) else f1 if cut.contains(f2) else None
    if other is None:
        raise ValueError("neither frequency lies in the CUT band: not on an XCI/SCI island")
    if cut.contains(other):
        return comb.cut_index
    for i, ch in enumerate(comb.channels):
        if i != comb.cut_index and ch.contains(other):
            return i
    raise ValueError(f"{other / 1e12:.6f} THz is not inside any channel")


def rho_sq(f1: float, f2: float, span: Span, tier: OracleTier | str,
           cfg: QuadratureConfig = QuadratureConfig(), *, truncate: bool = False,
           delta_alpha: DeltaAlpha | str = DeltaAlpha.CONSISTENT) -> float:
    """|rho(f1, f2, f_CUT)|^2 for absolute frequencies f1, f2 in Hz."""
    f_cut = span.comb.cut.center
    p = island_params(span, _island_of(span, f1, f2))
    k = kernel_sq(f1 - f_cut, f2 - f_cut, p, span, tier, cfg, truncate=truncate,
                  delta_alpha=delta_alpha)
    return float(fiber_power_transfer(span, f_cut) * k)


def island_quadrature(p: IslandParams, span: Span | None, tier: OracleTier | str,
                      cfg: QuadratureConfig = QuadratureConfig(), *, truncate: bool = False,
                      delta_alpha: DeltaAlpha | str = DeltaAlpha.CONSISTENT) -> float:
    """Integral of :func:`kernel_sq` over the island rectangle.

    f1 runs over the CUT band and f2 over the interferer band; both axes are
    split at zero, where the integrand peaks.
    """
    x_range = (-p.b_cut / 2, p.b_cut / 2)
    y_range = p.edges

    def integrand(f1, f2):
        return kernel_sq(f1, f2, p, span, tier, cfg, truncate=truncate, delta_alpha=delta_alpha)

    value, _ = gauss_kronrod_2d(integrand, x_range, y_range, rel_tol=cfg.rel_tol,
                                x_breakpoints=(0.0,), y_breakpoints=(0.0,),
                                max_intervals=cfg.max_subdivisions)
    return value


def span_nli_quadrature(span: Span, tier: OracleTier | str,
                        cfg: QuadratureConfig = QuadratureConfig(), *, truncate: bool = False,
                        delta_alpha: DeltaAlpha | str = DeltaAlpha.CONSISTENT) -> float:
    """Span NLI PSD at the CUT center with every island integrated numerically."""
    comb = span.comb
    cut = comb.cut
    terms = []
    for i, ch in enumerate(comb.channels):
        value = island_quadrature(island_params(span, i), span, tier, cfg, truncate=truncate,
                                  delta_alpha=delta_alpha)
        terms.append(cut.psd ** 2 * value if i == comb.cut_index else 2.0 * ch.psd ** 2 * value)
    gamma = span.fiber.gamma
    return (NLI_PREFACTOR * gamma * gamma * span_power_transfer(span, cut.center)
            * cut.psd * math.fsum(terms))


def link_nli_quadrature(link: Link, tier: OracleTier | str,
                        cfg: QuadratureConfig = QuadratureConfig(), **kwargs) -> NliReport:
    """Oracle counterpart of :func:`ign_nli.engine.link_nli_psd`."""
    check = validate_link(link)
    if not check.ok:
        raise LinkValidationError(check.violations)
    cut = link.cut
    n_spans = len(link.spans)
    tier = OracleTier(tier)
    cache: dict[int, float] = {}
    contributions = []
    for n, span in enumerate(link.spans, start=1):
        # identical span objects share one evaluation
        key = id(span)
        if key not in cache:
            cache[key] = span_nli_quadrature(span, tier, cfg, **kwargs)
        transfer = link_transfer(link, cut.center, n + 1, n_spans)
        contributions.append(SpanContribution(n, cache[key], transfer,
                                              (f"oracle:{tier.value}",) * len(span.comb.channels)))
    total = math.fsum(c.at_link_end for c in contributions)
    return NliReport(cut.center, cut.bandwidth, total, tuple(contributions))
