"""Closed-form per-island NLI integrals, per-span NLI PSD and link accumulation.

Each island integral is the double integral over a rectangular island of

    ((2a0 - 2a1 + s)^2 + (f1 f2 B)^2) / ((4a0^2 + (f1 f2 B)^2) ((2a0 + s)^2 + (f1 f2 B)^2))

with f1 spanning the CUT band and f2 the interferer band, both measured from
the CUT center. ``B`` is 4 pi^2 times the pair's effective dispersion.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (Link, LinkValidationError, NliReport, Span, SpanContribution,
                    validate_link)
from .physics import beta2_eff, link_transfer, span_power_transfer
from .specfun import li2_diff_asinh_approx, li2_imag_diff

__all__ = [
    "APPROXIMANT_MIN_ARG",
    "Branch",
    "DEGENERATE_MAX_ARG",
    "DegenerateDispersionError",
    "IslandParams",
    "IslandResult",
    "NliComputationError",
    "NliError",
    "PerturbativeRegimeError",
    "SpanNli",
    "gsnr",
    "i_cut_asinh",
    "i_cut_li2",
    "i_degenerate",
    "i_xci_asinh",
    "i_xci_li2",
    "island_integral",
    "island_params",
    "link_nli_psd",
    "select_branch",
    "span_nli_psd",
]

NLI_PREFACTOR = 16.0 / 27.0

# Largest Li2 argument below which the island is treated as dispersion-free.
# Relative gap to the Li2 form there is ~x^2/9, i.e. below 1e-6.
DEGENERATE_MAX_ARG = 2e-3
# The asinh approximant is used in "auto" mode only when every argument reaches this.
APPROXIMANT_MIN_ARG = 10.0


class NliError(ValueError):
    """Base class for closed-form evaluation errors."""


class PerturbativeRegimeError(NliError):
    """|alpha1| >= alpha0: the first-order expansion in alpha1 does not hold."""


class DegenerateDispersionError(NliError):
    """B == 0 makes the Li2/asinh forms 0/0; use :func:`i_degenerate`."""


class NliComputationError(NliError):
    """A closed form produced a non-finite or non-positive island integral."""


class Branch(str, enum.Enum):
    AUTO = "auto"
    LI2 = "li2"
    ASINH = "asinh"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class IslandParams:
    alpha0: float    # 1/m, at the interferer center (CUT center for SCI)
    alpha1: float    # 1/m
    sigma: float     # 1/m
    big_b: float     # 4 pi^2 beta2_eff, s^2/m
    f_offset: float  # interferer center minus CUT center, Hz
    b_nch: float     # interferer bandwidth, Hz
    b_cut: float     # CUT bandwidth, Hz

    @property
    def edges(self) -> tuple[float, float]:
        return self.f_offset - self.b_nch / 2, self.f_offset + self.b_nch / 2

    @property
    def is_sci(self) -> bool:
        return self.f_offset == 0 and self.b_nch == self.b_cut

    def li2_args(self) -> tuple[float, ...]:
        """Arguments of every Li2 difference the island's closed form evaluates."""
        kp = abs(self.big_b) / (2 * self.alpha0)
        kq = abs(self.big_b) / (2 * self.alpha0 + self.sigma)
        if self.is_sci:
            half_sq = self.b_cut * self.b_cut / 4
            return kp * half_sq, kq * half_sq
        return _xci_args(self)


def _xci_args(p: IslandParams) -> tuple[float, float, float, float]:
    kp = abs(p.big_b) / (2 * p.alpha0)
    kq = abs(p.big_b) / (2 * p.alpha0 + p.sigma)
    lo, hi = p.edges
    h = p.b_cut / 2
    return kp * lo * h, kp * hi * h, kq * lo * h, kq * hi * h


def _check(p: IslandParams) -> None:
    if not (p.alpha0 > 0):
        raise NliError(f"alpha0 must be > 0, got {p.alpha0!r}")
    if not (p.sigma > 0):
        raise NliError(f"sigma must be > 0, got {p.sigma!r}")
    if not (p.b_nch > 0 and p.b_cut > 0):
        raise NliError("island bandwidths must be > 0")
    if not abs(p.alpha1) < p.alpha0:
        raise PerturbativeRegimeError(
            f"|alpha1| = {abs(p.alpha1):g} >= alpha0 = {p.alpha0:g}")


def _check_dispersive(p: IslandParams) -> None:
    _check(p)
    if p.big_b == 0:
        raise DegenerateDispersionError("effective dispersion is zero; use i_degenerate")


def _coefficients(p: IslandParams) -> tuple[float, float, float]:
    a0, a1, s = p.alpha0, p.alpha1, p.sigma
    k_bulk = (2 * a0 + s) * (s - 2 * a1) * (4 * a0 - 2 * a1 + s)
    k_srs = 8 * a0 * a1 * (2 * a0 - a1 + s)
    # |B| rather than B keeps the result positive for either dispersion sign
    denom = a0 * abs(p.big_b) * s * (2 * a0 + s) * (4 * a0 + s)
    return k_bulk, k_srs, denom


def _positive(value: float, what: str) -> float:
    if not (value > 0 and math.isfinite(value)):
        raise NliComputationError(f"{what} evaluated to {value!r}")
    return value


def i_xci_li2(p: IslandParams) -> float:
    """Cross-channel island integral, exact Li2 form."""
    _check_dispersive(p)
    k_bulk, k_srs, denom = _coefficients(p)
    xp_lo, xp_hi, xq_lo, xq_hi = _xci_args(p)
    val = (k_bulk * (li2_imag_diff(xp_hi) - li2_imag_diff(xp_lo))
           + k_srs * (li2_imag_diff(xq_hi) - li2_imag_diff(xq_lo))) / (2 * denom)
    return _positive(val, "XCI Li2 integral")


def i_xci_asinh(p: IslandParams) -> float:
    """Cross-channel island integral with Li2 differences replaced by pi*asinh(x/2)."""
    _check_dispersive(p)
    k_bulk, k_srs, denom = _coefficients(p)
    xp_lo, xp_hi, xq_lo, xq_hi = _xci_args(p)
    f = li2_diff_asinh_approx
    val = (k_bulk * (f(xp_hi) - f(xp_lo)) + k_srs * (f(xq_hi) - f(xq_lo))) / (2 * denom)
    return _positive(val, "XCI asinh integral")


def _require_sci(p: IslandParams) -> None:
    if not p.is_sci:
        raise NliError("SCI island needs f_offset == 0 and b_nch == b_cut")


def i_cut_li2(p: IslandParams) -> float:
    """Self-channel island integral, exact Li2 form."""
    _require_sci(p)
    _check_dispersive(p)
    k_bulk, k_srs, denom = _coefficients(p)
    xp, xq = p.li2_args()
    val = (k_bulk * li2_imag_diff(xp) + k_srs * li2_imag_diff(xq)) / denom
    return _positive(val, "SCI Li2 integral")


def i_cut_asinh(p: IslandParams) -> float:
    """Self-channel island integral with the asinh approximant."""
    _require_sci(p)
    _check_dispersive(p)
    k_bulk, k_srs, denom = _coefficients(p)
    xp, xq = p.li2_args()
    val = math.pi * (k_bulk * math.asinh(xp / 2) + k_srs * math.asinh(xq / 2)) / denom
    return _positive(val, "SCI asinh integral")


def i_degenerate(p: IslandParams) -> float:
    """Island integral for zero effective dispersion (constant integrand)."""
    _check(p)
    a0, a1, s = p.alpha0, p.alpha1, p.sigma
    val = (p.b_cut * p.b_nch / 4) * (2 * a0 - 2 * a1 + s) ** 2 / (a0 ** 2 * (2 * a0 + s) ** 2)
    return _positive(val, "degenerate island integral")


def select_branch(p: IslandParams, requested: Branch | str = Branch.AUTO) -> Branch:
    requested = Branch(requested)
    if p.big_b == 0:
        return Branch.DEGENERATE
    args = [abs(x) for x in p.li2_args()]
    if max(args) < DEGENERATE_MAX_ARG:
        return Branch.DEGENERATE
    if requested is Branch.AUTO:
        return Branch.ASINH if min(args) >= APPROXIMANT_MIN_ARG else Branch.LI2
    return requested


def island_integral(p: IslandParams, branch: Branch | str = Branch.AUTO) -> tuple[float, Branch]:
    """Evaluate one island with the dispatched formula; returns (value, branch used)."""
    used = select_branch(p, branch)
    if used is Branch.DEGENERATE:
        return i_degenerate(p), used
    if p.is_sci:
        fn = i_cut_li2 if used is Branch.LI2 else i_cut_asinh
    else:
        fn = i_xci_li2 if used is Branch.LI2 else i_xci_asinh
    return fn(p), used


def island_params(span: Span, index: int) -> IslandParams:
    """Island parameters for channel ``index`` of the span's comb against its CUT.

    Loss parameters are sampled at the interferer center; ``index`` equal to the
    CUT index gives the SCI island.
    """
    comb = span.comb
    cut = comb.cut
    ch = comb.channels[index]
    loss = span.loss
    f = ch.center
    if index == comb.cut_index:
        offset, b_nch = 0.0, cut.bandwidth
    else:
        offset, b_nch = f - cut.center, ch.bandwidth
    return IslandParams(
        alpha0=loss.alpha0(f),
        alpha1=loss.alpha1(f),
        sigma=loss.sigma(f),
        big_b=4 * math.pi ** 2 * beta2_eff(span.fiber, f, cut.center),
        f_offset=offset,
        b_nch=b_nch,
        b_cut=cut.bandwidth,
    )


@dataclass(frozen=True)
class IslandResult:
    index: int
    branch: Branch
    value: float  # island integral, m^2 Hz^2


@dataclass(frozen=True)
class SpanNli:
    psd: float                        # W/Hz at the end of the span
    islands: tuple[IslandResult, ...]

    @property
    def branches(self) -> tuple[str, ...]:
        return tuple(r.branch.value for r in self.islands)


def span_nli_psd(span: Span, branch: Branch | str = Branch.AUTO) -> SpanNli:
    """NLI PSD generated in one span at the CUT center, referred to the span end."""
    comb = span.comb
    cut = comb.cut
    results = []
    terms = []
    for i, ch in enumerate(comb.channels):
        p = island_params(span, i)
        try:
            value, used = island_integral(p, branch)
        except NliError as exc:
            raise type(exc)(f"island of channel {i} ({ch.center / 1e12:.6f} THz): {exc}") from exc
        results.append(IslandResult(i, used, value))
        if i == comb.cut_index:
            terms.append(cut.psd ** 2 * value)
        else:
            terms.append(2.0 * ch.psd ** 2 * value)
    gamma = span.fiber.gamma
    psd = (NLI_PREFACTOR * gamma * gamma * span_power_transfer(span, cut.center)
           * cut.psd * math.fsum(terms))
    return SpanNli(psd, tuple(results))


def link_nli_psd(link: Link, branch: Branch | str = Branch.AUTO,
                 validate: bool = True) -> NliReport:
    """Incoherently accumulated NLI PSD at the link end, at the CUT center."""
    if validate:
        check = validate_link(link)
        if not check.ok:
            raise LinkValidationError(check.violations)
    cut = link.cut
    n_spans = len(link.spans)
    contributions = []
    for n, span in enumerate(link.spans, start=1):
        nli = span_nli_psd(span, branch)
        transfer = link_transfer(link, cut.center, n + 1, n_spans)
        contributions.append(SpanContribution(n, nli.psd, transfer, nli.branches))
    total = math.fsum(c.at_link_end for c in contributions)
    return NliReport(cut.center, cut.bandwidth, total, tuple(contributions))


def gsnr(report: NliReport, cut_power: float, ase_power: float) -> float:
    """Signal power over ASE plus NLI power in the CUT bandwidth."""
    if not cut_power > 0:
        raise ValueError("cut_power must be > 0")
    if not ase_power >= 0:
        raise ValueError("ase_power must be >= 0")
    noise = ase_power + report.nli_power
    if noise == 0:
        raise ZeroDivisionError("ASE and NLI power are both zero")
    return cut_power / noise
