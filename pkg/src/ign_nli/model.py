"""Link data model: fibers, loss profiles, WDM combs, spans and reports.

Everything is stored in SI base units (Hz, m, 1/m, W/Hz). Loss coefficients
follow the field convention: power decays as ``exp(-2*alpha*z)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "AUTO_GAIN",
    "Channel",
    "FiberParams",
    "FrequencyTable",
    "LinkValidationError",
    "Link",
    "LossModel",
    "NliReport",
    "Span",
    "SpanContribution",
    "ValidationResult",
    "WdmComb",
    "db_per_km_to_field_alpha",
    "validate_link",
]

AUTO_GAIN = "auto"


def db_per_km_to_field_alpha(a_db_per_km: float) -> float:
    """Convert a power attenuation in dB/km to a field loss coefficient in 1/m."""
    return a_db_per_km * math.log(10.0) / 20.0 / 1e3


class LinkValidationError(ValueError):
    """A link violates one or more structural invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = tuple(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class FrequencyTable:
    """Sorted ``(frequency, value)`` samples of a per-frequency quantity.

    Calling the table does a nearest-sample lookup, which is what the
    closed-form formulas need (values only matter at channel centers).
    :meth:`interp` interpolates linearly and holds the end values outside
    the table range.
    """

    frequencies: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        vals = tuple(float(v) for v in self.values)
        if not freqs or len(freqs) != len(vals):
            raise ValueError("frequency table needs matching, non-empty frequency/value lists")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequency table must be strictly increasing in frequency")
        if not all(math.isfinite(v) for v in freqs + vals):
            raise ValueError("frequency table entries must be finite")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float) -> "FrequencyTable":
        return cls((0.0,), (value,))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "FrequencyTable":
        pairs = sorted(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    def __call__(self, f: float) -> float:
        if self.is_constant:
            return self.values[0]
        freqs = self.frequencies
        i = int(np.searchsorted(freqs, f))
        if i == 0:
            return self.values[0]
        if i == len(freqs):
            return self.values[-1]
        # ties go to the lower sample
        return self.values[i - 1] if f - freqs[i - 1] <= freqs[i] - f else self.values[i]

    def interp(self, f):
        if self.is_constant:
            return np.full(np.shape(f), self.values[0]) if np.ndim(f) else self.values[0]
        out = np.interp(f, self.frequencies, self.values)
        return out if np.ndim(f) else float(out)

    def map(self, fn: Callable[[float], float]) -> "FrequencyTable":
        return FrequencyTable(self.frequencies, tuple(fn(v) for v in self.values))


@dataclass(frozen=True)
class FiberParams:
    gamma: float   # 1/(W m)
    beta2: float   # s^2/m
    beta3: float   # s^3/m
    f_c: float     # Hz
    length: float  # m

    def __post_init__(self):
        for name in ("gamma", "beta2", "beta3", "f_c", "length"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"fiber {name} must be finite")
        if self.gamma < 0:
            raise ValueError("fiber gamma must be >= 0")
        if self.length <= 0:
            raise ValueError("fiber length must be > 0")
        if self.f_c <= 0:
            raise ValueError("dispersion reference frequency f_c must be > 0")


@dataclass(frozen=True)
class LossModel:
    """alpha(f, z) = alpha0(f) + alpha1(f) * exp(-sigma(f) * z), all in 1/m."""

    alpha0: FrequencyTable
    alpha1: FrequencyTable
    sigma: FrequencyTable

    @classmethod
    def flat(cls, alpha0: float, alpha1: float = 0.0, sigma: float = 1.0) -> "LossModel":
        return cls(FrequencyTable.constant(alpha0), FrequencyTable.constant(alpha1),
                   FrequencyTable.constant(sigma))


@dataclass(frozen=True)
class Channel:
    center: float     # Hz
    bandwidth: float  # Hz
    psd: float        # W/Hz at span input

    def __post_init__(self):
        if not (self.bandwidth > 0):
            raise ValueError(f"channel bandwidth must be > 0, got {self.bandwidth!r}")
        if not (self.psd >= 0) or not math.isfinite(self.psd):
            raise ValueError(f"channel psd must be finite and >= 0, got {self.psd!r}")
        if not (self.center > self.bandwidth / 2):
            raise ValueError("channel center must exceed half its bandwidth")

    @property
    def power(self) -> float:
        return self.psd * self.bandwidth

    def contains(self, f: float) -> bool:
        return abs(f - self.center) <= self.bandwidth / 2


@dataclass(frozen=True)
class WdmComb:
    channels: tuple[Channel, ...]
    cut_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.channels:
            raise ValueError("a WDM comb needs at least one channel")
        if not 0 <= self.cut_index < len(self.channels):
            raise ValueError(f"cut_index {self.cut_index} out of range for "
                             f"{len(self.channels)} channels")

    @property
    def cut(self) -> Channel:
        return self.channels[self.cut_index]

    @property
    def total_power(self) -> float:
        return math.fsum(ch.power for ch in self.channels)

    def index_of(self, center: float, rel_tol: float = 1e-12) -> int:
        for i, ch in enumerate(self.channels):
            if math.isclose(ch.center, center, rel_tol=rel_tol, abs_tol=0.0):
                return i
        raise KeyError(f"no channel centered at {center!r} Hz")

    def with_cut(self, index: int) -> "WdmComb":
        return replace(self, cut_index=index)

    def scaled(self, factor: float) -> "WdmComb":
        return replace(self, channels=tuple(replace(ch, psd=ch.psd * factor)
                                            for ch in self.channels))

    def overlaps(self) -> list[tuple[int, int]]:
        order = sorted(range(len(self.channels)), key=lambda i: self.channels[i].center)
        bad = []
        for i, j in zip(order, order[1:]):
            a, b = self.channels[i], self.channels[j]
            # small relative slack so that exactly adjacent channels pass
            gap = (b.center - a.center) - (a.bandwidth + b.bandwidth) / 2
            if gap < -1e-9 * max(a.bandwidth, b.bandwidth):
                bad.append((i, j))
        return bad


GainSpec = Union[FrequencyTable, str]


@dataclass(frozen=True)
class Span:
    fiber: FiberParams
    loss: LossModel
    comb: WdmComb
    lumped_gain: GainSpec = AUTO_GAIN  # power gain table, or "auto" for transparent

    def __post_init__(self):
        if isinstance(self.lumped_gain, str) and self.lumped_gain != AUTO_GAIN:
            raise ValueError(f"lumped_gain must be a FrequencyTable or {AUTO_GAIN!r}")

    @property
    def transparent(self) -> bool:
        return isinstance(self.lumped_gain, str)

    def with_comb(self, comb: WdmComb) -> "Span":
        return replace(self, comb=comb)


@dataclass(frozen=True)
class Link:
    spans: tuple[Span, ...]

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        if not self.spans:
            raise ValueError("a link needs at least one span")

    def __len__(self) -> int:
        return len(self.spans)

    @property
    def cut(self) -> Channel:
        return self.spans[0].comb.cut

    def with_cut_frequency(self, center: float) -> "Link":
        """Re-designate the channel under test in every span."""
        spans = []
        for n, span in enumerate(self.spans, start=1):
            try:
                idx = span.comb.index_of(center)
            except KeyError:
                raise LinkValidationError(
                    [f"span {n}: no channel at {center / 1e12:.6f} THz to act as CUT"]) from None
            spans.append(span.with_comb(span.comb.with_cut(idx)))
        return Link(tuple(spans))

    def __add__(self, other: "Link") -> "Link":
        return Link(self.spans + other.spans)


@dataclass(frozen=True)
class SpanContribution:
    span: int                   # 1-based span index
    nli_psd: float              # W/Hz at the end of the span
    transfer: float             # power transfer from span end to link end
    branches: tuple[str, ...]   # formula branch per island, in channel order

    @property
    def at_link_end(self) -> float:
        return self.nli_psd * self.transfer


@dataclass(frozen=True)
class NliReport:
    cut_frequency: float
    cut_bandwidth: float
    nli_psd_end: float
    per_span: tuple[SpanContribution, ...] = ()
    gsnr: float | None = None

    @property
    def nli_power(self) -> float:
        return self.nli_psd_end * self.cut_bandwidth

    def branch_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for contrib in self.per_span:
            for b in contrib.branches:
                counts[b] = counts.get(b, 0) + 1
        return counts


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_link(link: Link) -> ValidationResult:
    """Collect structural problems with ``link``; never raises for bad data."""
    problems: list[str] = []
    ref = link.spans[0].comb.cut
    for n, span in enumerate(link.spans, start=1):
        comb = span.comb
        cut = comb.cut
        if cut.center != ref.center:
            problems.append(f"span {n}: CUT frequency varies across spans "
                            f"({cut.center / 1e12:.6f} THz vs {ref.center / 1e12:.6f} THz)")
        if cut.bandwidth != ref.bandwidth:
            problems.append(f"span {n}: CUT bandwidth varies across spans "
                            f"({cut.bandwidth / 1e9:.6g} GHz vs {ref.bandwidth / 1e9:.6g} GHz)")
        for i, j in comb.overlaps():
            problems.append(f"span {n}: channels {i} and {j} overlap")
        loss = span.loss
        for i, ch in enumerate(comb.channels):
            a0, a1, s = loss.alpha0(ch.center), loss.alpha1(ch.center), loss.sigma(ch.center)
            if not a0 > 0:
                problems.append(f"span {n}, channel {i}: alpha0 must be > 0 (got {a0:g} 1/m)")
            if not s > 0:
                problems.append(f"span {n}, channel {i}: sigma must be > 0 (got {s:g} 1/m)")
            if not abs(a1) < a0:
                problems.append(f"span {n}, channel {i}: perturbative regime violated "
                                f"(|alpha1| = {abs(a1):g} >= alpha0 = {a0:g} 1/m)")
        if not span.transparent:
            for i, ch in enumerate(comb.channels):
                g = span.lumped_gain(ch.center)
                if not (g > 0 and math.isfinite(g)):
                    problems.append(f"span {n}, channel {i}: lumped gain must be positive")
    return ValidationResult(tuple(problems))
