"""Link description files (YAML) and CSV reports.

Every numeric field name carries its unit. A minimal document::

    metadata: {name: demo, version: nli-spec/1}
    comb:
      channels:
        - {center_THz: 193.4, bandwidth_GHz: 32, power_dBm: 0}
      cut: {index: 0}
    spans:
      - length_km: 80
        fiber: {gamma_per_W_km: 1.3, beta2_ps2_km: -21.3, beta3_ps3_km: 0.12, fc_THz: 193.4}
        loss: {alpha0_dB_km: 0.2}
        lumped_gain: transparent

Spans without a ``comb`` use the top-level one; ``comb: inherit`` copies the
previous span's comb. ``loss.srs`` is absent (no SRS), ``fit`` (derived from
the span comb with the ``srs_fit`` block) or explicit ``alpha1_dB_km`` and
``sigma_per_km`` tables. Tables are lists of ``[THz, value]`` pairs.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Any, Iterable, Sequence

import yaml

from .model import (AUTO_GAIN, Channel, FiberParams, FrequencyTable, Link, LinkValidationError,
                    LossModel, NliReport, Span, WdmComb, db_per_km_to_field_alpha, validate_link)
from .physics import SigmaPolicy, SrsFitConfig, fit_srs_params

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "FORMAT_VERSION",
    "emit_report_csv",
    "load_link",
    "parse_link_spec",
    "parse_report_csv",
    "serialize_link",
]

FORMAT_VERSION = "nli-spec/1"
CSV_HEADER = ("cut_frequency_THz", "nli_psd_end_W_per_Hz", "nli_power_dBm", "gsnr_dB",
              "spans", "branch_summary")

THZ = 1e12
GHZ = 1e9
KM = 1e3
_DB_KM_PER_FIELD = 1.0 / db_per_km_to_field_alpha(1.0)


class ConfigError(ValueError):
    """Malformed link description; the message starts with the offending location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _get(node: dict, key: str, where: str, default: Any = ...):
    if not isinstance(node, dict):
        raise ConfigError(where, "expected a mapping")
    if key not in node:
        if default is ...:
            raise ConfigError(where, f"missing field '{key}'")
        return default
    return node[key]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(where, "value must be finite")
    return out


def _table(value: Any, where: str, scale=lambda v: v) -> FrequencyTable:
    """Scalar or ``[[THz, value], ...]`` -> FrequencyTable in SI units."""
    if not isinstance(value, list):
        return FrequencyTable.constant(scale(_number(value, where)))
    if not value:
        raise ConfigError(where, "table must not be empty")
    freqs, vals = [], []
    for k, row in enumerate(value):
        if not (isinstance(row, list) and len(row) == 2):
            raise ConfigError(f"{where}[{k}]", "table rows must be [THz, value] pairs")
        freqs.append(_number(row[0], f"{where}[{k}][0]") * THZ)
        vals.append(scale(_number(row[1], f"{where}[{k}][1]")))
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise ConfigError(where, "table must be sorted by strictly increasing frequency")
    return FrequencyTable(tuple(freqs), tuple(vals))


def _fiber(node: Any, length: float, profiles: dict, where: str) -> FiberParams:
    if isinstance(node, str):
        if node not in profiles:
            raise ConfigError(where, f"unknown fiber profile '{node}'")
        node, where = profiles[node], f"fiber_profiles.{node}"
    try:
        return FiberParams(
            gamma=_number(_get(node, "gamma_per_W_km", where), where + ".gamma_per_W_km") / KM,
            beta2=_number(_get(node, "beta2_ps2_km", where), where + ".beta2_ps2_km") * 1e-24 / KM,
            beta3=_number(_get(node, "beta3_ps3_km", where, 0.0), where + ".beta3_ps3_km")
            * 1e-36 / KM,
            f_c=_number(_get(node, "fc_THz", where), where + ".fc_THz") * THZ,
            length=length,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(where, str(exc)) from None


def _comb(node: Any, where: str) -> WdmComb:
    channels_node = _get(node, "channels", where)
    if not isinstance(channels_node, list) or not channels_node:
        raise ConfigError(where + ".channels", "expected a non-empty list")
    channels = []
    for k, ch in enumerate(channels_node):
        w = f"{where}.channels[{k}]"
        center = _number(_get(ch, "center_THz", w), w + ".center_THz") * THZ
        bandwidth = _number(_get(ch, "bandwidth_GHz", w), w + ".bandwidth_GHz") * GHZ
        has_p, has_psd = "power_dBm" in ch, "psd_W_per_Hz" in ch
        if has_p == has_psd:
            raise ConfigError(w, "give exactly one of power_dBm or psd_W_per_Hz")
        if has_p:
            # rectangular spectrum: PSD is power over bandwidth
            psd = 1e-3 * 10 ** (_number(ch["power_dBm"], w + ".power_dBm") / 10) / bandwidth
        else:
            psd = _number(ch["psd_W_per_Hz"], w + ".psd_W_per_Hz")
        try:
            channels.append(Channel(center, bandwidth, psd))
        except ValueError as exc:
            raise ConfigError(w, str(exc)) from None
    cut = _get(node, "cut", where, {"index": 0})
    w = where + ".cut"
    if isinstance(cut, dict) and "index" in cut and "center_THz" not in cut:
        idx = cut["index"]
        if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < len(channels):
            raise ConfigError(w, f"index {idx!r} out of range for {len(channels)} channels")
    elif isinstance(cut, dict) and "center_THz" in cut and "index" not in cut:
        f = _number(cut["center_THz"], w + ".center_THz") * THZ
        matches = [i for i, ch in enumerate(channels)
                   if math.isclose(ch.center, f, rel_tol=1e-12, abs_tol=0.0)]
        if not matches:
            raise ConfigError(w, f"CUT frequency not found: no channel centered at "
                                 f"{f / THZ:.6f} THz")
        idx = matches[0]
    else:
        raise ConfigError(w, "expected {index: N} or {center_THz: F}")
    return WdmComb(tuple(channels), idx)


def _srs_config(node: Any, where: str) -> SrsFitConfig:
    slope = _number(_get(node, "raman_slope_per_W_m_Hz", where), where + ".raman_slope_per_W_m_Hz")
    policy_name = _get(node, "sigma_policy", where, SigmaPolicy.UNIFORM_AVERAGE.value)
    try:
        policy = SigmaPolicy(policy_name)
    except ValueError:
        raise ConfigError(where + ".sigma_policy", f"unknown policy {policy_name!r}") from None
    override = None
    if "sigma_per_km" in node:
        override = _table(node["sigma_per_km"], where + ".sigma_per_km", lambda v: v / KM)
    link_wide = _get(node, "link_wide", where, False)
    if not isinstance(link_wide, bool):
        raise ConfigError(where + ".link_wide", "expected true or false")
    try:
        return SrsFitConfig(slope, policy, override, link_wide)
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from None


def _loss(node: Any, comb: WdmComb, srs_cfg: SrsFitConfig | None, fitted: LossModel | None,
          where: str) -> tuple[LossModel, LossModel | None]:
    """Returns the span's loss model and, for link-wide fits, the fit to reuse."""
    alpha0 = _table(_get(node, "alpha0_dB_km", where), where + ".alpha0_dB_km",
                    db_per_km_to_field_alpha)
    srs = _get(node, "srs", where, None)
    if srs is None:
        # no SRS: sigma is irrelevant but must be positive
        return LossModel(alpha0, FrequencyTable.constant(0.0),
                         FrequencyTable.constant(2.0 * max(alpha0.values))), fitted
    if srs == "fit":
        if srs_cfg is None:
            raise ConfigError(where + ".srs", "'fit' needs a top-level srs_fit block")
        if srs_cfg.link_wide and fitted is not None:
            return LossModel(alpha0, fitted.alpha1, fitted.sigma), fitted
        try:
            fit = fit_srs_params(comb, [alpha0(ch.center) for ch in comb.channels], srs_cfg)
        except ValueError as exc:
            raise ConfigError(where + ".srs", str(exc)) from None
        model = fit.loss_model()
        return LossModel(alpha0, model.alpha1, model.sigma), model if srs_cfg.link_wide else None
    if isinstance(srs, dict):
        alpha1 = _table(_get(srs, "alpha1_dB_km", where + ".srs"), where + ".srs.alpha1_dB_km",
                        db_per_km_to_field_alpha)
        sigma = _table(_get(srs, "sigma_per_km", where + ".srs"), where + ".srs.sigma_per_km",
                       lambda v: v / KM)
        return LossModel(alpha0, alpha1, sigma), fitted
    raise ConfigError(where + ".srs", "expected 'fit' or {alpha1_dB_km, sigma_per_km}")


def _gain(node: Any, where: str):
    if node in (None, "transparent"):
        return AUTO_GAIN
    table = _table(_get(node, "gain_dB", where), where + ".gain_dB", lambda v: 10 ** (v / 10))
    return table


def parse_link_spec(document: str, validate: bool = True) -> Link:
    """Parse a YAML link description into an SI-unit :class:`Link`.

    Raises :class:`ConfigError` for malformed input and
    :class:`LinkValidationError` when the assembled link is invalid.
    """
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "document"
        raise ConfigError(where, f"YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(doc, dict):
        raise ConfigError("document", "expected a mapping at top level")
    meta = _get(doc, "metadata", "document", {})
    version = _get(meta, "version", "metadata", None)
    if version != FORMAT_VERSION:
        raise ConfigError("metadata.version", f"unsupported version {version!r}, "
                                              f"expected {FORMAT_VERSION!r}")
    profiles = _get(doc, "fiber_profiles", "document", {}) or {}
    srs_cfg = _srs_config(doc["srs_fit"], "srs_fit") if doc.get("srs_fit") else None
    default_comb = _comb(doc["comb"], "comb") if "comb" in doc else None
    spans_node = _get(doc, "spans", "document")
    if not isinstance(spans_node, list) or not spans_node:
        raise ConfigError("spans", "expected a non-empty list")

    spans: list[Span] = []
    fitted: LossModel | None = None
    prev_comb: WdmComb | None = None
    for n, node in enumerate(spans_node):
        where = f"spans[{n}]"
        length = _number(_get(node, "length_km", where), where + ".length_km") * KM
        if length <= 0:
            raise ConfigError(where + ".length_km", "must be > 0")
        fiber = _fiber(_get(node, "fiber", where), length, profiles, where + ".fiber")
        comb_node = node.get("comb")
        if comb_node == "inherit":
            if prev_comb is None:
                raise ConfigError(where + ".comb", "'inherit' is not allowed on the first span")
            comb = prev_comb
        elif comb_node is None:
            if default_comb is None:
                raise ConfigError(where, "no comb given and no top-level comb to fall back on")
            comb = default_comb
        else:
            comb = _comb(comb_node, where + ".comb")
        loss, fitted = _loss(_get(node, "loss", where), comb, srs_cfg, fitted, where + ".loss")
        spans.append(Span(fiber, loss, comb, _gain(node.get("lumped_gain"),
                                                    where + ".lumped_gain")))
        prev_comb = comb

    link = Link(tuple(spans))
    if validate:
        check = validate_link(link)
        if not check.ok:
            raise LinkValidationError(check.violations)
    return link


def load_link(path: str, validate: bool = True) -> Link:
    with open(path, encoding="utf-8") as fh:
        return parse_link_spec(fh.read(), validate=validate)


def _table_out(table: FrequencyTable, scale) -> Any:
    if table.is_constant:
        return scale(table.values[0])
    return [[f / THZ, scale(v)] for f, v in zip(table.frequencies, table.values)]


def serialize_link(link: Link, name: str = "link") -> str:
    """Write ``link`` as a fully explicit document that parses back to an equal link."""
    spans = []
    for span in link.spans:
        fb, loss = span.fiber, span.loss
        spans.append({
            "length_km": fb.length / KM,
            "fiber": {"gamma_per_W_km": fb.gamma * KM, "beta2_ps2_km": fb.beta2 * KM / 1e-24,
                      "beta3_ps3_km": fb.beta3 * KM / 1e-36, "fc_THz": fb.f_c / THZ},
            "loss": {
                "alpha0_dB_km": _table_out(loss.alpha0, lambda v: v * _DB_KM_PER_FIELD),
                "srs": {"alpha1_dB_km": _table_out(loss.alpha1, lambda v: v * _DB_KM_PER_FIELD),
                        "sigma_per_km": _table_out(loss.sigma, lambda v: v * KM)},
            },
            "lumped_gain": ("transparent" if span.transparent else
                            {"gain_dB": _table_out(span.lumped_gain,
                                                   lambda v: 10 * math.log10(v))}),
            "comb": {
                "channels": [{"center_THz": ch.center / THZ, "bandwidth_GHz": ch.bandwidth / GHZ,
                              "psd_W_per_Hz": ch.psd} for ch in span.comb.channels],
                "cut": {"index": span.comb.cut_index},
            },
        })
    doc = {"metadata": {"name": name, "version": FORMAT_VERSION}, "spans": spans}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def _fmt(x: float | None) -> str:
    return "" if x is None else format(x, ".9g")


def _branch_summary(report: NliReport) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(report.branch_counts().items()))


def emit_report_csv(reports: NliReport | Iterable[NliReport]) -> str:
    """CSV text with one row per CUT, ascending in frequency."""
    if isinstance(reports, NliReport):
        reports = [reports]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(reports, key=lambda r: r.cut_frequency):
        power = r.nli_power
        power_dbm = 10 * math.log10(power / 1e-3) if power > 0 else -math.inf
        gsnr_db = 10 * math.log10(r.gsnr) if r.gsnr is not None else None
        writer.writerow([_fmt(r.cut_frequency / THZ), _fmt(r.nli_psd_end), _fmt(power_dbm),
                         _fmt(gsnr_db), len(r.per_span), _branch_summary(r)])
    return buf.getvalue()


def parse_report_csv(text: str) -> list[dict[str, Any]]:
    """Read back :func:`emit_report_csv` output; numeric columns become floats (gsnr may be None)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("not an NLI report CSV (header mismatch)")
    out = []
    for row in rows[1:]:
        rec = dict(zip(CSV_HEADER, row))
        out.append({
            "cut_frequency_THz": float(rec["cut_frequency_THz"]),
            "nli_psd_end_W_per_Hz": float(rec["nli_psd_end_W_per_Hz"]),
            "nli_power_dBm": float(rec["nli_power_dBm"]),
            "gsnr_dB": float(rec["gsnr_dB"]) if rec["gsnr_dB"] else None,
            "spans": int(rec["spans"]),
            "branch_summary": rec["branch_summary"],
        })
    return out
