import math
import textwrap

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ign_nli.config import (CSV_HEADER, ConfigError, emit_report_csv, parse_link_spec,
                            parse_report_csv, serialize_link)
from ign_nli.engine import link_nli_psd
from ign_nli.model import (Channel, FrequencyTable, Link, LinkValidationError, LossModel, NliReport,
                           Span, SpanContribution, WdmComb, db_per_km_to_field_alpha)

from scenarios import fiber

MINIMAL = """
metadata: {name: one, version: nli-spec/1}
comb:
  channels:
    - {center_THz: 193.4, bandwidth_GHz: 100, power_dBm: 0}
  cut: {index: 0}
spans:
  - length_km: 80
    fiber: {gamma_per_W_km: 1.3, beta2_ps2_km: -21.3, beta3_ps3_km: 0.12, fc_THz: 193.4}
    loss: {alpha0_dB_km: 0.2}
    lumped_gain: transparent
"""

FULL = """
metadata: {name: mixed, version: nli-spec/1}
fiber_profiles:
  smf: {gamma_per_W_km: 1.3, beta2_ps2_km: -21.3, beta3_ps3_km: 0.12, fc_THz: 193.4}
srs_fit: {raman_slope_per_W_m_Hz: 1.0e-15, sigma_policy: uniform_average}
comb:
  channels:
    - {center_THz: 193.3, bandwidth_GHz: 32, power_dBm: 1}
    - {center_THz: 193.4, bandwidth_GHz: 32, power_dBm: 0}
    - {center_THz: 193.5, bandwidth_GHz: 64, psd_W_per_Hz: 2.0e-14}
  cut: {center_THz: 193.4}
spans:
  - length_km: 80
    fiber: smf
    loss: {alpha0_dB_km: [[193.0, 0.21], [194.0, 0.19]], srs: fit}
    lumped_gain: transparent
  - length_km: 60
    fiber: smf
    loss:
      alpha0_dB_km: 0.2
      srs: {alpha1_dB_km: [[193.3, -0.01], [193.5, 0.01]], sigma_per_km: 0.09}
    lumped_gain: {gain_dB: [[193.3, 12.0], [193.5, 11.5]]}
    comb: inherit
"""


def test_minimal_document():
    link = parse_link_spec(MINIMAL)
    assert len(link) == 1
    s = link.spans[0]
    assert len(s.comb.channels) == 1 and s.transparent
    assert s.comb.cut.psd == pytest.approx(1e-14, rel=1e-14)
    assert s.fiber.gamma == pytest.approx(1.3e-3)
    assert s.fiber.beta2 == pytest.approx(-2.13e-26)
    assert s.fiber.beta3 == pytest.approx(1.2e-40)
    assert s.fiber.length == 80e3
    assert s.loss.alpha0(193.4e12) == pytest.approx(db_per_km_to_field_alpha(0.2))


def test_full_document():
    link = parse_link_spec(FULL)
    first, second = link.spans
    assert first.comb is second.comb
    assert first.comb.cut_index == 1
    assert first.loss.alpha1(193.3e12) < 0 < first.loss.alpha1(193.5e12)
    # the fitted alpha1/sigma keep the user's alpha0 table for interpolation
    assert first.loss.alpha0.interp(193.5e12) == pytest.approx(db_per_km_to_field_alpha(0.2))
    assert second.loss.sigma(193.4e12) == pytest.approx(9e-5)
    assert second.lumped_gain(193.3e12) == pytest.approx(10 ** 1.2)
    assert second.fiber.length == 60e3
    assert link.spans[0].comb.channels[2].psd == 2e-14


def test_cut_not_found():
    doc = MINIMAL.replace("cut: {index: 0}", "cut: {center_THz: 195.0}")
    with pytest.raises(ConfigError, match="CUT frequency not found"):
        parse_link_spec(doc)


@pytest.mark.parametrize("old,new,match", [
    ("version: nli-spec/1", "version: nli-spec/9", "metadata.version"),
    ("length_km: 80", "length_km: -80", "length_km"),
    ("alpha0_dB_km: 0.2", "alpha0_dB_km: [[194, 0.2], [193, 0.2]]", "sorted"),
    ("alpha0_dB_km: 0.2", "alpha0_dB_km: fast", "expected a number"),
    ("power_dBm: 0", "power_dBm: 0, psd_W_per_Hz: 1.0e-14", "exactly one"),
    ("lumped_gain: transparent", "lumped_gain: transparent\n    comb: inherit", "first span"),
    ("loss: {alpha0_dB_km: 0.2}", "loss: {alpha0_dB_km: 0.2, srs: fit}", "srs_fit"),
    ("gamma_per_W_km: 1.3, ", "", "gamma_per_W_km"),
    ("cut: {index: 0}", "cut: {index: 3}", "out of range"),
])
def test_errors_name_location(old, new, match):
    with pytest.raises(ConfigError, match=match):
        parse_link_spec(MINIMAL.replace(old, new, 1))


def test_unknown_profile_and_syntax_error():
    with pytest.raises(ConfigError, match="unknown fiber profile"):
        parse_link_spec(FULL.replace("fiber: smf", "fiber: dsf", 1))
    with pytest.raises(ConfigError, match="line"):
        parse_link_spec("metadata: {name: x\nspans: [")


def test_validation_errors_are_forwarded():
    doc = MINIMAL.replace("loss: {alpha0_dB_km: 0.2}",
                          "loss: {alpha0_dB_km: 0.2, srs: {alpha1_dB_km: 0.5, sigma_per_km: 0.1}}")
    with pytest.raises(LinkValidationError, match="perturbative regime violated"):
        parse_link_spec(doc)
    assert parse_link_spec(doc, validate=False)


def test_link_wide_fit_reuses_first_span():
    doc = FULL.replace("sigma_policy: uniform_average", "sigma_policy: uniform_average, link_wide: true")
    doc = doc.replace("""      alpha0_dB_km: 0.2
      srs: {alpha1_dB_km: [[193.3, -0.01], [193.5, 0.01]], sigma_per_km: 0.09}""",
                      """      alpha0_dB_km: 0.2
      srs: fit""")
    link = parse_link_spec(doc)
    assert link.spans[1].loss.alpha1 == link.spans[0].loss.alpha1


def _rel_equal(a, b, tol=1e-12):
    return a == b or abs(a - b) <= tol * max(abs(a), abs(b))


def _assert_links_equal(a: Link, b: Link):
    assert len(a) == len(b)
    for sa, sb in zip(a.spans, b.spans):
        for name in ("gamma", "beta2", "beta3", "f_c", "length"):
            assert _rel_equal(getattr(sa.fiber, name), getattr(sb.fiber, name))
        for name in ("alpha0", "alpha1", "sigma"):
            ta, tb = getattr(sa.loss, name), getattr(sb.loss, name)
            assert len(ta.values) == len(tb.values)
            assert all(_rel_equal(x, y) for x, y in zip(ta.values, tb.values))
            if not ta.is_constant:
                assert all(_rel_equal(x, y) for x, y in zip(ta.frequencies, tb.frequencies))
        assert sa.transparent == sb.transparent
        if not sa.transparent:
            assert all(_rel_equal(x, y) for x, y in zip(sa.lumped_gain.values, sb.lumped_gain.values))
        assert sa.comb.cut_index == sb.comb.cut_index
        for ca, cb in zip(sa.comb.channels, sb.comb.channels):
            assert _rel_equal(ca.center, cb.center) and _rel_equal(ca.bandwidth, cb.bandwidth)
            assert _rel_equal(ca.psd, cb.psd)


def test_round_trip_documents():
    for doc in (MINIMAL, FULL):
        link = parse_link_spec(doc)
        again = parse_link_spec(serialize_link(link))
        _assert_links_equal(link, again)
        assert link_nli_psd(again).nli_psd_end == pytest.approx(link_nli_psd(link).nli_psd_end,
                                                                rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(1e-15, 1e-12), st.floats(10e9, 90e9)), min_size=1, max_size=6),
       st.floats(1e-6, 9e-5), st.floats(-0.9, 0.9), st.floats(0.01, 40.0), st.floats(1e3, 2e5),
       st.floats(-30, 30), st.floats(-3e-26, 3e-26))
def test_round_trip_random(chans, a0, r1, gain, length, gain_db, beta2):
    comb = WdmComb(tuple(Channel(190e12 + k * 100e9, bw, psd) for k, (psd, bw) in enumerate(chans)),
                   len(chans) - 1)
    loss = LossModel(FrequencyTable.from_pairs([(190e12, a0), (196e12, 1.1 * a0)]),
                     FrequencyTable.constant(r1 * a0), FrequencyTable.constant(2 * a0))
    spans = (Span(fiber(length, beta2=beta2), loss, comb),
             Span(fiber(length / 2), loss, comb,
                  FrequencyTable.from_pairs([(190e12, 10 ** (gain_db / 10)), (195e12, gain)])))
    link = Link(spans)
    _assert_links_equal(link, parse_link_spec(serialize_link(link), validate=False))


def _report(f, psd, gsnr=None, spans=2):
    per = tuple(SpanContribution(n, psd / spans, 1.0, ("li2", "asinh", "li2")) for n in range(spans))
    return NliReport(f, 32e9, psd, per, gsnr)


def test_csv_shapes():
    assert emit_report_csv([]) == ",".join(CSV_HEADER) + "\n"
    text = emit_report_csv(_report(193.4e12, 3.5e-17))
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[1].endswith(",,2,asinh=2;li2=4")


def test_csv_sorted_and_round_trip():
    reports = [_report(193.5e12, 2.123456789123e-17, 101.3), _report(193.1e12, 4.2e-18, 7.77),
               _report(193.3e12, 1.0 / 3.0 * 1e-16)]
    rows = parse_report_csv(emit_report_csv(reports))
    assert [r["cut_frequency_THz"] for r in rows] == [193.1, 193.3, 193.5]
    for row, rep in zip(rows, sorted(reports, key=lambda r: r.cut_frequency)):
        assert row["nli_psd_end_W_per_Hz"] == pytest.approx(rep.nli_psd_end, rel=5e-9)
        assert row["nli_power_dBm"] == pytest.approx(10 * math.log10(rep.nli_power / 1e-3), rel=5e-9)
        if rep.gsnr is None:
            assert row["gsnr_dB"] is None
        else:
            assert row["gsnr_dB"] == pytest.approx(10 * math.log10(rep.gsnr), rel=5e-9)
        assert row["spans"] == 2


def test_csv_rejects_foreign_header():
    with pytest.raises(ValueError):
        parse_report_csv("a,b\n1,2\n")
