import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ign_nli.model import (AUTO_GAIN, Channel, FiberParams, FrequencyTable, Link, LinkValidationError,
                           LossModel, NliReport, Span, SpanContribution, WdmComb,
                           db_per_km_to_field_alpha, validate_link)

from scenarios import comb, fiber, span


def test_db_conversion():
    assert db_per_km_to_field_alpha(0.0) == 0.0
    assert db_per_km_to_field_alpha(0.2) == pytest.approx(2.30259e-5, rel=1e-5)
    assert db_per_km_to_field_alpha(-0.2) == -db_per_km_to_field_alpha(0.2)


@given(st.floats(-10, 10, allow_nan=False))
def test_db_conversion_power_decay(a):
    # 1 km of fiber at a dB/km attenuates power by a dB
    alpha = db_per_km_to_field_alpha(a)
    assert -10 * math.log10(math.exp(-2 * alpha * 1e3)) == pytest.approx(a, abs=1e-12)


def test_frequency_table_lookup():
    t = FrequencyTable((1.0, 2.0, 4.0), (10.0, 20.0, 40.0))
    assert t(0.0) == 10.0 and t(5.0) == 40.0
    assert t(1.4) == 10.0 and t(1.6) == 20.0
    assert t(1.5) == 10.0  # ties go low
    assert t.interp(3.0) == pytest.approx(30.0)
    assert t.interp(9.0) == 40.0
    assert FrequencyTable.constant(3.0)(1e14) == 3.0
    with pytest.raises(ValueError):
        FrequencyTable((2.0, 1.0), (0.0, 0.0))
    with pytest.raises(ValueError):
        FrequencyTable((), ())


def test_fiber_invariants():
    with pytest.raises(ValueError):
        fiber(length=0.0)
    with pytest.raises(ValueError):
        fiber(gamma=-1e-3)
    with pytest.raises(ValueError):
        fiber(f_c=0.0)
    fiber(beta2=0.0, beta3=0.0)
    fiber(beta2=2e-26, beta3=-1e-40)


def test_channel_invariants():
    with pytest.raises(ValueError):
        Channel(193e12, 0.0, 1e-14)
    with pytest.raises(ValueError):
        Channel(193e12, 32e9, -1.0)
    with pytest.raises(ValueError):
        Channel(10e9, 32e9, 1e-14)
    ch = Channel(193e12, 50e9, 2e-14)
    assert ch.power == pytest.approx(1e-3)
    assert ch.contains(193e12 + 25e9) and not ch.contains(193e12 + 26e9)


def test_comb_cut_index_range():
    with pytest.raises(ValueError):
        WdmComb((Channel(193e12, 32e9, 1e-14),), 1)


def test_validate_single_channel_ok():
    assert validate_link(Link((span(comb(1)),))).ok


def test_validate_cut_mismatch():
    a = comb(3)
    b = WdmComb(tuple(Channel(ch.center + 1e9, ch.bandwidth, ch.psd) for ch in a.channels), 1)
    res = validate_link(Link((span(a), span(b))))
    assert not res.ok
    assert any("CUT frequency varies across spans" in v for v in res.violations)


def test_validate_perturbative_regime():
    a0 = db_per_km_to_field_alpha(0.2)
    res = validate_link(Link((span(comb(1), alpha1=1.5 * a0),)))
    assert any("perturbative regime violated" in v for v in res.violations)


def test_validate_other_violations():
    c = WdmComb((Channel(193.0e12, 50e9, 1e-14), Channel(193.03e12, 50e9, 1e-14)), 0)
    s = Span(fiber(), LossModel.flat(2e-5, 0.0, -1.0), c, FrequencyTable.constant(0.0))
    text = " | ".join(validate_link(Link((s,))).violations)
    assert "overlap" in text and "sigma must be > 0" in text and "lumped gain" in text


def test_adjacent_channels_do_not_overlap():
    c = WdmComb((Channel(193.0e12, 100e9, 1e-14), Channel(193.1e12, 100e9, 1e-14)), 0)
    assert c.overlaps() == []


def test_with_cut_frequency():
    link = Link((span(comb(5)),) * 2)
    moved = link.with_cut_frequency(link.spans[0].comb.channels[0].center)
    assert all(s.comb.cut_index == 0 for s in moved.spans)
    with pytest.raises(LinkValidationError):
        link.with_cut_frequency(1e14)


def test_report_helpers():
    contribs = (SpanContribution(1, 2e-17, 0.5, ("li2", "asinh")),
                SpanContribution(2, 1e-17, 1.0, ("li2",)))
    r = NliReport(193e12, 32e9, 2e-17, contribs)
    assert r.nli_power == pytest.approx(2e-17 * 32e9)
    assert r.branch_counts() == {"li2": 2, "asinh": 1}
    assert contribs[0].at_link_end == 1e-17


def test_transparent_flag():
    s = span(comb(1))
    assert s.transparent and s.lumped_gain == AUTO_GAIN
    with pytest.raises(ValueError):
        Span(s.fiber, s.loss, s.comb, "sometimes")
