import math

import pytest

from revspec.obstruction import (
    ABREU_FREITAS_THRESHOLD, TRACE_FLAG_THRESHOLD, XI1,
    even_multiplicity_test, full_report, negative_curvature_witness,
    spectral_test, sup_test, trace_flag,
)
from revspec.profile import curvature, profile_from_text


@pytest.fixture(scope="module")
def borderline_profile():
    """Slope maximum 2.011 just inside the equator band: fails the sup test
    while staying below every spectral threshold."""
    return profile_from_text("(1 - x^2) * (1 + 0.3*(1 - x^2))", name="bump03")


def test_threshold_constants():
    assert ABREU_FREITAS_THRESHOLD == pytest.approx(XI1 ** 2 / 2, rel=1e-15)
    assert ABREU_FREITAS_THRESHOLD == pytest.approx(2.8915929824, rel=1e-9)
    assert TRACE_FLAG_THRESHOLD == pytest.approx(math.pi ** 2 / 16, rel=1e-15)


# ---------------------------------------------------------------------------
# the decisive slope test
# ---------------------------------------------------------------------------

def test_sup_round_is_exactly_two(round_profile):
    st = sup_test(round_profile)
    assert st.max_slope == pytest.approx(2.0, abs=1e-12)
    assert st.embeddable


def test_sup_pinched(pinched_profile):
    st = sup_test(pinched_profile)
    assert st.max_slope == pytest.approx(26.09171798323459, rel=1e-9)
    assert abs(st.argmax_x) == pytest.approx(0.91024836, abs=1e-6)
    assert not st.embeddable


def test_sup_borderline(borderline_profile):
    st = sup_test(borderline_profile)
    assert st.max_slope == pytest.approx(2.011325955, rel=1e-8)
    assert not st.embeddable


# ---------------------------------------------------------------------------
# spectral obstructions
# ---------------------------------------------------------------------------

def test_spectral_test_round(round_profile):
    t = spectral_test(round_profile)
    assert t.lambda01 == pytest.approx(2.0, rel=1e-9)
    assert t.threshold == 3.0
    assert not t.triggered


def test_spectral_test_pinched(pinched_profile):
    t = spectral_test(pinched_profile)
    assert t.lambda01 == pytest.approx(19.5846802667, rel=1e-8)
    assert t.triggered


def test_even_multiplicities_round(round_profile):
    t = even_multiplicity_test(round_profile)
    assert t.multiplicities == (3, 5, 7, 9)
    assert not t.all_even
    assert not t.reduction_holds
    assert t.lambda_m == pytest.approx(20.0, rel=1e-8)
    assert t.explanation == ""


def test_even_multiplicities_pinched(pinched_profile):
    t = even_multiplicity_test(pinched_profile)
    assert t.multiplicities == (2, 2, 2, 2)
    assert t.all_even and t.reduction_holds
    assert t.lambda_m == pytest.approx(5.66338545, rel=1e-6)
    assert t.lambda_m < t.lambda01


def test_even_multiplicity_reuses_a_given_lambda01(round_profile):
    direct = even_multiplicity_test(round_profile)
    reused = even_multiplicity_test(round_profile, lambda01=direct.lambda01)
    assert reused.multiplicities == direct.multiplicities
    with pytest.raises(ValueError):
        even_multiplicity_test(round_profile, m_max=0)


# ---------------------------------------------------------------------------
# curvature witness and the informational flag
# ---------------------------------------------------------------------------

def test_no_witness_on_the_round_sphere(round_profile):
    assert negative_curvature_witness(round_profile) is None


def test_witness_on_the_pinched_profile(pinched_profile):
    x = negative_curvature_witness(pinched_profile)
    assert x is not None
    assert curvature(pinched_profile, x) < 0
    assert abs(x) == pytest.approx(0.95348615, abs=1e-4)


def test_trace_flag_round(round_profile):
    flag = trace_flag(round_profile)
    assert flag.trace0 == pytest.approx(1.0, abs=1e-12)
    assert not flag.suggestive
    # 24 reciprocal terms of j(j+1) telescope to 24/25
    assert flag.partial_sum == pytest.approx(24.0 / 25.0, rel=1e-6)
    assert flag.partial_sum < flag.trace0


def test_trace_flag_pinched(pinched_profile):
    flag = trace_flag(pinched_profile)
    assert flag.trace0 == pytest.approx(23.0 / 185.0, rel=1e-10)
    assert flag.suggestive
    assert flag.partial_sum < flag.trace0


# ---------------------------------------------------------------------------
# the full report
# ---------------------------------------------------------------------------

def test_full_report_round(round_profile):
    r = full_report(round_profile)
    assert r.verdict == "embeddable"
    assert r.spectral_verdict == "undetermined_by_spectral_tests"
    assert not r.abreu_freitas_test.triggered
    assert r.negative_curvature_witness is None
    assert r.consistency_failures == ()


def test_full_report_pinched(pinched_profile):
    r = full_report(pinched_profile)
    assert r.verdict == "not_embeddable"
    assert r.spectral_verdict == "not_embeddable"
    assert r.spectral_test.triggered
    assert r.abreu_freitas_test.triggered
    assert r.even_multiplicity_test.all_even
    assert r.negative_curvature_witness is not None
    assert r.consistency_failures == ()


def test_full_report_borderline(borderline_profile):
    # the slope test alone catches it; every spectral test stays silent
    r = full_report(borderline_profile)
    assert r.verdict == "not_embeddable"
    assert r.spectral_verdict == "undetermined_by_spectral_tests"
    assert not r.spectral_test.triggered
    assert not r.abreu_freitas_test.triggered
    assert r.even_multiplicity_test.multiplicities == (2, 1, 2, 2)
    assert r.consistency_failures == ()


def test_report_json_labels(pinched_profile):
    doc = full_report(pinched_profile).to_json_dict()
    assert doc["abreu_freitas_test"]["label"] == "external (Abreu-Freitas)"
    assert doc["trace_flag"]["label"] == "informational only"
    assert doc["verdict"] == "not_embeddable"
    assert doc["even_multiplicity_test"]["multiplicities"] == [2, 2, 2, 2]
