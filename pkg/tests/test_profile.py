import numpy as np
import pytest
from hypothesis import given, strategies as st

from revspec.profile import (
    ArclengthProfile, AreaMismatchError, InvalidProfileError,
    ProfileDefinitionError, area_of, arclength_recover, curvature,
    gauss_bonnet_residual, make_profile, momentum_transform, normalize_area,
    profile_from_text, require_valid, validate, validate_arclength,
    validation_grid,
)


def sine_arclength(c=1.0):
    """Arclength form of the round sphere scaled by the homothety ``c``."""
    return ArclengthProfile(
        a=lambda s: c * np.sin(np.asarray(s) / c),
        da=lambda s: np.cos(np.asarray(s) / c),
        d2a=lambda s: -np.sin(np.asarray(s) / c) / c,
        length=float(c * np.pi))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def test_expression_profile_has_exact_derivatives(round_profile):
    x = np.linspace(-1.0, 1.0, 101)
    assert np.allclose(round_profile.f(x), 1 - x * x, atol=1e-15)
    assert np.allclose(round_profile.df(x), -2 * x, atol=1e-15)
    assert np.allclose(round_profile.d2f(x), -2.0, atol=1e-15)
    assert round_profile.source == "expression"


def test_profile_from_text_records_name():
    p = profile_from_text("1 - x^2", name="unit")
    assert p.name == "unit"
    assert p.expr is not None
    assert float(p.f(0.0)) == 1.0


def test_unevaluable_expression_is_a_definition_error():
    with pytest.raises(ProfileDefinitionError, match="not evaluable"):
        profile_from_text("log(x)")


def test_empty_definition_rejected():
    with pytest.raises(ProfileDefinitionError, match="empty"):
        make_profile(None)


def test_sample_profile_reproduces_quadratic_exactly():
    # clamped cubic spline through quadratic data is that quadratic
    xs = np.linspace(-1.0, 1.0, 41)
    p = make_profile(list(zip(xs, 1 - xs ** 2)), name="sampled")
    assert p.source == "samples"
    assert p.knots is not None and len(p.knots) == 41
    grid = np.linspace(-1.0, 1.0, 401)
    assert np.max(np.abs(p.f(grid) - (1 - grid ** 2))) < 1e-12
    assert validate(p).passed


@pytest.mark.parametrize("samples,snippet", [
    ([], "no samples"),
    ([1.0, 2.0, 3.0], "pairs"),
    ([(x, 1 - x * x) for x in np.linspace(-1, 1, 10)], "at least 16"),
    ([(-1.0, 0.0), (-1.0, 0.1)] + [(x, 1.0) for x in np.linspace(-0.9, 1, 15)],
     "strictly increasing"),
    ([(x, 1 - x * x) for x in np.linspace(-0.5, 1.0, 20)], "endpoint"),
])
def test_bad_sample_sets_rejected(samples, snippet):
    with pytest.raises(ProfileDefinitionError, match=snippet):
        make_profile(samples)


def test_validation_grid_is_sorted_and_interior():
    g = validation_grid()
    assert g.size == 1024
    assert np.all(np.diff(g) > 0)
    assert g[0] > -1.0 and g[-1] < 1.0
    assert validation_grid() is g  # cached


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def test_validate_round_passes(round_profile):
    report = validate(round_profile)
    assert report.passed
    assert {c.name for c in report.checks} == {
        "f(-1)", "f(+1)", "f'(-1)", "f'(+1)", "min interior f"}


def test_validate_flags_wrong_pole_slopes():
    p = profile_from_text("2*(1 - x^2)")
    report = validate(p)
    assert not report.passed
    failing = {c.name for c in report.checks if not c.passed}
    assert failing == {"f'(-1)", "f'(+1)"}


def test_validate_flags_interior_sign_change():
    # boundary values and slopes hold but f dips negative near the equator
    p = profile_from_text("(1 - x^2) * (x^2 - 0.04) / 0.96")
    failing = {c.name for c in validate(p).checks if not c.passed}
    assert failing == {"min interior f"}


def test_require_valid_carries_the_report():
    p = profile_from_text("2*(1 - x^2)")
    with pytest.raises(InvalidProfileError, match="f'") as exc_info:
        require_valid(p, context="unit")
    assert not exc_info.value.report.passed
    assert "unit" in str(exc_info.value)


def test_validation_report_is_json_ready():
    import json
    doc = validate(profile_from_text("1 - x^2")).to_json_dict()
    text = json.dumps(doc)
    assert '"passed": true' in text
    assert len(doc["checks"]) == 5


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def test_round_curvature_is_one(round_profile):
    x = np.linspace(-1, 1, 64)
    assert np.allclose(curvature(round_profile, x), 1.0, atol=1e-14)
    assert curvature(round_profile, 0.3) == pytest.approx(1.0)


def test_pinched_equator_curvature(pinched_profile):
    # the pinch factor is flat to high order at the equator, so the
    # curvature there is just the amplitude of the leading quadratic
    assert curvature(pinched_profile, 0.0) == pytest.approx(10.0, abs=1e-9)


@pytest.mark.parametrize("maker,bound", [
    (lambda: profile_from_text("1 - x^2"), 1e-12),
    (lambda: profile_from_text("10*(1 - x^2) / (1 + 9*x^36)"), 1e-11),
    (lambda: make_profile(
        [(x, 1 - x * x) for x in np.linspace(-1, 1, 41)]), 1e-12),
])
def test_gauss_bonnet_residual_vanishes(maker, bound):
    assert gauss_bonnet_residual(maker()) < bound


# ---------------------------------------------------------------------------
# arclength form and the transforms between the two pictures
# ---------------------------------------------------------------------------

def test_arclength_recover_round_is_the_sine_curve(round_profile):
    ap = arclength_recover(round_profile)
    assert ap.length == pytest.approx(np.pi, abs=1e-10)
    s = np.linspace(0.0, ap.length, 301)
    assert np.max(np.abs(ap.a(s) - np.sin(s))) < 1e-10
    assert np.max(np.abs(ap.da(s) - np.cos(s))) < 1e-10
    assert np.max(np.abs(ap.x_of_s(s) + np.cos(s))) < 1e-10
    assert validate_arclength(ap).passed


def test_arclength_recover_rejects_invalid_profiles():
    with pytest.raises(InvalidProfileError):
        arclength_recover(profile_from_text("2*(1 - x^2)"))


def test_meridian_maps_are_mutually_inverse(pinched_profile):
    ap = arclength_recover(pinched_profile)
    assert ap.x_of_s(0.0) == pytest.approx(-1.0, abs=1e-12)
    assert ap.x_of_s(ap.length) == pytest.approx(1.0, abs=1e-12)
    s = np.linspace(0.0, ap.length, 401)
    assert np.max(np.abs(ap.s_of_x(ap.x_of_s(s)) - s)) < 1e-10
    x = np.linspace(-1.0, 1.0, 301)
    assert np.max(np.abs(ap.a(ap.s_of_x(x)) ** 2 - pinched_profile.f(x))) < 1e-12


def test_momentum_transform_of_sine_recovers_round():
    q = momentum_transform(sine_arclength())
    assert q.source == "transformed"
    x = np.linspace(-1.0, 1.0, 401)
    assert np.max(np.abs(q.f(x) - (1 - x ** 2))) < 1e-12
    assert np.max(np.abs(q.df(x) + 2 * x)) < 1e-12
    assert validate(q).passed


def test_momentum_transform_rejects_wrong_area():
    with pytest.raises(AreaMismatchError) as exc_info:
        momentum_transform(sine_arclength(0.5))
    assert exc_info.value.area == pytest.approx(np.pi, rel=1e-9)


def test_transform_round_trip_on_the_pinched_profile(pinched_profile):
    ap = arclength_recover(pinched_profile)
    q = momentum_transform(ArclengthProfile(
        a=ap.a, da=ap.da, d2a=ap.d2a, length=ap.length))
    x = np.linspace(-1.0, 1.0, 301)
    assert np.max(np.abs(q.f(x) - pinched_profile.f(x))) < 1e-10
    assert np.max(np.abs(q.df(x) - pinched_profile.df(x))) < 1e-9


def test_area_of_round_arclength():
    assert area_of(sine_arclength()) == pytest.approx(4 * np.pi, rel=1e-12)


def test_normalize_area_undoes_a_homothety():
    nz = normalize_area(sine_arclength(0.5))
    assert nz.scale_factor == pytest.approx(2.0, rel=1e-12)
    assert nz.length == pytest.approx(np.pi, rel=1e-12)
    assert area_of(nz) == pytest.approx(4 * np.pi, rel=1e-12)


@given(c=st.floats(0.4, 2.5))
def test_normalize_area_property(c):
    """Any homothety of the round arclength profile normalizes back to area
    4*pi with the inverse factor recorded."""
    nz = normalize_area(sine_arclength(c))
    assert area_of(nz) == pytest.approx(4 * np.pi, rel=1e-9)
    assert nz.scale_factor * c == pytest.approx(1.0, rel=1e-9)
