import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ruledrel import (
    NormalizationSpec,
    RuledSurface,
    classify,
    frame_at,
    make_central,
    make_euclidean,
    make_polar,
    make_product,
    make_right,
    relative_normal,
    relative_normal_vector,
    right_image_type,
)
from ruledrel.normalizations import MixedImageType, VanishingIngredient, classification_residuals
from ruledrel.relnorm import ZeroSupport

from conftest import BATTERY, KINDS, make_surface

_CACHE = {}


def built(name, kind):
    key = (name, kind)
    if key not in _CACHE:
        s = _CACHE.get(name) or make_surface(name)
        _CACHE[name] = s
        _CACHE[key] = NormalizationSpec(kind, dict(KINDS[kind])).build(s)
    return _CACHE[name], _CACHE[key]


def test_central_unit_g(helicoid):
    q = make_central(helicoid, 1.0)
    for u, v in [(0.2, 0.5), (1.0, -1.7), (1.9, 2.0)]:
        assert relative_normal(helicoid, q, u, v).coeffs() == pytest.approx([0.0, 0.0, -1.0], abs=1e-12)


def test_central_support_vanishes_on_striction(helicoid):
    q = make_central(helicoid, "1 + u")
    assert q.value(0.5, 0.0) == 0.0
    with pytest.raises(ZeroSupport):
        relative_normal(helicoid, q, 0.5, 0.0)


def test_central_vanishing_g(helicoid):
    with pytest.raises(VanishingIngredient):
        make_central(helicoid, "1 - u")


def test_polar_constant_is_euclidean(battery):
    s = battery["kappa_u"]
    q, e = make_polar(s, 1.0), make_euclidean(s)
    for u, v in [(0.6, 0.3), (1.4, -1.1)]:
        assert relative_normal(s, q, u, v).coeffs() == pytest.approx(relative_normal(s, e, u, v).coeffs(), abs=1e-12)
    assert classify(s, q) == {"polar"}


def test_polar_cosine_on_helicoid(helicoid):
    q = make_polar(helicoid, "cos(V)")
    for u, v in [(0.0, 0.5), (1.3, -2.0), (2.0, 0.0)]:
        assert q.value(u, v) == pytest.approx(1 / np.sqrt(1 + v * v), rel=1e-12)


def test_polar_vanishing(helicoid):
    with pytest.raises(VanishingIngredient):
        make_polar(helicoid, "sin(V)")


def test_right_reductions(battery):
    s = battery["conoidal"]
    central = make_central(s, "2 + u")
    right = make_right(s, 0.0, "2 + u")
    for u, v in [(0.4, 0.8), (1.5, -0.3)]:
        assert relative_normal(s, right, u, v).coeffs() == pytest.approx(relative_normal(s, central, u, v).coeffs())
    # q = delta / w: the q_/2 term cancels the v-dependence, leaving y = n
    q = make_right(s, s.delta, 0.0)
    for u, v in [(0.4, 0.8), (1.5, -0.3)]:
        y = relative_normal(s, q, u, v)
        assert y.y2 == pytest.approx(1.0, rel=1e-12)
        assert y.y3 == pytest.approx(0.0, abs=1e-12)


def test_right_vanishing_witness(helicoid):
    with pytest.raises(VanishingIngredient, match=r"\(u, v\)"):
        make_right(helicoid, "u - 1", 1.0, v_domain=(-1.0, 1.0))


@pytest.mark.parametrize("name", sorted(BATTERY))
@pytest.mark.parametrize("kind", ["euclidean", "central", "polar", "right"])
def test_frame_expression_agrees(name, kind):
    s, q = built(name, kind)
    a, b = s.u_domain
    lo = 0.1 if kind == "central" else -2.0
    worst = 0.0
    for u in np.linspace(a, b, 21):
        for v in np.linspace(lo, 2.0, 21):
            y = relative_normal(s, q, u, v).coeffs()
            worst = max(worst, np.abs(y - q.frame_normal(u, v)).max() / max(1.0, np.abs(y).max()))
    assert worst < 1e-8


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_classify_contains_own_kind(name):
    expected = {
        "euclidean": {"polar"},
        "central": {"central", "right"},
        "polar": {"polar"},
        "right": {"right"},
    }
    for kind, labels in expected.items():
        s, q = built(name, kind)
        assert classify(s, q) == labels, kind


def test_asymptotic_implies_right(helicoid):
    # y3 = 0 forces v q + w^2 q_/2 = 0, i.e. q = f / w
    q = make_right(helicoid, "2 + sin(u)", 0.0)
    assert classify(helicoid, q) == {"asymptotic", "right"}
    res = classification_residuals(helicoid, q)
    assert res["asymptotic"] < 1e-12


def test_product_is_generic(battery):
    s = battery["kappa_u"]
    q = make_product(s, "1 + 0.3*u", "1 + v^2")
    assert classify(s, q) == set()
    assert q.value(1.0, 2.0) == pytest.approx(1.3 * 5)


@given(st.sampled_from(sorted(BATTERY)), st.floats(0, 1), st.floats(-2, 2))
def test_right_image_generators_parallel(name, t, v):
    """d y / d v is parallel to e for every right normalization."""
    s, q = built(name, "right")
    a, b = s.u_domain
    u = a + t * (b - a)
    h = 1e-5
    yv = (relative_normal_vector(s, q, u, v + h) - relative_normal_vector(s, q, u, v - h)) / (2 * h)
    assert np.linalg.norm(np.cross(yv, frame_at(s, u).e)) < 1e-7


def test_right_image_curve(battery):
    s = battery["conoidal"]
    assert right_image_type(s, "1 + u", 0.5) == "curve"
    q = make_right(s, "1 + u", 0.5)
    for u in (0.3, 1.2):
        ys = [relative_normal_vector(s, q, u, v) for v in (-1.5, 0.0, 0.7, 2.0)]
        assert np.allclose(ys, ys[0], atol=1e-10)


def test_right_image_types(helicoid, battery):
    assert right_image_type(helicoid, 0.0, "2 - u") == "parallel_ruled"
    s = battery["kappa_const"]
    assert right_image_type(s, "cos(u)", "sin(u)") == "curve"
    with pytest.raises(MixedImageType):
        right_image_type(helicoid, 0.0, "(u - 1)^2")


def test_polar_integral_anchor():
    s = RuledSurface(1.0, "u", 0.0, (0.0, 1.0))
    q = make_polar(s, "3 + V")
    # V = arctan v - u^2/2
    assert q.value(0.8, 0.5) == pytest.approx(3 + np.arctan(0.5) - 0.32, abs=1e-10)
