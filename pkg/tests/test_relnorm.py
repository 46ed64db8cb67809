import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ruledrel import (
    CustomSupport,
    NormalizationSpec,
    divergence_T,
    euclidean_curvatures,
    frame_at,
    fundamental_forms,
    make_central,
    make_euclidean,
    pick_invariant,
    rel_curvatures,
    relative_normal,
    relative_normal_vector,
    scalar_curvature,
    shape_operator,
    tchebychev,
    unit_normal,
)
from ruledrel.geom_core import tangent_vectors
from ruledrel.relnorm import (
    InconsistentSupport,
    ZeroSupport,
    divergence_identity_rhs,
    pick_from_darboux,
    relative_metric,
)

from conftest import BATTERY, KINDS, make_surface

_SURF = {}
_NORM = {}


def setup(name, kind):
    if name not in _SURF:
        _SURF[name] = make_surface(name)
    key = (name, kind)
    if key not in _NORM:
        _NORM[key] = NormalizationSpec(kind, {k: v for k, v in KINDS[kind].items()}).build(_SURF[name])
    return _SURF[name], _NORM[key]


cases = st.tuples(st.sampled_from(sorted(BATTERY)), st.sampled_from(sorted(KINDS)))
ts = st.floats(0.0, 1.0)
vs = st.tuples(st.floats(0.1, 2.0), st.sampled_from([-1.0, 1.0])).map(lambda p: p[0] * p[1])


def at(case, t, v):
    s, q = setup(*case)
    a, b = s.u_domain
    return s, q, a + 0.01 + t * (b - a - 0.02), v


def second_form(s, u, v):
    ff = fundamental_forms(s, u, v)
    return np.array([[ff.h11, ff.h12], [ff.h12, ff.h22]])


def brioschi(metric, u, v, h=1e-3):
    """Intrinsic curvature of a (possibly indefinite) metric by finite differences."""
    E = lambda a, b: metric(a, b)[0, 0]  # noqa: E731
    F = lambda a, b: metric(a, b)[0, 1]  # noqa: E731
    G = lambda a, b: metric(a, b)[1, 1]  # noqa: E731

    def du(f):
        return (f(u + h, v) - f(u - h, v)) / (2 * h)

    def dv(f):
        return (f(u, v + h) - f(u, v - h)) / (2 * h)

    Evv = (E(u, v + h) - 2 * E(u, v) + E(u, v - h)) / h**2
    Guu = (G(u + h, v) - 2 * G(u, v) + G(u - h, v)) / h**2
    Fuv = (F(u + h, v + h) - F(u + h, v - h) - F(u - h, v + h) + F(u - h, v - h)) / (4 * h * h)
    e, f, g = E(u, v), F(u, v), G(u, v)
    M1 = np.array(
        [
            [-Evv / 2 + Fuv - Guu / 2, du(E) / 2, du(F) - dv(E) / 2],
            [dv(F) - du(G) / 2, e, f],
            [dv(G) / 2, f, g],
        ]
    )
    M2 = np.array([[0, dv(E) / 2, du(G) / 2], [dv(E) / 2, e, f], [du(G) / 2, f, g]])
    return (np.linalg.det(M1) - np.linalg.det(M2)) / (e * g - f * f) ** 2


def rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


@given(cases, ts, vs)
def test_relative_normal_from_euclidean_data(case, t, v):
    """y = q xi - h^{-1} grad q, built from the Euclidean normal and second form."""
    s, q, u, v = at(case, t, v)
    p = q.partials(u, v)
    x1, x2 = tangent_vectors(s, u, v)
    a, b = np.linalg.solve(second_form(s, u, v), [p.q1, p.q2])
    expected = p.q * unit_normal(s, u, v) - a * x1 - b * x2
    assert np.allclose(relative_normal_vector(s, q, u, v), expected, atol=1e-9 * max(1, np.abs(expected).max()))


@given(cases, ts, vs)
def test_normal_derivatives_tangent(case, t, v):
    s, q, u, v = at(case, t, v)
    h = 1e-5
    xi = unit_normal(s, u, v)
    yu = relative_normal_vector(s, q, u + h, v) - relative_normal_vector(s, q, u - h, v)
    yv = relative_normal_vector(s, q, u, v + h) - relative_normal_vector(s, q, u, v - h)
    assert abs(yu @ xi) / (2 * h) < 1e-5
    assert abs(yv @ xi) / (2 * h) < 1e-5
    assert relative_normal_vector(s, q, u, v) @ xi == pytest.approx(q.value(u, v))


@given(cases, ts, vs)
def test_relative_metric(case, t, v):
    s, q, u, v = at(case, t, v)
    G = relative_metric(s, q, u, v)
    expected = second_form(s, u, v) / q.value(u, v)
    assert np.allclose(G.matrix(), expected, rtol=1e-12, atol=1e-14)
    assert np.allclose(G.matrix() @ G.inverse(), np.eye(2), atol=1e-9)


@given(cases, ts, vs)
def test_shape_operator_fd(case, t, v):
    """y_/i = -B_i^j x_/j by central differences."""
    s, q, u, v = at(case, t, v)
    h = 1e-5
    B = shape_operator(s, q, u, v)
    x1, x2 = tangent_vectors(s, u, v)
    yu = (relative_normal_vector(s, q, u + h, v) - relative_normal_vector(s, q, u - h, v)) / (2 * h)
    yv = (relative_normal_vector(s, q, u, v + h) - relative_normal_vector(s, q, u, v - h)) / (2 * h)
    scale = max(1.0, np.abs(yu).max(), np.abs(yv).max())
    assert np.allclose(yu, -B[0, 0] * x1 - B[0, 1] * x2, atol=1e-6 * scale)
    assert np.allclose(yv, -B[1, 0] * x1 - B[1, 1] * x2, atol=1e-6 * scale)
    K, H = rel_curvatures(s, q, u, v)
    assert rel(np.linalg.det(B), K) < 1e-9
    assert rel(np.trace(B) / 2, H) < 1e-9


@given(cases, ts, vs)
def test_scalar_curvature_is_intrinsic(case, t, v):
    s, q, u, v = at(case, t, v)
    S = scalar_curvature(s, q, u, v)
    oracle = brioschi(lambda a, b: relative_metric(s, q, a, b).matrix(), u, v)
    assert rel(S, oracle) < 1e-4


@given(cases, ts, vs)
def test_tchebychev_is_log_gradient(case, t, v):
    """T_i = d_i log(|q| |K~|^(-1/4)) with the Euclidean Gaussian curvature K~."""
    s, q, u, v = at(case, t, v)
    T = tchebychev(s, q, u, v)
    cov = relative_metric(s, q, u, v).matrix() @ [T.T1, T.T2]
    h = 1e-5

    def potential(a, b):
        return np.log(abs(q.value(a, b))) - 0.25 * np.log(abs(euclidean_curvatures(s, a, b)[0]))

    grad = [(potential(u + h, v) - potential(u - h, v)) / (2 * h), (potential(u, v + h) - potential(u, v - h)) / (2 * h)]
    assert np.allclose(cov, grad, atol=1e-6 * max(1.0, np.abs(cov).max()))
    x1, x2 = tangent_vectors(s, u, v)
    assert np.allclose(T.frame @ _frame(s, u), T.T1 * x1 + T.T2 * x2, atol=1e-9 * max(1, abs(T.T1), abs(T.T2)))


def _frame(s, u):
    fs = frame_at(s, u)
    return np.array([fs.e, fs.n, fs.z])


@given(cases, ts, vs)
def test_pick_identity(case, t, v):
    s, q, u, v = at(case, t, v)
    _, H = rel_curvatures(s, q, u, v)
    J = pick_invariant(s, q, u, v)
    S = scalar_curvature(s, q, u, v)
    assert abs(3 * H - J - 3 * S) <= 1e-8 * max(1.0, abs(H), abs(J), abs(S))
    assert rel(pick_from_darboux(s, q, u, v), J) < 1e-9


@given(cases, ts, vs)
def test_divergence_identity(case, t, v):
    s, q, u, v = at(case, t, v)
    div = divergence_T(s, q, u, v)
    S = scalar_curvature(s, q, u, v)
    rhs = divergence_identity_rhs(s, q, u, v)
    assert abs(div - 2 * S - rhs) <= 1e-7 * max(1.0, abs(div), abs(S), abs(rhs))


@given(st.sampled_from(sorted(BATTERY)), ts, st.floats(-2, 2))
def test_euclidean_limit(name, t, v):
    s, q, u, v = at((name, "euclidean"), t, v)
    K, H = rel_curvatures(s, q, u, v)
    Kt, HI = euclidean_curvatures(s, u, v)
    assert K == pytest.approx(Kt, abs=1e-8)
    assert H == pytest.approx(HI, abs=1e-8)
    assert np.allclose(relative_normal_vector(s, q, u, v), unit_normal(s, u, v), atol=1e-12)


def test_euclidean_helicoid_values(helicoid):
    q = make_euclidean(helicoid)
    y = relative_normal(helicoid, q, 0.3, 0.0)
    assert y.coeffs() == pytest.approx([0.0, 1.0, 0.0])
    assert rel_curvatures(helicoid, q, 0.3, 1.0) == pytest.approx((-0.25, 0.0))


def _central_partials(g, gp, gpp):
    def q(u, v):
        return g(u) * v / np.sqrt(1 + v * v)

    def q1(u, v):
        return gp(u) * v / np.sqrt(1 + v * v)

    def q2(u, v):
        return g(u) / (1 + v * v) ** 1.5

    def q11(u, v):
        return gpp(u) * v / np.sqrt(1 + v * v)

    def q12(u, v):
        return gp(u) / (1 + v * v) ** 1.5

    def q22(u, v):
        return -3 * g(u) * v / (1 + v * v) ** 2.5

    return q, q1, q2, q11, q12, q22


def test_custom_support_matches_builtin(helicoid):
    fns = _central_partials(lambda u: 2 + np.sin(u), np.cos, lambda u: -np.sin(u))
    custom = CustomSupport(helicoid, *fns, v_domain=(0.2, 1.5))
    builtin = make_central(helicoid, "2 + sin(u)")
    for u, v in [(0.3, 0.5), (1.2, -1.4), (1.9, 0.2)]:
        assert np.allclose(
            relative_normal(helicoid, custom, u, v).coeffs(), relative_normal(helicoid, builtin, u, v).coeffs()
        )
        assert rel_curvatures(helicoid, custom, u, v) == pytest.approx(rel_curvatures(helicoid, builtin, u, v))


def test_custom_support_inconsistent(helicoid):
    q, q1, q2, q11, q12, q22 = _central_partials(lambda u: 2 + np.sin(u), np.cos, lambda u: -np.sin(u))
    with pytest.raises(InconsistentSupport):
        CustomSupport(helicoid, q, lambda u, v: 2 * q1(u, v) + 1, q2, q11, q12, q22)


def test_zero_support(helicoid):
    q = make_central(helicoid, "2")
    with pytest.raises(ZeroSupport):
        relative_normal(helicoid, q, 1.0, 0.0)


def test_central_shape_operator_on_helicoid(helicoid):
    """y_/1 = -g' x_/1 - g'' v x_/2 and y_/2 = -g' x_/2 on the helicoid."""
    q = make_central(helicoid, "2 + sin(u)")
    for u, v in [(0.3, 0.5), (1.1, -1.2)]:
        B = shape_operator(helicoid, q, u, v)
        assert np.allclose(B, [[np.cos(u), -np.sin(u) * v], [0.0, np.cos(u)]], atol=1e-12)
    q = make_central(helicoid, "2 + 0.5*u")
    assert np.allclose(shape_operator(helicoid, q, 0.7, 1.3), 0.5 * np.eye(2), atol=1e-12)
