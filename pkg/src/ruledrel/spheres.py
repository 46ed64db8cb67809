"""Improper and proper relative spheres among right normalizations.

Detectors sample the relative normal on a grid and return a certificate with
a quantitative residual.  Builders construct the support functions that make
a given ruled surface a relative sphere; the non-conoidal cases integrate a
third-order ODE for g with RK4 from user-supplied initial data at ``u0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expr import ExprDomainError, Jet3, SmoothFn1
from .geom_core import RuledSurface, position
from .normalizations import RightSupport, right_frame_normal
from .ode import DEFAULT_STEP, KnotSolution, antiderivative, derivatives_fd
from .relnorm import (
    SupportField,
    rel_curvatures,
    relative_normal,
    relative_normal_vector,
    shape_operator,
)

DEFAULT_V_DOMAIN = (0.1, 2.0)


class NotConoidal(ValueError):
    pass


class ConoidalSurface(ValueError):
    pass


class VanishingSupport(ValueError):
    pass


@dataclass
class SphereCertificate:
    """Evidence that a normalization is a relative sphere.

    ``center`` is the fixed point for proper spheres and the constant
    relative normal for improper ones; ``residual`` is the max deviation on
    the verification grid.
    """

    kind: str
    c: float | None
    center: np.ndarray
    residual: float
    conditions_residual: float | None = None
    shape_residual: float | None = None
    curvature_residual: float | None = None
    samples: int = 0


@dataclass
class SphereBuild:
    """A constructed sphere normalization with its ingredients and closed forms."""

    kind: str
    support: RightSupport
    f: SmoothFn1
    g: SmoothFn1
    c: float | None = None
    params: dict = field(default_factory=dict)
    pick: Callable[[float, float], float] | None = None
    expected_normal: Callable[[float, float], np.ndarray] | None = None
    ode: KnotSolution | None = None
    ode_residual: Callable[[float], float] | None = None
    striction_residual: Callable[[], float] | None = None


def _grid(surface: RuledSurface, v_domain, n: int):
    us = np.linspace(*surface.u_domain, n)
    vs = np.linspace(v_domain[0], v_domain[1], n)
    return [(u, v) for u in us for v in vs]


def _normal_conditions(surface: RuledSurface, q: SupportField, u: float, v: float, h: float = 1e-5) -> float:
    """Residual of y1_/1 - y2 = kappa y2 + y3_/1 = y1_/2 = y3_/2 = 0 by central differences."""
    y = relative_normal(surface, q, u, v)
    yu_p, yu_m = relative_normal(surface, q, u + h, v), relative_normal(surface, q, u - h, v)
    yv_p, yv_m = relative_normal(surface, q, u, v + h), relative_normal(surface, q, u, v - h)
    k = float(surface.kappa(u).c0)
    y1u = (yu_p.y1 - yu_m.y1) / (2 * h)
    y3u = (yu_p.y3 - yu_m.y3) / (2 * h)
    y1v = (yv_p.y1 - yv_m.y1) / (2 * h)
    y3v = (yv_p.y3 - yv_m.y3) / (2 * h)
    return max(abs(y1u - y.y2), abs(k * y.y2 + y3u), abs(y1v), abs(y3v))


def _interior(surface: RuledSurface, pts, h: float = 2e-5):
    a, b = surface.u_domain
    return [(u, v) for u, v in pts if a + h <= u <= b - h]


def is_improper_sphere(
    surface: RuledSurface, q: SupportField, v_domain=DEFAULT_V_DOMAIN, n: int = 21, tol: float = 1e-6
) -> SphereCertificate | None:
    pts = _grid(surface, v_domain, n)
    ys = np.array([relative_normal_vector(surface, q, u, v) for u, v in pts])
    residual = float(np.max(np.linalg.norm(ys - ys[0], axis=1)))
    if residual >= tol:
        return None
    cond = max(_normal_conditions(surface, q, u, v) for u, v in _interior(surface, pts[:: max(1, n // 5)]))
    K_H = max(max(abs(x) for x in rel_curvatures(surface, q, u, v)) for u, v in pts)
    return SphereCertificate(
        kind="improper",
        c=None,
        center=ys.mean(axis=0),
        residual=residual,
        conditions_residual=float(cond),
        curvature_residual=float(K_H),
        samples=len(pts),
    )


def fit_proper_sphere(surface: RuledSurface, q: SupportField, pts) -> tuple[float, np.ndarray, float]:
    """Least-squares fit of ``x = c y + a``; returns (c, a, max residual)."""
    xs = np.array([position(surface, u, v) for u, v in pts])
    ys = np.array([relative_normal_vector(surface, q, u, v) for u, v in pts])
    m = len(pts)
    A = np.zeros((3 * m, 4))
    A[:, 0] = ys.ravel()
    A[:, 1:] = np.tile(np.eye(3), (m, 1))
    sol, *_ = np.linalg.lstsq(A, xs.ravel(), rcond=None)
    c, a = float(sol[0]), sol[1:]
    residual = float(np.max(np.linalg.norm(xs - c * ys - a, axis=1)))
    return c, a, residual


def is_proper_sphere(
    surface: RuledSurface, q: SupportField, v_domain=DEFAULT_V_DOMAIN, n: int = 21, tol: float = 1e-6
) -> SphereCertificate | None:
    pts = _grid(surface, v_domain, n)
    if len(pts) < 12:
        raise ValueError("proper-sphere fit needs at least 12 samples")
    c, a, residual = fit_proper_sphere(surface, q, pts)
    if abs(c) < 1e-12 or not residual < tol:
        return None
    shape = 0.0
    curv = 0.0
    for u, v in pts:
        B = shape_operator(surface, q, u, v)
        shape = max(shape, float(np.max(np.abs(B + np.eye(2) / c))))
        K, H = rel_curvatures(surface, q, u, v)
        curv = max(curv, abs(H + 1.0 / c), abs(K - 1.0 / c**2))
    return SphereCertificate(
        kind="proper",
        c=c,
        center=a,
        residual=residual,
        shape_residual=shape,
        curvature_residual=curv,
        samples=len(pts),
    )


# --------------------------------------------------------------------------
# Builders


def _require_conoidal(surface: RuledSurface):
    if not surface.is_conoidal():
        raise NotConoidal("construction requires a conoidal surface (kappa = 0)")


def _require_nonconoidal(surface: RuledSurface):
    k = np.asarray(surface.kappa(surface.knots).c0) * np.ones(len(surface.knots))
    if np.any(np.abs(k) < 1e-12):
        raise ConoidalSurface("construction requires kappa != 0 on the whole domain")


def _check_support(support: RightSupport, v_domain):
    """q is continuous on a connected domain, so it must keep one strict sign on the grid."""
    if v_domain is None:
        return
    surface = support.surface
    us = np.linspace(*surface.u_domain, 41)
    vs = np.linspace(v_domain[0], v_domain[1], 41)
    vals = np.array([[float(support.f(u).c0) + float(support.g(u).c0) * v for v in vs] for u in us])
    bad = np.abs(vals) < 1e-12
    if not bad.any() and (np.all(vals > 0) or np.all(vals < 0)):
        return
    i, j = np.unravel_index(int(np.argmin(np.abs(vals))), vals.shape)
    raise VanishingSupport(f"q vanishes near (u, v) = ({us[i]:.6g}, {vs[j]:.6g})")


def _trig(u) -> tuple[Jet3, Jet3]:
    x = Jet3.variable(u)
    return x.cos(), x.sin()


def build_improper_conoidal(surface: RuledSurface, c1: float, c2: float, c3: float, v_domain=None) -> SphereBuild:
    """``f = delta (c1 cos u + c2 sin u)``, ``g = c3`` on a conoidal surface."""
    _require_conoidal(surface)
    if c1 * c1 + c2 * c2 + c3 * c3 == 0.0:
        raise ValueError("c1, c2, c3 must not all vanish")

    def f_jet(u):
        cu, su = _trig(u)
        return surface.delta(u) * (cu * c1 + su * c2)

    f = SmoothFn1(f_jet, f"delta*({c1}*cos(u)+{c2}*sin(u))")
    g = SmoothFn1.constant(c3)
    support = RightSupport(surface, f, g)
    _check_support(support, v_domain)

    def expected(u, v):
        return np.array([c1 * np.sin(u) - c2 * np.cos(u), c1 * np.cos(u) + c2 * np.sin(u), -c3])

    def pick(u, v):
        dj = surface.delta(u)
        d, dp = float(dj.c0), float(dj.c1)
        lam = float(surface.lam(u).c0)
        cs = c1 * np.cos(u) + c2 * np.sin(u)
        num = d * (2 * c2 * np.cos(u) - 2 * c1 * np.sin(u) - c3 * lam) + dp * cs
        return 3 * c3 * num / (2 * d * (c3 * v + d * cs))

    return SphereBuild(
        "improper", support, f, g, params={"c1": c1, "c2": c2, "c3": c3}, pick=pick, expected_normal=expected
    )


def _ode_domain(surface: RuledSurface, pad: float, coef) -> tuple[float, float]:
    a, b = surface.u_domain
    try:
        coef(np.array([a - pad, b + pad]))
        return a - pad, b + pad
    except (ExprDomainError, ZeroDivisionError, ValueError):
        return a, b


def _fd_jet(fn: Callable[[float], float], u: float) -> Jet3:
    return Jet3(*derivatives_fd(fn, u))


def build_improper_nonconoidal(
    surface: RuledSurface, g0: float, g0p: float, g0pp: float, step: float = DEFAULT_STEP, v_domain=None
) -> SphereBuild:
    """Solve ``(g'/kappa)'' + g'/kappa + (kappa g)' = 0`` and set ``f = delta g' / kappa``.

    Integrated as ``g' = kappa h``, ``h'' = -h - kappa' g - kappa^2 h``.
    """
    _require_nonconoidal(surface)

    def coef(u):
        kj = surface.kappa(u)
        ones = np.ones(np.shape(u))
        return (kj.c0 * ones, kj.c1 * ones)

    def rhs(y, c):
        k, kp = c
        g, h, p = y[..., 0], y[..., 1], y[..., 2]
        return np.stack([k * h, p, -h - kp * g - k * k * h], axis=-1)

    u0 = surface.u0
    kj0 = surface.kappa(u0)
    k0, kp0 = float(kj0.c0), float(kj0.c1)
    y0 = [g0, g0p / k0, (g0pp * k0 - g0p * kp0) / (k0 * k0)]
    sol = KnotSolution(rhs, coef, u0, y0, _ode_domain(surface, 0.1, coef), step)

    def jets(u):
        y = sol(u)
        g, h, p = y[..., 0], y[..., 1], y[..., 2]
        kj = surface.kappa(u)
        k, kp, kpp = kj.c0, kj.c1, kj.c2
        pp = -h - kp * g - k * k * h
        ppp = -p - kpp * g - kp * (k * h) - 2 * k * kp * h - k * k * p
        hj = Jet3(h, p, pp, ppp)
        gpj = kj * hj
        return Jet3(g, gpj.c0, gpj.c1, gpj.c2), surface.delta(u) * hj, hj

    g = SmoothFn1(lambda u: jets(u)[0], "g (ODE)")
    f = SmoothFn1(lambda u: jets(u)[1], "delta g'/kappa (ODE)")
    support = RightSupport(surface, f, g)
    _check_support(support, v_domain)

    def expected(u, v):
        gj, _, hj = jets(u)
        k = float(surface.kappa(u).c0)
        return np.array([-(k * float(gj.c0) + float(hj.c1)), float(hj.c0), -float(gj.c0)])

    def ode_residual(u):
        gfd = _fd_jet(lambda t: float(sol(t)[0]), u)
        kj = surface.kappa(u)
        h = gfd.derivative() / kj
        return float(h.c2 + h.c0 + (kj * gfd).c1)

    def pick(u, v):
        gj = g(u)
        gv, gp, gpp = float(gj.c0), float(gj.c1), float(gj.c2)
        dj, kj = surface.delta(u), surface.kappa(u)
        d, dp = float(dj.c0), float(dj.c1)
        k, kp = float(kj.c0), float(kj.c1)
        lam = float(surface.lam(u).c0)
        num = k * k * gv * (k * v * v + d * d * k - d * d * lam) + d * (k * gp * (2 * k * v + dp) + 2 * d * (k * gpp - kp * gp))
        return 3 * gv * num / (2 * d * d * k * (k * gv * v + d * gp))

    return SphereBuild(
        "improper",
        support,
        f,
        g,
        params={"g0": g0, "g0p": g0p, "g0pp": g0pp},
        pick=pick,
        expected_normal=expected,
        ode=sol,
        ode_residual=ode_residual,
    )


def build_proper_conoidal(
    surface: RuledSurface, c: float, c1: float, c2: float, c3: float, v_domain=None
) -> SphereBuild:
    """Proper sphere on a conoidal surface.

    ``g = (c3 - ∫delta)/c`` and
    ``f = delta [cos u (c1 + ∫delta lambda sin u) + sin u (c2 - ∫delta lambda cos u)] / c``,
    all integrals anchored at ``u0``.
    """
    _require_conoidal(surface)
    if c == 0.0:
        raise ValueError("c must be nonzero")
    D = antiderivative(surface.delta, surface)

    def dl_sin(u):
        cu, su = _trig(u)
        return surface.delta(u) * surface.lam(u) * su

    def dl_cos(u):
        cu, su = _trig(u)
        return surface.delta(u) * surface.lam(u) * cu

    A = antiderivative(SmoothFn1(dl_sin, "delta*lambda*sin(u)"), surface)
    B = antiderivative(SmoothFn1(dl_cos, "delta*lambda*cos(u)"), surface)

    def F_jet(u):
        cu, su = _trig(u)
        return (cu * (A(u) + c1) + su * (c2 - B(u))) / c

    g = SmoothFn1(lambda u: (c3 - D(u)) / c, f"(c3 - ∫delta)/c")
    f = SmoothFn1(lambda u: surface.delta(u) * F_jet(u), "f (quadrature)")
    support = RightSupport(surface, f, g)
    _check_support(support, v_domain)

    def pick(u, v):
        return _pick_right_conoidal(surface, f, g, u, v)

    build = SphereBuild(
        "proper", support, f, g, c=c, params={"c": c, "c1": c1, "c2": c2, "c3": c3}, pick=pick
    )
    build.expected_normal = lambda u, v: right_frame_normal(surface, f, g, u, v)
    build.striction_residual = lambda: _striction_residual(surface, f, g, c)
    return build


def _pick_right_conoidal(surface, f, g, u, v):
    dj, fj, gj = surface.delta(u), f(u), g(u)
    d, dp = float(dj.c0), float(dj.c1)
    fv, fp = float(fj.c0), float(fj.c1)
    gv, gp = float(gj.c0), float(gj.c1)
    lam = float(surface.lam(u).c0)
    return 3 * gv * (2 * d * gp * v - d * d * lam * gv - dp * fv + 2 * d * fp) / (2 * d * d * (gv * v + fv))


def _pick_right(surface, f, g, u, v):
    dj, fj, gj = surface.delta(u), f(u), g(u)
    d, dp = float(dj.c0), float(dj.c1)
    fv, fp = float(fj.c0), float(fj.c1)
    gv, gp = float(gj.c0), float(gj.c1)
    k = float(surface.kappa(u).c0)
    lam = float(surface.lam(u).c0)
    num = gv * (k * v * v + d * d * (k - lam)) - dp * fv + 2 * d * (gp * v + fp)
    return 3 * gv * num / (2 * d * d * (gv * v + fv))


def _striction_residual(surface, f, g, c, n: int = 41) -> float:
    """Spread of ``s(u) - c s*(u)`` over the domain (zero when it is a constant vector)."""
    offsets = []
    for u in np.linspace(*surface.u_domain, n):
        fs = surface.frame_at(u)
        a, b, cc = right_frame_normal(surface, f, g, u, 0.0)
        offsets.append(fs.s - c * (a * fs.e + b * fs.n + cc * fs.z))
    offsets = np.array(offsets)
    return float(np.max(np.linalg.norm(offsets - offsets.mean(axis=0), axis=1)))


def build_proper_nonconoidal(
    surface: RuledSurface, c: float, g0: float, g0p: float, g0pp: float, step: float = DEFAULT_STEP, v_domain=None
) -> SphereBuild:
    """Proper sphere on a non-conoidal surface.

    With ``F = (delta + c g') / kappa`` the ODE for g reads
    ``F'' + F + c (kappa g)' + delta lambda = 0`` and ``f = delta F / c``.
    """
    _require_nonconoidal(surface)
    if c == 0.0:
        raise ValueError("c must be nonzero")

    def coef(u):
        ones = np.ones(np.shape(u))
        kj = surface.kappa(u)
        return (kj.c0 * ones, kj.c1 * ones, surface.delta(u).c0 * ones, surface.lam(u).c0 * ones)

    def rhs(y, cf):
        k, kp, d, lam = cf
        g, F, P = y[..., 0], y[..., 1], y[..., 2]
        gp = (k * F - d) / c
        return np.stack([gp, P, -F - c * (kp * g + k * gp) - d * lam], axis=-1)

    u0 = surface.u0
    kj0, dj0 = surface.kappa(u0), surface.delta(u0)
    k0, kp0 = float(kj0.c0), float(kj0.c1)
    d0, dp0 = float(dj0.c0), float(dj0.c1)
    y0 = [g0, (d0 + c * g0p) / k0, (dp0 + c * g0pp) / k0 - (d0 + c * g0p) * kp0 / (k0 * k0)]
    sol = KnotSolution(rhs, coef, u0, y0, _ode_domain(surface, 0.1, coef), step)

    def jets(u):
        y = sol(u)
        g, F, P = y[..., 0], y[..., 1], y[..., 2]
        kj, dj, lj = surface.kappa(u), surface.delta(u), surface.lam(u)
        k, kp, kpp = kj.c0, kj.c1, kj.c2
        d, dp = dj.c0, dj.c1
        lam, lp = lj.c0, lj.c1
        gp = (k * F - d) / c
        Pp = -F - c * (kp * g + k * gp) - d * lam
        gpp = (kp * F + k * P - dp) / c
        Ppp = -P - c * (kpp * g + 2 * kp * gp + k * gpp) - (dp * lam + d * lp)
        Fj = Jet3(F, P, Pp, Ppp)
        gpj = (kj * Fj - dj) / c
        return Jet3(g, gpj.c0, gpj.c1, gpj.c2), dj * Fj / c, Fj

    g = SmoothFn1(lambda u: jets(u)[0], "g (ODE)")
    f = SmoothFn1(lambda u: jets(u)[1], "delta (delta + c g')/(c kappa) (ODE)")
    support = RightSupport(surface, f, g)
    _check_support(support, v_domain)

    def expected(u, v):
        gj, _, Fj = jets(u)
        k = float(surface.kappa(u).c0)
        return np.array([v / c - k * float(gj.c0) - float(Fj.c1) / c, float(Fj.c0) / c, -float(gj.c0)])

    def ode_residual(u):
        gfd = _fd_jet(lambda t: float(sol(t)[0]), u)
        kj, dj, lj = surface.kappa(u), surface.delta(u), surface.lam(u)
        F = (dj + gfd.derivative() * c) / kj
        return float(F.c2 + F.c0 + c * (kj * gfd).c1 + dj.c0 * lj.c0)

    build = SphereBuild(
        "proper",
        support,
        f,
        g,
        c=c,
        params={"c": c, "g0": g0, "g0p": g0p, "g0pp": g0pp},
        pick=lambda u, v: _pick_right(surface, f, g, u, v),
        expected_normal=expected,
        ode=sol,
        ode_residual=ode_residual,
    )
    build.striction_residual = lambda: _striction_residual(surface, f, g, c)
    return build


# --------------------------------------------------------------------------


@dataclass
class ConstantlyLinkedReport:
    coeffs: np.ndarray
    c1: float
    c2: float
    conoidal: bool
    relatively_minimal: bool
    q_fit_residual: float
    improper: bool
    circle_radius: float | None
    measured_radius: float | None


def constantly_linked(
    surface: RuledSurface, q: SupportField, v_domain=DEFAULT_V_DOMAIN, n: int = 21, tol: float = 1e-6
) -> ConstantlyLinkedReport | None:
    """Detect relative normals with constant coefficients on the moving frame.

    Then ``q = (c1 v + c2 delta) / w`` and ``y = c2 n - c1 z``; the image is a
    point when ``c2 = 0`` and otherwise a circle arc of radius ``|c2|``.
    """
    pts = _grid(surface, v_domain, n)
    ys = np.array([relative_normal(surface, q, u, v).coeffs() for u, v in pts])
    if np.max(np.abs(ys - ys[0])) >= tol:
        return None
    coeffs = ys.mean(axis=0)
    rows, rhs = [], []
    for u, v in pts:
        d = float(surface.delta(u).c0)
        rows.append([v, d])
        rhs.append(q.value(u, v) * np.hypot(d, v))
    (c1, c2), *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    fit = float(np.max(np.abs(np.array(rows) @ [c1, c2] - rhs)))
    H_max = max(abs(rel_curvatures(surface, q, u, v)[1]) for u, v in pts)
    improper = abs(c2) < tol
    radius = measured = None
    if not improper:
        radius = abs(float(c2))
        us = np.linspace(*surface.u_domain, n)
        img = np.array([relative_normal_vector(surface, q, u, v_domain[0]) for u in us])
        measured = _circle_radius(img)
    return ConstantlyLinkedReport(
        coeffs=coeffs,
        c1=float(c1),
        c2=float(c2),
        conoidal=surface.is_conoidal(),
        relatively_minimal=H_max < tol,
        q_fit_residual=fit,
        improper=improper,
        circle_radius=radius,
        measured_radius=measured,
    )


def _circle_radius(points: np.ndarray) -> float:
    """Radius of the circle through the first, middle and last sample."""
    a, b, c = points[0], points[len(points) // 2], points[-1]
    ab, bc, ca = np.linalg.norm(a - b), np.linalg.norm(b - c), np.linalg.norm(c - a)
    area2 = np.linalg.norm(np.cross(b - a, c - a))
    if area2 < 1e-14:
        return float("inf")
    return float(ab * bc * ca / (2.0 * area2))
