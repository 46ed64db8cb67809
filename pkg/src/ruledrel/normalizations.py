"""Special relative normalizations: Euclidean, central, polar and right.

Each family builds a :class:`SupportField` from univariate ingredients and
also knows its own closed expression for the relative normal, used to
cross-check the general formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import SmoothFn1
from .geom_core import RuledSurface
from .ode import antiderivative
from .relnorm import BiJet, SupportField, relative_normal, _Ctx

LABELS = ("central", "polar", "right", "asymptotic")


class VanishingIngredient(ValueError):
    """An ingredient function makes q vanish on the working domain."""


class MixedImageType(ValueError):
    """delta g' - kappa f vanishes somewhere on the domain but not everywhere."""


class EuclideanSupport(SupportField):
    kind = "euclidean"

    def bijet(self, u, v):
        return BiJet(1.0)

    def frame_normal(self, u, v):
        d = float(self.surface.delta(u).c0)
        w = np.hypot(d, v)
        return np.array([0.0, d / w, -v / w])


class CentralSupport(SupportField):
    """``q = g v / w``; the relative normal lies in the central plane {e, z}."""

    kind = "central"

    def __init__(self, surface: RuledSurface, g):
        super().__init__(surface)
        self.g = SmoothFn1.coerce(g)

    def bijet(self, u, v):
        d = BiJet.of_u(self.surface.delta(u))
        g = BiJet.of_u(self.g(u))
        vv = BiJet.of_v(v)
        return g * vv / (d * d + vv * vv).sqrt()

    def frame_normal(self, u, v):
        d = float(self.surface.delta(u).c0)
        k = float(self.surface.kappa(u).c0)
        gj = self.g(u)
        g, gp = float(gj.c0), float(gj.c1)
        return np.array([-(gp * v + d * k * g) / d, 0.0, -g])


class PolarSupport(SupportField):
    """``q = f(V)`` with ``V = arctan(v / delta) - ∫ kappa du`` (integral anchored at u0)."""

    kind = "polar"

    def __init__(self, surface: RuledSurface, f):
        super().__init__(surface)
        if isinstance(f, str):
            f = SmoothFn1.from_expr(f, variable="V")
        self.f = SmoothFn1.coerce(f)
        self.kappa_integral = antiderivative(surface.kappa, surface)

    def angle(self, u, v) -> BiJet:
        d = BiJet.of_u(self.surface.delta(u))
        return (BiJet.of_v(v) / d).atan() - BiJet.of_u(self.kappa_integral(u))

    def bijet(self, u, v):
        V = self.angle(u, v)
        fj = self.f(float(V.f))
        return V.compose(float(fj.c0), float(fj.c1), float(fj.c2))

    def frame_normal(self, u, v):
        d = float(self.surface.delta(u).c0)
        w = np.hypot(d, v)
        fj = self.f(float(self.angle(u, v).f))
        q, qdot = float(fj.c0), float(fj.c1)
        return np.array([0.0, (d * q - v * qdot) / w, -(v * q + d * qdot) / w])


class RightSupport(SupportField):
    """``q = (f + g v) / w``: relative image is a curve or has generators parallel to e."""

    kind = "right"

    def __init__(self, surface: RuledSurface, f, g):
        super().__init__(surface)
        self.f = SmoothFn1.coerce(f)
        self.g = SmoothFn1.coerce(g)

    def bijet(self, u, v):
        d = BiJet.of_u(self.surface.delta(u))
        vv = BiJet.of_v(v)
        return (BiJet.of_u(self.f(u)) + BiJet.of_u(self.g(u)) * vv) / (d * d + vv * vv).sqrt()

    def frame_normal(self, u, v):
        return right_frame_normal(self.surface, self.f, self.g, u, v)


def right_frame_normal(surface: RuledSurface, f: SmoothFn1, g: SmoothFn1, u: float, v: float) -> np.ndarray:
    """``s*(u) - ((delta g' - kappa f) / delta^2) v e`` on (e, n, z)."""
    dj = surface.delta(u)
    fj, gj = f(u), g(u)
    d, dp = float(dj.c0), float(dj.c1)
    k = float(surface.kappa(u).c0)
    fv, fp = float(fj.c0), float(fj.c1)
    gv, gp = float(gj.c0), float(gj.c1)
    f_over_d_prime = (fp * d - fv * dp) / (d * d)
    return np.array([-(f_over_d_prime + k * gv) - (d * gp - k * fv) / (d * d) * v, fv / d, -gv])


@dataclass
class NormalizationSpec:
    """Declarative description of a normalization: a kind plus its ingredients."""

    kind: str
    ingredients: dict = field(default_factory=dict)

    def build(self, surface: RuledSurface) -> SupportField:
        if self.kind == "euclidean":
            return make_euclidean(surface)
        if self.kind == "central":
            return make_central(surface, self.ingredients["g"])
        if self.kind == "polar":
            return make_polar(surface, self.ingredients["f"])
        if self.kind == "right":
            return make_right(surface, self.ingredients["f"], self.ingredients["g"])
        if self.kind == "product":
            return make_product(surface, self.ingredients["a"], self.ingredients["b"])
        raise ValueError(f"unknown normalization kind {self.kind!r}")


def make_euclidean(surface: RuledSurface) -> EuclideanSupport:
    return EuclideanSupport(surface)


def make_central(surface: RuledSurface, g) -> CentralSupport:
    q = CentralSupport(surface, g)
    gv = np.asarray(q.g(surface.knots).c0) * np.ones(len(surface.knots))
    if np.any(np.abs(gv) < 1e-12):
        raise VanishingIngredient("g must not vanish for a central normalization")
    return q


def make_polar(surface: RuledSurface, f) -> PolarSupport:
    """Polar normalization; f is checked over the whole range swept by V."""
    q = PolarSupport(surface, f)
    integral = np.array([float(q.kappa_integral(u).c0) for u in np.linspace(*surface.u_domain, 41)])
    # V never reaches the endpoints: arctan(v / delta) is open at +-pi/2
    Vs = np.linspace(-np.pi / 2 - integral.max(), np.pi / 2 - integral.min(), 401)[1:-1]
    fv = np.asarray(q.f(Vs).c0) * np.ones(len(Vs))
    small = np.abs(fv) < 1e-12
    if np.any(small) or (np.any(fv > 0) and np.any(fv < 0)):
        bad = Vs[int(np.argmin(np.abs(fv)))]
        raise VanishingIngredient(f"f vanishes near V = {bad:.6g}")
    return q


def make_right(surface: RuledSurface, f, g, v_domain=None) -> RightSupport:
    """Right normalization; with ``v_domain`` given, q != 0 is checked on a grid."""
    q = RightSupport(surface, f, g)
    if v_domain is not None:
        us = np.linspace(*surface.u_domain, 41)
        vs = np.linspace(v_domain[0], v_domain[1], 41)
        vals = np.array([[float(q.f(u).c0) + float(q.g(u).c0) * v for v in vs] for u in us])
        if np.any(np.abs(vals) < 1e-12) or not (np.all(vals > 0) or np.all(vals < 0)):
            i, j = np.unravel_index(int(np.argmin(np.abs(vals))), vals.shape)
            raise VanishingIngredient(f"f + g v vanishes near (u, v) = ({us[i]:.6g}, {vs[j]:.6g})")
    return q


def normal_v_derivatives(surface: RuledSurface, q: SupportField, u: float, v: float) -> tuple[float, float, float]:
    """``(y1_/2, y2_/2, y3_/2)``; the first by central difference, the others exactly."""
    c = _Ctx(surface, q, u, v)
    d, w, w2 = c.d, c.w, c.w2
    y2 = (d * d * c.q - w2 * v * c.q2) / (d * w)
    y2v = (d * d * c.q2 - 2.0 * v * v * c.q2 - w2 * c.q2 - w2 * v * c.q22) / (d * w) - y2 * v / w2
    y3 = -(v * c.q + w2 * c.q2) / w
    y3v = -(c.q + v * c.q2 + 2.0 * v * c.q2 + w2 * c.q22) / w - y3 * v / w2
    h = 1e-5
    y1v = (relative_normal(surface, q, u, v + h).y1 - relative_normal(surface, q, u, v - h).y1) / (2.0 * h)
    return y1v, y2v, y3v


def default_v_domain(q: SupportField) -> tuple[float, float]:
    if q.kind == "central":
        return (1e-2, 2.0)
    return (-2.0, 2.0)


def classification_residuals(
    surface: RuledSurface, q: SupportField, v_domain=None, n: int = 21
) -> dict[str, float]:
    """Max over the grid of |y2|, |y1|, max(|y2_/2|, |y3_/2|), |y3|."""
    if v_domain is None:
        v_domain = default_v_domain(q)
    res = dict.fromkeys(LABELS, 0.0)
    for u in np.linspace(*surface.u_domain, n):
        for v in np.linspace(v_domain[0], v_domain[1], n):
            y = relative_normal(surface, q, u, v)
            _, y2v, y3v = normal_v_derivatives(surface, q, u, v)
            res["central"] = max(res["central"], abs(y.y2))
            res["polar"] = max(res["polar"], abs(y.y1))
            res["right"] = max(res["right"], abs(y2v), abs(y3v))
            res["asymptotic"] = max(res["asymptotic"], abs(y.y3))
    return res


def classify(surface: RuledSurface, q: SupportField, v_domain=None, n: int = 21, tol: float = 1e-7) -> frozenset:
    """Labels among central, polar, right, asymptotic satisfied on an n x n grid."""
    res = classification_residuals(surface, q, v_domain, n)
    return frozenset(label for label, r in res.items() if r <= tol)


def right_image_type(surface: RuledSurface, f, g, n: int = 201, tol: float = 1e-9) -> str:
    """``"curve"`` if delta g' - kappa f vanishes identically, ``"parallel_ruled"`` if nowhere."""
    f = SmoothFn1.coerce(f)
    g = SmoothFn1.coerce(g)
    us = np.linspace(*surface.u_domain, n)
    ones = np.ones(n)
    d = surface.delta(us).c0 * ones
    k = surface.kappa(us).c0 * ones
    expr = d * g(us).c1 * ones - k * f(us).c0 * ones
    small = np.abs(expr) < tol
    if np.all(small):
        return "curve"
    if not np.any(small) and (np.all(expr > 0) or np.all(expr < 0)):
        return "parallel_ruled"
    bad = us[np.argmax(small)] if np.any(small) else us[int(np.argmin(np.abs(expr)))]
    raise MixedImageType(f"delta g' - kappa f vanishes only partly on the domain (e.g. near u = {bad:.6g})")


class ProductSupport(SupportField):
    """Separable ``q = a(u) b(v)``; generically outside every named family."""

    kind = "product"

    def __init__(self, surface: RuledSurface, a, b):
        super().__init__(surface)
        self.a = SmoothFn1.coerce(a)
        if isinstance(b, str):
            b = SmoothFn1.from_expr(b, variable="v")
        self.b = SmoothFn1.coerce(b)

    def bijet(self, u, v):
        bj = self.b(v)
        return BiJet.of_u(self.a(u)) * BiJet(float(bj.c0), 0.0, float(bj.c1), 0.0, 0.0, float(bj.c2))


def make_product(surface: RuledSurface, a, b) -> ProductSupport:
    return ProductSupport(surface, a, b)
