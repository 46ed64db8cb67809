"""Relative normalizations of a skew ruled surface given by a support function q.

All closed forms are evaluated directly from delta, kappa, lambda (and their
derivatives) and the partials of q.  Derivative index convention: 1 = u,
2 = v, and ``B[i, j]`` is ``B_i^j`` in ``y_/i = -B_i^j x_/j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geom_core import RuledSurface, fundamental_forms, tangent_vectors


class ZeroSupport(ValueError):
    """The support function vanishes, so no relative normal exists there."""


class InconsistentSupport(ValueError):
    """User-supplied partials of q disagree with finite differences of q."""


@dataclass(frozen=True)
class QPartials:
    q: float
    q1: float
    q2: float
    q11: float
    q12: float
    q22: float


class BiJet:
    """Value and partials through order 2 of a function of (u, v)."""

    __slots__ = ("f", "fu", "fv", "fuu", "fuv", "fvv")

    def __init__(self, f, fu=0.0, fv=0.0, fuu=0.0, fuv=0.0, fvv=0.0):
        self.f, self.fu, self.fv = f, fu, fv
        self.fuu, self.fuv, self.fvv = fuu, fuv, fvv

    @classmethod
    def of_u(cls, jet) -> "BiJet":
        """Lift a univariate Jet3 in u."""
        return cls(float(jet.c0), float(jet.c1), 0.0, float(jet.c2), 0.0, 0.0)

    @classmethod
    def of_v(cls, v: float) -> "BiJet":
        return cls(float(v), 0.0, 1.0, 0.0, 0.0, 0.0)

    def compose(self, f0, f1, f2) -> "BiJet":
        return BiJet(
            f0,
            f1 * self.fu,
            f1 * self.fv,
            f2 * self.fu * self.fu + f1 * self.fuu,
            f2 * self.fu * self.fv + f1 * self.fuv,
            f2 * self.fv * self.fv + f1 * self.fvv,
        )

    def __add__(self, o):
        if isinstance(o, BiJet):
            return BiJet(self.f + o.f, self.fu + o.fu, self.fv + o.fv, self.fuu + o.fuu, self.fuv + o.fuv, self.fvv + o.fvv)
        return BiJet(self.f + o, self.fu, self.fv, self.fuu, self.fuv, self.fvv)

    __radd__ = __add__

    def __neg__(self):
        return BiJet(-self.f, -self.fu, -self.fv, -self.fuu, -self.fuv, -self.fvv)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, BiJet):
            return BiJet(
                self.f * o.f,
                self.fu * o.f + self.f * o.fu,
                self.fv * o.f + self.f * o.fv,
                self.fuu * o.f + 2.0 * self.fu * o.fu + self.f * o.fuu,
                self.fuv * o.f + self.fu * o.fv + self.fv * o.fu + self.f * o.fuv,
                self.fvv * o.f + 2.0 * self.fv * o.fv + self.f * o.fvv,
            )
        return BiJet(self.f * o, self.fu * o, self.fv * o, self.fuu * o, self.fuv * o, self.fvv * o)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.f == 0.0:
            raise ZeroDivisionError("reciprocal of zero")
        r = 1.0 / self.f
        return self.compose(r, -r * r, 2.0 * r**3)

    def __truediv__(self, o):
        if isinstance(o, BiJet):
            return self * o.reciprocal()
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def sqrt(self):
        r = np.sqrt(self.f)
        return self.compose(r, 0.5 / r, -0.25 / r**3)

    def atan(self):
        x = self.f
        d = 1.0 + x * x
        return self.compose(np.arctan(x), 1.0 / d, -2.0 * x / d**2)

    def partials(self) -> QPartials:
        return QPartials(*(float(c) for c in (self.f, self.fu, self.fv, self.fuu, self.fuv, self.fvv)))


class SupportField:
    """Support function q(u, v) of a relative normalization with its partials.

    Subclasses implement ``bijet(u, v)``; ``frame_normal`` optionally returns
    the family's own expression for the relative normal in the moving frame.
    """

    kind = "custom"

    def __init__(self, surface: RuledSurface):
        self.surface = surface

    def bijet(self, u: float, v: float) -> BiJet:
        raise NotImplementedError

    def partials(self, u: float, v: float) -> QPartials:
        p = self.bijet(u, v).partials()
        if not np.isfinite(p.q) or abs(p.q) <= 1e-12:
            raise ZeroSupport(f"support function vanishes at (u, v) = ({u:.17g}, {v:.17g})")
        return p

    def value(self, u: float, v: float) -> float:
        return float(self.bijet(u, v).f)

    def frame_normal(self, u: float, v: float):
        return None


class CustomSupport(SupportField):
    """Arbitrary q from six callables ``(u, v) -> float`` (q and five partials).

    The partials are cross-checked against finite differences of ``q`` on a
    5x5 sample grid; disagreement above ``tol`` is rejected.
    """

    kind = "custom"

    def __init__(self, surface, q, q1, q2, q11, q12, q22, v_domain=(-1.0, 1.0), tol: float = 1e-4):
        super().__init__(surface)
        self._fns = (q, q1, q2, q11, q12, q22)
        self._validate(v_domain, tol)

    def bijet(self, u, v):
        return BiJet(*(float(f(u, v)) for f in self._fns))

    def _validate(self, v_domain, tol):
        q, q1, q2, q11, q12, q22 = self._fns
        a, b = self.surface.u_domain
        h = 1e-4
        us = np.linspace(a + 2 * h, b - 2 * h, 5)
        vs = np.linspace(v_domain[0], v_domain[1], 5)
        worst = 0.0
        for u in us:
            for v in vs:
                fd = (
                    (q(u + h, v) - q(u - h, v)) / (2 * h),
                    (q(u, v + h) - q(u, v - h)) / (2 * h),
                    (q1(u + h, v) - q1(u - h, v)) / (2 * h),
                    (q1(u, v + h) - q1(u, v - h)) / (2 * h),
                    (q2(u, v + h) - q2(u, v - h)) / (2 * h),
                )
                given = (q1(u, v), q2(u, v), q11(u, v), q12(u, v), q22(u, v))
                for x, y in zip(fd, given):
                    worst = max(worst, abs(x - y) / max(1.0, abs(y)))
        if worst > tol:
            raise InconsistentSupport(f"partials of q disagree with finite differences (max {worst:.3g})")


@dataclass(frozen=True)
class RelativeNormal:
    y1: float
    y2: float
    y3: float

    def coeffs(self) -> np.ndarray:
        return np.array([self.y1, self.y2, self.y3])


@dataclass(frozen=True)
class RelMetric:
    G11: float
    G12: float
    G22: float
    Ginv11: float
    Ginv12: float
    Ginv22: float
    detG: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.G11, self.G12], [self.G12, self.G22]])

    def inverse(self) -> np.ndarray:
        return np.array([[self.Ginv11, self.Ginv12], [self.Ginv12, self.Ginv22]])


@dataclass(frozen=True)
class DarbouxComponents:
    A112: float
    A112_up: float
    A122: float
    A122_up: float
    A111_up: float = 0.0
    A222: float = 0.0


@dataclass(frozen=True)
class Tchebychev:
    T1: float
    T2: float
    frame: np.ndarray  # coefficients on (e, n, z)


@dataclass(frozen=True)
class RelInvariants:
    J: float
    K: float
    H: float
    S: float
    T1: float
    T2: float
    T_frame: np.ndarray
    divT: float
    B: np.ndarray


class _Ctx:
    """Scalars shared by the closed forms at one (u, v)."""

    __slots__ = ("d", "dp", "dpp", "k", "kp", "l", "v", "w", "w2", "q", "q1", "q2", "q11", "q12", "q22")

    def __init__(self, surface: RuledSurface, q: SupportField, u: float, v: float):
        j = surface.jets(u)
        self.d = float(j.delta.c0)
        self.dp = float(j.delta.c1)
        self.dpp = float(j.delta.c2)
        self.k = float(j.kappa.c0)
        self.kp = float(j.kappa.c1)
        self.l = float(j.lam.c0)
        self.v = float(v)
        self.w2 = self.d * self.d + self.v * self.v
        self.w = float(np.sqrt(self.w2))
        p = q.partials(u, v)
        self.q, self.q1, self.q2 = p.q, p.q1, p.q2
        self.q11, self.q12, self.q22 = p.q11, p.q12, p.q22


def relative_normal(surface: RuledSurface, q: SupportField, u: float, v: float) -> RelativeNormal:
    c = _Ctx(surface, q, u, v)
    d, dp, k, v, w, w2 = c.d, c.dp, c.k, c.v, c.w, c.w2
    y1 = -w * (d * c.q1 + c.q2 * (k * w2 + dp * v)) / (d * d)
    y2 = (d * d * c.q - w2 * v * c.q2) / (d * w)
    y3 = -(v * c.q + w2 * c.q2) / w
    return RelativeNormal(y1, y2, y3)


def relative_normal_vector(surface: RuledSurface, q: SupportField, u: float, v: float) -> np.ndarray:
    y = relative_normal(surface, q, u, v)
    fs = surface.frame_at(u)
    return y.y1 * fs.e + y.y2 * fs.n + y.y3 * fs.z


def relative_metric(surface: RuledSurface, q: SupportField, u: float, v: float) -> RelMetric:
    c = _Ctx(surface, q, u, v)
    ff = fundamental_forms(surface, u, v)
    d, w = c.d, c.w
    return RelMetric(
        G11=ff.h11 / c.q,
        G12=ff.h12 / c.q,
        G22=ff.h22 / c.q,
        Ginv11=0.0,
        Ginv12=w * c.q / d,
        Ginv22=w * c.q * (c.k * c.w2 + c.dp * c.v - d * d * c.l) / (d * d),
        detG=-d * d / (c.w2 * c.q * c.q),
    )


def darboux_components(surface: RuledSurface, q: SupportField, u: float, v: float) -> DarbouxComponents:
    c = _Ctx(surface, q, u, v)
    d, dp, k, l, v, w, w2, qq = c.d, c.dp, c.k, c.l, c.v, c.w, c.w2, c.q
    core = w2 * c.q2 + qq * v
    m = k * v * v + dp * v + d * d * (k - l)
    tail = 2.0 * d * (w2 * c.q1 + d * dp * qq)
    A112 = -1.0 / (2.0 * qq * qq * w * w2) * (core * m + dp * w2 * qq - tail)
    A112_up = qq / (d * d) * core
    A122 = d / (w * w2 * qq * qq) * core
    A122_up = qq / (2.0 * d**3) * (3.0 * core * m - dp * w2 * qq + tail)
    return DarbouxComponents(A112, A112_up, A122, A122_up)


def pick_from_darboux(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    """J assembled from the Darboux tensor components (symmetry-reduced sum)."""
    a = darboux_components(surface, q, u, v)
    # the A_111 A^111 and A_222 A^222 terms drop out: A^111 = A_222 = 0
    return 1.5 * (a.A112 * a.A112_up + a.A122 * a.A122_up)


def pick_invariant(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    c = _Ctx(surface, q, u, v)
    d, dp, k, l, v, w, w2, qq = c.d, c.dp, c.k, c.l, c.v, c.w, c.w2, c.q
    core = w2 * c.q2 + v * qq
    brace = w2 * (k * qq * v + 2.0 * d * c.q1 + c.q2 * (k * w2 + dp * v - d * d * l)) - d * d * qq * (l * v - dp)
    return 3.0 * core / (2.0 * d * d * w * w2 * qq) * brace


def shape_operator(surface: RuledSurface, q: SupportField, u: float, v: float) -> np.ndarray:
    """Relative shape operator, ``B[i, j] = B_i^j``."""
    c = _Ctx(surface, q, u, v)
    d, dp, dpp, k, kp, l, v, w, w2 = c.d, c.dp, c.dpp, c.k, c.kp, c.l, c.v, c.w, c.w2
    q, q1, q2, q11, q12, q22 = c.q, c.q1, c.q2, c.q11, c.q12, c.q22
    w3 = w * w2
    w4 = w2 * w2
    lin = q2 * (k * w2 + dp * v) + d * q1
    B11 = -(d * d * dp * q * v + k * w2 * (d * d * q - v * w2 * q2) - d * w2 * (d * dp * q2 + v * q1 + w2 * q12)) / (
        d * d * w3
    )
    B12 = (
        d**4 * w2 * q
        - d * d * v * w4 * q2
        - dp * w2 * (d * d + 2.0 * v * v) * lin
        + d * d * l * (d * d * dp * (q * v + w2 * q2) + k * w2 * (d * d * q - v * w2 * q2) - d * w2 * (2.0 * d * dp * q2 + q1 * v + w2 * q12))
        + d * w4 * (q2 * (2.0 * d * dp * k + kp * w2 + dpp * v) + dp * q1 + q12 * (k * w2 + dp * v) + d * q11)
    ) / (d**3 * w3)
    B21 = (2.0 * q2 * v * w2 + d * d * q + w4 * q22) / (d * w3)
    B22 = (
        -d * d * l * (2.0 * q2 * v * w2 + d * d * q + w4 * q22)
        + v * w2 * lin
        + w4 * (q2 * (2.0 * k * v + dp) + q22 * (k * w2 + dp * v) + d * q12)
    ) / (d * d * w3)
    return np.array([[B11, B12], [B21, B22]])


def relative_curvature(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    """Relative curvature K as a product-form closed expression.

    The two brace factors are (up to constant multiples) the shape-operator
    rows, so K is a difference of two products over ``delta^4 w^6``.
    """
    c = _Ctx(surface, q, u, v)
    d, dp, dpp, k, kp, l, v, w, w2 = c.d, c.dp, c.dpp, c.k, c.kp, c.l, c.v, c.w, c.w2
    q, q1, q2, q11, q12, q22 = c.q, c.q1, c.q2, c.q11, c.q12, c.q22
    w4 = w2 * w2
    lin = q2 * (k * w2 + dp * v) + d * q1
    f1 = (
        l * d * d * (-2.0 * v**3 * q2 - d * d * (q + 2.0 * v * q2) - w4 * q22)
        + v * w2 * lin
        + w4 * (q2 * (2.0 * k * v + dp) + q22 * (k * w2 + dp * v) + d * q12)
    )
    f2 = d * d * dp * (q * v + w2 * q2) + k * w2 * (d * d * q - v * w2 * q2) - d * w2 * (2.0 * d * dp * q2 + v * q1 + w2 * q12)
    f3 = -2.0 * q2 * v**3 - d * d * (q + 2.0 * v * q2) - w4 * q22
    f4 = (
        d**4 * w2 * q
        - d * d * v * w4 * q2
        + d * d * dp * w2 * lin
        - 2.0 * dp * w4 * lin
        + d * l * (d**3 * dp * (q * v + w2 * q2) + d * k * w2 * (d * d * q - v * w2 * q2) - d * d * w2 * (2.0 * d * dp * q2 + v * q1 + w2 * q12))
        + d * w4 * (q2 * (2.0 * d * dp * k + kp * w2 + dpp * v) + dp * q1 + d * q11 + q12 * (k * w2 + dp * v))
    )
    return -(f1 * f2 - f3 * f4) / (d**4 * w4 * w2)


def relative_mean_curvature(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    c = _Ctx(surface, q, u, v)
    d, dp, k, l, v, w, w2 = c.d, c.dp, c.k, c.l, c.v, c.w, c.w2
    q, q1, q2, q12, q22 = c.q, c.q1, c.q2, c.q12, c.q22
    w4 = w2 * w2
    return (
        -d * d * q * (k * w2 + dp * v + d * d * l)
        + 2.0 * w2 * q2 * ((2.0 * k * v + dp) * w2 - d * d * l * v)
        + w4 * q22 * (k * w2 + dp * v - d * d * l)
        + 2.0 * d * v * w2 * q1
        + 2.0 * d * w4 * q12
    ) / (2.0 * d * d * w * w2)


def rel_curvatures(surface: RuledSurface, q: SupportField, u: float, v: float) -> tuple[float, float]:
    """``(K, H)`` from their closed forms."""
    return relative_curvature(surface, q, u, v), relative_mean_curvature(surface, q, u, v)


def scalar_curvature(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    c = _Ctx(surface, q, u, v)
    d, dp, k, l, v, w, w2 = c.d, c.dp, c.k, c.l, c.v, c.w, c.w2
    q, q1, q2, q12, q22 = c.q, c.q1, c.q2, c.q12, c.q22
    w4 = w2 * w2
    return (
        q * q * (-k * w4 + d * d * (l * v * v - 2.0 * dp * v - d * d * l))
        + w4 * q * q2 * (2.0 * k * v + dp)
        + w4 * (k * w2 + dp * v - d * d * l) * (q * q22 - q2 * q2)
        - 2.0 * d * w4 * q1 * q2
        + 2.0 * d * w4 * q * q12
    ) / (2.0 * d * d * w * w2 * q)


def _tcheb_components(c: _Ctx) -> tuple[float, float]:
    d, dp, k, l, v, w, w2, q = c.d, c.dp, c.k, c.l, c.v, c.w, c.w2, c.q
    T1 = (w2 * c.q2 + v * q) / (d * w)
    T2 = (2.0 * d * w2 * c.q1 + dp * q * (d * d - v * v)) / (2.0 * d * d * w) + T1 * (k * w2 + dp * v - d * d * l) / d
    return T1, T2


def tchebychev(surface: RuledSurface, q: SupportField, u: float, v: float) -> Tchebychev:
    c = _Ctx(surface, q, u, v)
    T1, T2 = _tcheb_components(c)
    d, dp, k, v, w, w2 = c.d, c.dp, c.k, c.v, c.w, c.w2
    te = w * (c.q * (2.0 * k * v + dp) + 2.0 * d * c.q1 + 2.0 * c.q2 * (k * w2 + dp * v)) / (2.0 * d * d)
    t = (v * c.q + w2 * c.q2) / (d * w)
    return Tchebychev(T1, T2, np.array([te, t * v, t * d]))


def divergence_T(surface: RuledSurface, q: SupportField, u: float, v: float, h: float = 1e-5) -> float:
    """``div^G T = (|G|^(1/2) T^i)_/i / |G|^(1/2)``.

    The partials of ``|G|^(1/2) T^i`` use fourth-order central differences
    with step ``h``.
    """

    def weighted(uu, vv):
        c = _Ctx(surface, q, uu, vv)
        root = abs(c.d) / (c.w * abs(c.q))
        T1, T2 = _tcheb_components(c)
        return root, root * T1, root * T2

    def diff(fun):
        return (8.0 * (fun(h) - fun(-h)) - (fun(2.0 * h) - fun(-2.0 * h))) / (12.0 * h)

    root = weighted(u, v)[0]
    d1 = diff(lambda t: weighted(u + t, v)[1])
    d2 = diff(lambda t: weighted(u, v + t)[2])
    return (d1 + d2) / root


def relative_invariants(surface: RuledSurface, q: SupportField, u: float, v: float) -> RelInvariants:
    K, H = rel_curvatures(surface, q, u, v)
    T = tchebychev(surface, q, u, v)
    return RelInvariants(
        J=pick_invariant(surface, q, u, v),
        K=K,
        H=H,
        S=scalar_curvature(surface, q, u, v),
        T1=T.T1,
        T2=T.T2,
        T_frame=T.frame,
        divT=divergence_T(surface, q, u, v),
        B=shape_operator(surface, q, u, v),
    )


def divergence_identity_rhs(surface: RuledSurface, q: SupportField, u: float, v: float) -> float:
    """Right-hand side ``2 kappa w q / delta^2`` of the divergence identity."""
    c = _Ctx(surface, q, u, v)
    return 2.0 * c.k * c.w * c.q / (c.d * c.d)


def tangent_frame_coeffs(surface: RuledSurface, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
    """``x_/1`` and ``x_/2`` as coefficients on (e, n, z)."""
    d = float(surface.delta(u).c0)
    lam = float(surface.lam(u).c0)
    return np.array([d * lam, v, d]), np.array([1.0, 0.0, 0.0])


__all__ = [
    "BiJet",
    "CustomSupport",
    "DarbouxComponents",
    "InconsistentSupport",
    "QPartials",
    "RelInvariants",
    "RelMetric",
    "RelativeNormal",
    "SupportField",
    "Tchebychev",
    "ZeroSupport",
    "darboux_components",
    "divergence_T",
    "divergence_identity_rhs",
    "pick_from_darboux",
    "pick_invariant",
    "rel_curvatures",
    "relative_curvature",
    "relative_invariants",
    "relative_mean_curvature",
    "relative_metric",
    "relative_normal",
    "relative_normal_vector",
    "scalar_curvature",
    "shape_operator",
    "tangent_frame_coeffs",
    "tangent_vectors",
]
