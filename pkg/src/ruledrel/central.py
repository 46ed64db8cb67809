"""Central normalizations ``q = g v / w`` and the geometry they induce.

Closed forms for the relative invariants, the focal curve, the ruled surface
spanned by the Darboux directions, Tchebychev-field predicates, the central
image and the inverse problem of finding a surface whose central image is a
given one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Jet3, SmoothFn1
from .geom_core import NotSkewError, RuledSurface, euclidean_curvatures
from .normalizations import CentralSupport, VanishingIngredient, make_central
from .ode import antiderivative
from .relnorm import (
    divergence_T,
    rel_curvatures,
    relative_normal_vector,
    tchebychev,
)
from .spheres import is_improper_sphere, is_proper_sphere


class ZeroV(ValueError):
    """S and J of a central normalization have a pole on the striction curve."""


class RelativeMinimal(ValueError):
    """g' = 0: no focal curve and no central image surface."""


class StationaryKappa(ValueError):
    """kappa' = 0: the striction formula of the Darboux ruled surface is singular."""


@dataclass(frozen=True)
class CentralInvariants:
    H: float
    K: float
    S: float
    J: float
    umbilic_defect: float


def _scalars(surface: RuledSurface, g: SmoothFn1, u: float):
    dj, kj, lj, gj = surface.delta(u), surface.kappa(u), surface.lam(u), g(u)
    return (
        float(dj.c0),
        float(dj.c1),
        float(kj.c0),
        float(kj.c1),
        float(lj.c0),
        float(gj.c0),
        float(gj.c1),
    )


def central_invariants(surface: RuledSurface, g, u: float, v: float) -> CentralInvariants:
    g = SmoothFn1.coerce(g)
    if v == 0.0:
        raise ZeroV("S and J are singular at v = 0")
    d, _, k, _, lam, gv, gp = _scalars(surface, g, u)
    if gv == 0.0:
        raise VanishingIngredient("g vanishes")
    H = gp / d
    K = gp * gp / (d * d)
    S = -gv * (k * v * v + d * d * (k - lam)) / (2.0 * d * d * v)
    J = 3.0 * (k * gv * v * v + 2.0 * d * gp * v + d * d * gv * (k - lam)) / (2.0 * d * d * v)
    return CentralInvariants(H, K, S, J, H * H - K)


def darboux_vector(surface: RuledSurface, u: float) -> np.ndarray:
    """``d = kappa e + z``: the angular velocity of the moving frame."""
    fs = surface.frame_at(u)
    return float(surface.kappa(u).c0) * fs.e + fs.z


def focal_curve(surface: RuledSurface, g, u: float) -> np.ndarray:
    """Point ``s - (delta g / g') d`` where all relative normals of the generator meet."""
    g = SmoothFn1.coerce(g)
    gj = g(u)
    if abs(float(gj.c1)) < 1e-12:
        raise RelativeMinimal("g' = 0: the focal surface does not exist")
    d = float(surface.delta(u).c0)
    return surface.frame_at(u).s - (d * float(gj.c0) / float(gj.c1)) * darboux_vector(surface, u)


def focal_v_residual(surface: RuledSurface, g, u: float, vs) -> float:
    """Max over ``vs`` of ``|s + v e + y / H - focal point|`` using the general pipeline."""
    q = CentralSupport(surface, g)
    target = focal_curve(surface, q.g, u)
    fs = surface.frame_at(u)
    worst = 0.0
    for v in vs:
        _, H = rel_curvatures(surface, q, u, v)
        x = fs.s + v * fs.e + relative_normal_vector(surface, q, u, v) / H
        worst = max(worst, float(np.linalg.norm(x - target)))
    return worst


@dataclass
class DarbouxRuledSurface:
    """``x*(u, v*) = s + v* d`` with generators along the Darboux vectors."""

    surface: RuledSurface

    def point(self, u: float, vstar: float) -> np.ndarray:
        return self.surface.frame_at(u).s + vstar * darboux_vector(self.surface, u)

    def _striction_param(self, u: float) -> float:
        d, _, k, kp, lam, _, _ = _scalars(self.surface, SmoothFn1.constant(1.0), u)
        return d * (k - lam) / kp

    def striction(self, u: float) -> np.ndarray:
        """Striction curve ``s + (delta (kappa - lambda) / kappa') d``; on this
        developable surface it is the edge of regression."""
        return self.point(u, self._striction_param(u))

    def striction_unnormalized(self, u: float) -> np.ndarray:
        """``s - (delta lambda / kappa') d``: the foot point obtained when the
        non-unit direction d is used in place of a unit one."""
        d, _, _, kp, lam, _, _ = _scalars(self.surface, SmoothFn1.constant(1.0), u)
        return self.surface.frame_at(u).s - (d * lam / kp) * darboux_vector(self.surface, u)

    def gaussian_curvature(self, u: float, vstar: float, h: float = 1e-4) -> float:
        """Gaussian curvature from central differences of the parametrization."""

        def x(uu, vv):
            return self.point(uu, vv)

        xu = (x(u + h, vstar) - x(u - h, vstar)) / (2 * h)
        xv = (x(u, vstar + h) - x(u, vstar - h)) / (2 * h)
        xuu = (x(u + h, vstar) - 2 * x(u, vstar) + x(u - h, vstar)) / (h * h)
        xuv = (x(u + h, vstar + h) - x(u + h, vstar - h) - x(u - h, vstar + h) + x(u - h, vstar - h)) / (4 * h * h)
        xvv = (x(u, vstar + h) - 2 * x(u, vstar) + x(u, vstar - h)) / (h * h)
        N = np.cross(xu, xv)
        area = float(np.linalg.norm(N))
        N = N / area
        L, M, Nn = float(xuu @ N), float(xuv @ N), float(xvv @ N)
        return (L * Nn - M * M) / (area * area)

    def striction_residual(self, u: float, h: float = 1e-4) -> tuple[float, float]:
        """``(<s*', e*'>, |s*' x e*|)`` with ``e* = d / |d|``; both vanish on the edge of regression."""

        def unit(t):
            d = darboux_vector(self.surface, t)
            return d / np.linalg.norm(d)

        ds = (self.striction(u + h) - self.striction(u - h)) / (2 * h)
        de = (unit(u + h) - unit(u - h)) / (2 * h)
        return float(ds @ de), float(np.linalg.norm(np.cross(ds, unit(u))))


def darboux_ruled_surface(surface: RuledSurface) -> DarbouxRuledSurface:
    kp = np.asarray(surface.kappa(surface.knots).c1) * np.ones(len(surface.knots))
    if np.any(np.abs(kp) < 1e-12):
        raise StationaryKappa("kappa' vanishes; the striction curve of the Darboux ruled surface is undefined")
    return DarbouxRuledSurface(surface)


# --------------------------------------------------------------------------
# Tchebychev field predicates


@dataclass(frozen=True)
class Predicate:
    """A field condition (``residual``) next to the surface structure it characterizes."""

    name: str
    residual: float
    holds: bool
    structure_residual: float
    structure: bool

    @property
    def consistent(self) -> bool:
        return self.holds == self.structure


@dataclass
class TchebychevReport:
    predicates: list[Predicate]
    striction_inner: float  # max |<T(u, 0), s'>|

    def __getitem__(self, name: str) -> Predicate:
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)


def _parallel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.cross(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _orthogonal(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _constancy(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.max(values) - np.min(values))


def tchebychev_predicates(
    surface: RuledSurface, g, v_domain=(0.1, 2.0), n: int = 21, tol: float = 1e-7
) -> TchebychevReport:
    """Evaluate the Tchebychev-field characterizations on a half-strip grid.

    Each predicate is paired with the surface structure it is equivalent
    to, so ``consistent`` exposes either direction of the equivalence.
    Curve tangents use the slope ``v'`` of each family: asymptotic lines,
    u-curves, curves of constant Gaussian curvature and both families of
    Euclidean lines of curvature.
    """
    q = make_central(surface, g)
    g = q.g
    us = np.linspace(*surface.u_domain, n)
    vs = np.linspace(v_domain[0], v_domain[1], n)
    res = dict.fromkeys(
        ["div", "orth_e", "asym", "u_tan", "u_orth", "K_tan", "K_orth", "loc_a", "loc_b"], 0.0
    )
    for u in us:
        d, dp, k, kp, lam, gv, gp = _scalars(surface, g, u)
        for v in vs:
            T = tchebychev(surface, q, u, v).frame
            w2 = d * d + v * v

            def tangent(vp):
                return np.array([d * lam + vp, v, d])

            res["div"] = max(res["div"], abs(divergence_T(surface, q, u, v)))
            res["orth_e"] = max(res["orth_e"], abs(T[0]) / np.linalg.norm(T))
            vp_asym = (k * v * v + dp * v + d * d * (k - lam)) / (2 * d)
            res["asym"] = max(res["asym"], _parallel(tangent(vp_asym), T))
            res["u_tan"] = max(res["u_tan"], _parallel(tangent(0.0), T))
            res["u_orth"] = max(res["u_orth"], _orthogonal(tangent(0.0), T))
            vp_K = -dp * (d * d - v * v) / (2 * d * v)
            res["K_tan"] = max(res["K_tan"], _parallel(tangent(vp_K), T))
            res["K_orth"] = max(res["K_orth"], _orthogonal(tangent(vp_K), T))
            # d v'^2 - (kappa w^2 + delta' v - delta^2 lambda) v' - delta [w^2 (kappa lambda + 1) + delta' lambda v] = 0
            b = k * w2 + dp * v - d * d * lam
            cc = d * (w2 * (k * lam + 1) + dp * lam * v)
            disc = np.sqrt(max(b * b + 4 * d * cc, 0.0))
            res["loc_a"] = max(res["loc_a"], _parallel(tangent((b + disc) / (2 * d)), T))
            res["loc_b"] = max(res["loc_b"], _parallel(tangent((b - disc) / (2 * d)), T))

    ks = np.array([_scalars(surface, g, u) for u in us])
    d, dp, k, kp, lam, gv, gp = ks.T
    conoidal = float(np.max(np.abs(k)))
    right_conoid = max(conoidal, float(np.max(np.abs(lam))))
    g_sqrt_delta = _constancy(gv * np.sqrt(np.abs(d)))
    g_const = float(np.max(np.abs(gp)))
    d_const = _constancy(d)
    edlinger = max(float(np.max(np.abs(k * lam + 1))), d_const)

    def pred(name, r, s):
        return Predicate(name, float(r), bool(r < tol), float(s), bool(s < tol))

    striction_inner = 0.0
    for u in us:
        T0 = _T_at_striction(surface, q, u)
        dd, _, kk, _, ll, _, _ = _scalars(surface, g, u)
        striction_inner = max(striction_inner, abs(T0 @ np.array([dd * ll, 0.0, dd])))

    return TchebychevReport(
        predicates=[
            pred("incompressible", res["div"], right_conoid),
            pred("orthogonal_to_generators", res["orth_e"], max(conoidal, g_sqrt_delta)),
            pred("tangent_to_asymptotic_lines", res["asym"], max(right_conoid, g_const)),
            pred("tangent_to_u_curves", res["u_tan"], max(right_conoid, g_sqrt_delta)),
            pred(
                "orthogonal_to_u_curves",
                res["u_orth"],
                max(float(np.max(np.abs(k * lam + 1))), g_sqrt_delta),
            ),
            pred("tangent_to_K_curves", res["K_tan"], max(right_conoid, d_const, g_const)),
            pred("orthogonal_to_K_curves", res["K_orth"], max(edlinger, g_const)),
            pred("tangent_to_lines_of_curvature", min(res["loc_a"], res["loc_b"]), max(edlinger, g_const)),
        ],
        striction_inner=striction_inner,
    )


def _T_at_striction(surface: RuledSurface, q: CentralSupport, u: float, eps: float = 1e-6) -> np.ndarray:
    """Tchebychev vector on the striction curve, where q itself vanishes: symmetric limit in v."""
    return 0.5 * (tchebychev(surface, q, u, eps).frame + tchebychev(surface, q, u, -eps).frame)


# --------------------------------------------------------------------------
# Sphere characterizations


@dataclass
class CentralSphereReport:
    improper_residual: float
    improper: bool
    proper_c: float | None
    proper_c1: float | None
    proper_residual: float
    proper: bool
    improper_detected: bool
    proper_detected: bool

    @property
    def consistent(self) -> bool:
        return self.improper == self.improper_detected and self.proper == self.proper_detected


def central_sphere_tests(
    surface: RuledSurface, g, v_domain=(0.1, 2.0), n: int = 21, tol: float = 1e-7
) -> CentralSphereReport:
    """Check the closed-form sphere conditions and compare with the generic detectors.

    Improper: g and kappa constant.  Proper: ``g = (c1 - ∫delta)/c`` with
    ``delta (kappa - lambda) + kappa' (∫delta - c1) = 0``.
    """
    q = make_central(surface, g)
    g = q.g
    us = np.linspace(*surface.u_domain, 4 * n + 1)
    D = antiderivative(surface.delta, surface)
    rows = np.array([_scalars(surface, g, u) for u in us])
    d, dp, k, kp, lam, gv, gp = rows.T
    improper_res = max(float(np.max(np.abs(gp))), float(np.max(np.abs(kp))))

    c = c1 = None
    proper_res = np.inf
    if np.all(np.abs(gp) > 1e-12):
        cs = -d / gp
        c = float(np.mean(cs))
        Dv = np.array([float(D(u).c0) for u in us])
        c1s = c * gv + Dv
        c1 = float(np.mean(c1s))
        cond = d * (k - lam) + kp * (Dv - c1)
        proper_res = max(_constancy(cs), _constancy(c1s), float(np.max(np.abs(cond))))

    return CentralSphereReport(
        improper_residual=improper_res,
        improper=improper_res < tol,
        proper_c=c,
        proper_c1=c1,
        proper_residual=float(proper_res),
        proper=proper_res < tol,
        improper_detected=is_improper_sphere(surface, q, v_domain, n) is not None,
        proper_detected=is_proper_sphere(surface, q, v_domain, n) is not None,
    )


# --------------------------------------------------------------------------
# Central image


@dataclass
class MeasuredInvariants:
    delta: float
    kappa: float
    lam: float
    striction_defect: float  # <s1', e'> which vanishes on a striction curve


@dataclass
class CentralImage:
    """The central image ``y = s1 + v1 e`` with ``s1 = -g d`` and ``v1 = -g' v / delta``."""

    surface: RuledSurface
    g: SmoothFn1
    surface1: RuledSurface

    def striction1(self, u: float) -> np.ndarray:
        return -float(self.g(u).c0) * darboux_vector(self.surface, u)

    def v1_map(self, u: float, v: float) -> float:
        return -float(self.g(u).c1) * v / float(self.surface.delta(u).c0)

    def point(self, u: float, v: float) -> np.ndarray:
        return self.striction1(u) + self.v1_map(u, v) * self.surface.frame_at(u).e

    def w1(self, u: float, v: float) -> float:
        return float(np.hypot(float(self.surface1.delta(u).c0), self.v1_map(u, v)))

    def gaussian_curvature1(self, u: float, v: float) -> float:
        return euclidean_curvatures(self.surface1, u, self.v1_map(u, v))[0]

    def measure(self, u: float, h: float = 1e-3) -> MeasuredInvariants:
        """Invariants of the explicit parametrization by central differences.

        ``delta1 = <s1', z>``, ``lambda1 = <s1', e> / delta1`` and
        ``kappa1 = (e, e', e'')``, all from world-space samples along Φ's frame.
        """
        fs = self.surface.frame_at(u)
        offs = np.arange(-2, 3) * h
        s1 = np.array([self.striction1(u + t) for t in offs])
        es = np.array([self.surface.frame_at(u + t).e for t in offs])
        ds1 = (8 * (s1[3] - s1[1]) - (s1[4] - s1[0])) / (12 * h)
        de = (8 * (es[3] - es[1]) - (es[4] - es[0])) / (12 * h)
        dde = (-(es[4] + es[0]) + 16 * (es[3] + es[1]) - 30 * es[2]) / (12 * h * h)
        delta1 = float(ds1 @ np.cross(fs.e, de))
        return MeasuredInvariants(
            delta=delta1,
            kappa=float(np.linalg.det(np.array([fs.e, de, dde]))),
            lam=float(ds1 @ fs.e) / delta1,
            striction_defect=float(ds1 @ de),
        )


def central_image(surface: RuledSurface, g) -> CentralImage:
    """Build the central image as a ruled surface with ``delta1 = -g'``,
    ``kappa1 = kappa``, ``lambda1 = (kappa g)' / g'``, sharing Φ's frame."""
    g = SmoothFn1.coerce(g)
    gp_knots = np.asarray(g(surface.knots).c1) * np.ones(len(surface.knots))
    if np.any(np.abs(gp_knots) < 1e-12):
        raise RelativeMinimal("g' vanishes: the central image is not a skew ruled surface")

    def delta1(u) -> Jet3:
        return -g(u).derivative()

    def lam1(u) -> Jet3:
        gj = g(u)
        return (surface.kappa(u) * gj).derivative() / gj.derivative()

    fs = surface.frame_at(surface.u0)
    s0 = -float(g(surface.u0).c0) * darboux_vector(surface, surface.u0)
    try:
        surface1 = RuledSurface(
            SmoothFn1(delta1, f"-({g.label})'"),
            surface.kappa,
            SmoothFn1(lam1, f"(kappa*({g.label}))'/({g.label})'"),
            surface.u_domain,
            u0=surface.u0,
            frame0=np.array([fs.e, fs.n, fs.z]),
            s0=s0,
            step=surface.step,
        )
    except NotSkewError as exc:
        raise RelativeMinimal(str(exc)) from exc
    return CentralImage(surface, g, surface1)


# --------------------------------------------------------------------------
# Inverse problem


@dataclass
class InverseSolution:
    """A constant ``c1`` with ``delta (kappa - lambda) = kappa' (c1 - ∫delta)``.

    ``construct`` builds a surface Ψ* with the same generator directions,
    normalized centrally by ``g* = c1 - ∫delta``; its central image is
    congruent to the given surface.
    """

    surface: RuledSurface
    c1: float
    residual: float
    g_star: SmoothFn1

    def construct(self, delta_star, lam_star, s0=None) -> tuple[RuledSurface, CentralSupport]:
        s = self.surface
        fs = s.frame_at(s.u0)
        psi = RuledSurface(
            delta_star,
            s.kappa,
            lam_star,
            s.u_domain,
            u0=s.u0,
            frame0=np.array([fs.e, fs.n, fs.z]),
            s0=s0,
            step=s.step,
        )
        return psi, make_central(psi, self.g_star)


def inverse_problem(surface: RuledSurface, tol: float = 1e-7) -> InverseSolution | None:
    D = antiderivative(surface.delta, surface)
    us = surface.knots[::10]
    Dv = np.asarray(D(us).c0, dtype=float)
    ones = np.ones(len(us))
    d = surface.delta(us).c0 * ones
    k = surface.kappa(us).c0 * ones
    kp = surface.kappa(us).c1 * ones
    lam = surface.lam(us).c0 * ones
    lhs = d * (k - lam)
    if np.all(np.abs(kp) < 1e-12):
        residual = float(np.max(np.abs(lhs)))
        if residual >= tol:
            return None
        # any c1 works; keep g* away from zero
        c1 = 1.0 + float(np.max(Dv))
    else:
        # least squares for kappa' c1 = delta (kappa - lambda) + kappa' ∫delta
        c1 = float(kp @ (lhs + kp * Dv) / (kp @ kp))
        residual = float(np.max(np.abs(lhs - kp * (c1 - Dv))))
        if residual >= tol:
            return None
    g_star = SmoothFn1(lambda u: c1 - D(u), f"{c1!r} - ∫delta")
    return InverseSolution(surface, c1, residual, g_star)

