"""Identity suites shared by the test-suite and the ``check`` command.

Each check returns the worst residual over a list of sample points.  Pointwise
residuals of identities are relative: they are divided by
``max(1, |terms|)`` so that large invariants near the striction curve do not
dominate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .central import central_invariants
from .geom_core import RuledSurface, euclidean_curvatures, tangent_vectors
from .relnorm import (
    SupportField,
    divergence_T,
    divergence_identity_rhs,
    pick_from_darboux,
    pick_invariant,
    rel_curvatures,
    relative_curvature,
    relative_mean_curvature,
    relative_normal,
    relative_normal_vector,
    scalar_curvature,
    shape_operator,
    tchebychev,
)

DEFAULT_TOLERANCES = {
    "pick_identity": 1e-8,
    "divergence_identity": 1e-7,
    "pick_dual_path": 1e-9,
    "shape_det_trace": 1e-9,
    "shape_operator_fd": 1e-5,
    "frame_normal": 1e-9,
    "euclidean_limit": 1e-8,
    "central_closed_forms": 1e-9,
    "umbilic": 1e-10,
    "tchebychev_T1": 1e-10,
    "proper_sphere": 1e-6,
    "improper_sphere": 1e-6,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tol)

    def line(self) -> str:
        return f"{self.name} {self.max_residual:.3e} {'PASS' if self.passed else 'FAIL'}"


def _rel(a: float, b: float, *scale: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b), *(abs(s) for s in scale))


def pick_identity_residual(surface, q, u, v) -> float:
    """``3H - J - 3S``, relative."""
    _, H = rel_curvatures(surface, q, u, v)
    J = pick_invariant(surface, q, u, v)
    S = scalar_curvature(surface, q, u, v)
    return abs(3 * H - J - 3 * S) / max(1.0, abs(3 * H), abs(J), abs(3 * S))


def divergence_identity_residual(surface, q, u, v) -> float:
    """``div T - 2S - 2 kappa w q / delta^2``, relative."""
    div = divergence_T(surface, q, u, v)
    S = scalar_curvature(surface, q, u, v)
    rhs = divergence_identity_rhs(surface, q, u, v)
    return abs(div - 2 * S - rhs) / max(1.0, abs(div), abs(2 * S), abs(rhs))


def pick_dual_path_residual(surface, q, u, v) -> float:
    return _rel(pick_from_darboux(surface, q, u, v), pick_invariant(surface, q, u, v))


def shape_det_trace_residual(surface, q, u, v) -> float:
    B = shape_operator(surface, q, u, v)
    K = relative_curvature(surface, q, u, v)
    H = relative_mean_curvature(surface, q, u, v)
    return max(_rel(float(np.linalg.det(B)), K), _rel(0.5 * float(np.trace(B)), H))


def shape_operator_fd_residual(surface, q, u, v, h: float = 1e-5) -> float:
    """Central differences of the world-space relative normal against ``-B_i^j x_/j``."""
    B = shape_operator(surface, q, u, v)
    x1, x2 = tangent_vectors(surface, u, v)
    yu = (relative_normal_vector(surface, q, u + h, v) - relative_normal_vector(surface, q, u - h, v)) / (2 * h)
    yv = (relative_normal_vector(surface, q, u, v + h) - relative_normal_vector(surface, q, u, v - h)) / (2 * h)
    r1 = yu + B[0, 0] * x1 + B[0, 1] * x2
    r2 = yv + B[1, 0] * x1 + B[1, 1] * x2
    scale = max(1.0, float(np.linalg.norm(yu)), float(np.linalg.norm(yv)))
    return float(max(np.linalg.norm(r1), np.linalg.norm(r2)) / scale)


def frame_normal_residual(surface, q, u, v) -> float | None:
    expected = q.frame_normal(u, v)
    if expected is None:
        return None
    y = relative_normal(surface, q, u, v).coeffs()
    return float(np.max(np.abs(y - expected)) / max(1.0, float(np.max(np.abs(y)))))


def euclidean_limit_residual(surface, q, u, v) -> float:
    K, H = rel_curvatures(surface, q, u, v)
    Kt, HI = euclidean_curvatures(surface, u, v)
    return max(abs(K - Kt), abs(H - HI))


def central_closed_form_residual(surface, q, u, v) -> float:
    ci = central_invariants(surface, q.g, u, v)
    K, H = rel_curvatures(surface, q, u, v)
    return max(
        _rel(ci.H, H),
        _rel(ci.K, K),
        _rel(ci.S, scalar_curvature(surface, q, u, v)),
        _rel(ci.J, pick_invariant(surface, q, u, v)),
    )


def umbilic_residual(surface, q, u, v) -> float:
    K, H = rel_curvatures(surface, q, u, v)
    return abs(H * H - K) / max(1.0, H * H)


def tchebychev_T1_residual(surface, q, u, v) -> float:
    T1 = tchebychev(surface, q, u, v).T1
    return _rel(T1, float(q.g(u).c0) / float(surface.delta(u).c0))


POINTWISE = {
    "pick_identity": pick_identity_residual,
    "divergence_identity": divergence_identity_residual,
    "pick_dual_path": pick_dual_path_residual,
    "shape_det_trace": shape_det_trace_residual,
    "shape_operator_fd": shape_operator_fd_residual,
    "frame_normal": frame_normal_residual,
}

KIND_SPECIFIC = {
    "euclidean": {"euclidean_limit": euclidean_limit_residual},
    "central": {
        "central_closed_forms": central_closed_form_residual,
        "umbilic": umbilic_residual,
        "tchebychev_T1": tchebychev_T1_residual,
    },
}


def interior_points(surface: RuledSurface, v_domain: Sequence[float], nu: int, nv: int, margin: float = 1e-4):
    """u-major grid with the u-range shrunk by ``margin`` so finite differences stay inside."""
    a, b = surface.u_domain
    us = np.linspace(a + margin, b - margin, nu)
    vs = np.linspace(v_domain[0], v_domain[1], nv)
    return [(float(u), float(v)) for u in us for v in vs]


def identity_suite(
    surface: RuledSurface,
    q: SupportField,
    points: Iterable[tuple[float, float]],
    tolerances: dict | None = None,
) -> list[CheckResult]:
    """Run every identity applicable to ``q`` over ``points``."""
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(tolerances or {})
    checks = dict(POINTWISE)
    checks.update(KIND_SPECIFIC.get(q.kind, {}))
    worst: dict[str, float] = {}
    points = list(points)
    for name, fn in checks.items():
        values = [fn(surface, q, u, v) for u, v in points if not (name in _SKIP_V0 and v == 0.0)]
        values = [r for r in values if r is not None]
        if values:
            worst[name] = float(max(values))
    return [CheckResult(name, r, tols[name]) for name, r in worst.items()]


_SKIP_V0 = {"central_closed_forms", "umbilic", "tchebychev_T1"}
