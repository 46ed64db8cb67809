"""Fixed-step RK4 integration on a knot grid, quadrature, finite differences.

Every solution is stored on knots ``u0 + k*h``.  Evaluating off-knot takes a
single RK4 step from the nearest knot, so results are deterministic and never
interpolated.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .expr import Jet3, SmoothFn1

DEFAULT_STEP = 1e-3


class IntegrationDomainError(ValueError):
    """Evaluation requested outside the integrated interval."""


class KnotSolution:
    """RK4 solution of ``y' = rhs(y, c)`` where ``c = coef(u)``.

    Parameters
    ----------
    rhs : callable
        ``rhs(y, c)`` with ``y`` of shape ``(..., *state_shape)`` and ``c`` a
        tuple of arrays broadcasting against the leading axes of ``y``.
    coef : callable
        Vectorized ``coef(u_array) -> tuple of arrays``.
    u0, y0 : anchor point and initial state.
    domain : (a, b) interval to cover; ``u0`` must lie inside.
    project : optional callable applied to the state after every step.
    """

    def __init__(
        self,
        rhs: Callable,
        coef: Callable,
        u0: float,
        y0,
        domain: Sequence[float],
        step: float = DEFAULT_STEP,
        project: Callable | None = None,
    ):
        a, b = float(domain[0]), float(domain[1])
        if not a <= u0 <= b:
            raise ValueError(f"anchor {u0} outside domain [{a}, {b}]")
        self.rhs = rhs
        self.coef = coef
        self.h = float(step)
        self.project = project
        self.domain = (a, b)
        n_fwd = int(np.ceil((b - u0) / self.h - 1e-9))
        n_bwd = int(np.ceil((u0 - a) / self.h - 1e-9))
        self.u0 = float(u0)
        self.k_min = -n_bwd
        ks = np.arange(-n_bwd, n_fwd + 1)
        self.knots = self.u0 + ks * self.h
        y0 = np.asarray(y0, dtype=float)
        states = np.empty((len(ks),) + y0.shape)
        i0 = n_bwd
        states[i0] = y0
        self._march(states, i0, n_fwd, +1)
        self._march(states, i0, n_bwd, -1)
        self.states = states

    def _march(self, states, i0: int, nsteps: int, direction: int):
        if nsteps == 0:
            return
        h = direction * self.h
        us = self.u0 + direction * self.h * np.arange(nsteps + 1)
        mids = us[:-1] + 0.5 * h
        c_knots = self.coef(us)
        c_mids = self.coef(mids)
        y = states[i0]
        for j in range(nsteps):
            ca = tuple(c[j] for c in c_knots)
            cm = tuple(c[j] for c in c_mids)
            cb = tuple(c[j + 1] for c in c_knots)
            y = rk4_step(self.rhs, y, h, ca, cm, cb)
            if self.project is not None:
                y = self.project(y)
            states[i0 + direction * (j + 1)] = y

    def __call__(self, u):
        """State at ``u`` (scalar or array); leading axes follow ``u``."""
        u = np.asarray(u, dtype=float)
        a, b = self.domain
        slack = 0.5 * self.h + 1e-12
        if np.any(u < a - slack) or np.any(u > b + slack):
            raise IntegrationDomainError(f"u outside integrated domain [{a}, {b}]")
        k = np.clip(np.rint((u - self.u0) / self.h).astype(int), self.k_min, self.k_min + len(self.knots) - 1)
        idx = k - self.k_min
        uk = self.knots[idx]
        yk = self.states[idx]
        dh = u - uk
        if np.all(dh == 0.0):
            return yk.copy()
        ca = self.coef(uk)
        cm = self.coef(uk + 0.5 * dh)
        cb = self.coef(u)
        expand = (Ellipsis,) + (None,) * (yk.ndim - u.ndim)
        y = rk4_step(self.rhs, yk, dh[expand], ca, cm, cb)
        if self.project is not None:
            y = self.project(y)
        exact = dh == 0.0
        if np.any(exact):
            y = np.where(exact[expand], yk, y)
        return y


def rk4_step(rhs, y, h, ca, cm, cb):
    k1 = rhs(y, ca)
    k2 = rhs(y + 0.5 * h * k1, cm)
    k3 = rhs(y + 0.5 * h * k2, cm)
    k4 = rhs(y + h * k3, cb)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class Antiderivative(SmoothFn1):
    """``F(u) = ∫_{u0}^{u} φ`` by RK4 (Simpson) quadrature; jets come from φ."""

    def __init__(self, integrand: SmoothFn1, u0: float, domain, step: float = DEFAULT_STEP):
        self.integrand = integrand
        self.solution = KnotSolution(
            lambda y, c: c[0][..., None] * np.ones_like(y),
            lambda u: (np.asarray(integrand(np.asarray(u)).c0, dtype=float) * np.ones(np.shape(u)),),
            u0,
            [0.0],
            domain,
            step,
        )
        super().__init__(self._jet, f"∫({integrand.label})")

    def _jet(self, u) -> Jet3:
        value = self.solution(u)[..., 0]
        phi = self.integrand(u)
        if np.ndim(u) == 0:
            value = float(value)
        return Jet3(value, phi.c0, phi.c1, phi.c2)


def antiderivative(f: SmoothFn1, surface_or_u0, domain=None, step: float = DEFAULT_STEP) -> Antiderivative:
    """Antiderivative anchored at ``u0`` (or at ``surface.u0``) with value 0."""
    if domain is None:
        surface = surface_or_u0
        return Antiderivative(f, surface.u0, surface.u_domain, step)
    return Antiderivative(f, float(surface_or_u0), domain, step)


# --------------------------------------------------------------------------
# Finite differences


def fd_weights(m: int, offsets: Sequence[float]) -> np.ndarray:
    """Weights of the m-th derivative on a stencil of integer offsets (Fornberg)."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


_STENCIL9 = np.arange(-4, 5)
_W9 = {m: fd_weights(m, _STENCIL9) for m in (1, 2, 3)}


def derivatives_fd(fun: Callable, u: float, h: float = 0.02) -> tuple[float, float, float, float]:
    """Value and first three derivatives of scalar ``fun`` by 9-point central stencils."""
    pts = u + h * _STENCIL9
    vals = np.array([fun(p) for p in pts], dtype=float)
    return (
        float(vals[4]),
        float(_W9[1] @ vals) / h,
        float(_W9[2] @ vals) / h**2,
        float(_W9[3] @ vals) / h**3,
    )


def central_diff(fun: Callable, x: float, h: float):
    """Second-order central difference of a scalar- or array-valued function."""
    return (np.asarray(fun(x + h)) - np.asarray(fun(x - h))) / (2.0 * h)
