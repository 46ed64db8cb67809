"""Skew ruled surfaces from their fundamental invariants (delta, kappa, lambda).

The surface is ``x(u, v) = s(u) + v e(u)`` in standard parameters.  The moving
frame ``{e, n, z}`` and the striction curve ``s`` are integrated from

    e' = n,   n' = -e + kappa z,   z' = -kappa n,   s' = delta lambda e + delta z

with RK4 (step 1e-3) and Gram-Schmidt after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import Jet3, SmoothFn1
from .ode import DEFAULT_STEP, KnotSolution


class NotSkewError(ValueError):
    """The distribution parameter vanishes (or changes sign) on the domain."""


@dataclass(frozen=True)
class FrameState:
    u: float
    e: np.ndarray
    n: np.ndarray
    z: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class FundamentalForms:
    g11: float
    g12: float
    g22: float
    h11: float
    h12: float
    h22: float
    w: float


@dataclass(frozen=True)
class SurfaceJets:
    """Jets of delta, kappa, lambda at one u."""

    delta: Jet3
    kappa: Jet3
    lam: Jet3


def _frame_rhs(y, c):
    kappa, dl, d = c
    e, n, z = y[..., 0, :], y[..., 1, :], y[..., 2, :]
    k = np.asarray(kappa)[..., None]
    out = np.empty_like(y)
    out[..., 0, :] = n
    out[..., 1, :] = -e + k * z
    out[..., 2, :] = -k * n
    out[..., 3, :] = np.asarray(dl)[..., None] * e + np.asarray(d)[..., None] * z
    return out


def _gram_schmidt(y):
    e = y[..., 0, :]
    n = y[..., 1, :]
    z = y[..., 2, :]
    e = e / np.linalg.norm(e, axis=-1, keepdims=True)
    n = n - np.sum(n * e, axis=-1, keepdims=True) * e
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    z = z - np.sum(z * e, axis=-1, keepdims=True) * e - np.sum(z * n, axis=-1, keepdims=True) * n
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    out = y.copy()
    out[..., 0, :] = e
    out[..., 1, :] = n
    out[..., 2, :] = z
    return out


class RuledSurface:
    """A skew ruled surface given by delta, kappa, lambda = cot(sigma).

    ``frame0`` rows are (e, n, z) at ``u0``; defaults pin the representative
    of the congruence class: ``u0`` = left end of ``u_domain``, standard
    basis, striction point at the origin.
    """

    def __init__(
        self,
        delta,
        kappa,
        lam,
        u_domain: Sequence[float],
        u0: float | None = None,
        frame0=None,
        s0=None,
        step: float = DEFAULT_STEP,
    ):
        self.delta = SmoothFn1.coerce(delta)
        self.kappa = SmoothFn1.coerce(kappa)
        self.lam = SmoothFn1.coerce(lam)
        a, b = float(u_domain[0]), float(u_domain[1])
        if not a < b:
            raise ValueError("u_domain must be a nonempty interval")
        self.u_domain = (a, b)
        self.u0 = a if u0 is None else float(u0)
        frame0 = np.eye(3) if frame0 is None else np.asarray(frame0, dtype=float)
        s0 = np.zeros(3) if s0 is None else np.asarray(s0, dtype=float)
        _check_frame(frame0)
        self.step = step
        y0 = np.vstack([frame0, s0])
        self._solution = KnotSolution(_frame_rhs, self._coef, self.u0, y0, self.u_domain, step, _gram_schmidt)
        d = np.asarray(self.delta(self._solution.knots).c0) * np.ones(len(self._solution.knots))
        if np.any(np.abs(d) < 1e-12) or (np.any(d > 0) and np.any(d < 0)):
            raise NotSkewError("delta must not vanish on the domain (skew ruled surface)")
        self._frames: dict[float, FrameState] = {}

    def _coef(self, u):
        u = np.asarray(u, dtype=float)
        ones = np.ones(u.shape)
        d = self.delta(u).c0 * ones
        k = self.kappa(u).c0 * ones
        lam = self.lam(u).c0 * ones
        return (k, d * lam, d)

    def jets(self, u) -> SurfaceJets:
        return SurfaceJets(self.delta(u), self.kappa(u), self.lam(u))

    @property
    def knots(self) -> np.ndarray:
        return self._solution.knots

    def frame_at(self, u: float) -> FrameState:
        u = float(u)
        fs = self._frames.get(u)
        if fs is None:
            y = self._solution(u)
            fs = FrameState(u, y[0], y[1], y[2], y[3])
            if len(self._frames) < 100_000:
                self._frames[u] = fs
        return fs

    def frames(self, us) -> np.ndarray:
        """Batched frame states, shape ``(len(us), 4, 3)`` with rows e, n, z, s."""
        return self._solution(np.asarray(us, dtype=float))

    def is_conoidal(self, tol: float = 1e-12) -> bool:
        k = np.asarray(self.kappa(self.knots).c0) * np.ones(len(self.knots))
        return bool(np.all(np.abs(k) <= tol))

    def __repr__(self) -> str:
        return (
            f"RuledSurface(delta={self.delta.label}, kappa={self.kappa.label}, "
            f"lambda={self.lam.label}, u_domain={self.u_domain})"
        )


def _check_frame(frame0):
    if frame0.shape != (3, 3):
        raise ValueError("frame0 must be three 3-vectors (e, n, z)")
    if not np.allclose(frame0 @ frame0.T, np.eye(3), atol=1e-9):
        raise ValueError("frame0 must be orthonormal")
    if abs(np.linalg.det(frame0) - 1.0) > 1e-9:
        raise ValueError("frame0 must be right-handed")


def frame_at(surface: RuledSurface, u: float) -> FrameState:
    return surface.frame_at(u)


def position(surface: RuledSurface, u: float, v: float) -> np.ndarray:
    fs = surface.frame_at(u)
    return fs.s + v * fs.e


def frame_to_world(surface: RuledSurface, u: float, coeffs) -> np.ndarray:
    """Vector with coefficients (a, b, c) on (e, n, z) at ``u``."""
    fs = surface.frame_at(u)
    a, b, c = coeffs
    return a * fs.e + b * fs.n + c * fs.z


def fundamental_forms(surface: RuledSurface, u: float, v: float) -> FundamentalForms:
    j = surface.jets(u)
    d, dp = float(j.delta.c0), float(j.delta.c1)
    k, lam = float(j.kappa.c0), float(j.lam.c0)
    w2 = d * d + v * v
    w = np.sqrt(w2)
    return FundamentalForms(
        g11=w2 + d * d * lam * lam,
        g12=d * lam,
        g22=1.0,
        h11=-(k * w2 + dp * v - d * d * lam) / w,
        h12=d / w,
        h22=0.0,
        w=float(w),
    )


def unit_normal(surface: RuledSurface, u: float, v: float) -> np.ndarray:
    fs = surface.frame_at(u)
    d = float(surface.delta(u).c0)
    w = np.hypot(d, v)
    return (d * fs.n - v * fs.z) / w


def euclidean_curvatures(surface: RuledSurface, u: float, v: float) -> tuple[float, float]:
    """Gaussian curvature and mean curvature ``(K~, H_I)``."""
    j = surface.jets(u)
    d, dp = float(j.delta.c0), float(j.delta.c1)
    k, lam = float(j.kappa.c0), float(j.lam.c0)
    w2 = d * d + v * v
    w = np.sqrt(w2)
    return -d * d / (w2 * w2), -(k * w2 + dp * v + d * d * lam) / (2.0 * w2 * w)


def tangent_vectors(surface: RuledSurface, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
    """``x_/1 = delta lambda e + v n + delta z`` and ``x_/2 = e``."""
    fs = surface.frame_at(u)
    d = float(surface.delta(u).c0)
    lam = float(surface.lam(u).c0)
    return d * lam * fs.e + v * fs.n + d * fs.z, fs.e.copy()
