"""Command-line front end: ``ruledrel eval|check|mesh|classify|sphere <scenario>``.

Exit codes: 0 success, 1 verification failure, 2 configuration or parse
error, 3 domain error (vanishing support, undefined target and the like).
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, TextIO

import numpy as np

from .central import (
    RelativeMinimal,
    StationaryKappa,
    ZeroV,
    central_image,
    focal_curve,
    tchebychev_predicates,
)
from .expr import ExprDomainError, ExprError
from .geom_core import NotSkewError, euclidean_curvatures, position
from .normalizations import (
    LABELS,
    MixedImageType,
    VanishingIngredient,
    classification_residuals,
)
from .ode import IntegrationDomainError
from .relnorm import (
    ZeroSupport,
    divergence_T,
    divergence_identity_rhs,
    pick_invariant,
    rel_curvatures,
    relative_normal_vector,
    scalar_curvature,
    tchebychev,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .spheres import ConoidalSurface, NotConoidal, VanishingSupport, is_improper_sphere, is_proper_sphere
from .verify import DEFAULT_TOLERANCES, CheckResult, identity_suite, interior_points

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

DOMAIN_ERRORS = (
    ExprDomainError,
    ZeroSupport,
    ZeroDivisionError,
    NotSkewError,
    VanishingIngredient,
    VanishingSupport,
    MixedImageType,
    NotConoidal,
    ConoidalSurface,
    RelativeMinimal,
    StationaryKappa,
    ZeroV,
    IntegrationDomainError,
)

CSV_HEADER = "u,v,Ktilde,HI,J,K,H,S,T1,T2,divT,res136,res240"
MESH_TARGETS = ("surface", "relative_image", "central_image", "focal_curve", "striction")


class DomainError(ValueError):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % x


def _grid(scn: Scenario, surface):
    us = np.linspace(*surface.u_domain, scn.grid.nu)
    vs = np.linspace(*scn.grid.v_domain, scn.grid.nv)
    return us, vs


def _at_node(fn: Callable, u: float, v: float | None = None):
    try:
        return fn()
    except DOMAIN_ERRORS as exc:
        node = f"u={u:.17g}" if v is None else f"u={u:.17g}, v={v:.17g}"
        raise DomainError(f"at node ({node}): {exc}") from exc


# --------------------------------------------------------------------------


def cmd_eval(scn: Scenario, out: TextIO, tol: float | None = None) -> int:
    surface = scn.surface()
    q, _ = scn.support(surface)
    us, vs = _grid(scn, surface)
    lines = [CSV_HEADER]
    for u in us:
        for v in vs:

            def row(u=float(u), v=float(v)):
                Kt, HI = euclidean_curvatures(surface, u, v)
                K, H = rel_curvatures(surface, q, u, v)
                J = pick_invariant(surface, q, u, v)
                S = scalar_curvature(surface, q, u, v)
                T = tchebychev(surface, q, u, v)
                div = divergence_T(surface, q, u, v)
                r136 = 3 * H - J - 3 * S
                r240 = div - 2 * S - divergence_identity_rhs(surface, q, u, v)
                return [u, v, Kt, HI, J, K, H, S, T.T1, T.T2, div, r136, r240]

            lines.append(",".join(_fmt(x) for x in _at_node(row, float(u), float(v))))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def run_checks(scn: Scenario, tol: float | None = None) -> list[CheckResult]:
    surface = scn.surface()
    q, build = scn.support(surface)
    tolerances = dict(scn.tolerances)
    if tol is not None:
        tolerances = dict.fromkeys(DEFAULT_TOLERANCES, tol)
    pts = interior_points(surface, scn.grid.v_domain, scn.grid.nu, scn.grid.nv)
    try:
        results = identity_suite(surface, q, pts, tolerances)
    except DOMAIN_ERRORS as exc:
        raise DomainError(str(exc)) from exc

    if build is not None and build.ode_residual is not None:
        a, b = surface.u_domain
        r = max(abs(build.ode_residual(u)) for u in np.linspace(a, b, scn.grid.nu))
        results.append(CheckResult("sphere_ode", float(r), tol if tol is not None else 1e-7))
    for o in scn.outputs:
        if o["type"] != "sphere":
            continue
        results.append(_sphere_expectation(scn, surface, q, o["expect"], tolerances))
    return results


def _sphere_expectation(scn, surface, q, expect: str, tolerances: dict) -> CheckResult:
    vd, n = scn.grid.v_domain, max(scn.grid.nu, scn.grid.nv, 5)
    if expect == "proper":
        tol = tolerances.get("proper_sphere", 1e-6)
        cert = is_proper_sphere(surface, q, vd, n, tol=np.inf)
        return CheckResult("proper_sphere", cert.residual if cert else np.inf, tol)
    if expect == "improper":
        tol = tolerances.get("improper_sphere", 1e-6)
        cert = is_improper_sphere(surface, q, vd, n, tol=np.inf)
        return CheckResult("improper_sphere", cert.residual if cert else np.inf, tol)
    found = is_proper_sphere(surface, q, vd, n) or is_improper_sphere(surface, q, vd, n)
    return CheckResult("no_sphere", 0.0 if found is None else 1.0, 0.5)


def cmd_check(scn: Scenario, out: TextIO, tol: float | None = None) -> int:
    results = run_checks(scn, tol)
    for r in results:
        out.write(r.line() + "\n")
    ok = all(r.passed for r in results)
    out.write(f"overall {'PASS' if ok else 'FAIL'}\n")
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------


def mesh_obj(scn: Scenario, target: str) -> str:
    surface = scn.surface()
    q, _ = scn.support(surface)
    us, vs = _grid(scn, surface)
    header = f"# ruledrel mesh target={target} scenario={scn.name}"
    if target in ("surface", "relative_image", "central_image"):
        if target == "surface":
            point = lambda u, v: position(surface, u, v)  # noqa: E731
        elif target == "relative_image":
            point = lambda u, v: relative_normal_vector(surface, q, u, v)  # noqa: E731
        else:
            if scn.kind != "central":
                raise DomainError("central_image requires a central normalization")
            ci = _at_node(lambda: central_image(surface, q.g), float(us[0]))
            point = ci.point
        verts = [_at_node(lambda u=u, v=v: point(float(u), float(v)), float(u), float(v)) for u in us for v in vs]
        nv = len(vs)
        faces = []
        for i in range(len(us) - 1):
            for j in range(nv - 1):
                a = i * nv + j + 1
                faces.append((a, a + nv, a + nv + 1))
                faces.append((a, a + nv + 1, a + 1))
        lines = [header] + ["v " + " ".join(_fmt(c) for c in p) for p in verts]
        lines += [f"f {a} {b} {c}" for a, b, c in faces]
    else:
        if target == "focal_curve":
            if scn.kind != "central":
                raise DomainError("focal_curve requires a central normalization")
            curve = lambda u: focal_curve(surface, q.g, u)  # noqa: E731
        else:
            curve = lambda u: surface.frame_at(u).s  # noqa: E731
        verts = [_at_node(lambda u=u: curve(float(u)), float(u)) for u in us]
        lines = [header] + ["v " + " ".join(_fmt(c) for c in p) for p in verts]
        lines.append("l " + " ".join(str(i + 1) for i in range(len(verts))))
    return "\n".join(lines) + "\n"


def cmd_mesh(scn: Scenario, out: TextIO, target: str | None = None) -> int:
    if target is None:
        target = next((o.get("target", "surface") for o in scn.outputs if o["type"] == "mesh"), "surface")
    if target not in MESH_TARGETS:
        raise ScenarioError(f"mesh target must be one of {', '.join(MESH_TARGETS)}")
    out.write(mesh_obj(scn, target))
    return EXIT_OK


# --------------------------------------------------------------------------


def cmd_classify(scn: Scenario, out: TextIO, tol: float | None = None) -> int:
    surface = scn.surface()
    q, _ = scn.support(surface)
    tol = 1e-7 if tol is None else tol
    vd, n = scn.grid.v_domain, max(scn.grid.nu, scn.grid.nv, 5)
    try:
        res = classification_residuals(surface, q, vd, n)
        labels = [lab for lab in LABELS if res[lab] <= tol]
        proper = is_proper_sphere(surface, q, vd, n)
        improper = None if proper else is_improper_sphere(surface, q, vd, n)
    except DOMAIN_ERRORS as exc:
        raise DomainError(str(exc)) from exc
    out.write(f"labels: {', '.join(labels) if labels else '-'}\n")
    for lab in LABELS:
        out.write(f"residual {lab} {res[lab]:.3e}\n")
    if proper:
        out.write(f"proper relative sphere, c={proper.c:.6f}, residual {proper.residual:.3e}\n")
    elif improper:
        out.write(f"improper relative sphere, residual {improper.residual:.3e}\n")
    if scn.kind == "central":
        report = tchebychev_predicates(surface, q.g, vd, n)
        for p in report.predicates:
            out.write(f"tchebychev {p.name} {'holds' if p.holds else 'fails'} {p.residual:.3e}\n")
    if not labels and not proper and not improper:
        out.write("no special structure detected\n")
    return EXIT_OK


def cmd_sphere(scn: Scenario, out: TextIO, tol: float | None = None) -> int:
    surface = scn.surface()
    q, build = scn.support(surface)
    vd, n = scn.grid.v_domain, max(scn.grid.nu, scn.grid.nv, 5)
    tol = 1e-6 if tol is None else tol
    ok = True
    if build is not None:
        out.write(f"builder {scn.sphere_builder}\n")
        if build.ode_residual is not None:
            a, b = surface.u_domain
            r = max(abs(build.ode_residual(u)) for u in np.linspace(a, b, scn.grid.nu))
            out.write(f"ode_residual {r:.3e}\n")
    proper = is_proper_sphere(surface, q, vd, n, tol)
    improper = None if proper else is_improper_sphere(surface, q, vd, n, tol)
    if proper:
        a = proper.center
        out.write(f"proper relative sphere, c={proper.c:.6f}, residual {proper.residual:.3e}\n")
        out.write(f"center {a[0]:.9f} {a[1]:.9f} {a[2]:.9f}\n")
        out.write(f"shape_residual {proper.shape_residual:.3e}\n")
    elif improper:
        y = improper.center
        out.write(f"improper relative sphere, residual {improper.residual:.3e}\n")
        out.write(f"image_point {y[0]:.9f} {y[1]:.9f} {y[2]:.9f}\n")
    else:
        out.write("no relative sphere\n")
    if build is not None:
        ok = (proper if build.kind == "proper" else improper) is not None
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "eval": cmd_eval,
    "check": cmd_check,
    "classify": cmd_classify,
    "sphere": cmd_sphere,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ruledrel", description="Relative normalizations of skew ruled surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "check", "mesh", "classify", "sphere"):
        p = sub.add_parser(name)
        p.add_argument("scenario")
        p.add_argument("--out", help="write output to PATH instead of stdout")
        p.add_argument("--tol", type=float, help="override tolerances")
        if name == "mesh":
            p.add_argument("--target", choices=MESH_TARGETS)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        scn = load_scenario(args.scenario)
        if args.out:
            with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
                return _dispatch(args, scn, fh)
        return _dispatch(args, scn, sys.stdout)
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExprDomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ExprError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def _dispatch(args, scn: Scenario, out: TextIO) -> int:
    if args.command == "mesh":
        return cmd_mesh(scn, out, args.target)
    return COMMANDS[args.command](scn, out, args.tol)


if __name__ == "__main__":
    sys.exit(main())
