"""Acceptance criteria 1-12, each recorded as one PASS/FAIL line in the terminal summary."""

import numpy as np

from ruledrel import (
    NormalizationSpec,
    RuledSurface,
    build_improper_nonconoidal,
    build_proper_nonconoidal,
    central_image,
    euclidean_curvatures,
    frame_at,
    inverse_problem,
    is_improper_sphere,
    is_proper_sphere,
    make_central,
    make_euclidean,
    make_right,
    pick_invariant,
    position,
    rel_curvatures,
    relative_normal_vector,
    scalar_curvature,
    shape_operator,
)
from ruledrel.geom_core import tangent_vectors
from ruledrel.relnorm import divergence_T, divergence_identity_rhs, pick_from_darboux
from ruledrel.verify import identity_suite, interior_points

from conftest import BATTERY, KINDS, make_surface, record, sample_points
from make_golden import COMMANDS, GOLDEN, SCENARIOS, render

PER_COMBO = 10


def battery_samples():
    for i, name in enumerate(sorted(BATTERY)):
        s = make_surface(name)
        for j, kind in enumerate(sorted(KINDS)):
            q = NormalizationSpec(kind, dict(KINDS[kind])).build(s)
            for u, v in sample_points(s, PER_COMBO, seed=100 * i + j):
                yield s, q, u, v


def rel_scale(*xs):
    return max(1.0, *(abs(x) for x in xs))


def test_criterion_01_pick_identity():
    worst, count = 0.0, 0
    for s, q, u, v in battery_samples():
        _, H = rel_curvatures(s, q, u, v)
        J, S = pick_invariant(s, q, u, v), scalar_curvature(s, q, u, v)
        worst = max(worst, abs(3 * H - J - 3 * S) / rel_scale(3 * H, J, 3 * S))
        count += 1
    ok = worst < 1e-8 and count >= 200
    record(1, ok, f"3H - J - 3S: max rel residual {worst:.2e} over {count} samples (< 1e-8)")
    assert ok


def test_criterion_02_divergence_identity():
    worst, count = 0.0, 0
    for s, q, u, v in battery_samples():
        div, S, rhs = divergence_T(s, q, u, v), scalar_curvature(s, q, u, v), divergence_identity_rhs(s, q, u, v)
        worst = max(worst, abs(div - 2 * S - rhs) / rel_scale(div, 2 * S, rhs))
        count += 1
    ok = worst < 1e-7 and count >= 200
    record(2, ok, f"div T - 2S - 2 kappa w q / delta^2: max rel residual {worst:.2e} over {count} samples (< 1e-7)")
    assert ok


def test_criterion_03_euclidean_limit():
    worst = 0.0
    for i, name in enumerate(sorted(BATTERY)):
        s = make_surface(name)
        q = make_euclidean(s)
        for u, v in sample_points(s, 40, seed=i, v_range=(0.0, 2.0)):
            K, H = rel_curvatures(s, q, u, v)
            Kt, HI = euclidean_curvatures(s, u, v)
            worst = max(worst, abs(K - Kt), abs(H - HI))
    ok = worst < 1e-8
    record(3, ok, f"q = 1 gives (K, H) = (K~, H_I): max abs residual {worst:.2e} (< 1e-8)")
    assert ok


def test_criterion_04_shape_operator():
    rng = np.random.default_rng(4)
    names, kinds = sorted(BATTERY), sorted(KINDS)
    fd_worst = dt_worst = 0.0
    h = 1e-5
    for _ in range(50):
        s = make_surface(names[rng.integers(len(names))])
        kind = kinds[rng.integers(len(kinds))]
        q = NormalizationSpec(kind, dict(KINDS[kind])).build(s)
        (u, v), = sample_points(s, 1, seed=int(rng.integers(1 << 30)))
        B = shape_operator(s, q, u, v)
        x1, x2 = tangent_vectors(s, u, v)
        yu = (relative_normal_vector(s, q, u + h, v) - relative_normal_vector(s, q, u - h, v)) / (2 * h)
        yv = (relative_normal_vector(s, q, u, v + h) - relative_normal_vector(s, q, u, v - h)) / (2 * h)
        scale = rel_scale(*yu, *yv)
        fd_worst = max(
            fd_worst,
            np.abs(yu + B[0, 0] * x1 + B[0, 1] * x2).max() / scale,
            np.abs(yv + B[1, 0] * x1 + B[1, 1] * x2).max() / scale,
        )
        K, H = rel_curvatures(s, q, u, v)
        dt_worst = max(
            dt_worst,
            abs(np.linalg.det(B) - K) / rel_scale(K),
            abs(np.trace(B) / 2 - H) / rel_scale(H),
        )
    ok = fd_worst < 1e-5 and dt_worst < 1e-9
    record(4, ok, f"y_/i = -B x: fd residual {fd_worst:.2e} (< 1e-5); det/trace {dt_worst:.2e} (< 1e-9); 50 points")
    assert ok


def test_criterion_05_pick_dual_path():
    worst = 0.0
    for s, q, u, v in battery_samples():
        a, b = pick_from_darboux(s, q, u, v), pick_invariant(s, q, u, v)
        worst = max(worst, abs(a - b) / rel_scale(a, b))
    ok = worst < 1e-9
    record(5, ok, f"Pick invariant from Darboux components vs closed form: {worst:.2e} (< 1e-9)")
    assert ok


def test_criterion_06_proper_sphere():
    s = RuledSurface(1.0, 0.0, 0.0, (0.0, 1.5))
    q = make_central(s, "2 - u")
    pts = [(u, v) for u in np.linspace(0.0, 1.5, 21) for v in np.linspace(0.1, 2.0, 21)]
    cert = max(np.linalg.norm(position(s, u, v) - relative_normal_vector(s, q, u, v) - [0, 0, 2]) for u, v in pts)
    curv = max(max(abs(H + 1), abs(K - 1)) for K, H in (rel_curvatures(s, q, u, v) for u, v in pts))
    detected = is_proper_sphere(s, q)
    ok = cert < 1e-6 and curv < 1e-8 and detected is not None and abs(detected.c - 1) < 1e-6
    record(6, ok, f"helicoid g = 2 - u: |x - y - (0,0,2)| {cert:.2e} (< 1e-6); |H+1|, |K-1| {curv:.2e} (< 1e-8)")
    assert ok


def test_criterion_07_improper_sphere():
    s = RuledSurface(1.0, 0.0, 0.0, (-1.4, 1.4), u0=0.0)
    q = make_right(s, "cos(u)", 0.0)
    pts = [(u, v) for u in np.linspace(-1.4, 1.4, 21) for v in np.linspace(-2.0, 2.0, 21)]
    dev = max(np.abs(relative_normal_vector(s, q, u, v) - [0, 1, 0]).max() for u, v in pts)
    KH = max(max(abs(K), abs(H)) for K, H in (rel_curvatures(s, q, u, v) for u, v in pts))
    JS = max(abs(pick_invariant(s, q, u, v) + 3 * scalar_curvature(s, q, u, v)) for u, v in pts)
    ok = dev < 1e-6 and KH < 1e-8 and JS < 1e-8 and is_improper_sphere(s, q, v_domain=(-2.0, 2.0)) is not None
    record(7, ok, f"helicoid f = cos u: |y - (0,1,0)| {dev:.2e} (< 1e-6); K, H {KH:.2e}; J + 3S {JS:.2e} (< 1e-8)")
    assert ok


def test_criterion_08_nonconoidal_odes():
    s = RuledSurface("1 + 0.2*sin(u)", "1 + 0.3*u", "0.4*cos(u)", (0.0, 1.0))
    us = np.linspace(0.0, 1.0, 101)
    imp = build_improper_nonconoidal(s, 2.9, 1.1, 0.9, v_domain=(0.1, 2.0))
    imp_ode = max(abs(imp.ode_residual(u)) for u in us)
    ys = np.array([relative_normal_vector(s, imp.support, u, v) for u in us[::10] for v in np.linspace(0.1, 2, 11)])
    imp_const = float(np.abs(ys - ys[0]).max())
    prop = build_proper_nonconoidal(s, 2.0, 3.0, 0.2, 0.1, v_domain=(0.1, 2.0))
    prop_ode = max(abs(prop.ode_residual(u)) for u in us)
    cert = is_proper_sphere(s, prop.support)
    cres = cert.residual if cert is not None else float("inf")
    ok = imp_ode < 1e-7 and prop_ode < 1e-7 and imp_const < 1e-5 and cres < 1e-5
    record(
        8,
        ok,
        f"improper ODE {imp_ode:.2e}, y spread {imp_const:.2e}; proper ODE {prop_ode:.2e}, certificate {cres:.2e}",
    )
    assert ok


def test_criterion_09_central_image():
    g = "2 + 0.5*u + 0.1*u^2"
    inv = w1 = kt = 0.0
    for name in ("kappa_const", "kappa_u", "conoidal", "edlinger"):
        s = make_surface(name)
        ci = central_image(s, g)
        q = make_central(s, g)
        a, b = s.u_domain
        for u in np.linspace(a + 0.05, b - 0.05, 5):
            j = ci.surface1.jets(u)
            m = ci.measure(u)
            inv = max(inv, abs(m.delta - j.delta.c0), abs(m.kappa - j.kappa.c0), abs(m.lam - j.lam.c0))
            for v in (0.3, 1.1, -0.8):
                K, H = rel_curvatures(s, q, u, v)
                w = np.hypot(float(s.delta(u).c0), v)
                w1 = max(w1, abs(ci.w1(u, v) - abs(H) * w) / rel_scale(abs(H) * w))
                Kt1 = euclidean_curvatures(s, u, v)[0] / K
                kt = max(kt, abs(ci.gaussian_curvature1(u, v) - Kt1) / rel_scale(Kt1))
    hel = central_image(RuledSurface(1.0, 0.0, 0.0, (0.0, 1.5)), "2 - u")
    m = [hel.measure(u) for u in (0.3, 0.75, 1.2)]
    cong = max(max(abs(x.delta - 1), abs(x.kappa), abs(x.lam)) for x in m)
    ok = inv < 1e-6 and w1 < 1e-7 and kt < 1e-7 and cong < 1e-6
    record(9, ok, f"measured vs (delta1, kappa1, lambda1) {inv:.2e}; w1 {w1:.2e}; K~1 {kt:.2e}; helicoid {cong:.2e}")
    assert ok


def test_criterion_10_frame_drift():
    worst = 0.0
    for d, k, lam in (("1", "1 + 0.5*sin(u)", "0.3*cos(2*u)"), ("1 + 0.2*sin(u)", "u/5", "0.2")):
        s = RuledSurface(d, k, lam, (0.0, 10.0), step=1e-3)
        for u in np.linspace(0.0, 10.0, 41):
            f = frame_at(s, u)
            M = np.array([f.e, f.n, f.z])
            worst = max(worst, np.abs(M @ M.T - np.eye(3)).max(), abs(np.linalg.det(M) - 1))
    ok = worst < 1e-9
    record(10, ok, f"orthonormality/handedness drift over length 10 at step 1e-3: {worst:.2e} (< 1e-9)")
    assert ok


def test_criterion_11_cli(tmp_path):
    mismatches = []
    for path in sorted(SCENARIOS.glob("*.toml")):
        for command, ext in COMMANDS.items():
            code, text = render(command, path)
            if code != 0 or text.encode() != (GOLDEN / f"{path.stem}.{ext}").read_bytes():
                mismatches.append(f"{command}:{path.stem}")
    src = (SCENARIOS / "helicoid_proper_sphere.toml").read_text()
    bad_parse = tmp_path / "parse.toml"
    bad_parse.write_text(src.replace('lambda = "0"', 'lambda = "sin("'))
    corrupted = tmp_path / "corrupt.toml"
    corrupted.write_text(src.replace('lambda = "0"', 'lambda = "0.1"'))
    domain = tmp_path / "domain.toml"
    domain.write_text(src.replace("v_domain = [0.1, 2.0]", "v_domain = [-1.0, 1.0]"))
    codes = {
        "ok": render("check", SCENARIOS / "helicoid_euclidean.toml")[0],
        "fail": render("check", corrupted)[0],
        "config": render("check", bad_parse)[0],
        "domain": render("eval", domain)[0],
    }
    ok = not mismatches and codes == {"ok": 0, "fail": 1, "config": 2, "domain": 3}
    record(11, ok, f"golden byte equality ({len(mismatches)} mismatches); exit codes {codes}")
    assert ok


def test_criterion_12_inverse_helicoid():
    s = RuledSurface(1.0, 0.0, 0.0, (0.0, 1.5))
    sol = inverse_problem(s)
    worst = worst_id = float("inf")
    if sol is not None:
        psi, qs = sol.construct("1 + 0.3*u", "0.5*cos(u)")
        ci = central_image(psi, qs.g)
        worst = 0.0
        for u in np.linspace(0.1, 1.4, 6):
            m = ci.measure(u)
            worst = max(worst, abs(m.delta - 1), abs(m.kappa), abs(m.lam))
        checks = identity_suite(psi, qs, interior_points(psi, (0.1, 2.0), 5, 5))
        worst_id = max(c.max_residual / c.tol for c in checks)
    ok = sol is not None and worst < 1e-6 and worst_id < 1
    record(12, ok, f"right helicoid inverse: central image of Psi* deviates from (1, 0, 0) by {worst:.2e} (< 1e-6)")
    assert ok
