"""Build relative spheres on a helicoid and on a surface of varying conical curvature.

Run: python3 demos/sphere_tour.py
"""

import numpy as np

from ruledrel import (
    RuledSurface,
    build_improper_conoidal,
    build_proper_nonconoidal,
    focal_curve,
    is_improper_sphere,
    is_proper_sphere,
    make_central,
    rel_curvatures,
)


def main():
    helicoid = RuledSurface(1.0, 0.0, 0.0, (0.0, 1.5))
    q = make_central(helicoid, "2 - u")
    cert = is_proper_sphere(helicoid, q)
    print(f"helicoid, g = 2 - u: proper sphere c = {cert.c:.6f}, center {np.round(cert.center, 9)}")
    print(f"  (K, H) at (0.5, 1.0) = {rel_curvatures(helicoid, q, 0.5, 1.0)}")
    print(f"  focal point at u = 0.7: {np.round(focal_curve(helicoid, '2 - u', 0.7), 9)}")

    sym = RuledSurface(1.0, 0.0, 0.0, (-1.4, 1.4), u0=0.0)
    build = build_improper_conoidal(sym, 1.0, 0.0, 0.0, v_domain=(-2.0, 2.0))
    cert = is_improper_sphere(sym, build.support, v_domain=(-2.0, 2.0))
    print(f"helicoid, q = cos(u)/w: relative image is the point {np.round(cert.center, 9)}")

    wavy = RuledSurface("1 + 0.2*sin(u)", "1 + 0.3*u", "0.4*cos(u)", (0.0, 1.0))
    build = build_proper_nonconoidal(wavy, 2.0, 3.0, 0.2, 0.1, v_domain=(0.1, 2.0))
    worst = max(abs(build.ode_residual(u)) for u in np.linspace(0.0, 1.0, 51))
    cert = is_proper_sphere(wavy, build.support)
    print(f"non-conoidal surface: ODE residual {worst:.1e}, fitted c = {cert.c:.9f}, residual {cert.residual:.1e}")


if __name__ == "__main__":
    main()
