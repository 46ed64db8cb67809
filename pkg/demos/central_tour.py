"""Central normalizations: umbilics, the central image and the inverse construction.

Run: python3 demos/central_tour.py
"""

import numpy as np

from ruledrel import (
    RuledSurface,
    central_image,
    central_invariants,
    inverse_problem,
    tchebychev_predicates,
)

G = "2 + 0.5*u + 0.1*u^2"


def main():
    surface = RuledSurface(1.0, "u", 1.0, (0.5, 1.5))
    ci = central_invariants(surface, G, 1.0, 0.8)
    print(f"H = {ci.H:.6f}, K = {ci.K:.6f}, H^2 - K = {ci.umbilic_defect:.1e}")

    image = central_image(surface, G)
    for u in (0.75, 1.25):
        m = image.measure(u)
        j = image.surface1.jets(u)
        print(
            f"u = {u}: measured (delta1, kappa1, lambda1) = ({m.delta:.8f}, {m.kappa:.8f}, {m.lam:.8f})"
            f"  predicted ({float(j.delta.c0):.8f}, {float(j.kappa.c0):.8f}, {float(j.lam.c0):.8f})"
        )

    report = tchebychev_predicates(RuledSurface(1.0, 1.0, -1.0, (0.0, 2.0)), 1.0)
    for p in report.predicates:
        print(f"  {p.name:32s} {'holds' if p.holds else 'fails'}  {p.residual:.1e}")

    helicoid = RuledSurface(1.0, 0.0, 0.0, (0.0, 1.5))
    sol = inverse_problem(helicoid)
    psi, q = sol.construct("1 + 0.3*u", "0.5*cos(u)")
    m = central_image(psi, q.g).measure(0.8)
    print(f"inverse construction: c1 = {sol.c1}, central image invariants {np.round([m.delta, m.kappa, m.lam], 9)}")


if __name__ == "__main__":
    main()
