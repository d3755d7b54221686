"""Degree of mobility of flat space, and the full quadratic solution family.

The flat connection on R^n is the Levi-Civita connection of the Euclidean
metric, and its metrizability system has the largest possible solution
space: dimension (n+1)(n+2)/2.  Every solution is the quadratic field

    sigma^{ab} = s^{ab} + x^a m^b + x^b m^a + x^a x^b r,

and each positive definite one reconstructs to a constant-curvature metric
with curvature equal to -r when s is the identity and m = 0 (Klein ball for
r = -1, round sphere in central projection for r = +1).
"""

from projmet import (Chart, TensorField, constant_curvature_check,
                     degree_of_mobility, reconstruct_metric)
from projmet.models import flat_connection


def main():
    for n in (2, 3):
        flat = flat_connection(n)
        jets = degree_of_mobility(flat, [0] * n, max_order=4)
        bound = (n + 1) * (n + 2) // 2
        print(f"n = {n}: degree of mobility {jets.dim} "
              f"(bound {bound}), stabilized = {jets.stabilized}")

    # reconstruct the three reference geometries from initial data
    chart = Chart(2)
    x1, x2 = chart.vars
    for r, name in ((0, "Euclidean plane"), (-1, "Klein ball"),
                    (1, "round sphere, central projection")):
        comps = []
        for i, xi in enumerate((x1, x2)):
            for j, xj in enumerate((x1, x2)):
                val = chart.one if i == j else chart.zero
                comps.append(val + xi * xj * r)
        sigma = TensorField(chart, ("u", "u"), comps)
        cand = reconstruct_metric(sigma, flat_connection(2))
        flag, kappa, dev = constant_curvature_check(
            cand.g_down, conn=cand.connection, g_up=cand.g_up)
        print(f"sigma = delta + {r} x x  ->  constant curvature {kappa} "
              f"({name}), exact deviation {dev}")


if __name__ == "__main__":
    main()
