"""A connection whose projective class contains no metric at all.

Perturbing the flat plane by Gamma^1_22 = x1^2 and Gamma^2_11 = x2 keeps
the coordinate volume parallel but produces curvature that the jet
constraints cannot absorb: by order six the admissible space of initial
values is zero, so not even a degenerate nonzero solution exists.  The
numeric least-squares oracle over a degree-6 polynomial ansatz agrees: the
smallest singular value of the sampled metrizability operator stays
bounded away from zero.
"""

from fractions import Fraction

from projmet import decompose_curvature, degree_of_mobility
from projmet.cli import analyze_connection
from projmet.models import nonmetrizable_witness
from projmet.tractor import tractor_curvature


def main():
    conn = nonmetrizable_witness()
    data = decompose_curvature(conn)
    print("prolonged curvature vanishes:", tractor_curvature(conn, data).is_zero())
    jets = degree_of_mobility(conn, [0, 0], max_order=8, data=data)
    print("admissible dimension by order:", jets.dims)
    report, code = analyze_connection(
        conn, [Fraction(0), Fraction(0)],
        {"max_order": 8, "samples": 4, "tolerance": 1e-8})
    print("verdict:", report["verdict"], "| exit code:", code)


if __name__ == "__main__":
    main()
