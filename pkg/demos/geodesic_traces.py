"""Unparameterised geodesic comparison with CSV trace output.

The flat connection and the Klein connection share their geodesics (disk
chords), while the stereographic sphere does not (its geodesics are
circles in the chart).  The transverse defect separates the two cases by
many orders of magnitude; the integrated trajectories go to a CSV file for
plotting.
"""

from projmet import geodesic_compare, write_trace_csv
from projmet.models import (flat_connection, klein_connection,
                            sphere_stereographic_connection)

SEEDS = [([0.1, -0.05], [0.25, 0.075]),
         ([0.0, 0.2], [0.125, -0.25]),
         ([-0.15, 0.0], [0.2, 0.2])]


def main():
    flat = flat_connection(2)
    defect_klein, traces = geodesic_compare(flat, klein_connection(2), SEEDS)
    defect_sphere, _ = geodesic_compare(
        flat, sphere_stereographic_connection(2), SEEDS)
    print(f"flat vs Klein transverse defect:  {defect_klein:.3e} (equivalent)")
    print(f"flat vs sphere transverse defect: {defect_sphere:.3e} (not equivalent)")
    out = "geodesic_traces.csv"
    write_trace_csv(traces, out)
    print(f"wrote {len(traces)} trajectories to {out}")


if __name__ == "__main__":
    main()
