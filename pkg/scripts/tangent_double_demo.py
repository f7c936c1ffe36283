"""Tangent double of a metric bundle: measure a connection's metric defect and remove it."""

import os
import random

from dvbkit.bundles import metric_compatibility
from dvbkit.randomgen import random_connection, random_fiber_metric
from dvbkit.worked import symmetrized_connection, tangent_double


def main():
    rng = random.Random(int(os.environ.get("DVBKIT_SEED", 42)))
    metric = random_fiber_metric(rng, 2, 2)
    conn = random_connection(rng, metric.bundle)
    print("fibre metric g =", metric.g)
    double = tangent_double(metric, conn)
    for l, split_form in enumerate(double.split_form):
        print(f"defect in direction x{l}:", split_form)
    new_conn, new_double = symmetrized_connection(metric, conn)
    print("symmetrized connection is metric:", metric_compatibility(new_conn, metric))
    print("new splitting is Lagrangian:", new_double.is_lagrangian())


if __name__ == "__main__":
    main()
