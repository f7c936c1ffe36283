"""Degree 2 Poisson bracket of a metric bundle with a compatible connection."""

import os
import random

from dvbkit.poisson2 import (GradedFunction, check_graded_axioms, is_symplectic, poisson_roundtrip,
                             symplectic_from_metric_bundle)
from dvbkit.randomgen import random_compatible_connection, random_fiber_metric


def main():
    rng = random.Random(int(os.environ.get("DVBKIT_SEED", 42)))
    n, k = 2, 3
    metric = random_fiber_metric(rng, n, k)
    p = symplectic_from_metric_bundle(metric, random_compatible_connection(rng, metric))
    xi = [GradedFunction.odd(n, k, n, a) for a in range(k)]
    eta = [GradedFunction.even(n, k, n, mu) for mu in range(n)]
    print("{xi0, xi1} =", p.bracket(xi[0], xi[1]))
    print("{eta0, xi0} =", p.bracket(eta[0], xi[0]))
    print("{eta0, eta1} =", p.bracket(eta[0], eta[1]))
    print(check_graded_axioms(p).text())
    print("symplectic:", is_symplectic(p))
    print("round trip:", poisson_roundtrip(p).ok)


if __name__ == "__main__":
    main()
