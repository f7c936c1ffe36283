"""Glue a three-chart graded atlas into a metric double vector bundle and back."""

import os
import random

from dvbkit.dvb import check_atlas
from dvbkit.functors import algebraize, check_cocycles, geometrize
from dvbkit.mutations import mutate
from dvbkit.randomgen import random_two_man_chart


def main():
    rng = random.Random(int(os.environ.get("DVBKIT_SEED", 42)))
    chart = random_two_man_chart(rng, n=1, rank1=2, rank2=1, charts=3)
    print(check_cocycles(chart).text())
    geo = geometrize(chart)
    print(geo.report.text())
    print(check_atlas(geo.metric_atlas).text())
    print("algebraize(geometrize(t)) == t:", algebraize(geo.metric_atlas) == chart)
    print("after perturbing the mixed part:", check_cocycles(mutate(chart, "mixed")).failed_names())


if __name__ == "__main__":
    main()
