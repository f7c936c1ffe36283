import pytest

from dvbkit import serialize
from dvbkit.bundles import check_lie_algebroid
from dvbkit.cli import MUTATION_SUITES, SUITES, run_suite
from dvbkit.functors import geometrize
from dvbkit.metricdvb import InvolutiveDVB
from dvbkit.mutations import MUTATIONS, mutate
from dvbkit.poisson2 import PoissonStructure2
from dvbkit.randomgen import (base_algebroid, random_dorfman, random_lie_algebroid, random_selfdual_tworep,
                              random_symmetric, random_two_man_chart)
from dvbkit.serialize import AtlasInstance, DorfmanInstance
from dvbkit.tworep import check_tworep, selfdual_report


def _instance(kind, rng, axiom=None):
    """Instance on which the given mutation of the kind applies."""
    if kind == "lie-algebroid":
        return random_lie_algebroid(rng, rank=2)
    if kind == "tworep":
        return random_selfdual_tworep(rng, base_algebroid("affine-line", 1), base_ranks=(1, 1))
    if kind == "involutive-dvb":
        return InvolutiveDVB.standard(1, 2, 1, [random_symmetric(rng, 2, 1)])
    if kind == "two-man-atlas":
        chart = random_two_man_chart(rng, n=1, rank1=2, rank2=1, charts=3)
        if axiom == "core-terms":
            return AtlasInstance(geometrize(chart).metric_atlas, "metric-atlas")
        return chart
    if kind == "dorfman":
        alg = base_algebroid("affine-line", 1)
        return DorfmanInstance(random_dorfman(rng, alg.n, alg.rank), alg)
    if kind == "poisson2":
        return PoissonStructure2(random_selfdual_tworep(rng, base_algebroid("affine-line", 1)))
    raise AssertionError(kind)


CASES = [(kind, axiom) for kind, axioms in MUTATIONS.items() for axiom in axioms]


@pytest.mark.parametrize("kind,axiom", CASES)
def test_mutation_is_detected(kind, axiom, rng):
    obj = _instance(kind, rng, axiom)
    assert serialize.kind_of(obj) == kind
    # the suite the CLI runs for --mutate without --suite
    suite = MUTATION_SUITES.get((kind, axiom), next(iter(SUITES[kind])))
    assert run_suite(obj, suite, 1, 2)[1].ok
    assert not run_suite(mutate(obj, axiom), suite, 1, 2)[1].ok


@pytest.mark.parametrize("kind,axiom", CASES)
def test_mutation_never_raises_in_any_suite(kind, axiom, rng):
    broken = mutate(_instance(kind, rng, axiom), axiom)
    for suite in SUITES[kind]:
        if (kind, suite) in (("poisson2", "roundtrip"), ("poisson2", "linear")):
            # both start by rebuilding the bracket from the table, which rejects broken data
            continue
        run_suite(broken, suite, 1, 2)


def test_mutation_does_not_touch_input(rng):
    rep = _instance("tworep", rng)
    before = serialize.dumps(rep)
    mutate(rep, "chain")
    assert serialize.dumps(rep) == before


def test_selfdual_mutations_keep_tworep_axioms(rng):
    rep = _instance("tworep", rng)
    for axiom in ("d-symmetry", "r-skew"):
        broken = mutate(rep, axiom)
        assert not selfdual_report(broken).ok


def test_jacobi_mutation_names_a_triple(rng):
    failed = check_lie_algebroid(mutate(_instance("lie-algebroid", rng), "jacobi")).failed_names()
    assert failed


def test_unknown_mutation_rejected(rng):
    with pytest.raises(ValueError):
        mutate(_instance("tworep", rng), "no-such-axiom")
    assert check_tworep(_instance("tworep", rng)).ok
