import copy
import json

import pytest

from dvbkit import serialize
from dvbkit.bundles import LieAlgebroidModel, check_lie_algebroid
from dvbkit.cli import build
from dvbkit.serialize import InstanceError

ONE, MINUS = [[[], 1, 1]], [[[], -1, 1]]
ZERO = []

# so(3) over a point: [a0, a1] = a2, [a1, a2] = a0, [a2, a0] = a1
SO3_DOC = {
    "format": 1, "kind": "lie-algebroid",
    "payload": {
        "n": 0,
        "anchor": {"rows": 3, "cols": 0, "entries": []},
        "structure": [
            [[ZERO, ZERO, ZERO], [ZERO, ZERO, ONE], [ZERO, MINUS, ZERO]],
            [[ZERO, ZERO, MINUS], [ZERO, ZERO, ZERO], [ONE, ZERO, ZERO]],
            [[ZERO, ONE, ZERO], [MINUS, ZERO, ZERO], [ZERO, ZERO, ZERO]],
        ],
    },
}


def test_so3_over_a_point_parses():
    alg = serialize.from_json(copy.deepcopy(SO3_DOC))
    assert isinstance(alg, LieAlgebroidModel) and alg.rank == 3 and alg.n == 0
    assert check_lie_algebroid(alg).ok
    assert json.loads(serialize.dumps(alg)) == SO3_DOC


def test_non_rational_coefficient_is_named():
    doc = copy.deepcopy(SO3_DOC)
    doc["payload"]["structure"][0][1][2] = [[[], 0.5, 1]]
    with pytest.raises(InstanceError, match=r"\$\.payload\.structure\[0\]\[1\]\[2\]\[0\]\[1\]"):
        serialize.from_json(doc)


def test_zero_denominator_rejected():
    doc = copy.deepcopy(SO3_DOC)
    doc["payload"]["structure"][0][1][2] = [[[], 1, 0]]
    with pytest.raises(InstanceError, match="schema violation"):
        serialize.from_json(doc)


def test_unknown_kind_and_parse_errors():
    with pytest.raises(InstanceError, match="unknown kind"):
        serialize.from_json({"format": 1, "kind": "nope", "payload": {}})
    with pytest.raises(InstanceError, match="parse error at line 1"):
        serialize.loads("{oops")


def test_bad_structure_shape_rejected():
    doc = copy.deepcopy(SO3_DOC)
    doc["payload"]["structure"] = doc["payload"]["structure"][:2]
    with pytest.raises(InstanceError):
        serialize.from_json(doc)


@pytest.mark.parametrize("kind", serialize.KINDS)
def test_roundtrip_every_kind(kind, rng):
    obj = build(f"random-{kind}", None, rng, 4)
    assert serialize.kind_of(obj) == kind
    text = serialize.dumps(obj)
    again = serialize.loads(text)
    assert serialize.kind_of(again) == kind
    assert serialize.dumps(again) == text
    serialize.validate(json.loads(text))
