import json

import numpy as np
import pytest

from gmbqc.errors import InvariantError
from gmbqc.fixtures import BUILTINS, builtin, fixture_from_json, fixture_to_json


@pytest.mark.parametrize("name", list(BUILTINS))
def test_json_roundtrip(name):
    fix = builtin(name)
    data = json.loads(json.dumps(fixture_to_json(fix)))
    back = fixture_from_json(data)
    assert back.obs.labels() == fix.obs.labels()
    assert back.obs.measurable == fix.obs.measurable and back.obs.outputs == fix.obs.outputs
    assert [e.perm for e in back.action.elements] == [e.perm for e in fix.action.elements]
    assert back.action.group.names == fix.action.group.names
    if fix.extended is not None:
        assert [e.signs for e in back.extended.elements] == [e.signs for e in fix.extended.elements]
    if fix.state is not None:
        assert np.allclose(back.state.amplitudes, fix.state.amplitudes)
    assert (back.instance is None) == (fix.instance is None)


def test_unknown_builtin():
    with pytest.raises(InvariantError, match="unknown"):
        builtin("nope")


def test_builtins_are_cached_consistently():
    a, b = builtin("ghz-or"), builtin("ghz-or")
    assert a.obs.labels() == b.obs.labels()


def test_stabilizer_state_block():
    data = fixture_to_json(builtin("ghz-or"))
    data["state"] = {"type": "stabilizer", "generators": ["+XXX", "-XYY", "-YXY", "-YYX"]}
    fix = fixture_from_json(data)
    assert np.allclose(np.abs(fix.state.amplitudes), np.abs(builtin("ghz-or").state.amplitudes))


@pytest.mark.parametrize(
    "patch",
    [
        {"state": {"type": "mixed"}},
        {"n_qubits": 4},
        {"b_e": "XYY"},
        {"reference_context": ["XII", "IXI", "IIY"]},
        {"group": {"generators": [{"name": "bad"}]}},
        {"observables": []},
    ],
)
def test_schema_violations(patch):
    data = fixture_to_json(builtin("ghz-or"))
    data.update(patch)
    with pytest.raises(InvariantError):
        fixture_from_json(data)


def test_not_an_object():
    with pytest.raises(InvariantError):
        fixture_from_json([1, 2, 3])
