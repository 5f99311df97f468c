import numpy as np
import pytest

import tests.sample_objects as so
from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.spectral import serialization as se


@pytest.mark.parametrize('suffix', ['.json', '.bin'])
def test_files_round_trip_bit_exactly(tmp_path, suffix):
    f = so.random_field(3, 2, seed=11, components=3)
    se.write_field(f, tmp_path / ('field' + suffix))
    g = se.read_field(tmp_path / ('field' + suffix))
    assert np.array_equal(f.coeffs, g.coeffs)
    assert g.real == f.real


def test_json_layout():
    data = se.field_to_json(so.sample_cos_x1)
    assert (data['dim'], data['trunc'], data['components'], data['real']) == (2, 4, 1, True)
    assert data['coeffs'][0] == [[-4, -4], 0., 0.]
    assert [[1, 0], 0.5, 0.] in data['coeffs']


def test_binary_header():
    data = se.field_to_bytes(so.sample_taylor_green)
    assert data[:4] == vs.BINARY_MAGIC
    assert len(data) == 4 + 3 * 4 + 1 + 2 * 17 ** 2 * 16
    with pytest.raises(ValueError):
        se.field_from_bytes(b'XXXX' + data[4:])
    with pytest.raises(ShapeMismatchError):
        se.field_from_bytes(data[:-16])


def test_json_with_wrong_count():
    data = se.field_to_json(so.sample_cos_x1)
    data['coeffs'] = data['coeffs'][:-1]
    with pytest.raises(ShapeMismatchError):
        se.field_from_json(data)
