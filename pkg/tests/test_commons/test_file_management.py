import json

import pandas as pd
import pytest
from jsonschema import ValidationError

from torusflow.commons import file_management as fm
from torusflow.commons import variables as vs


def test_write_json_is_deterministic(tmp_path):
    fm.write_json(tmp_path / 'a.json', {'b': 1, 'a': [1., 2.]})
    fm.write_json(tmp_path / 'b.json', {'a': [1., 2.], 'b': 1})
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()
    assert fm.read_json(tmp_path / 'a.json') == {'a': [1., 2.], 'b': 1}


def test_write_atomically_creates_parents_and_leaves_no_temporary_file(tmp_path):
    path = tmp_path / 'nested' / 'dir' / 'file.txt'
    fm.write_text_atomically(path, 'hello')
    assert path.read_text(encoding='utf-8') == 'hello'
    assert [p.name for p in path.parent.iterdir()] == ['file.txt']


def test_write_csv(tmp_path):
    fm.write_csv(tmp_path / 'rows.csv', [{'x': 1, 'y': 2.5}, {'x': 2, 'y': 3.5}])
    df = pd.read_csv(tmp_path / 'rows.csv')
    assert list(df.columns) == ['x', 'y']
    assert df['y'].tolist() == [2.5, 3.5]


@pytest.mark.parametrize('schema_path', [vs.FIELD_SCHEMA_PATH, vs.MANIFEST_SCHEMA_PATH, vs.CERT_REPORT_SCHEMA_PATH,
                                         vs.SUMMARY_SCHEMA_PATH])
def test_shipped_schemas_are_valid(schema_path):
    schema = fm.load_schema(schema_path)
    assert schema['$schema'].startswith('http://json-schema.org/draft-06')


def test_validate_against_schema():
    fm.validate_against_schema({'version': 1, 'experiment': 'props'}, vs.MANIFEST_SCHEMA_PATH)
    with pytest.raises(ValidationError):
        fm.validate_against_schema({'version': 2}, vs.MANIFEST_SCHEMA_PATH)


def test_dumps_json_sorts_keys():
    assert json.loads(fm.dumps_json({'b': 1, 'a': 2})) == {'a': 2, 'b': 1}
    assert fm.dumps_json({'b': 1, 'a': 2}).index('"a"') < fm.dumps_json({'b': 1, 'a': 2}).index('"b"')
