"""File management tools and utilities: atomic writers, json readers and schema validation."""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
from jsonschema import Draft6Validator

from torusflow.commons.miscellaneous import get_torusflow_logger

logger = get_torusflow_logger(__name__)


def write_bytes_atomically(path: Path, data: bytes):
    """Writes ``data`` to ``path`` through a temporary file in the same directory, then renames it over ``path``.

    Readers therefore never see a half-written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    file_descriptor, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(file_descriptor, 'wb') as tmp_file:
            tmp_file.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise


def write_text_atomically(path: Path, text: str):
    write_bytes_atomically(path, text.encode('utf-8'))


def dumps_json(obj: Any) -> str:
    """Serializes ``obj`` deterministically (sorted keys, fixed indentation)."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=lambda x: str(x)) + '\n'


def write_json(path: Path, obj: Any):
    write_text_atomically(path, dumps_json(obj))


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding='utf-8'))


def write_csv(path: Path, rows: Union[pd.DataFrame, List[Dict[str, Any]]]):
    """Writes ``rows`` (a dataframe or a list of records) as a csv without index."""
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame.from_records(rows)
    write_text_atomically(path, df.to_csv(index=False))


def load_schema(schema_path: Path) -> dict:
    """Loads a json schema and checks it against ``Draft6Validator``."""
    schema = read_json(schema_path)
    Draft6Validator.check_schema(schema)
    return schema


def validate_against_schema(instance: Any, schema_path: Path):
    """Validates ``instance`` against the schema at ``schema_path``.

    Raises:
        jsonschema.ValidationError: for the first (best-matching) violation.
    """
    Draft6Validator(load_schema(schema_path)).validate(instance)
