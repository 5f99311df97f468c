"""Json and binary formats of ``SpectralField`` objects.

Json: ``{"dim", "trunc", "components", "real", "coeffs"}`` where ``coeffs`` lists ``[k, re, im]`` entries, component
after component, each component in lexicographic ``k`` order.

Binary (little-endian): the magic ``b"TMF1"``, three ``uint32`` (n, m, N), one flag byte (real-valuedness), then the
coefficients as pairs of float64 in the same order as the json entries.

Both formats round-trip bit-exactly.
"""

import struct
from pathlib import Path
from typing import Any, Dict

import numpy as np

from torusflow.commons import variables as vs
from torusflow.commons.exceptions import ShapeMismatchError
from torusflow.commons.file_management import read_json, validate_against_schema, write_bytes_atomically, write_json
from torusflow.commons.miscellaneous import get_torusflow_logger
from torusflow.spectral.fields import SpectralField, get_grid

logger = get_torusflow_logger(__name__)


def field_to_json(f: SpectralField) -> Dict[str, Any]:
    wavevectors = [list(k) for k in f.grid.wavevectors()]
    coeffs = []
    for component in f.coeffs:
        for k, value in zip(wavevectors, component.ravel()):
            coeffs.append([k, float(value.real), float(value.imag)])
    return {'dim': f.dim, 'trunc': f.trunc, 'components': f.components, 'real': f.real, 'coeffs': coeffs}


def field_from_json(data: Dict[str, Any], validate: bool = True) -> SpectralField:
    if validate:
        validate_against_schema(data, vs.FIELD_SCHEMA_PATH)

    dim, trunc, components = data['dim'], data['trunc'], data['components']
    grid = get_grid(dim, trunc)
    coeffs = np.zeros((components,) + grid.shape, dtype=np.complex128)
    if len(data['coeffs']) != components * grid.size:
        raise ShapeMismatchError(f"Expected {components * grid.size} coefficients, got {len(data['coeffs'])}")
    for position, (k, re, im) in enumerate(data['coeffs']):
        component = position // grid.size
        coeffs[(component,) + grid.index(k)] = complex(re, im)
    return SpectralField(coeffs, real=data.get('real', False))


def field_to_bytes(f: SpectralField) -> bytes:
    header = struct.pack(vs.BINARY_HEADER_FORMAT, vs.BINARY_MAGIC, f.dim, f.components, f.trunc, int(f.real))
    return header + np.ascontiguousarray(f.coeffs, dtype=vs.BINARY_COEFF_DTYPE).tobytes()


def field_from_bytes(data: bytes) -> SpectralField:
    header_size = struct.calcsize(vs.BINARY_HEADER_FORMAT)
    magic, dim, components, trunc, real = struct.unpack(vs.BINARY_HEADER_FORMAT, data[:header_size])
    if magic != vs.BINARY_MAGIC:
        raise ValueError(f'Not a spectral field file: bad magic {magic!r}')
    shape = (components,) + get_grid(dim, trunc).shape
    body = np.frombuffer(data, dtype=vs.BINARY_COEFF_DTYPE, offset=header_size)
    if body.size != int(np.prod(shape)):
        raise ShapeMismatchError(f'Expected {int(np.prod(shape))} coefficients, got {body.size}')
    return SpectralField(body.reshape(shape).astype(np.complex128), real=bool(real))


def write_field(f: SpectralField, path: Path):
    """Writes ``f`` as json if ``path`` ends with ``.json``, in the binary format otherwise."""
    path = Path(path)
    if path.suffix == '.json':
        write_json(path, field_to_json(f))
    else:
        write_bytes_atomically(path, field_to_bytes(f))


def read_field(path: Path) -> SpectralField:
    path = Path(path)
    if path.suffix == '.json':
        return field_from_json(read_json(path))
    return field_from_bytes(path.read_bytes())
