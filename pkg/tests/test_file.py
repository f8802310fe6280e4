'''
CHQF field file tests
'''

### Imports ###

import numpy as np
import pytest

from choquard.common.errors import GridError
from choquard.common.file import FieldFile, decode_field, encode_field
from choquard.common.grid import Grid, gaussian



### Fixtures ###

@pytest.fixture
def encoded():
    return encode_field(gaussian(Grid(2, 16, 6.0)))



### Tests ###

def test_write_read(tmp_path):
    field = gaussian(Grid(3, 8, 4.0))
    path = str(tmp_path / 'sub' / 'u.chqf')
    FieldFile(path).write(field)
    again = FieldFile(path).read()
    assert again.grid == field.grid
    assert np.array_equal(again.values, field.values)
    assert [entry.name for entry in (tmp_path / 'sub').iterdir()] == ['u.chqf']

@pytest.mark.parametrize('keep', [0, 3, 5, 6, 17])
def test_truncated_header(encoded, keep):
    with pytest.raises(GridError):
        decode_field(encoded[:keep])

@pytest.mark.parametrize('cut', [1, 3, 8, 16 * 8])
def test_truncated_payload(encoded, cut):
    with pytest.raises(GridError):
        decode_field(encoded[:-cut])

def test_trailing_bytes(encoded):
    with pytest.raises(GridError):
        decode_field(encoded + b'\0' * 8)

def test_bad_magic(encoded):
    with pytest.raises(GridError):
        decode_field(b'CHQX' + encoded[4:])

def test_bad_axis_table(encoded):
    '''
    M = 12 in the header is not a valid grid
    '''
    data = bytearray(encoded)
    data[6:10] = (12).to_bytes(4, 'little')
    data[18:22] = (12).to_bytes(4, 'little')
    with pytest.raises(GridError):
        decode_field(bytes(data))
