'''
End-to-end command line tests
Each run writes into a pytest tmp_path and the outputs are read back
'''

### Imports ###

import csv
import json
import os

import pytest

from choquard.common.file import FieldFile
from choquard.common.solver import CONTINUATION_COLUMNS, LEVEL_COLUMNS

from tests.choquardtest import choquard_run, header_test, line_args



### Functions ###

def read_json(path):
    with open(path) as f:
        return json.load(f)

def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))

def line_config(tmp_path, **solver):
    '''
    Config file for the 1-D problem with nearby nodal seed bumps
    '''
    solver.setdefault('seed_offset', 1.5)
    path = tmp_path / 'line.json'
    path.write_text(json.dumps({'solver': solver}))
    return str(path)



### Tests ###

def test_groundstate(tmp_path):
    args = line_args('groundstate', tmp_path, '--p', '2.5')
    header_test('groundstate', args)
    assert choquard_run(args) == 0

    report = read_json(tmp_path / 'groundstate.json')
    assert report['status'] == 'ok'
    assert report['error'] is None
    assert report['mode'] == 'groundstate'
    assert report['params'] == {'dim': 1, 'alpha': 0.5, 'p': 2.5}
    assert report['reports'][0]['residual'] <= 1e-8
    assert report['certificate'] <= 1e-8

    field_path = report['reports'][0]['field_path']
    assert field_path == os.path.join(str(tmp_path), 'groundstate.chqf')
    field = FieldFile(field_path).read()
    assert field.grid.points_per_axis == 128

    config = read_json(tmp_path / 'config.json')
    assert config['problem']['p'] == 2.5
    assert config['mode'] == 'groundstate'

def test_validate_stored_field(tmp_path):
    solve_dir = tmp_path / 'solve'
    assert choquard_run(line_args('groundstate', solve_dir, '--p', '2.5')) == 0

    check_dir = tmp_path / 'check'
    args = line_args('validate', check_dir, '--p', '2.5', '--field', str(solve_dir / 'groundstate.chqf'))
    header_test('validate', args)
    assert choquard_run(args) == 0

    report = read_json(check_dir / 'validate.json')
    assert report['status'] == 'ok'
    assert report['diagnostics']['level_gap'] is None
    assert report['diagnostics']['sign_change'] is False
    assert report['certificate'] <= 1e-8
    solved = read_json(solve_dir / 'groundstate.json')
    assert report['energy']['action'] == pytest.approx(solved['reports'][0]['level'], rel=1e-12)

def test_validate_missing_field(tmp_path):
    args = line_args('validate', tmp_path, '--p', '2.5', '--field', str(tmp_path / 'nothing.chqf'))
    assert choquard_run(args) == 3

def test_validate_truncated_field(tmp_path):
    solve_dir = tmp_path / 'solve'
    assert choquard_run(line_args('groundstate', solve_dir, '--p', '2.5')) == 0
    damaged = tmp_path / 'damaged.chqf'
    damaged.write_bytes((solve_dir / 'groundstate.chqf').read_bytes()[:-3])

    args = line_args('validate', tmp_path / 'check', '--p', '2.5', '--field', str(damaged))
    header_test('validate truncated', args)
    assert choquard_run(args) == 3

def test_nodal(tmp_path):
    args = line_args('nodal', tmp_path, '--p', '2.5', '--config', line_config(tmp_path))
    header_test('nodal', args)
    assert choquard_run(args) == 0

    report = read_json(tmp_path / 'nodal.json')
    groundstate, nodal = report['reports']
    assert groundstate['level'] < nodal['level'] < 2 * groundstate['level']
    assert report['diagnostics']['passed'] is True
    assert os.path.isfile(str(tmp_path / 'nodal.chqf'))

def test_nodal_exploratory(tmp_path):
    args = line_args('nodal', tmp_path, '--p', '1.8')
    header_test('nodal exploratory', args)
    assert choquard_run(args) == 0

    report = read_json(tmp_path / 'nodal.json')
    assert report['reports'] == []
    assert report['exploratory']['p'] == 1.8
    assert report['diagnostics']['exploratory'] is True

def test_continuation_deterministic(tmp_path):
    '''
    Two identical runs give byte-identical tables
    '''
    tables = []
    for name in ('first', 'second'):
        output = tmp_path / name
        args = line_args(
            'continuation', output,
            '--config', line_config(tmp_path),
            '--p-schedule', '2.3', '2.1', '2.02',
        )
        header_test('continuation', args)
        assert choquard_run(args) == 0
        with open(str(output / 'continuation.csv'), 'rb') as f:
            tables.append(f.read())
    assert tables[0] == tables[1]

    rows = read_csv(tmp_path / 'first' / 'continuation.csv')
    assert rows[0] == CONTINUATION_COLUMNS
    assert [float(row[0]) for row in rows[1:]] == [2.3, 2.1, 2.02, 2.0]
    assert os.path.isfile(str(tmp_path / 'first' / 'continuation_p2.0.chqf'))

def test_levels(tmp_path):
    args = line_args('levels', tmp_path, '--p-values', '3.0', '2.5', '--jobs', '2')
    header_test('levels', args)
    assert choquard_run(args) == 0

    rows = read_csv(tmp_path / 'levels.csv')
    assert rows[0] == LEVEL_COLUMNS
    assert [float(row[0]) for row in rows[1:]] == [2.5, 3.0]
    assert all(float(row[1]) > 0 for row in rows[1:])

def test_convolve_bench(tmp_path):
    args = ['convolve-bench', '--dim', '1', '--alpha', '0.5', '--M', '64', '--L', '10',
            '--output-dir', str(tmp_path), '--color', 'never']
    header_test('convolve-bench', args)
    assert choquard_run(args) == 0

    bench = read_json(tmp_path / 'convolve-bench.json')['bench']
    assert bench['targets'] == 64
    assert bench['oracle_max_relative_error'] <= 1e-12

def test_config_error_exit(tmp_path):
    '''
    p = 5 at N = 3, alpha = 2 is outside the window
    '''
    args = ['groundstate', '--dim', '3', '--alpha', '2', '--p', '5', '--output-dir', str(tmp_path)]
    header_test('config error', args)
    assert choquard_run(args) == 3
    assert not os.path.exists(str(tmp_path / 'groundstate.json'))

def test_mistyped_config_exit(tmp_path):
    config = tmp_path / 'null.json'
    config.write_text(json.dumps({'problem': {'p': None}}))
    args = line_args('groundstate', tmp_path, '--config', str(config))
    header_test('mistyped config', args)
    assert choquard_run(args) == 3
    assert not os.path.exists(str(tmp_path / 'groundstate.json'))

def test_solver_error_exit(tmp_path):
    '''
    Iteration cap hit: exit 2, the report still records the failure
    '''
    args = line_args('groundstate', tmp_path, '--p', '2.5', '--config', line_config(tmp_path, max_iters=1))
    header_test('solver error', args)
    assert choquard_run(args) == 2

    report = read_json(tmp_path / 'groundstate.json')
    assert report['status'] == 'failed'
    assert report['error']['type'] == 'ConvergenceError'
    assert report['error']['iterations'] == 1
    assert not os.path.exists(str(tmp_path / 'groundstate.chqf'))

def test_emitter_none(tmp_path):
    args = line_args('groundstate', tmp_path, '--p', '2.5', '--emitter', 'none')
    assert choquard_run(args) == 0
    assert not os.path.exists(str(tmp_path / 'groundstate.json'))
