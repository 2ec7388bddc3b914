import io

import pytest

from dualcert.cli import CSV_COLUMNS, _int_list, main, read_csv


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_bounds_sparse():
    code, text = run('bounds', '--model', 'sparse', '--n', '256', '--s', '4',
                     '--beta', '2')
    assert code == 0
    assert 'm_threshold=93\n' in text
    assert 'success_prob_lower=0.759472808\n' in text


def test_bounds_block_and_lowrank():
    code, text = run('bounds', '--model', 'block', '--M', '64', '--B', '4',
                     '--k', '3', '--beta', '2')
    assert code == 0 and 'm_threshold=227\n' in text
    assert 'success_prob_lower=0.375\n' in text
    code, text = run('bounds', '--model', 'lowrank', '--n1', '40', '--n2', '40',
                     '--r', '2', '--beta', '1.5')
    assert code == 0 and 'm_threshold=690\n' in text
    assert 'success_prob_lower=0.835830003\n' in text


def test_bounds_sign():
    code, text = run('bounds', '--model', 'sparse', '--n', '256', '--s', '4',
                     '--beta', '2', '--ensemble', 'sign', '--eps', '0.1')
    assert code == 0 and 'm_threshold=114\n' in text


def test_bounds_domain_error(capsys):
    code, _ = run('bounds', '--model', 'sparse', '--n', '256', '--s', '4',
                  '--beta', '1')
    assert code == 1
    assert 'beta must exceed 1' in capsys.readouterr().err


def test_missing_layout(capsys):
    code, _ = run('bounds', '--model', 'sparse', '--n', '256', '--beta', '2')
    assert code == 1 and '--s' in capsys.readouterr().err


def test_certify():
    code, text = run('certify', '--model', 'lowrank', '--n1', '40', '--n2', '40',
                     '--r', '2', '--m', '700', '--seed', '1')
    assert 'd_T=156\n' in text
    assert code in (0, 2)
    assert ('certified=true' in text) == (code == 0)


def test_certify_m_too_small(capsys):
    code, _ = run('certify', '--model', 'sparse', '--n', '64', '--s', '4',
                  '--m', '2')
    assert code == 1 and 'm < dim(T)' in capsys.readouterr().err


def test_solve_exit_codes():
    code, text = run('solve', '--model', 'sparse', '--n', '256', '--s', '4',
                     '--m', '93', '--seed', '0')
    assert code == 0 and 'converged=true' in text
    code, _ = run('solve', '--model', 'sparse', '--n', '256', '--s', '4',
                  '--m', '10', '--seed', '0', '--max-iter', '50')
    assert code == 3
    code, _ = run('solve', '--model', 'sparse', '--n', '256', '--s', '4',
                  '--m', '93', '--rho', '0')
    assert code == 1


def test_int_list():
    assert _int_list('40:110:10') == [40, 50, 60, 70, 80, 90, 100, 110]
    assert _int_list('1,5, 7') == [1, 5, 7]
    assert _int_list('3:5') == [3, 4, 5]


def test_sweep_csv(tmp_path):
    path = tmp_path / 'a.csv'
    argv = ['sweep', '--model', 'sparse', '--n', '64', '--s', '3',
            '--m', '40:110:10', '--trials', '5', '--seed', '2', '-o']
    code, text = run(*argv, str(path))
    assert code in (0, 2)
    lines = path.read_text().splitlines()
    assert lines[0] == ','.join(CSV_COLUMNS)
    assert len(lines) == 9
    again = tmp_path / 'b.csv'
    run(*argv, str(again), '--threads', '1')
    assert path.read_bytes() == again.read_bytes()

    rows = read_csv(path)
    assert [r['m'] for r in rows] == list(range(40, 111, 10))
    assert all(r['trials'] == 5 and 0 <= r['cert_successes'] <= 5 for r in rows)
    assert all(r['solver_successes'] is None for r in rows)


def test_sweep_empty_grid(tmp_path, capsys):
    code, _ = run('sweep', '--model', 'sparse', '--n', '64', '--s', '3',
                  '--m', '50:40', '--trials', '5', '-o', str(tmp_path / 'x.csv'))
    assert code == 1 and 'empty grid' in capsys.readouterr().err


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        main(['frobnicate'])
