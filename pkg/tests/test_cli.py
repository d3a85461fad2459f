import csv
import io
import math

import pytest
from loguru import logger

from inverse_moments import cli
from inverse_moments.errors import CalibrationError
from inverse_moments.exact_oracle import poisson_inverse_moment_direct


@pytest.fixture(autouse=True)
def release_log_sink():
    # main() points loguru at the captured stderr of the running test
    yield
    logger.remove()


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compute_text(capsys):
    code, out, _ = run(capsys, 'compute', '--N', '10', '--p', '0.1', '--order', '2')
    assert code == cli.EXIT_OK
    assert 'N=10 p=0.1 r=1 order=2 flavor=barbour' in out
    assert 'barbour_bound' in out


def test_compute_csv(capsys):
    code, out, _ = run(capsys, 'compute', '--N', '2', '--p', '0.5', '--order', '1', '--format', 'csv')
    assert code == cli.EXIT_OK
    [row] = csv_rows(out)
    assert float(row['exact']) == pytest.approx(0.625, abs=1e-12)
    assert float(row['abs_err']) == pytest.approx(abs(float(row['approximation']) - 0.625), abs=1e-12)
    assert 'barbour_bound' not in row


def test_compute_taylor_has_no_bound(capsys):
    code, out, _ = run(capsys, 'compute', '--N', '10', '--p', '0.1', '--flavor', 'taylor', '--format', 'csv')
    assert code == cli.EXIT_OK
    assert 'barbour_bound' not in csv_rows(out)[0]


def test_usage_errors_exit_with_one(capsys):
    with pytest.raises(SystemExit) as exit_info:
        cli.main(['compute', '--N', 'ten', '--p', '0.5'])
    assert exit_info.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exit_info:
        cli.main([])
    assert exit_info.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exit_info:
        cli.main(['sweep', '--N', '10', '--grid', '0:1'])
    assert exit_info.value.code == cli.EXIT_USAGE


def test_domain_errors_exit_with_two(capsys):
    code, _, err = run(capsys, 'compute', '--N', '10', '--p', '1.5')
    assert code == cli.EXIT_INPUT
    assert 'error:' in err
    code, _, _ = run(capsys, 'compute', '--N', '10', '--p', '0.5', '--order', '9')
    assert code == cli.EXIT_INPUT
    code, _, _ = run(capsys, 'poisson-table', '--mu', '0')
    assert code == cli.EXIT_INPUT


def test_calibrate(capsys):
    code, out, _ = run(capsys, 'calibrate', '--r', '1', '--target', '1e-5', '--format', 'csv')
    assert code == cli.EXIT_OK
    [row] = csv_rows(out)
    assert (row['M1'], row['M2']) == ('31', '10')
    assert float(row['mu_star']) == pytest.approx(13.671, abs=0.5)
    assert float(row['max_validated_error']) < 1e-5


def test_calibration_failure_exits_with_three(capsys, monkeypatch):
    def fail(r, target):
        raise CalibrationError(r, target, 3e-4, 'no usable term count')

    monkeypatch.setattr(cli, 'calibrate_crossover', fail)
    code, _, err = run(capsys, 'calibrate', '--r', '2', '--target', '1e-8')
    assert code == cli.EXIT_CALIBRATION
    assert 'best achieved error 0.0003' in err


def test_alpha_table(capsys):
    code, out, _ = run(capsys, 'alpha-table', '--max', '7')
    assert code == cli.EXIT_OK
    for value in ('13/36', '229/540', '223/630', '1/128'):
        assert value in out

    code, out, _ = run(capsys, 'alpha-table', '--max', '3', '--format', 'csv')
    rows = csv_rows(out)
    assert len(rows) == 4
    assert rows[1]['j=2'] == '1/3'
    assert rows[2]['j=1'] == '1/4'
    assert rows[3]['j=1'] == ''


def test_poisson_table(capsys):
    code, out, _ = run(capsys, 'poisson-table', '--r', '2', '--mu', '0.5,1,20', '--format', 'csv')
    assert code == cli.EXIT_OK
    rows = csv_rows(out)
    assert [float(row['mu']) for row in rows] == [0.5, 1.0, 20.0]
    for row in rows:
        mu = float(row['mu'])
        f = float(row['f_r'])
        assert f == pytest.approx(poisson_inverse_moment_direct(mu, 2).value, rel=1e-9)
        assert float(row['f_r_over_mu']) == pytest.approx(f / mu, rel=1e-15)
        assert float(row['exp_minus_mu']) == pytest.approx(math.exp(-mu), rel=1e-15)


def test_poisson_inverse(capsys):
    code, out, _ = run(capsys, 'poisson-inverse', '--mu', '1', '--a', '1', '--r', '1', '--format', 'csv')
    assert code == cli.EXIT_OK
    [row] = csv_rows(out)
    assert float(row['value']) == pytest.approx(1 - math.exp(-1), abs=1e-12)


def test_sweep_to_file(capsys, tmp_path):
    path = tmp_path / 'sweep.csv'
    code, out, _ = run(capsys, 'sweep', '--N', '10', '--orders', '1-2', '--grid', '0.1:1:5', '--error-kind', 'abs',
                       '--out', str(path))
    assert code == cli.EXIT_OK
    assert out == ''
    rows = csv_rows(path.read_text())
    assert len(rows) == 5
    assert list(rows[0]) == ['p', 'exact', 'charlier_m1', 'charlier_m2', 'charlier_m1_abs_err', 'charlier_m2_abs_err']


def test_sweep_all_methods_to_stdout(capsys):
    code, out, _ = run(capsys, 'sweep', '--N', '10', '--method', 'all', '--orders', '1,6', '--terms', '1,5',
                       '--grid', '0.5:1:3', '--error-kind', 'rel')
    assert code == cli.EXIT_OK
    header = next(csv.reader(io.StringIO(out)))
    assert header[2:9] == ['stephan_M1', 'stephan_M5', 'rempala_M1', 'rempala_M5', 'znidaric_M1', 'znidaric_M5',
                           'charlier_m1']


def test_sweep_to_unwritable_path(capsys, tmp_path):
    code, _, err = run(capsys, 'sweep', '--N', '4', '--orders', '1', '--grid', '0.5:1:2',
                       '--out', str(tmp_path / 'missing' / 'sweep.csv'))
    assert code == cli.EXIT_INPUT
    assert 'error:' in err


def test_sweep_invalid_config_exits_with_two(capsys):
    code, _, _ = run(capsys, 'sweep', '--N', '5', '--method', 'rempala', '--terms', '1-10', '--grid', '0.5:1:2')
    assert code == cli.EXIT_INPUT


def test_poisson_inverse_at_tiny_mu(capsys):
    code, out, _ = run(capsys, 'poisson-inverse', '--mu', '1e-200', '--a', '12', '--r', '2', '--format', 'csv')
    assert code == cli.EXIT_OK
    [row] = csv_rows(out)
    assert float(row['value']) == pytest.approx(1 / 144, rel=1e-9)
