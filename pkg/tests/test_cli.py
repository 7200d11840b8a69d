import csv
import os

from click.testing import CliRunner

from ecgforge.cli import EXIT_CONFIG, EXIT_PARTIAL, cli
from ecgforge.services.signals import save_csv, synth_record


def _generate(runner, *args):
    return runner.invoke(cli, ['generate', '--quiet', '--threads', '1', *args])


def test_generate_digitization(tmp_path):
    runner = CliRunner()
    out = tmp_path / 'out'
    result = _generate(runner, '--task', 'digitization', '--count', '2', '--out', str(out))
    assert result.exit_code == 0, result.output
    assert 'digitization: 2 fila(s)' in result.output
    assert (out / 'digitization' / 'manifest.csv').is_file()


def test_config_file_and_flag_precedence(tmp_path):
    config_path = tmp_path / 'run.cfg'
    config_path.write_text('task = detection\ncount = 10\nlayouts = 12x1\n')
    result = _generate(CliRunner(), '--config', str(config_path), '--count', '3', '--out', str(tmp_path / 'out'))
    assert result.exit_code == 0, result.output
    with open(tmp_path / 'out' / 'detection' / 'manifest.csv', encoding='utf-8') as manifest_file:
        assert len(manifest_file.read().splitlines()) == 2 + 3


def test_bad_config_exits_with_config_code(tmp_path):
    config_path = tmp_path / 'bad.cfg'
    config_path.write_text('row_height_boxes = -1\n')
    result = _generate(CliRunner(), '--config', str(config_path), '--out', str(tmp_path / 'out'))
    assert result.exit_code == EXIT_CONFIG
    assert not (tmp_path / 'out').exists()

    config_path.write_text('colour = red\n')
    assert _generate(CliRunner(), '--config', str(config_path)).exit_code == EXIT_CONFIG


def test_row_height_applies_to_overlap(tmp_path):
    result = _generate(CliRunner(), '--task', 'overlap', '--count', '1', '--row-height', '6', '--out', str(tmp_path))
    assert result.exit_code == EXIT_CONFIG


def test_partial_failure(tmp_path):
    inputs = tmp_path / 'inputs'
    inputs.mkdir()
    save_csv(synth_record(1), str(inputs / 'a_long.csv'))
    save_csv(synth_record(2, duration_s=3.0), str(inputs / 'b_short.csv'))
    result = _generate(
        CliRunner(), '--task', 'segmentation', '--layout', '12x1', '--count', '2',
        '--input', str(inputs), '--input-format', 'csv', '--out', str(tmp_path / 'out'),
    )
    assert result.exit_code == EXIT_PARTIAL
    assert 'b_short' in result.output


def test_verify_segmentation_output(tmp_path):
    runner = CliRunner()
    out = tmp_path / 'out'
    result = _generate(runner, '--task', 'segmentation', '--layout', '3x4', '--count', '1', '--out', str(out))
    assert result.exit_code == 0, result.output

    report = tmp_path / 'report.csv'
    result = runner.invoke(cli, ['verify', '--task-dir', str(out / 'segmentation'), '--report', str(report)])
    assert result.exit_code == 0, result.output
    with open(report, newline='') as report_file:
        rows = list(csv.DictReader(report_file))
    assert len(rows) == 13
    assert sum(row['lead'].endswith('_rhythm') for row in rows) == 1


def test_verify_rejects_foreign_directory(tmp_path):
    os.makedirs(tmp_path / 'empty')
    result = CliRunner().invoke(
        cli, ['verify', '--task-dir', str(tmp_path / 'empty'), '--report', str(tmp_path / 'r.csv')],
    )
    assert result.exit_code == EXIT_CONFIG


def test_version():
    result = CliRunner().invoke(cli, ['--version'])
    assert result.exit_code == 0
    assert 'ecgforge' in result.output
