import pytest

from config.pipeline_config import PipelineConfig, load_config, parse_config_text
from config.settings import config
from ecgforge.errors import ConfigTypeError, UnknownConfigKey


def test_defaults(tmp_path):
    empty = tmp_path / 'empty.cfg'
    empty.write_text('')
    cfg = load_config(str(empty), {'threads': 1})
    assert cfg.task == 'digitization'
    assert cfg.task_layouts == ('3x1', '3x4', '6x2', '12x1')
    assert cfg.row_height_boxes == 6.0
    assert cfg.splits == (0.8, 0.1, 0.1)
    assert cfg.px_per_large_box == 20


def test_cli_overrides_file(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('# tamaño\ncount = 10\nseed = 3  # comentario\n')
    assert load_config(str(path)).count == 10
    cfg = load_config(str(path), {'count': 5, 'seed': None})
    assert cfg.count == 5
    assert cfg.seed == 3


def test_invariant_violation(tmp_path):
    path = tmp_path / 'bad.cfg'
    path.write_text('row_height_boxes = -1\n')
    with pytest.raises(ConfigTypeError):
        load_config(str(path))


def test_unknown_key():
    with pytest.raises(UnknownConfigKey):
        parse_config_text('rows = 3\n')
    with pytest.raises(UnknownConfigKey):
        load_config(None, {'nope': 1})


@pytest.mark.parametrize('text', ['count = many', 'show_grid = maybe', 'waveform_color = #12', 'seed', 'count = 10#x'])
def test_type_errors(text):
    with pytest.raises(ConfigTypeError):
        parse_config_text(text)


def test_typed_values():
    values = parse_config_text(
        'show_grid = no\nlayouts = 3x4, 12x1\nwaveform_color = #0000ff\ntext_color = 10,20,30\ntarget_fs = none\n'
    )
    assert values == {
        'show_grid': False,
        'layouts': ('3x4', '12x1'),
        'waveform_color': (0, 0, 255),
        'text_color': (10, 20, 30),
        'target_fs': None,
    }


def test_overlap_defaults_to_12x1():
    cfg = load_config(None, {'task': 'overlap', 'threads': 1})
    assert cfg.task_layouts == ('12x1',)
    with pytest.raises(ConfigTypeError):
        load_config(None, {'task': 'overlap', 'overlap_row_height_boxes': 6.0})


def test_split_fractions_must_sum_to_one():
    with pytest.raises(ConfigTypeError):
        load_config(None, {'train_split': 0.9, 'val_split': 0.2, 'test_split': 0.0})


def test_input_format_requires_dir():
    with pytest.raises(ConfigTypeError):
        load_config(None, {'input_format': 'wfdb'})
    with pytest.raises(ConfigTypeError):
        load_config(None, {'input_dir': 'data'})


def test_unknown_layout():
    with pytest.raises(ConfigTypeError):
        load_config(None, {'layouts': '4x3'})


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv('ECGFORGE_THREADS', '3')
    assert PipelineConfig().threads == 3


def test_environment_configs():
    assert config['testing'].TESTING
    assert not config['testing'].RATELIMIT_ENABLED
    assert config['default'] is config['development']


def test_comments_and_hex_colors(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text(
        '# colores\n'
        'waveform_color = #0000ff\n'
        'background_color = #ffffff  # fondo\n'
        'count = 12 # muestras\n'
    )
    cfg = load_config(str(path), {'threads': 1})
    assert cfg.waveform_color == (0, 0, 255)
    assert cfg.background_color == (255, 255, 255)
    assert cfg.count == 12


def test_out_dir_from_environment(monkeypatch):
    monkeypatch.setenv('ECGFORGE_OUT_DIR', 'datasets')
    assert PipelineConfig().out_dir == 'datasets'


def test_threads_capped_by_environment(monkeypatch):
    monkeypatch.setenv('ECGFORGE_THREADS', '2')
    assert load_config(None, {'threads': 8}).threads == 2
    assert load_config(None, {'threads': 1}).threads == 1
