"""
Interfaz de línea de comandos de ECGForge
"""
import os

import click
from werkzeug.serving import WSGIRequestHandler

from config.pipeline_config import INPUT_FORMATS, TASKS, load_config
from ecgforge import __version__, create_app
from ecgforge.errors import ConfigError, EcgForgeError, InvalidArgument
from ecgforge.services.pipeline import run_task
from ecgforge.services.verify import verify_task_dir, write_report

EXIT_PARTIAL = 1
EXIT_CONFIG = 2


@click.group()
@click.version_option(version=__version__, prog_name='ecgforge')
def cli():
    """ECGForge: páginas ECG sintéticas con etiquetas alineadas al píxel."""


@cli.command()
@click.option('--task', type=click.Choice(TASKS), default=None, help='Dataset a generar.')
@click.option('--layout', 'layouts', default=None, help="Layout o lista separada por comas (p. ej. '3x4,12x1').")
@click.option('--count', type=int, default=None, help='Número de muestras.')
@click.option('--seed', type=int, default=None, help='Semilla global.')
@click.option('--input', 'input_dir', type=click.Path(file_okay=False), default=None,
              help='Carpeta con registros de entrada.')
@click.option('--input-format', type=click.Choice(INPUT_FORMATS), default=None)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None, help='Carpeta de salida.')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='Archivo clave = valor.')
@click.option('--row-height', type=float, default=None, help='Cajas grandes por fila.')
@click.option('--px-per-box', type=int, default=None, help='Píxeles por caja grande.')
@click.option('--no-grid', is_flag=True, default=False)
@click.option('--no-names', is_flag=True, default=False)
@click.option('--jpeg', is_flag=True, default=False, help='Imágenes de visualización en JPEG.')
@click.option('--rhythm/--no-rhythm', default=None, help='Tira de ritmo en 3x4 y 6x2.')
@click.option('--no-rhythm-name', is_flag=True, default=False)
@click.option('--threads', type=int, default=None, help='Procesos de trabajo; ECGFORGE_THREADS fija el máximo y el valor por defecto.')
@click.option('--quiet', is_flag=True, default=False, help='Sin barra de progreso.')
def generate(task, layouts, count, seed, input_dir, input_format, out_dir, config_path, row_height, px_per_box,
             no_grid, no_names, jpeg, rhythm, no_rhythm_name, threads, quiet):
    """Genera un dataset."""
    overrides = {
        'task': task,
        'layouts': layouts,
        'count': count,
        'seed': seed,
        'input_dir': input_dir,
        'input_format': input_format,
        'out_dir': out_dir,
        'px_per_large_box': px_per_box,
        'show_grid': False if no_grid else None,
        'show_names': False if no_names else None,
        'jpeg': True if jpeg else None,
        'rhythm': rhythm,
        'rhythm_name': False if no_rhythm_name else None,
        'threads': threads,
    }
    try:
        cfg = load_config(config_path, overrides)
        if row_height is not None:
            key = 'overlap_row_height_boxes' if cfg.task == 'overlap' else 'row_height_boxes'
            cfg = load_config(config_path, {**overrides, key: row_height})
        report = run_task(cfg, show_progress=not quiet)
    except (ConfigError, InvalidArgument) as e:
        click.echo(f"Error de configuración: {e}", err=True)
        raise SystemExit(EXIT_CONFIG)
    except EcgForgeError as e:
        click.echo(f"Error: {e}", err=True)
        raise SystemExit(EXIT_PARTIAL)

    click.echo(f"{report.task}: {len(report.manifest.rows)} fila(s) en {report.task_dir}")
    if report.failures:
        for sample_id, reason in report.failures:
            click.echo(f"  FALLO {sample_id}: {reason}", err=True)
        raise SystemExit(EXIT_PARTIAL)


@cli.command()
@click.option('--task-dir', type=click.Path(exists=True, file_okay=False), required=True,
              help='Carpeta de una tarea de segmentación o solapamiento.')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), required=True,
              help='CSV de salida.')
def verify(task_dir, report_path):
    """Digitaliza las máscaras de una tarea y las compara con sus señales."""
    try:
        rows, errors = verify_task_dir(task_dir)
    except (EcgForgeError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        raise SystemExit(EXIT_CONFIG)

    write_report(rows, report_path)
    failed = [row for row in rows if not row.passed]
    click.echo(f"{len(rows)} recorte(s) verificados, {len(failed)} bajo umbral, {errors} error(es)")
    for row in failed:
        click.echo(f"  {row.record_id} {row.lead} {row.layout}: r={row.r} rmse={row.rmse_mv:.4f}", err=True)
    if failed or errors:
        raise SystemExit(EXIT_PARTIAL)


@cli.command()
@click.option('--root', type=click.Path(file_okay=False), default=None, help='Carpeta de datasets.')
@click.option('--host', default=None)
@click.option('--port', type=int, default=None)
@click.option('--env', 'env', default=lambda: os.getenv('FLASK_ENV', 'development'),
              type=click.Choice(['development', 'production', 'testing', 'default']))
def serve(root, host, port, env):
    """Servidor de vista previa de solo lectura."""
    # Ocultar la versión del servidor en Werkzeug
    WSGIRequestHandler.server_version = "WebServer"
    WSGIRequestHandler.sys_version = ""

    app = create_app(env, dataset_root=root)
    host = host or app.config['HOST']
    port = port or app.config['PORT']
    debug = env == 'development'

    click.echo(f"""
============================================================
         ECGForge - Servidor de vista previa
============================================================
  Entorno: {env.upper()}
  Raíz: {app.config['DATASET_ROOT']}
  Host: {host}
  Puerto: {port}
  Debug: {str(debug)}
============================================================
    """)
    app.run(host=host, port=port, debug=debug)


def main():
    cli(prog_name='ecgforge')
