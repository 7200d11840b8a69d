"""
Rutas de consulta de datasets generados (solo lectura)
"""
import os

from flask import Blueprint, abort, current_app, jsonify, send_file

from ecgforge.errors import ParseError
from ecgforge.services.cleanup import get_folder_stats
from ecgforge.services.manifest import MANIFEST_NAME, Manifest
from ecgforge.utils.security import resolve_inside, validate_task_name

# Crear blueprint
datasets_bp = Blueprint('datasets', __name__)


def _root():
    return current_app.config['DATASET_ROOT']


def _read_manifest(task):
    if not validate_task_name(task):
        abort(404)
    path = os.path.join(_root(), task, MANIFEST_NAME)
    if not os.path.isfile(path):
        abort(404)
    try:
        return Manifest.read(path)
    except ParseError as e:
        current_app.logger.error("Manifiesto ilegible %s: %s", path, e)
        abort(404)


@datasets_bp.route('/')
def list_datasets():
    """
    Lista las tareas generadas bajo la raíz con su número de filas
    """
    root = _root()
    datasets = []
    if os.path.isdir(root):
        for task in sorted(os.listdir(root)):
            manifest_path = os.path.join(root, task, MANIFEST_NAME)
            if not validate_task_name(task) or not os.path.isfile(manifest_path):
                continue
            try:
                rows = len(Manifest.read(manifest_path).rows)
            except ParseError:
                continue
            datasets.append({
                'task': task,
                'rows': rows,
                'stats': get_folder_stats(os.path.join(root, task)),
            })
    return jsonify({'root': root, 'datasets': datasets}), 200


@datasets_bp.route('/<task>/manifest')
def manifest(task):
    """
    Filas del manifiesto de una tarea
    """
    data = _read_manifest(task)
    return jsonify({'task': data.task, 'columns': list(data.columns), 'rows': data.rows}), 200


@datasets_bp.route('/<task>/files/<path:relative_path>')
def download_file(task, relative_path):
    """
    Entrega un archivo de la tarea; nunca fuera de su carpeta
    """
    if not validate_task_name(task):
        abort(404)
    full_path = resolve_inside(os.path.join(_root(), task), relative_path)
    if full_path is None:
        abort(404)
    return send_file(full_path)
