"""
Rutas generales de la API
"""
from flask import Blueprint, jsonify

from ecgforge.services.annotate import CLASS_NAMES
from ecgforge.services.layout import LAYOUT_NAMES

# Crear blueprint
main_bp = Blueprint('main', __name__)


@main_bp.route('/')
def index():
    """
    Descripción del servicio y de sus rutas
    """
    return jsonify({
        'name': 'ECGForge',
        'layouts': list(LAYOUT_NAMES),
        'endpoints': [
            '/api/health',
            '/api/classes',
            '/datasets/',
            '/datasets/<task>/manifest',
            '/datasets/<task>/files/<path>',
            '/preview/page.png',
            '/preview/labels',
        ],
    }), 200


@main_bp.route('/api/health')
def health_check():
    """
    Endpoint de verificación de salud de la API
    """
    from ecgforge import __version__

    return jsonify({
        'status': 'ok',
        'message': 'ECGForge preview API is running',
        'version': __version__
    }), 200


@main_bp.route('/api/classes')
def classes():
    """
    Clases YOLO en el orden de classes.txt
    """
    return jsonify({'classes': [{'id': i, 'name': name} for i, name in enumerate(CLASS_NAMES)]}), 200
