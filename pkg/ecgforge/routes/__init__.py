"""
Módulo de rutas del servidor de vista previa
"""

from .main_routes import main_bp
from .dataset_routes import datasets_bp
from .preview_routes import preview_bp

__all__ = ['main_bp', 'datasets_bp', 'preview_bp']
