"""
Módulo de configuración de ECGForge
"""

from .settings import Config, config
from .pipeline_config import PipelineConfig, load_config

__all__ = ['Config', 'config', 'PipelineConfig', 'load_config']
