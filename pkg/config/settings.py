"""
Configuración general de ECGForge (variables de entorno)
"""
import os
from dotenv import load_dotenv

# Cargar variables de entorno desde .env
load_dotenv()


def env_out_dir():
    """Carpeta de salida por defecto (ECGFORGE_OUT_DIR)"""
    return os.getenv('ECGFORGE_OUT_DIR', 'out')


def env_threads_cap():
    """Tope de procesos de ECGFORGE_THREADS, o None si no está definido"""
    value = os.getenv('ECGFORGE_THREADS')
    return int(value) if value else None


class Config:
    """Configuración base del servidor de vista previa y del pipeline"""

    # Configuración básica de Flask
    SECRET_KEY = os.getenv('SECRET_KEY', 'default-secret-key-change-this')
    FLASK_ENV = os.getenv('FLASK_ENV', 'production')
    DEBUG = FLASK_ENV == 'development'
    TESTING = False

    # Pipeline
    LOG_LEVEL = os.getenv('ECGFORGE_LOG_LEVEL', 'INFO').upper()
    DATASET_ROOT = os.getenv('ECGFORGE_DATASET_ROOT') or env_out_dir()

    # Servidor
    HOST = os.getenv('HOST', '127.0.0.1')
    PORT = int(os.getenv('PORT', 5000))
    MAX_CONTENT_LENGTH = 1 * 1024 * 1024  # Sin subidas; solo consultas
    JSON_SORT_KEYS = False

    # CORS
    CORS_ORIGINS = os.getenv('CORS_ORIGINS', '*').split(',')

    # Rate Limiting
    RATELIMIT_ENABLED = True
    RATELIMIT_STORAGE_URI = "memory://"
    RATELIMIT_STRATEGY = "fixed-window"
    PREVIEW_RATE_LIMIT = os.getenv('ECGFORGE_PREVIEW_RATE_LIMIT', '30 per minute')

    # Límites de la vista previa
    PREVIEW_MAX_PX_PER_BOX = 60
    PREVIEW_MAX_ROW_HEIGHT = 12

    @staticmethod
    def init_app(app):
        """Inicialización adicional de la aplicación"""
        pass


class DevelopmentConfig(Config):
    """Configuración para desarrollo"""
    DEBUG = True


class ProductionConfig(Config):
    """Configuración para producción"""
    DEBUG = False


class TestingConfig(Config):
    """Configuración para pruebas"""
    TESTING = True
    RATELIMIT_ENABLED = False


# Diccionario de configuraciones
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
