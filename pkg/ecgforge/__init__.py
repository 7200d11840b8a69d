"""
Paquete principal de ECGForge
Generador de páginas ECG sintéticas con etiquetas para digitalización,
detección y segmentación. Expone el servidor de vista previa mediante el
patrón Factory
"""
from flask import Flask
from flask_cors import CORS
from flask_limiter import Limiter
from flask_limiter.util import get_remote_address
from config.settings import config

__version__ = '1.0.0'

# Inicializar extensiones
limiter = Limiter(
    key_func=get_remote_address,
    default_limits=["2000 per day", "200 per hour"],
    storage_uri="memory://"
)


def create_app(config_name='default', dataset_root=None):
    """
    Factory pattern para crear el servidor de vista previa

    Args:
        config_name (str): Nombre de la configuración ('development', 'production', 'testing', 'default')
        dataset_root (str): Carpeta con los datasets generados; por defecto DATASET_ROOT

    Returns:
        Flask: Aplicación Flask configurada
    """
    app = Flask(__name__)

    # Cargar configuración
    app.config.from_object(config[config_name])
    config[config_name].init_app(app)
    if dataset_root is not None:
        app.config['DATASET_ROOT'] = dataset_root

    # Configurar CORS (solo lectura)
    CORS(app, origins=app.config['CORS_ORIGINS'])

    # Inicializar Rate Limiter
    limiter.init_app(app)

    register_blueprints(app)

    # Aplicar headers de seguridad
    from ecgforge.utils.security import init_security
    init_security(app)

    register_error_handlers(app)

    app.logger.info("Servidor de vista previa sobre %s", app.config['DATASET_ROOT'])
    return app


def register_blueprints(app):
    """
    Registra todos los blueprints de la aplicación

    Args:
        app (Flask): Instancia de la aplicación Flask
    """
    from ecgforge.routes.main_routes import main_bp
    from ecgforge.routes.dataset_routes import datasets_bp
    from ecgforge.routes.preview_routes import preview_bp

    app.register_blueprint(main_bp)
    app.register_blueprint(datasets_bp, url_prefix='/datasets')
    app.register_blueprint(preview_bp, url_prefix='/preview')

    app.logger.debug("Blueprints registrados correctamente")


def register_error_handlers(app):
    """
    Registra manejadores de errores con cuerpo JSON

    Args:
        app (Flask): Instancia de la aplicación Flask
    """
    from ecgforge.errors import EcgForgeError

    @app.errorhandler(EcgForgeError)
    def ecgforge_error(error):
        return {'error': str(error), 'type': type(error).__name__}, 400

    @app.errorhandler(400)
    def bad_request_error(error):
        return {'error': getattr(error, 'description', 'Solicitud inválida')}, 400

    @app.errorhandler(404)
    def not_found_error(error):
        return {'error': 'Recurso no encontrado'}, 404

    @app.errorhandler(500)
    def internal_error(error):
        return {'error': 'Error interno del servidor'}, 500

    @app.errorhandler(413)
    def request_entity_too_large(error):
        return {'error': 'Solicitud demasiado grande'}, 413

    @app.errorhandler(429)
    def ratelimit_handler(error):
        return {'error': 'Demasiadas solicitudes. Por favor, espera un momento.'}, 429
