"""
Utilidades de seguridad para el servidor de vista previa
Validación de identificadores y rutas, y headers de seguridad
"""
import os
import re

from werkzeug.security import safe_join

TASK_NAME_PATTERN = r'^[a-z_]+$'


def validate_task_name(task):
    """
    Valida el nombre de una carpeta de tarea

    Args:
        task (str): Nombre recibido en la URL

    Returns:
        bool: True si el nombre es válido
    """
    return bool(re.match(TASK_NAME_PATTERN, task or ''))


def resolve_inside(root, relative_path):
    """
    Resuelve una ruta relativa sin salir de la carpeta raíz

    Args:
        root (str): Carpeta raíz
        relative_path (str): Ruta recibida en la URL

    Returns:
        str: Ruta absoluta de un archivo existente, o None si no es segura o no existe
    """
    joined = safe_join(os.path.abspath(root), relative_path)
    if joined is None or not os.path.isfile(joined):
        return None
    return joined


class SecurityHeaders:
    """
    Clase para manejar headers de seguridad
    """

    @staticmethod
    def get_default_headers():
        """
        Obtiene los headers de seguridad por defecto

        Returns:
            dict: Headers de seguridad
        """
        return {
            # Prevenir MIME sniffing
            'X-Content-Type-Options': 'nosniff',

            # Prevenir clickjacking
            'X-Frame-Options': 'SAMEORIGIN',

            # El servidor solo entrega JSON, texto e imágenes
            'Content-Security-Policy': (
                "default-src 'none'; "
                "img-src 'self' data:; "
                "frame-ancestors 'none'; "
                "base-uri 'none';"
            ),

            'Referrer-Policy': 'strict-origin-when-cross-origin',
            'Permissions-Policy': 'geolocation=(), microphone=(), camera=()'
        }

    @staticmethod
    def apply_to_response(response):
        """
        Aplica los headers de seguridad a una respuesta

        Args:
            response: Objeto de respuesta de Flask

        Returns:
            response: Respuesta con headers aplicados
        """
        if 'Server' in response.headers:
            del response.headers['Server']
        for header, value in SecurityHeaders.get_default_headers().items():
            response.headers[header] = value
        return response


def init_security(app):
    """
    Inicializa los headers de seguridad en la aplicación

    Args:
        app: Instancia de Flask
    """

    @app.after_request
    def add_security_headers(response):
        """Aplica headers de seguridad a todas las respuestas"""
        return SecurityHeaders.apply_to_response(response)

    app.logger.debug("Headers de seguridad aplicados")


__all__ = [
    'validate_task_name',
    'resolve_inside',
    'SecurityHeaders',
    'init_security'
]
