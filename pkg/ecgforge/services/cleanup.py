"""
Servicio de limpieza de salidas parciales
"""
import logging
import os

logger = logging.getLogger(__name__)


class OutputCleanupService:
    """Registra los archivos escritos por una muestra y los elimina si la muestra falla"""

    def __init__(self, folder_path):
        """
        Inicializa el servicio de limpieza

        Args:
            folder_path (str): Carpeta raíz de la tarea
        """
        self.folder_path = folder_path
        self.written = []

    def path(self, relative_path):
        """
        Resuelve una ruta relativa, crea su carpeta y la registra

        Args:
            relative_path (str): Ruta relativa a la carpeta de la tarea

        Returns:
            str: Ruta absoluta
        """
        full_path = os.path.join(self.folder_path, relative_path)
        os.makedirs(os.path.dirname(full_path), exist_ok=True)
        self.written.append(full_path)
        return full_path

    def rollback(self):
        """
        Elimina los archivos registrados

        Returns:
            int: Número de archivos eliminados
        """
        deleted_count = 0
        for filepath in self.written:
            if not os.path.isfile(filepath):
                continue
            try:
                os.remove(filepath)
                deleted_count += 1
            except OSError as e:
                logger.error("Error al eliminar %s: %s", filepath, e)
        if deleted_count > 0:
            logger.info("Limpieza completada: %d archivo(s) parcial(es) eliminado(s)", deleted_count)
        self.written = []
        return deleted_count


def get_folder_stats(folder_path):
    """
    Obtiene estadísticas de una carpeta de dataset (recursivo)

    Args:
        folder_path (str): Carpeta

    Returns:
        dict: Estadísticas de la carpeta
    """
    if not os.path.exists(folder_path):
        return {
            'exists': False,
            'file_count': 0,
            'total_size_mb': 0
        }

    file_count = 0
    total_size = 0
    for root, _, filenames in os.walk(folder_path):
        for filename in filenames:
            file_count += 1
            total_size += os.path.getsize(os.path.join(root, filename))

    return {
        'exists': True,
        'file_count': file_count,
        'total_size_mb': round(total_size / (1024 * 1024), 2),
    }


def list_files(folder_path):
    """Rutas relativas (con '/') de todos los archivos bajo la carpeta, ordenadas"""
    paths = []
    for root, _, filenames in os.walk(folder_path):
        for filename in filenames:
            relative = os.path.relpath(os.path.join(root, filename), folder_path)
            paths.append(relative.replace(os.sep, '/'))
    return sorted(paths)
