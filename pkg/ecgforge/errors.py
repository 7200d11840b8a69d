"""
Jerarquía de excepciones de ECGForge
"""


class EcgForgeError(Exception):
    """Error base de la aplicación"""


# Señales
class SignalError(EcgForgeError):
    """Error al cargar o transformar un registro"""


class ParseError(SignalError):
    """Archivo de entrada mal formado"""

    def __init__(self, message, line=None, row=None, col=None):
        self.line = line
        self.row = row
        self.col = col
        where = []
        if line is not None:
            where.append(f"línea {line}")
        if row is not None:
            where.append(f"fila {row}")
        if col is not None:
            where.append(f"columna {col}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UnsupportedFormat(SignalError):
    """Formato de almacenamiento WFDB no soportado"""


class TruncatedData(SignalError):
    """El archivo .dat no coincide con el encabezado"""


class UnknownLead(SignalError):
    """Nombre de derivación desconocido"""


class MissingLead(SignalError):
    """Falta una de las 12 derivaciones"""


class InvalidArgument(SignalError, ValueError):
    """Argumento fuera de rango"""


# Layout
class LayoutError(EcgForgeError):
    """Error de geometría de página"""


class InvalidLayout(LayoutError):
    """Nombre de layout desconocido"""


class OutOfWindow(LayoutError):
    """Tiempo fuera de la ventana de la celda"""


# Render
class RenderError(EcgForgeError):
    """Error al rasterizar una página"""


class RecordTooShort(RenderError):
    """El registro no cubre las ventanas del layout"""


class UnsupportedGlyph(RenderError):
    """Carácter sin glifo en la fuente embebida"""


# Anotaciones
class AnnotationError(EcgForgeError):
    """Error al calcular cajas YOLO"""


class EmptyTrace(AnnotationError):
    """La derivación no pintó ningún píxel"""


class NameNotRendered(AnnotationError):
    """El nombre de la derivación no se dibujó"""


class OutOfBounds(AnnotationError):
    """Caja fuera de la imagen"""


# Máscaras
class MaskError(EcgForgeError):
    """Error al recortar o binarizar máscaras"""


class InvalidCrop(MaskError):
    """Rectángulo de recorte degenerado"""


class NotTwoTone(MaskError):
    """La máscara contiene valores distintos de 0 y 255"""


class EmptyMask(MaskError):
    """La máscara no tiene primer plano"""


# Verificación
class VerifyError(EcgForgeError):
    """Error en la verificación de digitalización"""


class UndefinedCorrelation(VerifyError):
    """Correlación indefinida por señal constante; solo hay RMSE"""

    def __init__(self, rmse_mv):
        self.rmse_mv = rmse_mv
        super().__init__(f"Correlación indefinida (RMSE {rmse_mv:.6f} mV)")


# Configuración
class ConfigError(EcgForgeError):
    """Error de configuración"""


class UnknownConfigKey(ConfigError):
    """Clave de configuración desconocida"""


class ConfigTypeError(ConfigError):
    """Valor de configuración inválido"""


class EncodeError(EcgForgeError):
    """No se pudo codificar la imagen"""
