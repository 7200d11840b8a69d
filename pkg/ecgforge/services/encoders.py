"""
Servicio de codificación de imágenes
PNG, BMP indexado de 8 bits y JPEG opcional mediante Pillow
"""
import io
import os

import numpy as np
from PIL import Image

from ecgforge.errors import EncodeError
from ecgforge.services.raster import RasterImage

PNG_COMPRESS_LEVEL = 6
JPEG_QUALITY = 95

# Paleta gris de 256 entradas; en máscaras binarias la entrada 1 es blanca
GRAY_PALETTE = [value for i in range(256) for value in (i, i, i)]
BINARY_PALETTE = [0, 0, 0, 255, 255, 255] + GRAY_PALETTE[6:]


def _to_pil(image):
    if image.channels == 1:
        return Image.frombytes('L', (image.width, image.height), image.tobytes())
    if image.channels == 3:
        return Image.frombytes('RGB', (image.width, image.height), image.tobytes())
    raise EncodeError(f"Número de canales no soportado: {image.channels}")


def encode_png(image):
    """
    Codifica en PNG de 8 bits (gris o RGB), sin entrelazado

    Args:
        image (RasterImage): Imagen a codificar

    Returns:
        bytes: Archivo PNG
    """
    buffer = io.BytesIO()
    _to_pil(image).save(buffer, format='PNG', optimize=False, compress_level=PNG_COMPRESS_LEVEL)
    return buffer.getvalue()


def encode_bmp(image, binary=False):
    """
    Codifica en BMP indexado de 8 bits con paleta de 256 entradas

    Las filas se guardan de abajo arriba con relleno a 4 bytes. Las
    máscaras binarias conservan los valores 0 y 1 como índices.

    Args:
        image (RasterImage): Imagen en escala de grises
        binary (bool): Usar la paleta de máscara binaria (1 = blanco)

    Returns:
        bytes: Archivo BMP
    """
    if image.channels != 1:
        raise EncodeError(f"BMP indexado requiere 1 canal, recibido {image.channels}")
    indexed = Image.frombytes('P', (image.width, image.height), image.tobytes())
    indexed.putpalette(BINARY_PALETTE if binary else GRAY_PALETTE)
    buffer = io.BytesIO()
    indexed.save(buffer, format='BMP')
    return buffer.getvalue()


def encode_jpeg(image, quality=JPEG_QUALITY):
    """Codifica en JPEG (con pérdida; fuera de las pruebas de alineación)"""
    buffer = io.BytesIO()
    _to_pil(image).save(buffer, format='JPEG', quality=quality)
    return buffer.getvalue()


def decode_image(data):
    """
    Decodifica bytes PNG/BMP/JPEG a RasterImage

    Las imágenes indexadas devuelven sus índices de paleta.
    """
    with Image.open(io.BytesIO(data)) as img:
        if img.mode not in ('L', 'P', 'RGB'):
            img = img.convert('RGB')
        return RasterImage(np.array(img, dtype=np.uint8))


def load_image(path):
    with open(path, 'rb') as image_file:
        return decode_image(image_file.read())


def write_image(image, path, fmt='png', binary=False):
    """
    Codifica y guarda una imagen

    Args:
        image (RasterImage): Imagen
        path (str): Ruta de salida
        fmt (str): 'png', 'bmp' o 'jpeg'
        binary (bool): Paleta binaria para BMP

    Returns:
        str: Ruta escrita
    """
    if fmt == 'png':
        data = encode_png(image)
    elif fmt == 'bmp':
        data = encode_bmp(image, binary=binary)
    elif fmt in ('jpg', 'jpeg'):
        data = encode_jpeg(image)
    else:
        raise EncodeError(f"Formato de imagen desconocido: {fmt}")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'wb') as image_file:
        image_file.write(data)
    return path
