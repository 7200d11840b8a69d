"""
Fuente de mapa de bits 5x7 para los nombres de derivación
"""
import numpy as np

GLYPH_WIDTH = 5
GLYPH_HEIGHT = 7

_GLYPH_ROWS = {
    'I': (
        " ### ",
        "  #  ",
        "  #  ",
        "  #  ",
        "  #  ",
        "  #  ",
        " ### ",
    ),
    'V': (
        "#   #",
        "#   #",
        "#   #",
        "#   #",
        "#   #",
        " # # ",
        "  #  ",
    ),
    'a': (
        "     ",
        "     ",
        " ### ",
        "    #",
        " ####",
        "#   #",
        " ####",
    ),
    'R': (
        "#### ",
        "#   #",
        "#   #",
        "#### ",
        "# #  ",
        "#  # ",
        "#   #",
    ),
    'L': (
        "#    ",
        "#    ",
        "#    ",
        "#    ",
        "#    ",
        "#    ",
        "#####",
    ),
    'F': (
        "#####",
        "#    ",
        "#    ",
        "#### ",
        "#    ",
        "#    ",
        "#    ",
    ),
    '1': (
        "  #  ",
        " ##  ",
        "  #  ",
        "  #  ",
        "  #  ",
        "  #  ",
        " ### ",
    ),
    '2': (
        " ### ",
        "#   #",
        "    #",
        "   # ",
        "  #  ",
        " #   ",
        "#####",
    ),
    '3': (
        "#####",
        "   # ",
        "  #  ",
        "   # ",
        "    #",
        "#   #",
        " ### ",
    ),
    '4': (
        "   # ",
        "  ## ",
        " # # ",
        "#  # ",
        "#####",
        "   # ",
        "   # ",
    ),
    '5': (
        "#####",
        "#    ",
        "#### ",
        "    #",
        "    #",
        "#   #",
        " ### ",
    ),
    '6': (
        "  ## ",
        " #   ",
        "#    ",
        "#### ",
        "#   #",
        "#   #",
        " ### ",
    ),
}


def _to_bitmap(rows):
    bitmap = np.array([[ch == '#' for ch in row] for row in rows], dtype=bool)
    bitmap.setflags(write=False)
    return bitmap


GLYPHS = {char: _to_bitmap(rows) for char, rows in _GLYPH_ROWS.items()}


def glyph(char, scale=1):
    """Mapa de bits de un carácter escalado por `scale` (None si no existe)"""
    bitmap = GLYPHS.get(char)
    if bitmap is None:
        return None
    if scale == 1:
        return bitmap
    return np.kron(bitmap, np.ones((scale, scale), dtype=bool)).astype(bool)
