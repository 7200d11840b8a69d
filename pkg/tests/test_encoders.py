import io
import struct

import numpy as np
import pytest
from PIL import Image

from ecgforge.errors import EncodeError
from ecgforge.services.encoders import decode_image, encode_bmp, encode_jpeg, encode_png, load_image, write_image
from ecgforge.services.layout import make_layout
from ecgforge.services.raster import RasterImage, render_page
from ecgforge.services.signals import synth_record


def test_one_pixel_bmp_layout():
    data = encode_bmp(RasterImage(np.zeros((1, 1), dtype=np.uint8)))
    # 14 + 40 bytes de cabecera, 256 entradas de paleta y una fila rellenada a 4 bytes
    assert len(data) == 14 + 40 + 1024 + 4
    assert data[:2] == b'BM'
    file_size, offset = struct.unpack('<I', data[2:6])[0], struct.unpack('<I', data[10:14])[0]
    assert file_size == len(data)
    assert offset == 1078
    assert struct.unpack('<H', data[28:30])[0] == 8


def test_bmp_rows_are_bottom_up():
    pixels = np.array([[0, 255, 0], [255, 0, 255]], dtype=np.uint8)
    data = encode_bmp(RasterImage(pixels))
    offset = struct.unpack('<I', data[10:14])[0]
    # Cada fila de 3 bytes se rellena a 4; la primera fila en disco es la de abajo
    assert data[offset:offset + 3] == bytes([255, 0, 255])
    assert data[offset + 4:offset + 7] == bytes([0, 255, 0])


def test_binary_bmp_keeps_raw_values():
    mask = np.array([[1, 0, 1, 1], [0, 0, 1, 0]], dtype=np.uint8)
    decoded = decode_image(encode_bmp(RasterImage(mask), binary=True))
    assert decoded.pixels.tolist() == mask.tolist()
    with Image.open(io.BytesIO(encode_bmp(RasterImage(mask), binary=True))) as img:
        assert img.convert('L').getpixel((0, 0)) == 255


def test_png_round_trip_is_pixel_identical():
    page, _ = render_page(synth_record(2), make_layout('3x4', rhythm=True))
    with Image.open(io.BytesIO(encode_png(page))) as img:
        assert img.mode == 'RGB'
        assert img.info.get('interlace', 0) == 0
        assert np.array_equal(np.array(img), page.pixels)

    gray = page.to_grayscale()
    assert np.array_equal(decode_image(encode_png(gray)).pixels, gray.pixels)


def test_png_is_deterministic():
    page, _ = render_page(synth_record(3), make_layout('6x2'))
    assert encode_png(page) == encode_png(page)


def test_unsupported_channels():
    with pytest.raises(EncodeError):
        encode_png(RasterImage(np.zeros((2, 2, 2), dtype=np.uint8)))
    with pytest.raises(EncodeError):
        encode_bmp(RasterImage(np.zeros((2, 2, 3), dtype=np.uint8)))


def test_write_and_load(tmp_path):
    image = RasterImage(np.arange(12, dtype=np.uint8).reshape(3, 4))
    path = write_image(image, str(tmp_path / 'nested' / 'img.bmp'), 'bmp')
    assert np.array_equal(load_image(path).pixels, image.pixels)
    with pytest.raises(EncodeError):
        write_image(image, str(tmp_path / 'img.gif'), 'gif')


def test_jpeg_is_optional_lossy_output():
    page, _ = render_page(synth_record(2), make_layout('3x1'))
    data = encode_jpeg(page)
    assert data[:2] == b'\xff\xd8'
    assert decode_image(data).pixels.shape == page.pixels.shape
