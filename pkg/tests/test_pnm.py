import numpy as np
import pytest

from ogsdeblur import pnm


def test_roundtrip_within_quantization(tmp_path, rng):
    grid = rng.random((13, 17))
    path = tmp_path / "x.pgm"
    pnm.write_image(grid, path)
    back = pnm.read_image(path)
    assert back.shape == (13, 17)
    assert np.max(np.abs(back - grid)) <= 1 / 255 / 2 + 1e-12


def test_ascii_and_binary_agree(tmp_path, rng):
    grid = rng.random((9, 6))
    pnm.write_image(grid, tmp_path / "a.pgm", ascii=True)
    pnm.write_image(grid, tmp_path / "b.pgm")
    np.testing.assert_array_equal(pnm.read_image(tmp_path / "a.pgm"), pnm.read_image(tmp_path / "b.pgm"))


def test_write_clamps():
    data = pnm.encode_pgm(np.array([[-0.5, 0.5, 1.7]]))
    assert data.endswith(bytes([0, 128, 255]))


def test_header_comments_and_maxval():
    data = b"P2\n# a comment\n3 1 # trailing\n15\n0 15 5\n"
    np.testing.assert_allclose(pnm.decode_pgm(data), [[0.0, 1.0, 1 / 3]])


def test_binary_raster_may_start_with_whitespace_byte():
    data = b"P5 2 1 255\n" + bytes([10, 32])
    np.testing.assert_allclose(pnm.decode_pgm(data), [[10 / 255, 32 / 255]])


@pytest.mark.parametrize("data,msg", [
    (b"P6\n2 2\n255\n" + bytes(12), "grayscale only"),
    (b"P5\n2 2\n65535\n" + bytes(8), "maxval"),
    (b"P5\n2 2\n255\n" + bytes(3), "truncated"),
    (b"P5\n2\n", "truncated"),
    (b"P5\nx 2\n255\n", "malformed"),
    (b"GIF89a", "not a PGM"),
    (b"P2\n2 1\n255\n3 300\n", "exceeds maxval"),
])
def test_malformed(data, msg):
    with pytest.raises(pnm.ImageFormatError, match=msg):
        pnm.decode_pgm(data)


def test_oversized_header_rejected():
    with pytest.raises(pnm.ImageFormatError, match="limit"):
        pnm.decode_pgm(b"P5\n100000 100000\n255\n")


def test_color_png_rejected(tmp_path):
    Image = pytest.importorskip("PIL.Image")
    path = tmp_path / "rgb.png"
    Image.new("RGB", (4, 4)).save(path)
    with pytest.raises(pnm.ImageFormatError, match="grayscale only"):
        pnm.read_image(path)


def test_gray_png_read(tmp_path):
    Image = pytest.importorskip("PIL.Image")
    path = tmp_path / "g.png"
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    Image.fromarray(arr).save(path)
    np.testing.assert_allclose(pnm.read_image(path), arr / 255.0)
