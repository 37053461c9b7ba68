"""Grayscale image I/O.

PGM (binary ``P5`` and ASCII ``P2``, maxval up to 255) is handled natively.
Intensities map to ``[0, 1]`` by ``v / maxval`` on read and
``round(255 * clip(v, 0, 1))`` on write.  Other formats are read through
Pillow when it is installed.
"""

from pathlib import Path

import numpy as np

MAX_PIXELS = 4096 * 4096


class ImageFormatError(ValueError):
    pass


def _tokens(data):
    """Yield (token, end_offset) pairs from a PNM header, skipping comments."""
    i, n = 0, len(data)
    while i < n:
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
                j += 1
            yield data[i:j], j
            i = j


def decode_pgm(data):
    tokens = _tokens(data)
    try:
        magic, _ = next(tokens)
        if magic in (b"P3", b"P6"):
            raise ImageFormatError("grayscale only: got a 3-channel PPM image")
        if magic not in (b"P2", b"P5"):
            raise ImageFormatError(f"not a PGM file (magic {magic!r})")
        width, _ = next(tokens)
        height, _ = next(tokens)
        maxval, end = next(tokens)
        width, height, maxval = int(width), int(height), int(maxval)
    except StopIteration:
        raise ImageFormatError("truncated PGM header") from None
    except ValueError as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise ImageFormatError(f"malformed PGM header: {exc}") from None

    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid dimensions {width}x{height}")
    if width * height > MAX_PIXELS:
        raise ImageFormatError(f"image {width}x{height} exceeds the {MAX_PIXELS}-pixel limit")
    if not 1 <= maxval <= 255:
        raise ImageFormatError(f"unsupported maxval {maxval}; only 8-bit PGM is supported")

    count = width * height
    if magic == b"P5":
        raster = data[end + 1:end + 1 + count]
        if len(raster) != count:
            raise ImageFormatError("truncated PGM raster")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        try:
            values = np.array(data[end:].split()[:count], dtype=np.int64)
        except ValueError:
            raise ImageFormatError("non-numeric sample in ASCII PGM") from None
        if values.size != count:
            raise ImageFormatError("truncated PGM raster")
    if values.max(initial=0) > maxval:
        raise ImageFormatError("sample exceeds maxval")
    return values.reshape(height, width).astype(np.float64) / maxval


def quantize(grid):
    return np.rint(255.0 * np.clip(np.asarray(grid, dtype=np.float64), 0.0, 1.0)).astype(np.uint8)


def encode_pgm(grid, ascii=False):
    q = quantize(grid)
    h, w = q.shape
    if ascii:
        rows = "\n".join(" ".join(map(str, row)) for row in q.tolist())
        return f"P2\n{w} {h}\n255\n{rows}\n".encode("ascii")
    return f"P5\n{w} {h}\n255\n".encode("ascii") + q.tobytes()


def _read_with_pillow(path):
    try:
        from PIL import Image
    except ImportError:
        raise ImageFormatError(
            f"{path.suffix} images need Pillow (pip install Pillow); PGM is always supported"
        ) from None
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA", "CMYK", "YCbCr", "LAB", "HSV", "P"):
            raise ImageFormatError("grayscale only: input has multiple channels")
        if im.width * im.height > MAX_PIXELS:
            raise ImageFormatError(f"image {im.width}x{im.height} exceeds the pixel limit")
        if im.mode in ("L", "1"):
            return np.asarray(im.convert("L"), dtype=np.float64) / 255.0
        if im.mode in ("I;16", "I;16B", "I;16L", "I"):
            return np.asarray(im, dtype=np.float64) / 65535.0
        raise ImageFormatError(f"unsupported image mode {im.mode}")


def read_image(path):
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P2", b"P5", b"P3", b"P6") or path.suffix.lower() in (".pgm", ".pnm"):
        return decode_pgm(data)
    return _read_with_pillow(path)


def write_image(grid, path, ascii=False):
    Path(path).write_bytes(encode_pgm(grid, ascii=ascii))
