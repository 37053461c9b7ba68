import os
from pathlib import Path

import numpy as np
import pytest

from ogsdeblur import pnm

DATA_DIR = Path(__file__).parent / "data"


def _user_cameraman():
    env = os.environ.get("OGSDEBLUR_CAMERAMAN")
    candidates = [Path(env)] if env else []
    candidates += [DATA_DIR / f"cameraman.{ext}" for ext in ("pgm", "tif", "tiff", "png")]
    for path in candidates:
        if path.is_file():
            return path
    return None


def load_cameraman():
    """Return ``(image, source description)`` or ``(None, reason)``.

    A user-supplied 256x256 Cameraman (``$OGSDEBLUR_CAMERAMAN`` or
    ``tests/data/cameraman.*``) wins.  Otherwise the 512x512 camera photograph
    bundled with scikit-image is decimated by two.
    """
    path = _user_cameraman()
    if path is not None:
        img = pnm.read_image(path)
        if img.shape != (256, 256):
            return None, f"{path} is {img.shape}, expected 256x256"
        return img, f"user-supplied {path}"
    try:
        from skimage import data
    except ImportError:
        return None, "no Cameraman image supplied and scikit-image is not installed"
    return data.camera()[::2, ::2] / 255.0, "scikit-image camera() decimated 2x to 256x256"


@pytest.fixture(scope="session")
def cameraman():
    img, source = load_cameraman()
    if img is None:
        pytest.skip(f"Cameraman unavailable: {source}")
    return img


@pytest.fixture
def rng():
    return np.random.default_rng(20140501)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdicts(request):
    """List collecting one ``PASS``/``FAIL`` line per acceptance criterion."""
    return request.config.stash[_VERDICTS]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
