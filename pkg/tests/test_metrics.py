import math

import numpy as np
import pytest

from ogsdeblur.metrics import psnr, quality, relative_error


def test_psnr_identical_is_inf(rng):
    x = rng.random((5, 5))
    assert psnr(x, x) == math.inf


def test_psnr_uniform_error():
    ref = np.full((16, 16), 0.5)
    assert psnr(ref + 0.1, ref) == pytest.approx(20.0, abs=1e-12)


def test_psnr_max_intensity_scaling():
    ref = np.zeros((4, 4))
    assert psnr(ref + 25.5, ref, 255.0) == pytest.approx(20.0, abs=1e-12)


def test_psnr_monotone(rng):
    ref = rng.random((8, 8))
    direction = rng.standard_normal((8, 8))
    values = [psnr(ref + t * direction, ref) for t in (0.01, 0.02, 0.05, 0.1, 0.5)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_relative_error_examples(rng):
    ref = rng.random((6, 6)) + 0.1
    assert relative_error(ref, ref) == 0.0
    assert relative_error(2 * ref, ref) == pytest.approx(1.0, abs=1e-15)
    assert relative_error(np.zeros_like(ref), ref) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        relative_error(ref, np.zeros_like(ref))


def test_relative_error_scale_covariance(rng):
    ref = rng.random((6, 6)) + 0.1
    delta = 0.01 * rng.standard_normal((6, 6))
    base = relative_error(ref + delta, ref)
    for c in (0.5, 3.0, -2.0):
        assert relative_error(c * ref + delta, c * ref) == pytest.approx(base / abs(c), rel=1e-12)


def test_quality_report(rng):
    ref = rng.random((4, 4))
    q = quality(ref + 0.1, ref)
    assert q.psnr_db == pytest.approx(20.0) and q.relative_error > 0 and q.max_intensity == 1.0


def test_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((2, 2)), np.zeros((2, 3)))
