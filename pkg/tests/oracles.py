"""Slow, loop-based reference implementations used only by the tests.

None of these touch an FFT or the vectorized window sums of the package.
"""

import numpy as np


def periodic_convolve(kernel, f, center):
    """out[i, j] = sum_{a, b} kernel[a, b] * f[i - (a - ca), j - (b - cb)] (mod size)."""
    h, w = f.shape
    kh, kw = kernel.shape
    ca, cb = center
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            s = 0.0
            for a in range(kh):
                for b in range(kw):
                    s += kernel[a, b] * f[(i - (a - ca)) % h, (j - (b - cb)) % w]
            out[i, j] = s
    return out


def dense_operator(fn, shape):
    """Matrix of a linear map on images, columns ordered row-major."""
    n = shape[0] * shape[1]
    m = np.zeros((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        m[:, k] = fn(e.reshape(shape)).ravel()
    return m


def grad_x_loop(f):
    h, w = f.shape
    out = np.empty_like(f)
    for i in range(h):
        for j in range(w):
            nxt = f[i + 1, j] if i < h - 1 else f[0, j]
            out[i, j] = nxt - f[i, j]
    return out


def grad_y_loop(f):
    return grad_x_loop(f.T).T


def group_norm_sum_loop(v, K):
    kl, kr = (K - 1) // 2, K // 2
    h, w = v.shape
    total = 0.0
    for i in range(h):
        for j in range(w):
            s = 0.0
            for a in range(-kl, kr + 1):
                for b in range(-kl, kr + 1):
                    if 0 <= i + a < h and 0 <= j + b < w:
                        s += v[i + a, j + b] ** 2
            total += np.sqrt(s)
    return total


def lambda_sq_loop(u, K, floor):
    """Diagonal of Lambda(u)^2: for every group q containing pixel p, add
    max(e(q), floor)^(-1/2); groups are centered inside the image and their
    samples are zero outside it."""
    kl, kr = (K - 1) // 2, K // 2
    h, w = u.shape
    out = np.zeros((h, w))
    for pi in range(h):
        for pj in range(w):
            acc = 0.0
            for i in range(-kl, kr + 1):
                for j in range(-kl, kr + 1):
                    qi, qj = pi - i, pj - j
                    if not (0 <= qi < h and 0 <= qj < w):
                        continue
                    e = 0.0
                    for k1 in range(-kl, kr + 1):
                        for k2 in range(-kl, kr + 1):
                            ri, rj = qi + k1, qj + k2
                            if 0 <= ri < h and 0 <= rj < w:
                                e += abs(u[ri, rj]) ** 2
                    acc += max(e, floor) ** -0.5
            out[pi, pj] = acc
    return out
