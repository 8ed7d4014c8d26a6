"""Fourier transforms on uniform grids symmetric about 0.

Convention: f^(p) = (2 pi)^-1/2 int f(x) e^{ipx} dx, with inverse
g(x) = (2 pi)^-1/2 int psi(p) e^{-ipx} dp. Momentum nodes sit at
(k - (n-1)/2) dp so the grid is closed under p -> -p; position nodes sit at
(j - n/2) dx with dx = 2 pi / (n dp).
"""
import numpy as np

SQRT2PI = np.sqrt(2 * np.pi)


def momentum_nodes(n, dp):
    return (np.arange(n) - (n - 1) / 2) * dp


def position_nodes(n, dp):
    dx = 2 * np.pi / (n * dp)
    return (np.arange(n) - n // 2) * dx


def _phases(n):
    c = (n - 1) / 2
    k = np.arange(n)
    pre = (-1.0) ** k
    post = np.exp(-1j * np.pi * c) * np.exp(2j * np.pi * c * k / n)
    return pre, post


def inverse_ft(values, dp, axis=0):
    """Samples of the inverse transform on position_nodes(n, dp)."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    pre, post = _phases(n)
    shape = [1] * values.ndim
    shape[axis] = n
    out = np.fft.fft(values * pre.reshape(shape), axis=axis)
    return out * post.reshape(shape) * dp / SQRT2PI


def forward_ft(samples, dp, axis=0):
    """Inverse of inverse_ft: momentum samples from position samples."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[axis]
    pre, post = _phases(n)
    shape = [1] * samples.ndim
    shape[axis] = n
    dx = 2 * np.pi / (n * dp)
    out = np.fft.ifft(samples / post.reshape(shape), axis=axis) * n
    return out / pre.reshape(shape) * dx / SQRT2PI


def bspline_ft(p, center, half_width, order=4):
    """Transform of the unit-mass B-spline of given order on [center - hw, center + hw]."""
    p = np.asarray(p)  # complex p allowed: the transform is entire
    arg = p * half_width / order
    return np.exp(1j * p * center) * np.sinc(arg / np.pi) ** order / SQRT2PI


def bump_derivative_ft(p, center, half_width, order=4):
    """Transform of the derivative of the B-spline bump: -ip f^(p)."""
    return -1j * np.asarray(p) * bspline_ft(p, center, half_width, order)
