"""FFT helpers for periodic samples on a uniform grid of [0, 2pi)."""

import numpy as np


def conjugate_function(u: np.ndarray) -> np.ndarray:
    """Harmonic conjugate on the circle: multiplier ``-i sign(k)``, mean and Nyquist dropped."""
    n = len(u)
    U = np.fft.rfft(u)
    V = -1j * U
    V[0] = 0
    if n % 2 == 0:
        V[-1] = 0
    return np.fft.irfft(V, n)


def spectral_derivative(u: np.ndarray) -> np.ndarray:
    n = len(u)
    U = np.fft.rfft(u)
    k = np.arange(len(U))
    D = 1j * k * U
    if n % 2 == 0:
        D[-1] = 0
    return np.fft.irfft(D, n)


def trig_coefficients(u: np.ndarray) -> np.ndarray:
    """Real-signal coefficients in rfft layout, normalised for :func:`trig_eval`."""
    n = len(u)
    c = np.fft.rfft(u) / n
    c[1:] *= 2
    if n % 2 == 0:
        c[-1] /= 2
    return c


def trig_eval(coef: np.ndarray, x, deriv: int = 0, chunk: int = 4096) -> np.ndarray:
    """Evaluate the real trigonometric interpolant with rfft-layout ``coef`` at ``x``."""
    x = np.asarray(x, float)
    flat = x.ravel()
    k = np.arange(len(coef))
    ck = coef * (1j * k) ** deriv
    out = np.empty(flat.shape)
    for lo in range(0, len(flat), chunk):
        e = np.exp(1j * np.outer(flat[lo:lo + chunk], k))
        out[lo:lo + chunk] = (e @ ck).real
    return out.reshape(x.shape)
