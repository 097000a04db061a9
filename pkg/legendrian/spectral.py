"""
Fourier tools on uniform periodic grids.

Samples are taken at s_j = j·L/N, j = 0..N-1, along axis 0; extra axes
(for instance the two components of a curve in C²) are carried along.
"""

import math
from typing import List

import numpy as np


def wavenumbers(count: int, period: float) -> np.ndarray:
    """Angular wavenumbers in numpy FFT order."""
    return 2.0 * math.pi * np.fft.fftfreq(count, d=period / count)


def _broadcast(factor: np.ndarray, values: np.ndarray) -> np.ndarray:
    return factor.reshape((-1,) + (1,) * (values.ndim - 1))


def _is_real(values: np.ndarray) -> bool:
    return not np.iscomplexobj(values)


def derivative(values: np.ndarray, period: float, order: int = 1) -> np.ndarray:
    """Spectral derivative of the given order; the Nyquist mode of odd orders is zeroed."""
    values = np.asarray(values)
    count = values.shape[0]
    kx = wavenumbers(count, period)
    symbol = (1j * kx) ** order
    if order % 2 == 1 and count % 2 == 0:
        symbol[count // 2] = 0.0
    result = np.fft.ifft(_broadcast(symbol, values) * np.fft.fft(values, axis=0), axis=0)
    return result.real if _is_real(values) else result


def jets(values: np.ndarray, period: float, order: int) -> List[np.ndarray]:
    """[u, u_s, ..., u_s^(order)] of a real periodic profile."""
    values = np.asarray(values, dtype=float)
    count = values.shape[0]
    kx = wavenumbers(count, period)
    spectrum = np.fft.fft(values)
    result = [values]
    for j in range(1, order + 1):
        symbol = (1j * kx) ** j
        if j % 2 == 1 and count % 2 == 0:
            symbol[count // 2] = 0.0
        result.append(np.fft.ifft(symbol * spectrum).real)
    return result


def integrate(values: np.ndarray, period: float):
    """∫₀ᴸ f ds by the trapezoid rule, which is spectrally accurate for periodic f."""
    return np.mean(np.asarray(values), axis=0) * period


def antiderivative(values: np.ndarray, period: float) -> np.ndarray:
    """F with F(0) = 0 and F' = f: mean·s plus the periodic primitive."""
    values = np.asarray(values)
    count = values.shape[0]
    kx = wavenumbers(count, period)
    spectrum = np.fft.fft(values, axis=0)
    mean = spectrum[0] / count
    inverse = np.zeros_like(kx, dtype=complex)
    nonzero = kx != 0.0
    inverse[nonzero] = 1.0 / (1j * kx[nonzero])
    if count % 2 == 0:
        inverse[count // 2] = 0.0
    periodic = np.fft.ifft(_broadcast(inverse, values) * spectrum, axis=0)
    periodic = periodic - periodic[0]
    nodes = np.arange(count) * period / count
    result = periodic + _broadcast(nodes, values) * mean
    return result.real if _is_real(values) else result


def shift(values: np.ndarray, period: float, delta: float) -> np.ndarray:
    """Trigonometric interpolant evaluated at s_j + delta."""
    values = np.asarray(values)
    count = values.shape[0]
    kx = wavenumbers(count, period)
    phase = np.exp(1j * kx * delta)
    if count % 2 == 0:
        phase[count // 2] = math.cos(kx[count // 2] * delta)
    result = np.fft.ifft(_broadcast(phase, values) * np.fft.fft(values, axis=0), axis=0)
    return result.real if _is_real(values) else result


def evaluate(values: np.ndarray, period: float, points: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Trigonometric interpolant of the samples evaluated at arbitrary points."""
    values = np.asarray(values)
    points = np.asarray(points, dtype=float)
    count = values.shape[0]
    kx = wavenumbers(count, period)
    spectrum = np.fft.fft(values, axis=0) / count
    if count % 2 == 0:
        # split the Nyquist mode evenly between ±N/2 so real data stays real
        kx = np.append(kx, -kx[count // 2])
        half = spectrum[count // 2] / 2.0
        spectrum = np.concatenate([spectrum, half[None, ...]], axis=0)
        spectrum[count // 2] = half
    out = []
    for start in range(0, points.size, chunk):
        basis = np.exp(1j * np.outer(points[start:start + chunk], kx))
        out.append(basis @ spectrum)
    result = np.concatenate(out, axis=0) if out else np.zeros((0,) + values.shape[1:], dtype=complex)
    return result.real if _is_real(values) else result


def restrict_period(values: np.ndarray, divisor: int) -> np.ndarray:
    """
    Resample an L-periodic profile that is also L/divisor-periodic onto
    the same number of nodes spread over one sub-period L/divisor.
    """
    values = np.asarray(values)
    count = values.shape[0]
    spectrum = np.fft.fft(values, axis=0)
    modes = np.fft.fftfreq(count, d=1.0 / count).astype(int)
    restricted = np.zeros_like(spectrum)
    for index, mode in enumerate(modes):
        if mode % divisor == 0:
            target = mode // divisor
            restricted[target % count] += spectrum[index]
    result = np.fft.ifft(restricted, axis=0)
    return result.real if _is_real(values) else result


def significant_modes(values: np.ndarray, tolerance: float) -> List[int]:
    """Signed mode numbers whose amplitude exceeds tolerance × the largest non-constant amplitude."""
    values = np.asarray(values)
    count = values.shape[0]
    spectrum = np.abs(np.fft.fft(values, axis=0)) / count
    if spectrum.ndim > 1:
        spectrum = spectrum.reshape(count, -1).max(axis=1)
    modes = np.fft.fftfreq(count, d=1.0 / count).astype(int)
    spectrum[0] = 0.0
    peak = spectrum.max()
    if peak == 0.0:
        return []
    return [int(mode) for mode, amp in zip(modes, spectrum) if amp > tolerance * peak]
