"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

# omega rows per vectorized block; bounds the temporary to ~64 MB at n = 2**16
_BLOCK = 64


def regulated_dft(samples, x0, dx, weight, omega):
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    if weight.shape[0] != samples.shape[0]:
        raise ValueError("weight and samples differ in length")
    x = x0 + dx * np.arange(samples.shape[0])
    v = samples * weight
    out = np.empty(omega.shape[0], dtype=np.complex128)
    for i in range(0, omega.shape[0], _BLOCK):
        w = omega[i:i + _BLOCK]
        out[i:i + _BLOCK] = np.exp(-1j * np.outer(w, x)) @ v
    return out * dx


def phase_increments(samples):
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    return np.angle(samples[1:] * np.conj(samples[:-1]))


def accumulate_abs2(acc, samples):
    if acc.shape[0] != samples.shape[0]:
        raise ValueError("accumulator and samples differ in length")
    acc += samples.real * samples.real + samples.imag * samples.imag
