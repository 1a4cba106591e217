"""Shared numerical kernels: convolution, Toeplitz matrices, least squares,
and a deterministic seeded Gaussian stream.

All routines are pure and bit-reproducible for fixed inputs. Convolution
accumulates kernel taps in ascending index order; a matrix-vector product
with a convolution matrix reproduces the same floating-point sums when the
columns are accumulated in ascending order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, ShapeError, SingularSystemError
from .validation import as_float_vector, check_int_at_least

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
# (k + 0.5) * 2**-53 maps a 53-bit integer k into the open interval (0, 1).
_U53 = 2.0 ** -53


@dataclass(frozen=True)
class DenseMatrix:
    """Row-major dense real matrix."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.array, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"matrix must be 2-D, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "array", arr)

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the entries."""
        return self.array.reshape(-1)


def convolve(a, b) -> np.ndarray:
    """Full linear convolution of two nonempty sequences.

    Output length is len(a) + len(b) - 1. Each output element accumulates
    the kernel taps b[0], b[1], ... in that order, which fixes the
    floating-point result exactly.
    """
    a = as_float_vector(a, "a")
    b = as_float_vector(b, "b")
    out = np.zeros(a.size + b.size - 1)
    for j in range(b.size):
        out[j:j + a.size] += b[j] * a
    return out


def convolution_matrix(seq, n_cols: int, mode: str = "full") -> DenseMatrix:
    """Toeplitz matrix M with M @ x equal to a slice of convolve(seq, x).

    mode "full": rows cover every output index of the full convolution,
    len(seq) + n_cols - 1 rows, zero-padded at the edges.
    mode "valid": only rows whose window lies fully inside seq,
    len(seq) - n_cols + 1 rows; row i is seq[i + n_cols - 1] down to seq[i].
    """
    seq = as_float_vector(seq, "seq")
    n_cols = check_int_at_least(n_cols, 1, "n_cols")
    if mode == "full":
        n_rows = seq.size + n_cols - 1
        first = 0
    elif mode == "valid":
        if seq.size < n_cols:
            raise ShapeError(
                f"valid mode needs len(seq) >= n_cols, got {seq.size} < {n_cols}"
            )
        n_rows = seq.size - n_cols + 1
        first = n_cols - 1
    else:
        raise ConfigError(f"unknown convolution matrix mode {mode!r}")
    m = np.zeros((n_rows, n_cols))
    for j in range(n_cols):
        for i in range(n_rows):
            k = first + i - j
            if 0 <= k < seq.size:
                m[i, j] = seq[k]
    return DenseMatrix(m)


def _as_array(a) -> np.ndarray:
    if isinstance(a, DenseMatrix):
        return a.array
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"matrix must be 2-D, got shape {arr.shape}")
    return arr


def solve_least_squares(a, b) -> np.ndarray:
    """Minimize ||A x - b|| via SVD; rejects rank-deficient systems.

    Raises SingularSystemError when the smallest singular value falls below
    1e-12 times the largest.
    """
    arr = _as_array(a)
    b = as_float_vector(b, "b")
    rows, cols = arr.shape
    if rows < cols or cols < 1:
        raise ShapeError(f"need rows >= cols >= 1, got {rows}x{cols}")
    if b.size != rows:
        raise ShapeError(f"b has length {b.size}, expected {rows}")
    x, _, _, sv = np.linalg.lstsq(arr, b, rcond=None)
    if sv[0] == 0.0 or sv[-1] < 1e-12 * sv[0]:
        raise SingularSystemError(
            f"system is numerically rank deficient (singular values {sv[-1]:.3e}"
            f" vs {sv[0]:.3e})"
        )
    return x


def mix64(z: int) -> int:
    """64-bit finalizer scrambling; a bijection on [0, 2**64)."""
    z &= _MASK64
    z ^= z >> 30
    z = (z * _MIX_A) & _MASK64
    z ^= z >> 27
    z = (z * _MIX_B) & _MASK64
    z ^= z >> 31
    return z


def derive_seed(seed: int, index: int) -> int:
    """Child seed for stream index; distinct indices give distinct seeds."""
    if index < 0:
        raise ConfigError(f"index must not be negative, got {index}")
    return mix64((int(seed) + _GOLDEN * (index + 1)) & _MASK64)


def uniform01(seed: int, k: int) -> float:
    """k-th uniform draw in (0, 1) of the counter stream for this seed."""
    w = mix64((int(seed) + _GOLDEN * (int(k) + 1)) & _MASK64)
    return ((w >> 11) + 0.5) * _U53


def coin_flips(seed: int, n: int) -> np.ndarray:
    """n unbiased boolean draws, vectorized over counters 0..n-1."""
    n = check_int_at_least(n, 0, "n")
    if n == 0:
        return np.zeros(0, dtype=bool)
    u = _uniform_block(int(seed) & _MASK64, 0, n)
    return u < 0.5


def _mix64_block(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX_A)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX_B)
    z ^= z >> np.uint64(31)
    return z


def _uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms for counters start..start+count-1, identical to uniform01."""
    k = np.arange(start, start + count, dtype=np.uint64)
    state = (k + np.uint64(1)) * np.uint64(_GOLDEN) + np.uint64(seed)
    w = _mix64_block(state)
    return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * _U53


class SeededGaussian:
    """Deterministic standard-normal stream.

    A counter-based 64-bit mix supplies uniforms which feed a Box-Muller
    transform; the pair buffer carries the unused half sample so successive
    takes concatenate into one fixed stream per seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._counter = 0
        self._carry: float | None = None

    def __repr__(self):
        return f"SeededGaussian(seed={self.seed})"


def gaussian_stream(gen: SeededGaussian, n: int) -> np.ndarray:
    """Draw n i.i.d. standard normals, advancing the generator state."""
    n = check_int_at_least(n, 0, "n")
    out = np.empty(n)
    pos = 0
    if n > 0 and gen._carry is not None:
        out[0] = gen._carry
        gen._carry = None
        pos = 1
    remaining = n - pos
    if remaining > 0:
        pairs = (remaining + 1) // 2
        u = _uniform_block(gen.seed, gen._counter, 2 * pairs)
        radius = np.sqrt(-2.0 * np.log(u[0::2]))
        angle = (2.0 * math.pi) * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        out[pos:] = z[:remaining]
        if remaining % 2 == 1:
            gen._carry = float(z[remaining])
        gen._counter += 2 * pairs
    return out
