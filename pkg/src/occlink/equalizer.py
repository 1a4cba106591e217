"""Frame synchronization, channel estimation and zero-forcing equalization.

The channel seen by the rows is modeled causally as
y[n] = sum_k h[k] * a[n - n_0 - k]: a timing offset makes each row lean on
the following symbol, and that advance is folded into the frame-start index
n_0 rather than into anticausal taps, so ordinary least squares applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import RowSamples
from .exceptions import ConfigError, DomainError, ShapeError, SyncFailureError
from .modem import Frame
from .numerics import convolution_matrix, convolve, solve_least_squares
from .validation import as_float_vector, check_int_at_least


@dataclass(frozen=True)
class ChannelEstimate:
    """Causal channel taps with the frame start they are referenced to."""

    taps: np.ndarray
    frame_start: int
    residual_norm: float

    def __post_init__(self):
        taps = as_float_vector(self.taps, "taps")
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "frame_start", int(self.frame_start))
        object.__setattr__(self, "residual_norm", float(self.residual_norm))

    @property
    def tap_count(self) -> int:
        """L_c, one less than the number of coefficients."""
        return self.taps.size - 1


@dataclass(frozen=True)
class ZfEqualizer:
    """FIR equalizer taps with target delay and leftover distortion."""

    taps: np.ndarray
    delay: int
    residual_isi: float

    def __post_init__(self):
        taps = as_float_vector(self.taps, "taps")
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "delay", int(self.delay))
        object.__setattr__(self, "residual_isi", float(self.residual_isi))

    def __len__(self) -> int:
        return self.taps.size


def find_frame_start(
    y: RowSamples, preamble, threshold: float = 0.5
) -> int:
    """Locate the preamble by normalized cross-correlation.

    The statistic at lag l is dot(y_centered[l:l+N], p) / dot(p, p), i.e. the
    correlation normalized by the preamble energy; a clean unit-amplitude hit
    scores 1. Normalizing by the template energy instead of the local window
    energy keeps pure-noise scores low at every lag, which is what makes the
    detection threshold meaningful. Ties resolve to the smallest lag.
    """
    p = as_float_vector(preamble, "preamble")
    values = y.values
    if values.size < p.size:
        raise ShapeError(
            f"capture has {values.size} rows, fewer than the {p.size}-row preamble"
        )
    centered = values - values.mean()
    n_lags = values.size - p.size + 1
    energy = float(p @ p)
    scores = np.empty(n_lags)
    for lag in range(n_lags):
        scores[lag] = centered[lag:lag + p.size] @ p
    scores /= energy
    best = int(np.argmax(scores))
    if scores[best] < threshold:
        raise SyncFailureError(
            f"correlation peak {scores[best]:.3f} below threshold {threshold}"
        )
    return best


def estimate_channel(
    y: RowSamples, frame: Frame, n_0: int, tap_count: int
) -> ChannelEstimate:
    """Least-squares channel taps from the preamble rows.

    Builds the Toeplitz system over rows n_0 + tap_count .. n_0 + N_pre - 1,
    where every equation involves only known preamble symbols, and solves
    for tap_count + 1 coefficients. The preamble must be at least twice the
    coefficient count for a usefully overdetermined system.
    """
    tap_count = check_int_at_least(tap_count, 0, "tap_count")
    n_taps = tap_count + 1
    n_pre = frame.n_pre
    if n_pre < 2 * n_taps:
        raise ConfigError(
            f"preamble length {n_pre} too short to estimate {n_taps} taps; "
            f"need at least {2 * n_taps}"
        )
    n_0 = int(n_0)
    if n_0 < 0 or n_0 + n_pre > y.values.size:
        raise ShapeError(
            f"rows {n_0}..{n_0 + n_pre - 1} not covered by {y.values.size} samples"
        )
    a_pre = convolution_matrix(frame.preamble, n_taps, mode="valid")
    y_pre = y.values[n_0 + tap_count: n_0 + n_pre]
    taps = solve_least_squares(a_pre, y_pre)
    residual = float(np.linalg.norm(a_pre.array @ taps - y_pre))
    return ChannelEstimate(taps=taps, frame_start=n_0, residual_norm=residual)


def _zf_for_delay(h_matrix, taps: np.ndarray, n_out: int, d: int):
    target = np.zeros(n_out)
    target[d] = 1.0
    g = solve_least_squares(h_matrix, target)
    residual = float(np.linalg.norm(convolve(g, taps) - target))
    return g, residual


def design_zf(est: ChannelEstimate, eq_taps: int, delay="auto") -> ZfEqualizer:
    """Zero-forcing equalizer of length eq_taps for the estimated channel.

    Solves min ||H g - e_d|| where H is the convolution matrix of the
    channel taps. delay="auto" tries every admissible target delay
    d in 0 .. L_c + eq_taps - 2 and keeps the smallest residual (ties to
    the smallest d); an integer delay pins d explicitly.
    """
    eq_taps = check_int_at_least(eq_taps, 1, "eq_taps")
    taps = est.taps
    n_out = taps.size + eq_taps - 1
    max_delay = est.tap_count + eq_taps - 2
    if max_delay < 0:
        raise ConfigError("channel and equalizer are both single tap, no delay to pick")
    h_matrix = convolution_matrix(taps, eq_taps, mode="full")
    if delay == "auto":
        best = None
        for d in range(max_delay + 1):
            g, residual = _zf_for_delay(h_matrix, taps, n_out, d)
            if best is None or residual < best[2]:
                best = (g, d, residual)
        g, d, residual = best
    else:
        d = int(delay)
        if not 0 <= d <= max_delay:
            raise ConfigError(f"delay must lie in 0..{max_delay}, got {d}")
        g, residual = _zf_for_delay(h_matrix, taps, n_out, d)
    return ZfEqualizer(taps=g, delay=d, residual_isi=residual)


def equalize(y: RowSamples, eq: ZfEqualizer, n_0: int, frame_len: int) -> np.ndarray:
    """Filter the rows and realign so index j matches frame symbol j.

    Convolves rows n_0 .. n_0 + frame_len + len(eq) - 2 with the equalizer
    and drops the design delay, returning frame_len samples. Rows before
    n_0 are treated as idle (zero on the normalized scale), which matches
    a capture with dark-level lead-in.
    """
    frame_len = check_int_at_least(frame_len, 1, "frame_len")
    n_0 = int(n_0)
    needed = n_0 + frame_len + eq.taps.size - 1
    if n_0 < 0 or needed > y.values.size:
        raise ShapeError(
            f"equalizing {frame_len} symbols from row {n_0} needs {needed} rows, "
            f"have {y.values.size}"
        )
    segment = y.values[n_0:needed]
    filtered = convolve(segment, eq.taps)
    return filtered[eq.delay: eq.delay + frame_len]


def analytic_offset_taps(delta: float, symbol_duration: float) -> tuple[float, float]:
    """Row coupling (to its own symbol, to the next) for an ideal LED.

    A window shifted by delta overlaps the current symbol for
    symbol_duration - delta seconds and the next one for delta seconds;
    normalizing by the window length gives the two taps directly.
    """
    delta = float(delta)
    symbol_duration = float(symbol_duration)
    if symbol_duration <= 0.0:
        raise DomainError(f"symbol_duration must be positive, got {symbol_duration}")
    if not 0.0 <= delta < symbol_duration:
        raise DomainError(
            f"delta must lie in [0, symbol_duration), got {delta} vs {symbol_duration}"
        )
    fraction = delta / symbol_duration
    return (1.0 - fraction, fraction)
