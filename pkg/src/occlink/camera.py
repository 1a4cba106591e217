"""Rolling-shutter sensor model and stripe-image conversion.

Row exposure is a rectangular matched filter of width exposure_time; reading
rows at row_rate_hz = 1/exposure_time samples that filter output once per
row. A timing offset delta slides every integration window by the same
amount, which is what couples neighboring symbols into one row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DomainError, ShapeError, UnusableCaptureError
from .modem import TxConfig, Waveform
from .validation import check_int_at_least, check_nonnegative, check_positive

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class CameraConfig:
    """Sensor timing, gain and raster geometry.

    The row period is tied to the exposure time: configurations where
    row_rate_hz * exposure_time differs from 1 are rejected, since a readout
    gap would change the effective receive filter.
    """

    exposure_time: float
    row_rate_hz: float
    sensor_gain: float = 1.0
    rows: int = 1
    cols: int = 1
    bit_depth: int = 8

    def __post_init__(self):
        object.__setattr__(
            self, "exposure_time", check_positive(self.exposure_time, "exposure_time")
        )
        object.__setattr__(self, "row_rate_hz", check_positive(self.row_rate_hz, "row_rate_hz"))
        object.__setattr__(self, "sensor_gain", check_positive(self.sensor_gain, "sensor_gain"))
        object.__setattr__(self, "rows", check_int_at_least(self.rows, 1, "rows"))
        object.__setattr__(self, "cols", check_int_at_least(self.cols, 1, "cols"))
        if self.bit_depth not in (8, 16):
            raise ConfigError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        if abs(self.row_rate_hz * self.exposure_time - 1.0) > _GRID_TOL:
            raise ConfigError(
                "row_rate_hz must equal 1/exposure_time; got "
                f"{self.row_rate_hz} * {self.exposure_time} != 1"
            )

    @classmethod
    def from_exposure(cls, exposure_time: float, **kwargs) -> "CameraConfig":
        """Build a config with the row rate pinned to 1/exposure_time."""
        return cls(
            exposure_time=exposure_time, row_rate_hz=1.0 / float(exposure_time), **kwargs
        )

    @property
    def full_scale(self) -> float:
        """Row value produced by a constant input at unit intensity."""
        return self.sensor_gain * self.exposure_time


@dataclass(frozen=True)
class TimingOffset:
    """Shift of every row integration window, constant over one capture."""

    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "delta", check_nonnegative(self.delta, "delta"))

    @classmethod
    def from_fraction(cls, fraction: float, symbol_duration: float) -> "TimingOffset":
        fraction = float(fraction)
        if not 0.0 <= fraction < 1.0:
            raise DomainError(f"offset fraction must lie in [0, 1), got {fraction}")
        return cls(delta=fraction * float(symbol_duration))


@dataclass(frozen=True)
class RowSamples:
    """One value per sensor row, spaced row_period seconds apart."""

    values: np.ndarray
    row_period: float

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ShapeError("row samples must be a nonempty 1-D array")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_period", check_positive(self.row_period, "row_period"))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class StripeImage:
    """Grayscale raster of the captured stripes, row-major."""

    rows: int
    cols: int
    bit_depth: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise ConfigError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        pixels = np.ascontiguousarray(self.pixels)
        if pixels.dtype != dtype:
            raise ConfigError(f"pixels must have dtype {np.dtype(dtype).name} for this depth")
        if pixels.shape != (self.rows, self.cols):
            raise ShapeError(
                f"pixel raster shape {pixels.shape} does not match {self.rows}x{self.cols}"
            )
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1


def _grid_samples_per_exposure(sample_rate: float, cam: CameraConfig) -> int:
    m_real = cam.exposure_time * sample_rate
    m = int(round(m_real))
    if m < 1 or abs(m_real - m) > _GRID_TOL * max(1.0, abs(m_real)):
        raise ConfigError(
            "exposure_time must span an integer number of grid steps; "
            f"exposure_time/dt = {m_real!r}, use a grid rate that divides it"
        )
    return m


def matched_filter(w: Waveform, cam: CameraConfig) -> Waveform:
    """Sliding exposure integration of the incident waveform.

    Output index k holds sensor_gain * dt * sum of the m most recent input
    samples (m = exposure_time / dt), i.e. the integral over the window
    ending at t_k; a constant input c settles at sensor_gain*exposure_time*c.
    The first m-1 outputs cover partially filled windows.
    """
    m = _grid_samples_per_exposure(w.sample_rate, cam)
    csum = np.concatenate(([0.0], np.cumsum(w.samples)))
    sums = np.empty(w.samples.size)
    ramp = min(m - 1, w.samples.size)
    sums[:ramp] = csum[1:ramp + 1]
    if w.samples.size >= m:
        sums[m - 1:] = csum[m:] - csum[:-m]
    r = (cam.sensor_gain * w.dt) * sums
    return Waveform(samples=r, sample_rate=w.sample_rate, t0=w.t0)


def sample_rows(
    r: Waveform, cam: CameraConfig, offset: TimingOffset, n_rows: int
) -> RowSamples:
    """Sample the integrated waveform once per row with a timing offset.

    Row n reads the integration window [n*T_exp + delta, (n+1)*T_exp + delta].
    Offsets that are not whole grid steps are evaluated by linear
    interpolation between neighboring grid samples, which is exact because
    the integrated waveform is piecewise linear between grid points.
    """
    n_rows = check_int_at_least(n_rows, 1, "n_rows")
    m = _grid_samples_per_exposure(r.sample_rate, cam)
    q = offset.delta * r.sample_rate
    q_int = int(round(q))
    if abs(q - q_int) <= _GRID_TOL * max(1.0, abs(q)):
        i0, frac = q_int, 0.0
    else:
        i0 = int(np.floor(q))
        frac = q - i0
    last_needed = n_rows * m - 1 + i0 + (1 if frac > 0.0 else 0)
    if last_needed >= r.samples.size:
        raise ShapeError(
            f"waveform too short: {n_rows} rows need index {last_needed}, "
            f"have {r.samples.size} samples"
        )
    base = np.arange(1, n_rows + 1) * m - 1 + i0
    if frac == 0.0:
        values = r.samples[base]
    else:
        values = (1.0 - frac) * r.samples[base] + frac * r.samples[base + 1]
    return RowSamples(values=values, row_period=cam.exposure_time)


def normalize_rows(
    y: RowSamples,
    cam: CameraConfig | None = None,
    tx: TxConfig | None = None,
    mode: str = "known",
) -> RowSamples:
    """Map raw row values onto the normalized symbol scale.

    mode "known" removes the bias sensor_gain*exposure_time*nominal_intensity
    and divides by it, so ideal binary levels land on -1 and +1. mode
    "empirical" estimates the scale from the capture itself using the
    midpoint and half-range of the row extremes; it is exact whenever the
    capture contains at least one full-bright and one full-dark row, and it
    rejects flat captures since they carry no modulation.
    """
    if mode == "known":
        if cam is None or tx is None:
            raise ConfigError("known-scale normalization needs camera and tx configs")
        scale = cam.full_scale * tx.nominal_intensity
        return RowSamples(values=y.values / scale - 1.0, row_period=y.row_period)
    if mode == "empirical":
        hi = float(y.values.max())
        lo = float(y.values.min())
        if hi == lo:
            raise UnusableCaptureError("all rows identical, no modulation to normalize")
        mid = (hi + lo) / 2.0
        half = (hi - lo) / 2.0
        return RowSamples(values=(y.values - mid) / half, row_period=y.row_period)
    raise ConfigError(f"unknown normalization mode {mode!r}")


def _quantize(values: np.ndarray, full_scale: float, max_value: int) -> np.ndarray:
    scaled = values / full_scale * max_value
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(rounded, 0, max_value)


def render_stripe_image(y: RowSamples, cam: CameraConfig, tx: TxConfig) -> StripeImage:
    """Quantize row values and replicate each across the image columns.

    The intensity range [0, sensor_gain*exposure_time*max_intensity] maps
    linearly onto the pixel range with round-half-away-from-zero and
    saturation at both ends. Rows past the sample count stay dark.
    """
    if y.values.size > cam.rows:
        raise ShapeError(f"{y.values.size} row samples exceed the {cam.rows}-row raster")
    dtype = np.uint8 if cam.bit_depth == 8 else np.uint16
    max_value = (1 << cam.bit_depth) - 1
    full_scale = cam.full_scale * tx.max_intensity
    quantized = _quantize(y.values, full_scale, max_value).astype(dtype)
    pixels = np.zeros((cam.rows, cam.cols), dtype=dtype)
    pixels[: quantized.size, :] = quantized[:, None]
    return StripeImage(rows=cam.rows, cols=cam.cols, bit_depth=cam.bit_depth, pixels=pixels)


def ingest_stripe_image(
    img: StripeImage, roi_cols: tuple[int, int], cam: CameraConfig, tx: TxConfig
) -> RowSamples:
    """Average each row over a column range and undo the render scaling.

    roi_cols is a half-open (start, stop) column window. Averaging across
    columns is what suppresses per-pixel noise in real captures; rendered
    images have constant rows, so the mean returns the quantized value.
    """
    start, stop = int(roi_cols[0]), int(roi_cols[1])
    if not 0 <= start < stop <= img.cols:
        raise ShapeError(
            f"column range ({start}, {stop}) empty or outside image width {img.cols}"
        )
    means = img.pixels[:, start:stop].mean(axis=1)
    full_scale = cam.full_scale * tx.max_intensity
    values = means / img.max_value * full_scale
    return RowSamples(values=values, row_period=cam.exposure_time)
