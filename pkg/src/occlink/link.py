"""End-to-end capture simulation: transmitter through rolling-shutter rows.

The frame is padded with idle symbols (bias-level light) on both sides so
the capture contains quiet lead-in rows before the preamble and enough tail
rows for the equalizer to run past the last payload symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraConfig, RowSamples, TimingOffset, matched_filter, sample_rows
from .exceptions import ConfigError
from .modem import Frame, TxConfig, shape_symbols
from .optics import LedModel, OpticalChannel, apply_channel, apply_led
from .validation import check_int_at_least

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class Capture:
    """Raw row samples plus the construction-known frame placement."""

    rows: RowSamples
    frame_row: int
    rows_per_symbol: int
    offset: TimingOffset

    @property
    def causal_start(self) -> int:
        """Frame-start index for the causal tap model (one row early)."""
        return self.frame_row - 1


def rows_per_symbol(tx: TxConfig, cam: CameraConfig) -> int:
    """Whole number of rows per symbol period, e.g. 1 at the Nyquist limit."""
    ratio = tx.symbol_duration / cam.exposure_time
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > _GRID_TOL * max(1.0, ratio):
        raise ConfigError(
            f"symbol_duration must be a whole multiple of exposure_time, got ratio {ratio!r}"
        )
    return k


def simulate_capture(
    frame: Frame,
    tx: TxConfig,
    cam: CameraConfig,
    led: LedModel | None = None,
    channel: OpticalChannel | None = None,
    offset: TimingOffset | None = None,
    lead_symbols: int = 8,
    tail_symbols: int = 40,
) -> Capture:
    """Simulate one capture of a frame and return the raw row samples.

    lead_symbols idle periods precede the frame (at least one, so the row
    before the frame exists for causal channel estimation) and tail_symbols
    follow it; sizing the tail beyond the equalizer length keeps the last
    payload symbols recoverable.
    """
    led = LedModel.ideal() if led is None else led
    channel = OpticalChannel() if channel is None else channel
    offset = TimingOffset(0.0) if offset is None else offset
    lead_symbols = check_int_at_least(lead_symbols, 1, "lead_symbols")
    tail_symbols = check_int_at_least(tail_symbols, 1, "tail_symbols")
    k = rows_per_symbol(tx, cam)

    idle_lead = np.zeros(lead_symbols)
    idle_tail = np.zeros(tail_symbols)
    amplitudes = np.concatenate([idle_lead, frame.symbols, idle_tail])
    w = shape_symbols(amplitudes, tx)
    w = apply_led(w, led)
    w = apply_channel(w, channel)
    r = matched_filter(w, cam)

    m = int(round(cam.exposure_time * r.sample_rate))
    shift = offset.delta * r.sample_rate
    headroom = int(np.floor(shift)) + (0 if shift == np.floor(shift) else 1)
    n_rows = (r.samples.size - headroom) // m
    rows = sample_rows(r, cam, offset, n_rows)
    return Capture(
        rows=rows,
        frame_row=lead_symbols * k,
        rows_per_symbol=k,
        offset=offset,
    )
