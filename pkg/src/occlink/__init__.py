"""Rolling-shutter optical camera communication link toolkit.

Simulates the full chain from an intensity-modulated LED through a
rolling-shutter camera operated at one symbol per row, then recovers the
payload with least-squares channel estimation and zero-forcing equalization.
"""

from .camera import (
    CameraConfig,
    RowSamples,
    StripeImage,
    TimingOffset,
    ingest_stripe_image,
    matched_filter,
    normalize_rows,
    render_stripe_image,
    sample_rows,
)
from .equalizer import (
    ChannelEstimate,
    ZfEqualizer,
    analytic_offset_taps,
    design_zf,
    equalize,
    estimate_channel,
    find_frame_start,
)
from .exceptions import (
    ConfigError,
    DomainError,
    OccLinkError,
    ShapeError,
    SingularSystemError,
    SyncFailureError,
    UnusableCaptureError,
)
from .link import Capture, rows_per_symbol, simulate_capture
from .metrics import (
    Histogram,
    LinkReport,
    bit_error_rate,
    detect_clusters,
    histogram,
    symbol_error_rate,
)
from .modem import (
    Frame,
    PamAlphabet,
    TxConfig,
    Waveform,
    build_frame,
    default_preamble,
    map_bits,
    shape_symbols,
    shape_waveform,
    slice_symbols,
    symbols_to_bits,
)
from .numerics import (
    DenseMatrix,
    SeededGaussian,
    coin_flips,
    convolution_matrix,
    convolve,
    derive_seed,
    gaussian_stream,
    mix64,
    solve_least_squares,
    uniform01,
)
from .optics import LedModel, OpticalChannel, apply_channel, apply_led
from .pgm import read_pgm, write_pgm
from .receiver import RollingShutterReceiver

__version__ = "0.1.0"

__all__ = [
    "CameraConfig",
    "Capture",
    "ChannelEstimate",
    "ConfigError",
    "DenseMatrix",
    "DomainError",
    "Frame",
    "Histogram",
    "LedModel",
    "LinkReport",
    "OccLinkError",
    "OpticalChannel",
    "PamAlphabet",
    "RollingShutterReceiver",
    "RowSamples",
    "SeededGaussian",
    "ShapeError",
    "SingularSystemError",
    "StripeImage",
    "SyncFailureError",
    "TimingOffset",
    "TxConfig",
    "UnusableCaptureError",
    "Waveform",
    "ZfEqualizer",
    "analytic_offset_taps",
    "apply_channel",
    "apply_led",
    "bit_error_rate",
    "build_frame",
    "coin_flips",
    "convolution_matrix",
    "convolve",
    "default_preamble",
    "derive_seed",
    "design_zf",
    "detect_clusters",
    "equalize",
    "estimate_channel",
    "find_frame_start",
    "gaussian_stream",
    "histogram",
    "ingest_stripe_image",
    "map_bits",
    "matched_filter",
    "mix64",
    "normalize_rows",
    "read_pgm",
    "render_stripe_image",
    "rows_per_symbol",
    "sample_rows",
    "shape_symbols",
    "shape_waveform",
    "simulate_capture",
    "slice_symbols",
    "solve_least_squares",
    "symbol_error_rate",
    "symbols_to_bits",
    "uniform01",
    "write_pgm",
]
