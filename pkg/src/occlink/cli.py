"""Command-line experiment runner.

Subcommands
-----------
simulate      run the full link once; writes samples.csv, report.json, capture.pgm
sweep-ber     Monte Carlo error rates over offsets and SNRs; writes sweep.csv
decode-image  decode a stripe image from a PGM file; writes decoded.bits, report.json
offset-demo   analytic vs estimated timing-offset taps; writes taps.csv

Configuration comes from an optional JSON file (--config) overridden by
flags; every run embeds the fully resolved configuration in its report so
outputs are self-describing. Repeating a command with the same master seed
reproduces every output file byte for byte.

Exit codes: 0 success, 1 unexpected error, 2 usage, 3 invalid configuration
or input shape, 4 sync failure, 5 unusable capture, 6 unreadable image file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .camera import (
    CameraConfig,
    RowSamples,
    TimingOffset,
    ingest_stripe_image,
    normalize_rows,
    render_stripe_image,
)
from .equalizer import (
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
    SyncFailureError,
    UnusableCaptureError,
)
from .link import simulate_capture
from .metrics import LinkReport, bit_error_rate, detect_clusters, histogram, symbol_error_rate
from .modem import (
    PamAlphabet,
    TxConfig,
    build_frame,
    default_preamble,
    slice_symbols,
    symbols_to_bits,
)
from .numerics import coin_flips, derive_seed, uniform01
from .optics import LedModel, OpticalChannel
from .pgm import read_pgm, write_pgm

SCHEMA_VERSION = 1

# seed stream tags, all derived from one trial seed
_STREAM_NOISE = 0
_STREAM_SLICE = 1
_STREAM_OFFSET = 2
_STREAM_PAYLOAD = 3
_STREAM_SLICE_RAW = 4

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SYNC = 4
EXIT_UNUSABLE = 5
EXIT_IMAGE = 6


@dataclass(frozen=True)
class TrialSeed:
    """Deterministic per-trial seed derivation from one master seed."""

    master_seed: int
    trial_index: int

    @property
    def derived(self) -> int:
        return derive_seed(self.master_seed, self.trial_index)

    def stream(self, tag: int) -> int:
        """Independent child seed for one random stream of this trial."""
        return derive_seed(self.derived, tag)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved experiment settings (see the README for the schema)."""

    schema_version: int = SCHEMA_VERSION
    order: int = 2
    preamble_length: int = 31
    payload_bits: int = 1000
    payload_pattern: str = "random"
    symbol_duration: float = 4e-6
    oversampling: int = 64
    led_cutoff_hz: float | None = None
    channel_gain: float = 1.0
    snr_db: float | None = None
    offset_fraction: float | str = 0.0
    rows: int | None = None
    cols: int = 64
    bit_depth: int = 8
    sensor_gain: float = 1.0
    tap_count: int = 2
    eq_taps: int = 31
    delay: int | str = "auto"
    sync_threshold: float = 0.5
    lead_symbols: int = 8
    tail_symbols: int = 40
    master_seed: int = 0
    trials: int = 1
    offsets: tuple = (0.0, 0.25, 0.5)
    snrs_db: tuple = (None,)
    roi: tuple | None = None

    def __post_init__(self):
        def fail(field: str, why: str):
            raise ConfigError(f"config field {field!r}: {why}")

        def need_int(field, value, minimum):
            if isinstance(value, bool) or not isinstance(value, int):
                fail(field, f"must be an integer, got {value!r}")
            if value < minimum:
                fail(field, f"must be at least {minimum}, got {value}")
            return value

        if self.schema_version != SCHEMA_VERSION:
            fail("schema_version", f"unsupported version {self.schema_version!r}, expected {SCHEMA_VERSION}")
        order = need_int("order", self.order, 2)
        if order & (order - 1):
            fail("order", f"must be a power of two, got {order}")
        need_int("preamble_length", self.preamble_length, 1)
        bits = need_int("payload_bits", self.payload_bits, 1)
        per_symbol = order.bit_length() - 1
        if bits % per_symbol:
            fail("payload_bits", f"{bits} is not a multiple of {per_symbol} bits per symbol")
        if self.payload_pattern not in ("random", "alternating"):
            fail("payload_pattern", f"must be 'random' or 'alternating', got {self.payload_pattern!r}")
        if not (isinstance(self.symbol_duration, (int, float)) and self.symbol_duration > 0):
            fail("symbol_duration", f"must be a positive number, got {self.symbol_duration!r}")
        need_int("oversampling", self.oversampling, 2)
        if self.led_cutoff_hz is not None and not (
            isinstance(self.led_cutoff_hz, (int, float)) and self.led_cutoff_hz > 0
        ):
            fail("led_cutoff_hz", f"must be null or a positive number, got {self.led_cutoff_hz!r}")
        if not (isinstance(self.channel_gain, (int, float)) and self.channel_gain > 0):
            fail("channel_gain", f"must be a positive number, got {self.channel_gain!r}")
        if self.snr_db is not None and not isinstance(self.snr_db, (int, float)):
            fail("snr_db", f"must be null or a number, got {self.snr_db!r}")
        if self.offset_fraction != "random":
            value = self.offset_fraction
            if not (isinstance(value, (int, float)) and 0.0 <= float(value) < 1.0):
                fail("offset_fraction", f"must be 'random' or a number in [0, 1), got {value!r}")
        if self.rows is not None:
            need_int("rows", self.rows, 1)
        need_int("cols", self.cols, 1)
        if self.bit_depth not in (8, 16):
            fail("bit_depth", f"must be 8 or 16, got {self.bit_depth!r}")
        if not (isinstance(self.sensor_gain, (int, float)) and self.sensor_gain > 0):
            fail("sensor_gain", f"must be a positive number, got {self.sensor_gain!r}")
        need_int("tap_count", self.tap_count, 0)
        need_int("eq_taps", self.eq_taps, 1)
        if self.preamble_length < 2 * (self.tap_count + 1):
            fail(
                "preamble_length",
                f"{self.preamble_length} too short to estimate {self.tap_count + 1} taps",
            )
        if self.delay != "auto":
            need_int("delay", self.delay, 0)
        if not (isinstance(self.sync_threshold, (int, float)) and 0 < self.sync_threshold <= 1):
            fail("sync_threshold", f"must lie in (0, 1], got {self.sync_threshold!r}")
        need_int("lead_symbols", self.lead_symbols, 1)
        need_int("tail_symbols", self.tail_symbols, 1)
        if self.tail_symbols < self.eq_taps - 1:
            fail("tail_symbols", f"must be at least eq_taps - 1 = {self.eq_taps - 1}")
        if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int):
            fail("master_seed", f"must be an integer, got {self.master_seed!r}")
        need_int("trials", self.trials, 1)
        offsets = tuple(self.offsets)
        for value in offsets:
            if not (isinstance(value, (int, float)) and 0.0 <= float(value) < 1.0):
                fail("offsets", f"every entry must lie in [0, 1), got {value!r}")
        object.__setattr__(self, "offsets", offsets)
        snrs = tuple(self.snrs_db)
        for value in snrs:
            if value is not None and not isinstance(value, (int, float)):
                fail("snrs_db", f"every entry must be null or a number, got {value!r}")
        object.__setattr__(self, "snrs_db", snrs)
        if self.roi is not None:
            roi = tuple(self.roi)
            if len(roi) != 2 or not all(isinstance(v, int) for v in roi) or roi[0] >= roi[1]:
                fail("roi", f"must be [start, stop] with start < stop, got {self.roi!r}")
            object.__setattr__(self, "roi", roi)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["offsets"] = list(self.offsets)
        out["snrs_db"] = list(self.snrs_db)
        out["roi"] = None if self.roi is None else list(self.roi)
        return out


@dataclass
class TrialResult:
    """Everything one simulated trial produced, arrays included."""

    frame_symbols: np.ndarray
    tx_bits: np.ndarray
    raw_rows: np.ndarray
    normalized_rows: np.ndarray
    equalized: np.ndarray
    sliced: np.ndarray
    rx_bits: np.ndarray
    frame_row: int
    n_pre: int
    offset_fraction: float
    report: LinkReport
    bit_errors_zf: int
    bit_errors_no_eq: int
    residual_norm: float
    equalizer_delay: int


def _payload_bit_source(cfg: RunConfig, seed: int) -> np.ndarray:
    if cfg.payload_pattern == "alternating":
        return (np.arange(cfg.payload_bits) % 2).astype(np.int64)
    return coin_flips(seed, cfg.payload_bits).astype(np.int64)


def _noise_sigma(cfg: RunConfig, tx: TxConfig) -> float:
    """Grid-sample noise level realizing the requested per-symbol SNR.

    SNR is defined against the received bias amplitude: SNR = (gain *
    nominal_intensity)**2 * oversampling / sigma**2, so exposure averaging
    over the oversampling grid brings row noise to 10**(-SNR_dB/20) on the
    normalized scale.
    """
    if cfg.snr_db is None:
        return 0.0
    amplitude = cfg.channel_gain * tx.nominal_intensity
    return amplitude * math.sqrt(cfg.oversampling) * 10.0 ** (-float(cfg.snr_db) / 20.0)


def _run_trial(cfg: RunConfig, trial_index: int) -> TrialResult:
    """Simulate one capture and decode it with and without equalization."""
    alphabet = PamAlphabet.from_order(cfg.order)
    seeds = TrialSeed(cfg.master_seed, trial_index)
    tx_bits = _payload_bit_source(cfg, seeds.stream(_STREAM_PAYLOAD))
    preamble = default_preamble(cfg.preamble_length)
    frame = build_frame(preamble, tx_bits, alphabet)
    tx = TxConfig(symbol_duration=cfg.symbol_duration, oversampling=cfg.oversampling)
    cam = CameraConfig.from_exposure(cfg.symbol_duration, sensor_gain=cfg.sensor_gain)

    fraction = cfg.offset_fraction
    if fraction == "random":
        fraction = uniform01(seeds.stream(_STREAM_OFFSET), 0)
    fraction = float(fraction)
    offset = TimingOffset.from_fraction(fraction, tx.symbol_duration)
    led = LedModel(cutoff_hz=cfg.led_cutoff_hz)
    channel = OpticalChannel(
        gain=cfg.channel_gain,
        noise_sigma=_noise_sigma(cfg, tx),
        seed=seeds.stream(_STREAM_NOISE),
    )

    capture = simulate_capture(
        frame, tx, cam, led, channel, offset,
        lead_symbols=cfg.lead_symbols, tail_symbols=cfg.tail_symbols,
    )
    norm = normalize_rows(capture.rows, cam, tx, mode="known")

    # the simulator knows where it placed the frame; correlation search is
    # exercised by decode-image, which has no such knowledge
    n_0 = capture.causal_start
    estimate = estimate_channel(norm, frame, n_0, cfg.tap_count)
    zf = design_zf(estimate, cfg.eq_taps, cfg.delay)
    equalized = equalize(norm, zf, n_0, len(frame))
    sliced = slice_symbols(equalized, alphabet, rng_seed=seeds.stream(_STREAM_SLICE))
    rx_bits = symbols_to_bits(sliced[frame.n_pre:], alphabet)

    frame_row = capture.frame_row
    payload_rows = norm.values[frame_row + frame.n_pre: frame_row + len(frame)]
    sliced_raw = slice_symbols(payload_rows, alphabet, rng_seed=seeds.stream(_STREAM_SLICE_RAW))
    raw_bits = symbols_to_bits(sliced_raw, alphabet)

    ber_zf = bit_error_rate(tx_bits, rx_bits)
    ber_no_eq = bit_error_rate(tx_bits, raw_bits)
    ser = symbol_error_rate(frame.payload, sliced[frame.n_pre:])
    report = LinkReport(
        ber=ber_zf,
        ser=ser,
        n_bits=tx_bits.size,
        n_symbols=frame.n_payload,
        snr_db=cfg.snr_db,
        offset_fraction=fraction,
        residual_isi=zf.residual_isi,
        estimated_taps=tuple(estimate.taps),
    )
    return TrialResult(
        frame_symbols=frame.symbols,
        tx_bits=tx_bits,
        raw_rows=capture.rows.values,
        normalized_rows=norm.values,
        equalized=equalized,
        sliced=sliced,
        rx_bits=rx_bits,
        frame_row=frame_row,
        n_pre=frame.n_pre,
        offset_fraction=fraction,
        report=report,
        bit_errors_zf=int(round(ber_zf * tx_bits.size)),
        bit_errors_no_eq=int(round(ber_no_eq * tx_bits.size)),
        residual_norm=estimate.residual_norm,
        equalizer_delay=zf.delay,
    )


def _fmt(value) -> str:
    """Shortest exact decimal for CSV cells; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _payload_contrast(result: TrialResult) -> float | None:
    """Peak-to-peak of the normalized payload rows.

    The final payload row is excluded: its integration window reaches past
    the frame into idle light, so it mixes with the dark level rather than
    with a neighboring symbol.
    """
    start = result.frame_row + result.n_pre
    stop = result.frame_row + result.frame_symbols.size - 1
    interior = result.normalized_rows[start:stop]
    if interior.size == 0:
        return None
    return float(interior.max() - interior.min())


def cmd_simulate(cfg: RunConfig, out_dir: Path) -> int:
    result = _run_trial(cfg, 0)
    frame_len = result.frame_symbols.size

    rows = []
    for j in range(frame_len):
        rows.append([
            j,
            result.frame_symbols[j],
            result.raw_rows[result.frame_row + j],
            result.normalized_rows[result.frame_row + j],
            result.equalized[j],
            result.sliced[j],
        ])
    _write_csv(
        out_dir / "samples.csv",
        ["index", "tx_symbol", "y_raw", "y_normalized", "y_equalized", "sliced_symbol"],
        rows,
    )

    payload_pre = result.normalized_rows[
        result.frame_row + result.n_pre: result.frame_row + frame_len - 1
    ]
    payload_post = result.equalized[result.n_pre:]
    pre_clusters = detect_clusters(histogram(payload_pre, 60, (-1.5, 1.5))) if payload_pre.size else 0
    post_clusters = detect_clusters(histogram(payload_post, 60, (-1.5, 1.5))) if payload_post.size else 0

    n_rows = result.raw_rows.size
    cam = CameraConfig.from_exposure(
        cfg.symbol_duration,
        sensor_gain=cfg.sensor_gain,
        rows=cfg.rows if cfg.rows is not None else n_rows,
        cols=cfg.cols,
        bit_depth=cfg.bit_depth,
    )
    tx = TxConfig(symbol_duration=cfg.symbol_duration, oversampling=cfg.oversampling)
    image = render_stripe_image(
        RowSamples(values=result.raw_rows, row_period=cfg.symbol_duration), cam, tx
    )
    write_pgm(image, out_dir / "capture.pgm")

    _write_json(out_dir / "report.json", {
        "config": cfg.to_dict(),
        "report": result.report.to_dict(),
        "channel": {
            "frame_start": result.frame_row - 1,
            "estimated_taps": [float(t) for t in result.report.estimated_taps],
            "residual_norm": float(result.residual_norm),
            "equalizer_delay": int(result.equalizer_delay),
            "residual_isi": float(result.report.residual_isi),
        },
        "metrics": {
            "payload_contrast": _payload_contrast(result),
            "pre_eq_clusters": pre_clusters,
            "post_eq_clusters": post_clusters,
        },
    })
    return EXIT_OK


def _sweep_trial(task) -> tuple[int, int, int, float]:
    cfg, offset, snr, trial_index = task
    trial_cfg = dataclasses.replace(cfg, offset_fraction=offset, snr_db=snr)
    result = _run_trial(trial_cfg, trial_index)
    return (
        result.bit_errors_zf,
        result.bit_errors_no_eq,
        result.tx_bits.size,
        result.report.residual_isi,
    )


def cmd_sweep_ber(cfg: RunConfig, out_dir: Path, jobs: int = 1) -> int:
    combos = [(off, snr) for off in cfg.offsets for snr in cfg.snrs_db]
    tasks = []
    for combo_index, (off, snr) in enumerate(combos):
        for t in range(cfg.trials):
            tasks.append((cfg, off, snr, combo_index * cfg.trials + t))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_trial, tasks))
    else:
        outcomes = [_sweep_trial(task) for task in tasks]

    rows = []
    for combo_index, (off, snr) in enumerate(combos):
        chunk = outcomes[combo_index * cfg.trials: (combo_index + 1) * cfg.trials]
        errors_zf = sum(c[0] for c in chunk)
        errors_raw = sum(c[1] for c in chunk)
        n_bits = sum(c[2] for c in chunk)
        mean_residual = sum(c[3] for c in chunk) / cfg.trials
        rows.append([
            float(off),
            None if snr is None else float(snr),
            n_bits,
            errors_raw / n_bits,
            errors_zf / n_bits,
            mean_residual,
        ])
    _write_csv(
        out_dir / "sweep.csv",
        ["offset_fraction", "snr_db", "n_bits", "ber_no_eq", "ber_zf", "mean_residual_isi"],
        rows,
    )
    return EXIT_OK


def cmd_decode_image(cfg: RunConfig, image_path: Path, out_dir: Path) -> int:
    try:
        image = read_pgm(image_path)
    except (OSError, OccLinkError) as exc:
        _write_json(out_dir / "report.json", {
            "config": cfg.to_dict(),
            "error": {"type": "image-unreadable", "message": str(exc)},
        })
        print(f"error: cannot read image: {exc}", file=sys.stderr)
        return EXIT_IMAGE

    alphabet = PamAlphabet.from_order(cfg.order)
    preamble = default_preamble(cfg.preamble_length)
    cam = CameraConfig.from_exposure(
        cfg.symbol_duration,
        sensor_gain=cfg.sensor_gain,
        rows=image.rows,
        cols=image.cols,
        bit_depth=image.bit_depth,
    )
    tx = TxConfig(symbol_duration=cfg.symbol_duration, oversampling=cfg.oversampling)
    roi = cfg.roi if cfg.roi is not None else (0, image.cols)
    seeds = TrialSeed(cfg.master_seed, 0)

    try:
        rows = ingest_stripe_image(image, roi, cam, tx)
        norm = normalize_rows(rows, mode="empirical")
        peak = find_frame_start(norm, preamble, threshold=cfg.sync_threshold)
        n_0 = peak - 1
        if n_0 < 0:
            raise SyncFailureError("correlation peak on the first row leaves no causal start")
        frame_len = cfg.preamble_length + cfg.payload_bits // alphabet.bits_per_symbol
        reference = build_frame(preamble, np.zeros(0, dtype=np.int64), alphabet)
        estimate = estimate_channel(norm, reference, n_0, cfg.tap_count)
        zf = design_zf(estimate, cfg.eq_taps, cfg.delay)
        equalized = equalize(norm, zf, n_0, frame_len)
        payload = equalized[cfg.preamble_length:]
        symbols = slice_symbols(payload, alphabet, rng_seed=seeds.stream(_STREAM_SLICE))
        bits = symbols_to_bits(symbols, alphabet)
    except (SyncFailureError, UnusableCaptureError) as exc:
        kind = "sync-failure" if isinstance(exc, SyncFailureError) else "unusable-capture"
        _write_json(out_dir / "report.json", {
            "config": cfg.to_dict(),
            "error": {"type": kind, "message": str(exc)},
        })
        print(f"error: {kind}: {exc}", file=sys.stderr)
        return EXIT_SYNC if kind == "sync-failure" else EXIT_UNUSABLE

    with open(out_dir / "decoded.bits", "w", newline="") as fh:
        fh.write("\n".join(str(int(b)) for b in bits))
        if bits.size:
            fh.write("\n")
    _write_json(out_dir / "report.json", {
        "config": cfg.to_dict(),
        "decode": {
            "frame_start": int(n_0),
            "correlation_peak_row": int(peak),
            "estimated_taps": [float(t) for t in estimate.taps],
            "residual_norm": float(estimate.residual_norm),
            "equalizer_delay": int(zf.delay),
            "residual_isi": float(zf.residual_isi),
            "n_bits": int(bits.size),
        },
    })
    return EXIT_OK


def cmd_offset_demo(cfg: RunConfig, out_dir: Path) -> int:
    rows = []
    for fraction in cfg.offsets:
        analytic = analytic_offset_taps(
            float(fraction) * cfg.symbol_duration, cfg.symbol_duration
        )
        demo_cfg = dataclasses.replace(
            cfg,
            offset_fraction=float(fraction),
            snr_db=None,
            tap_count=1,
            payload_pattern="random",
        )
        result = _run_trial(demo_cfg, 0)
        taps = result.report.estimated_taps
        rows.append([
            float(fraction),
            analytic[0],
            analytic[1],
            taps[1],
            taps[0],
        ])
    _write_csv(
        out_dir / "taps.csv",
        ["offset_fraction", "analytic_main", "analytic_next", "empirical_main", "empirical_next"],
        rows,
    )
    return EXIT_OK


def _parse_offset(text: str):
    if text == "random":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'random', got {text!r}")


def _parse_snr(text: str):
    if text.lower() in ("none", "null"):
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'none', got {text!r}")


def _parse_offset_list(text: str):
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parse_snr_list(text: str):
    return tuple(_parse_snr(part) for part in text.split(","))


def _parse_roi(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected start,stop got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--seed", type=int, dest="master_seed", help="master seed override")
    parser.add_argument("--order", type=int, help="PAM order override")
    parser.add_argument("--payload-bits", type=int, dest="payload_bits")
    parser.add_argument("--pattern", choices=("random", "alternating"), dest="payload_pattern")
    parser.add_argument("--offset", type=_parse_offset, dest="offset_fraction",
                        help="offset fraction of the symbol period, or 'random'")
    parser.add_argument("--snr-db", type=_parse_snr, dest="snr_db",
                        help="per-symbol SNR in dB, or 'none' for noiseless")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occlink",
        description="rolling-shutter optical camera communication link toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the link once and dump all signals")
    _add_common_flags(p_sim)

    p_sweep = sub.add_parser("sweep-ber", help="Monte Carlo BER over offsets and SNRs")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--trials", type=int, help="trials per sweep point")
    p_sweep.add_argument("--offsets", type=_parse_offset_list,
                         help="comma-separated offset fractions")
    p_sweep.add_argument("--snrs-db", type=_parse_snr_list, dest="snrs_db",
                         help="comma-separated SNRs, 'none' entries for noiseless")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes (results are identical at any level)")

    p_dec = sub.add_parser("decode-image", help="decode a stripe image from a PGM file")
    p_dec.add_argument("image", type=Path, help="input PGM file")
    _add_common_flags(p_dec)
    p_dec.add_argument("--roi", type=_parse_roi, help="column range start,stop to average")

    p_demo = sub.add_parser("offset-demo", help="analytic vs estimated offset taps")
    _add_common_flags(p_demo)
    p_demo.add_argument("--offsets", type=_parse_offset_list,
                        help="comma-separated offset fractions")

    return parser


_OVERRIDE_FIELDS = (
    "master_seed", "order", "payload_bits", "payload_pattern", "offset_fraction",
    "snr_db", "trials", "offsets", "snrs_db", "roi",
)


def _load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        if isinstance(data.get("offsets"), list):
            data["offsets"] = tuple(data["offsets"])
        if isinstance(data.get("snrs_db"), list):
            data["snrs_db"] = tuple(data["snrs_db"])
        if isinstance(data.get("roi"), list):
            data["roi"] = tuple(data["roi"])
    for field in _OVERRIDE_FIELDS:
        value = getattr(args, field, None)
        if value is not None:
            data[field] = value
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir)
        if args.command == "sweep-ber":
            return cmd_sweep_ber(cfg, out_dir, jobs=max(1, args.jobs))
        if args.command == "decode-image":
            return cmd_decode_image(cfg, args.image, out_dir)
        if args.command == "offset-demo":
            return cmd_offset_demo(cfg, out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except SyncFailureError as exc:
        print(f"error: sync failure: {exc}", file=sys.stderr)
        return EXIT_SYNC
    except UnusableCaptureError as exc:
        print(f"error: unusable capture: {exc}", file=sys.stderr)
        return EXIT_UNUSABLE
    except (ConfigError, DomainError, ShapeError, OccLinkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
