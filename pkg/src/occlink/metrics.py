"""Link quality metrics: error rates, histograms, cluster counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, ShapeError
from .validation import as_bit_vector, check_int_at_least


@dataclass(frozen=True)
class LinkReport:
    """Error rates and channel summary for one decoded capture."""

    ber: float
    ser: float
    n_bits: int
    n_symbols: int
    offset_fraction: float
    residual_isi: float
    estimated_taps: tuple
    snr_db: float | None = None

    def __post_init__(self):
        if self.n_bits < 0 or self.n_symbols < 0:
            raise ConfigError("counts must be nonnegative")
        for name in ("ber", "ser"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {rate}")
        if self.n_symbols > 0:
            bits_per_symbol = self.n_bits / self.n_symbols
            if self.ber > self.ser * bits_per_symbol + 1e-12:
                raise ConfigError(
                    "inconsistent rates: more bit errors than symbol errors allow"
                )
        object.__setattr__(self, "estimated_taps", tuple(float(t) for t in self.estimated_taps))

    def to_dict(self) -> dict:
        return {
            "ber": float(self.ber),
            "ser": float(self.ser),
            "n_bits": int(self.n_bits),
            "n_symbols": int(self.n_symbols),
            "snr_db": None if self.snr_db is None else float(self.snr_db),
            "offset_fraction": float(self.offset_fraction),
            "residual_isi": float(self.residual_isi),
            "estimated_taps": list(self.estimated_taps),
        }


@dataclass(frozen=True)
class Histogram:
    """Counts over uniform bins; edge bins absorb out-of-range samples."""

    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.ascontiguousarray(self.bin_edges, dtype=np.float64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if edges.ndim != 1 or counts.ndim != 1 or counts.size != edges.size - 1:
            raise ShapeError("need len(counts) == len(bin_edges) - 1")
        edges.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def bit_error_rate(tx_bits, rx_bits) -> float:
    """Hamming distance over length for two equal-length bit sequences."""
    tx = as_bit_vector(tx_bits, "tx_bits")
    rx = as_bit_vector(rx_bits, "rx_bits")
    if tx.size != rx.size:
        raise ShapeError(f"bit sequences differ in length: {tx.size} vs {rx.size}")
    if tx.size == 0:
        raise ShapeError("bit sequences must be nonempty")
    return float(np.count_nonzero(tx != rx)) / tx.size


def symbol_error_rate(tx_symbols, rx_symbols) -> float:
    tx = np.asarray(tx_symbols, dtype=np.float64)
    rx = np.asarray(rx_symbols, dtype=np.float64)
    if tx.shape != rx.shape or tx.ndim != 1:
        raise ShapeError("symbol sequences must be 1-D and equally long")
    if tx.size == 0:
        raise ShapeError("symbol sequences must be nonempty")
    return float(np.count_nonzero(tx != rx)) / tx.size


def histogram(samples, n_bins: int, value_range: tuple[float, float]) -> Histogram:
    """Uniform-bin histogram; samples outside the range land in edge bins."""
    n_bins = check_int_at_least(n_bins, 1, "n_bins")
    low, high = float(value_range[0]), float(value_range[1])
    if not low < high:
        raise ConfigError(f"need range low < high, got ({low}, {high})")
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    edges = np.linspace(low, high, n_bins + 1)
    counts, _ = np.histogram(np.clip(samples, low, high), bins=edges)
    return Histogram(bin_edges=edges, counts=counts)


def detect_clusters(h: Histogram, min_prominence: float = 0.05) -> int:
    """Count local maxima whose prominence clears the threshold.

    Plateaus collapse to one candidate. The prominence of a peak is its
    height minus the higher of the two valleys reached walking outward
    until strictly taller terrain (or the histogram edge); a side with no
    elements is ignored. The threshold is min_prominence * max(counts).
    """
    if not float(min_prominence) > 0.0:
        raise ConfigError(f"min_prominence must be positive, got {min_prominence}")
    c = h.counts
    top = int(c.max()) if c.size else 0
    if top == 0:
        return 0
    # collapse equal neighbors into runs of (height, first bin index)
    heights = [int(c[0])]
    for v in c[1:]:
        if int(v) != heights[-1]:
            heights.append(int(v))
    n_runs = len(heights)
    threshold = float(min_prominence) * top
    clusters = 0
    for i, v in enumerate(heights):
        left_lower = i == 0 or heights[i - 1] < v
        right_lower = i == n_runs - 1 or heights[i + 1] < v
        if not (left_lower and right_lower):
            continue
        valleys = []
        for step in (-1, 1):
            j = i + step
            valley = None
            while 0 <= j < n_runs and heights[j] <= v:
                valley = heights[j] if valley is None else min(valley, heights[j])
                j += step
            if valley is not None:
                valleys.append(valley)
        prominence = v - max(valleys) if valleys else v
        if prominence >= threshold:
            clusters += 1
    return clusters
