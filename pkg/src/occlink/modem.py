"""Bit mapping, frame assembly, transmit waveform shaping and symbol slicing.

Symbols are normalized M-PAM amplitudes in [-1, 1]. The transmitted optical
waveform is a DC-biased rectangular pulse train: each symbol holds one
constant intensity level for a full symbol period, and the bias keeps the
signal inside [0, max_intensity].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DomainError, ShapeError
from .numerics import coin_flips
from .validation import (
    as_bit_vector,
    as_float_vector,
    check_int_at_least,
    check_positive,
    check_power_of_two,
)


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled real-valued intensity signal."""

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ShapeError("waveform samples must be a nonempty 1-D array")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", check_positive(self.sample_rate, "sample_rate"))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class PamAlphabet:
    """M-PAM amplitude alphabet, levels ascending and symmetric about zero."""

    order: int
    bits_per_symbol: int
    levels: tuple

    def __post_init__(self):
        if self.order != 1 << self.bits_per_symbol:
            raise ConfigError("order must equal 2**bits_per_symbol")
        if len(self.levels) != self.order:
            raise ConfigError("alphabet needs exactly one level per symbol")
        if list(self.levels) != sorted(self.levels):
            raise ConfigError("levels must be ascending")

    @classmethod
    def from_order(cls, order: int) -> "PamAlphabet":
        order = check_power_of_two(order, "order")
        b = order.bit_length() - 1
        levels = tuple((2 * i - (order - 1)) / (order - 1) for i in range(order))
        return cls(order=order, bits_per_symbol=b, levels=levels)

    @property
    def levels_array(self) -> np.ndarray:
        return np.array(self.levels)

    @property
    def spacing(self) -> float:
        return 2.0 / (self.order - 1)


@dataclass(frozen=True)
class TxConfig:
    """Transmitter timing and intensity settings.

    nominal_intensity is the DC bias and equals max_intensity / 2; passing
    any other value is rejected. oversampling sets the simulation grid,
    with exactly that many grid samples per symbol period.
    """

    symbol_duration: float
    max_intensity: float = 1.0
    oversampling: int = 64
    nominal_intensity: float | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "symbol_duration", check_positive(self.symbol_duration, "symbol_duration")
        )
        object.__setattr__(
            self, "max_intensity", check_positive(self.max_intensity, "max_intensity")
        )
        object.__setattr__(
            self, "oversampling", check_int_at_least(self.oversampling, 2, "oversampling")
        )
        bias = self.max_intensity / 2.0
        if self.nominal_intensity is None:
            object.__setattr__(self, "nominal_intensity", bias)
        elif float(self.nominal_intensity) != bias:
            raise ConfigError(
                f"nominal_intensity must equal max_intensity/2 = {bias}, "
                f"got {self.nominal_intensity}"
            )

    @property
    def grid_step(self) -> float:
        return self.symbol_duration / self.oversampling

    @property
    def grid_rate(self) -> float:
        return self.oversampling / self.symbol_duration


@dataclass(frozen=True)
class Frame:
    """Preamble followed by payload symbols, all from one alphabet."""

    preamble: np.ndarray
    payload: np.ndarray
    alphabet: PamAlphabet

    def __post_init__(self):
        pre = as_float_vector(self.preamble, "preamble")
        if not np.all(np.abs(pre) == 1.0):
            raise DomainError("preamble symbols must be -1 or +1")
        pay = np.asarray(self.payload, dtype=np.float64)
        if pay.ndim != 1:
            raise ShapeError("payload must be one-dimensional")
        levels = np.array(self.alphabet.levels)
        if pay.size and np.abs(pay[:, None] - levels[None, :]).min(axis=1).max() > 1e-9:
            raise DomainError("payload symbols must belong to the alphabet")
        pre.flags.writeable = False
        pay.flags.writeable = False
        object.__setattr__(self, "preamble", pre)
        object.__setattr__(self, "payload", pay)

    @property
    def n_pre(self) -> int:
        return self.preamble.size

    @property
    def n_payload(self) -> int:
        return self.payload.size

    @property
    def symbols(self) -> np.ndarray:
        return np.concatenate([self.preamble, self.payload])

    def __len__(self) -> int:
        return self.n_pre + self.n_payload


def default_preamble(length: int = 31) -> np.ndarray:
    """Binary maximal-length sequence mapped to +-1 symbols.

    Generated by the recurrence s[k+5] = s[k+2] XOR s[k] from an all-ones
    seed (period 31, near-ideal autocorrelation); longer requests continue
    the sequence periodically.
    """
    length = check_int_at_least(length, 1, "length")
    bits = [1, 1, 1, 1, 1]
    while len(bits) < max(length, 31):
        bits.append(bits[-3] ^ bits[-5])
    return np.array([1.0 if b else -1.0 for b in bits[:length]])


def _gray_tables(alphabet: PamAlphabet):
    """Level index <-> Gray code lookup over the ascending level order."""
    idx = np.arange(alphabet.order)
    codes = idx ^ (idx >> 1)
    index_of_code = np.empty(alphabet.order, dtype=np.int64)
    index_of_code[codes] = idx
    return codes, index_of_code


def map_bits(bits, alphabet: PamAlphabet) -> np.ndarray:
    """Map a bit sequence to symbols, b bits per symbol, Gray coded."""
    bits = as_bit_vector(bits, "bits")
    b = alphabet.bits_per_symbol
    if bits.size % b:
        raise ShapeError(f"bit count {bits.size} is not a multiple of {b}")
    groups = bits.reshape(-1, b)
    weights = 1 << np.arange(b - 1, -1, -1)
    codes = groups @ weights
    _, index_of_code = _gray_tables(alphabet)
    return alphabet.levels_array[index_of_code[codes]]


def symbols_to_bits(symbols, alphabet: PamAlphabet) -> np.ndarray:
    """Inverse of map_bits over the same Gray table."""
    symbols = np.asarray(symbols, dtype=np.float64)
    if symbols.ndim != 1:
        raise ShapeError("symbols must be one-dimensional")
    levels = alphabet.levels_array
    idx = np.abs(symbols[:, None] - levels[None, :]).argmin(axis=1)
    if symbols.size and np.abs(symbols - levels[idx]).max() > 1e-9:
        raise DomainError("symbol not in alphabet")
    codes, _ = _gray_tables(alphabet)
    b = alphabet.bits_per_symbol
    shifts = np.arange(b - 1, -1, -1)
    return ((codes[idx][:, None] >> shifts[None, :]) & 1).reshape(-1).astype(np.int64)


def build_frame(preamble, payload_bits, alphabet: PamAlphabet) -> Frame:
    """Assemble a frame from preamble symbols and Gray-mapped payload bits."""
    preamble = np.asarray(preamble, dtype=np.float64)
    if preamble.ndim != 1 or preamble.size == 0:
        raise ConfigError("preamble must be a nonempty symbol sequence")
    payload = map_bits(payload_bits, alphabet)
    return Frame(preamble=preamble, payload=payload, alphabet=alphabet)


def shape_symbols(symbols, cfg: TxConfig) -> Waveform:
    """Rectangular pulse train for an arbitrary amplitude sequence.

    Each amplitude a yields oversampling grid samples at the constant
    intensity nominal_intensity * (1 + a); amplitude 0 therefore encodes
    idle light at the bias level.
    """
    symbols = as_float_vector(symbols, "symbols")
    if np.abs(symbols).max() > 1.0 + 1e-12:
        raise DomainError("amplitudes beyond +-1 would leave the intensity range")
    samples = cfg.nominal_intensity * (1.0 + np.repeat(symbols, cfg.oversampling))
    return Waveform(samples=samples, sample_rate=cfg.grid_rate)


def shape_waveform(frame: Frame, cfg: TxConfig) -> Waveform:
    """Shape a frame into the DC-biased rectangular transmit waveform."""
    return shape_symbols(frame.symbols, cfg)


def slice_symbols(samples, alphabet: PamAlphabet, rng_seed: int = 0) -> np.ndarray:
    """Nearest-level decision on normalized samples.

    Out-of-range samples clamp to the extreme levels. A sample exactly on
    the midpoint between two levels is resolved by an unbiased coin flip
    from the seeded stream; flips are consumed in sample order, so the
    result is reproducible for a fixed seed.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ShapeError("samples must be one-dimensional")
    levels = alphabet.levels_array
    midpoints = (levels[:-1] + levels[1:]) / 2.0
    idx = np.searchsorted(midpoints, samples, side="right")
    on_midpoint = (idx >= 1) & (samples == midpoints[np.minimum(idx, midpoints.size) - 1])
    n_events = int(on_midpoint.sum())
    if n_events:
        take_lower = coin_flips(int(rng_seed), n_events)
        idx = idx.copy()
        idx[on_midpoint] -= take_lower.astype(np.int64)
    return levels[idx]
