"""LED dynamics and the optical propagation path.

The LED is modeled as a single-pole low-pass with unit DC gain; the path to
the sensor is a flat positive gain plus additive white Gaussian noise on the
simulation grid, in front of the camera's exposure integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.signal import lfilter

from .exceptions import ConfigError
from .numerics import SeededGaussian, gaussian_stream
from .validation import check_nonnegative, check_positive
from .modem import Waveform


@dataclass(frozen=True)
class LedModel:
    """Single-pole LED response; cutoff_hz None means an ideal (flat) LED."""

    cutoff_hz: float | None = None

    def __post_init__(self):
        if self.cutoff_hz is not None:
            object.__setattr__(self, "cutoff_hz", check_positive(self.cutoff_hz, "cutoff_hz"))

    @classmethod
    def ideal(cls) -> "LedModel":
        return cls(cutoff_hz=None)

    @property
    def is_ideal(self) -> bool:
        return self.cutoff_hz is None

    def smoothing_alpha(self, dt: float) -> float:
        """Per-sample update weight of the discrete one-pole filter."""
        if self.is_ideal:
            raise ConfigError("ideal LED has no filter coefficient")
        return 1.0 - math.exp(-2.0 * math.pi * self.cutoff_hz * dt)


@dataclass(frozen=True)
class OpticalChannel:
    """Flat geometric gain with seeded AWGN per grid sample."""

    gain: float = 1.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gain", check_positive(self.gain, "gain"))
        object.__setattr__(self, "noise_sigma", check_nonnegative(self.noise_sigma, "noise_sigma"))
        object.__setattr__(self, "seed", int(self.seed))


def apply_led(w: Waveform, led: LedModel, initial_state: float | None = None) -> Waveform:
    """Run the waveform through the LED low-pass.

    y[k] = alpha * x[k] + (1 - alpha) * y[k-1], with y[-1] set to the first
    input sample unless initial_state overrides it. Starting from the first
    sample removes the turn-on transient that a zero state would inject.
    """
    if led.is_ideal:
        return w
    alpha = led.smoothing_alpha(w.dt)
    y_init = float(w.samples[0]) if initial_state is None else float(initial_state)
    zi = [(1.0 - alpha) * y_init]
    filtered, _ = lfilter([alpha], [1.0, -(1.0 - alpha)], w.samples, zi=zi)
    return Waveform(samples=filtered, sample_rate=w.sample_rate, t0=w.t0)


def apply_channel(w: Waveform, ch: OpticalChannel) -> Waveform:
    """Scale by the channel gain and add seeded white Gaussian noise."""
    out = ch.gain * w.samples
    if ch.noise_sigma > 0.0:
        gen = SeededGaussian(ch.seed)
        out = out + ch.noise_sigma * gaussian_stream(gen, out.size)
    return Waveform(samples=out, sample_rate=w.sample_rate, t0=w.t0)
