"""Scikit-learn style receiver: fit on a capture, then equalize and decode.

The estimator consumes normalized row samples (see camera.normalize_rows).
fit() locates the frame, estimates the channel and designs the equalizer;
transform() returns frame-aligned equalized samples and predict() returns
the decoded payload bits.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .camera import RowSamples
from .equalizer import design_zf, equalize, estimate_channel, find_frame_start
from .exceptions import ShapeError, SyncFailureError
from .modem import Frame, PamAlphabet, default_preamble, slice_symbols, symbols_to_bits


class RollingShutterReceiver(BaseEstimator, TransformerMixin):
    """Sync, estimate, equalize and slice one rolling-shutter capture.

    Parameters
    ----------
    order : PAM order M.
    preamble : known +-1 preamble symbols; None selects the default
        length-31 sequence.
    payload_symbols : payload length in symbols; None infers the longest
        payload the fitted capture can carry.
    tap_count : channel memory L_c; the estimator fits tap_count + 1 taps.
    eq_taps : equalizer length.
    delay : equalizer target delay, or "auto" to minimize residual
        distortion.
    sync_threshold : minimum correlation peak accepted by the preamble
        search.
    sync_advance : rows subtracted from the correlation peak so the tap
        model stays causal when rows lean on the next symbol.
    frame_start : known causal frame-start row; skips correlation search.
    slice_seed : seed for midpoint tie-break coin flips while slicing.
    """

    def __init__(
        self,
        order: int = 2,
        preamble=None,
        payload_symbols: int | None = None,
        tap_count: int = 2,
        eq_taps: int = 31,
        delay="auto",
        sync_threshold: float = 0.5,
        sync_advance: int = 1,
        frame_start: int | None = None,
        slice_seed: int = 0,
    ):
        self.order = order
        self.preamble = preamble
        self.payload_symbols = payload_symbols
        self.tap_count = tap_count
        self.eq_taps = eq_taps
        self.delay = delay
        self.sync_threshold = sync_threshold
        self.sync_advance = sync_advance
        self.frame_start = frame_start
        self.slice_seed = slice_seed

    def _as_rows(self, X) -> RowSamples:
        if isinstance(X, RowSamples):
            return X
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if arr.ndim != 1:
            raise ShapeError(
                f"expected one capture as a 1-D array of row samples, got shape {arr.shape}"
            )
        return RowSamples(values=arr, row_period=1.0)

    def _resolved_preamble(self) -> np.ndarray:
        if self.preamble is None:
            return default_preamble()
        return np.asarray(self.preamble, dtype=np.float64)

    def fit(self, X, y=None):
        """Locate the frame and design the equalizer from the preamble."""
        rows = self._as_rows(X)
        alphabet = PamAlphabet.from_order(self.order)
        preamble = self._resolved_preamble()
        if self.frame_start is not None:
            n_0 = int(self.frame_start)
        else:
            peak = find_frame_start(rows, preamble, threshold=self.sync_threshold)
            n_0 = peak - int(self.sync_advance)
            if n_0 < 0:
                raise SyncFailureError(
                    f"correlation peak at row {peak} leaves no room for the causal start"
                )
        reference = Frame(preamble=preamble, payload=np.zeros(0), alphabet=alphabet)
        estimate = estimate_channel(rows, reference, n_0, int(self.tap_count))
        zf = design_zf(estimate, int(self.eq_taps), self.delay)

        if self.payload_symbols is None:
            frame_len = rows.values.size - n_0 - zf.taps.size + 1
            payload_symbols = frame_len - preamble.size
        else:
            payload_symbols = int(self.payload_symbols)
        if payload_symbols < 0:
            raise ShapeError("capture too short for any payload after the preamble")

        self.alphabet_ = alphabet
        self.preamble_ = preamble
        self.frame_start_ = n_0
        self.channel_taps_ = estimate.taps
        self.residual_norm_ = estimate.residual_norm
        self.equalizer_taps_ = zf.taps
        self.delay_ = zf.delay
        self.residual_isi_ = zf.residual_isi
        self.payload_symbols_ = payload_symbols
        self.zf_ = zf
        return self

    def _check_fitted(self):
        if not hasattr(self, "zf_"):
            raise NotFittedError("this receiver is not fitted yet; call fit first")

    def transform(self, X) -> np.ndarray:
        """Equalized samples aligned so index j is frame symbol j."""
        self._check_fitted()
        rows = self._as_rows(X)
        frame_len = self.preamble_.size + self.payload_symbols_
        return equalize(rows, self.zf_, self.frame_start_, frame_len)

    def predict(self, X) -> np.ndarray:
        """Decoded payload bits for a capture."""
        equalized = self.transform(X)
        payload = equalized[self.preamble_.size:]
        symbols = slice_symbols(payload, self.alphabet_, rng_seed=int(self.slice_seed))
        return symbols_to_bits(symbols, self.alphabet_)
