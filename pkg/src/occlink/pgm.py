"""Binary PGM (P5) reading and writing for stripe images.

Written files use the canonical header "P5\\n{width} {height}\\n{maxval}\\n"
followed by row-major samples, one byte per pixel up to maxval 255 and two
big-endian bytes above that. The reader additionally tolerates arbitrary
header whitespace and '#' comments, which other producers emit.
"""

from __future__ import annotations

import numpy as np

from .camera import StripeImage
from .exceptions import ConfigError, ShapeError


def write_pgm(img: StripeImage, path) -> None:
    header = f"P5\n{img.cols} {img.rows}\n{img.max_value}\n".encode("ascii")
    if img.bit_depth == 8:
        body = img.pixels.astype(np.uint8).tobytes()
    else:
        body = img.pixels.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def _read_header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Pull whitespace-separated tokens, skipping '#' comments to line end."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ShapeError("truncated PGM header")
        c = data[pos:pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    # exactly one whitespace byte separates the header from the samples
    return tokens, pos + 1


def read_pgm(path) -> StripeImage:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P5":
        raise ConfigError("not a binary PGM file (missing P5 magic)")
    tokens, body_start = _read_header_tokens(data[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ConfigError(f"malformed PGM header fields {tokens!r}") from None
    if width < 1 or height < 1:
        raise ShapeError(f"bad PGM dimensions {width}x{height}")
    if maxval == 255:
        bit_depth, dtype, step = 8, np.uint8, 1
    elif maxval == 65535:
        bit_depth, dtype, step = 16, ">u2", 2
    else:
        raise ConfigError(f"unsupported PGM maxval {maxval}, expected 255 or 65535")
    body = data[2 + body_start:]
    expected = width * height * step
    if len(body) < expected:
        raise ShapeError(f"PGM body has {len(body)} bytes, expected {expected}")
    pixels = np.frombuffer(body[:expected], dtype=dtype).reshape(height, width)
    if bit_depth == 16:
        pixels = pixels.astype(np.uint16)
    return StripeImage(rows=height, cols=width, bit_depth=bit_depth, pixels=pixels.copy())
