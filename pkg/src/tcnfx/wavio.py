"""Minimal RIFF/WAVE reader and writer.

Reads 16-bit and 24-bit PCM plus 32-bit float files into planar float32
buffers (PCM is scaled by 1/32768 and 1/2^23 so full-scale negative maps
to -1.0). Writes 32-bit float or 16-bit PCM; the PCM path rounds half
away from zero and clips to the int16 range. Unknown chunks are skipped
on read, including the extensible fmt variant.
"""

from __future__ import annotations

import struct

import numpy as np

from .audio import AudioBuffer
from .errors import WavError

_FMT_PCM = 1
_FMT_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE

PCM16_SCALE = 32768.0
PCM24_SCALE = float(2**23)

WRITE_FORMATS = ("float32", "pcm16")


def _read_chunks(data: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body, honoring pad bytes."""
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        pos += 8
        if pos + size > len(data):
            raise WavError(f"chunk {cid!r} claims {size} bytes past end of file")
        yield cid, data[pos:pos + size]
        pos += size + (size & 1)


def read_wav(path) -> AudioBuffer:
    """Load a WAV file as a planar float32 buffer."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, body in _read_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise WavError(f"{path}: fmt chunk too short ({len(body)} bytes)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _FMT_EXTENSIBLE:
                if len(body) < 26:
                    raise WavError(f"{path}: extensible fmt chunk too short")
                sub = struct.unpack_from("<H", body, 24)[0]
                fmt = (sub,) + fmt[1:]
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None:
        raise WavError(f"{path}: missing fmt chunk")
    if payload is None:
        raise WavError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if not 1 <= channels <= 2:
        raise WavError(f"{path}: {channels} channels; only mono and stereo are supported")
    if sample_rate < 1:
        raise WavError(f"{path}: sample rate {sample_rate} is invalid")

    frame = channels * (bits // 8)
    if bits % 8 or frame == 0:
        raise WavError(f"{path}: unsupported bit depth {bits}")
    if len(payload) % frame:
        raise WavError(f"{path}: data chunk is not a whole number of frames")

    if audio_format == _FMT_PCM and bits == 16:
        flat = np.frombuffer(payload, dtype="<i2").astype(np.float32)
        flat /= np.float32(PCM16_SCALE)
    elif audio_format == _FMT_PCM and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        vals = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        vals = (vals ^ 0x800000) - 0x800000  # sign-extend 24 -> 32 bits
        flat = vals.astype(np.float32)
        flat /= np.float32(PCM24_SCALE)
    elif audio_format == _FMT_FLOAT and bits == 32:
        flat = np.frombuffer(payload, dtype="<f4").astype(np.float32)
        if flat.size and not np.isfinite(flat).all():
            raise WavError(f"{path}: float data contains NaN or Inf")
    else:
        raise WavError(
            f"{path}: unsupported format (code {audio_format}, {bits}-bit); "
            "expected 16/24-bit PCM or 32-bit float")

    samples = np.ascontiguousarray(flat.reshape(-1, channels).T)
    return AudioBuffer(samples, sample_rate)


def _encode(buf: AudioBuffer, sample_format: str) -> tuple[int, int, bytes]:
    interleaved = np.ascontiguousarray(buf.samples.T)
    if sample_format == "float32":
        return _FMT_FLOAT, 32, interleaved.astype("<f4").tobytes()
    if sample_format == "pcm16":
        v = interleaved.astype(np.float64) * PCM16_SCALE
        v = np.where(v >= 0.0, np.floor(v + 0.5), np.ceil(v - 0.5))
        v = np.clip(v, -32768, 32767)
        return _FMT_PCM, 16, v.astype("<i2").tobytes()
    raise WavError(f"unsupported write format {sample_format!r}; "
                   f"expected one of {', '.join(WRITE_FORMATS)}")


def write_wav(path, buf: AudioBuffer, sample_format: str = "float32") -> None:
    """Write a planar float32 buffer as a WAV file.

    `sample_format` is "float32" (exact) or "pcm16" (rounded half away
    from zero, clipped to full scale).
    """
    code, bits, payload = _encode(buf, sample_format)
    channels = buf.channels
    byte_rate = buf.sample_rate * channels * bits // 8
    block_align = channels * bits // 8

    chunks = []
    if code == _FMT_FLOAT:
        fmt_body = struct.pack("<HHIIHHH", code, channels, buf.sample_rate,
                               byte_rate, block_align, bits, 0)
        chunks.append((b"fmt ", fmt_body))
        chunks.append((b"fact", struct.pack("<I", buf.length)))
    else:
        fmt_body = struct.pack("<HHIIHH", code, channels, buf.sample_rate,
                               byte_rate, block_align, bits)
        chunks.append((b"fmt ", fmt_body))
    chunks.append((b"data", payload))

    body = bytearray()
    for cid, chunk in chunks:
        body += struct.pack("<4sI", cid, len(chunk))
        body += chunk
        if len(chunk) & 1:
            body += b"\x00"
    with open(path, "wb") as f:
        f.write(struct.pack("<4sI4s", b"RIFF", 4 + len(body), b"WAVE"))
        f.write(bytes(body))
