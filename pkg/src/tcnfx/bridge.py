"""Localhost control/audio bridge for UI front ends.

A small WebSocket (RFC 6455) server carrying JSON text frames, so any
browser can drive an engine without extra dependencies on either side.
One engine per server; one client at a time, messages handled strictly
in order (control changes therefore land at block boundaries).

Messages, all JSON objects with a "type" field and an optional "id" the
reply echoes:

  -> {"type": "hello"}
  <- {"type": "hello", "protocol": 1, "block_size": .., "sample_rate": ..,
      "bounds": {field: [lo, hi], ..}, "indicators": {..}}

  -> {"type": "set_config", "config": {full NetworkConfig},
      "gains": {"input_gain_db", "output_gain_db", "mix", "dc_blocker"}}
  <- {"type": "indicators", "rf_samples": int, "rf_ms": float,
      "rf_ms_text": "canonical .1f string", "params": int, "seed": "str",
      "dead_network": bool, "config": {..}}   (gains may be partial)

  -> {"type": "audio_block", "n": int, "channels": int, "samples": base64}
  <- {"type": "audio_block", "n": int, "channels": int, "samples": base64}

  -> {"type": "reset"}
  <- {"type": "ok"}

  <- {"type": "error", "field": str, "reason": str}  (any failed request)

Audio payloads are planar little-endian float32 (all of channel 0, then
channel 1), base64-encoded to fit text frames. rf_ms_text and seed are
strings so displays can echo them without any float or 64-bit integer
formatting of their own.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import struct
import threading

import numpy as np

from . import config as cfgmod
from .config import (
    NetworkConfig,
    format_rf_ms,
    param_count,
    receptive_field,
    rf_milliseconds,
)
from .engine import StreamEngine
from .errors import TcnfxError

PROTOCOL_VERSION = 1

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_MAX_MESSAGE = 16 * 1024 * 1024

_OP_CONT, _OP_TEXT, _OP_CLOSE, _OP_PING, _OP_PONG = 0x0, 0x1, 0x8, 0x9, 0xA

_CONFIG_FIELDS = ("num_layers", "kernel_size", "dilation_growth",
                  "channel_width", "in_channels", "out_channels",
                  "activation", "init_scheme", "init_param",
                  "depthwise", "use_bias", "seed")

FIELD_BOUNDS = {
    "num_layers": (cfgmod.MIN_LAYERS, cfgmod.MAX_LAYERS),
    "kernel_size": (cfgmod.MIN_KERNEL, cfgmod.MAX_KERNEL),
    "dilation_growth": (cfgmod.MIN_DILATION_GROWTH, cfgmod.MAX_DILATION_GROWTH),
    "channel_width": (cfgmod.MIN_CHANNEL_WIDTH, cfgmod.MAX_CHANNEL_WIDTH),
    "in_channels": (cfgmod.MIN_IO_CHANNELS, cfgmod.MAX_IO_CHANNELS),
    "out_channels": (cfgmod.MIN_IO_CHANNELS, cfgmod.MAX_IO_CHANNELS),
}

_KNOWN_FIELDS = set(_CONFIG_FIELDS) | {
    "input_gain_db", "output_gain_db", "mix", "dc_blocker",
    "block_size", "sample_rate", "block", "samples", "channels", "n",
    "type", "config", "gains",
}


class BridgeError(TcnfxError):
    """Request-level failure; carries the offending field for the reply."""

    def __init__(self, field: str, reason: str):
        super().__init__(reason)
        self.field = field
        self.reason = reason


def _field_of(exc: Exception) -> str:
    first = str(exc).split(" ", 1)[0].rstrip(":")
    return first if first in _KNOWN_FIELDS else ""


def config_to_dict(config: NetworkConfig) -> dict:
    d = {k: getattr(config, k) for k in _CONFIG_FIELDS}
    d["seed"] = str(config.seed)  # may exceed 2^53, unsafe as a JS number
    return d


def config_from_dict(d: dict, base: NetworkConfig | None = None) -> NetworkConfig:
    """Build a config from a JSON object, filling gaps from `base`.

    Partial payloads keep the unmentioned fields of the last acknowledged
    config rather than silently resetting them to defaults.
    """
    if not isinstance(d, dict):
        raise BridgeError("config", "config must be an object")
    unknown = set(d) - set(_CONFIG_FIELDS)
    if unknown:
        raise BridgeError(sorted(unknown)[0], "unknown config field")
    values = dict(d)
    if "seed" in values and isinstance(values["seed"], str):
        try:
            values["seed"] = int(values["seed"], 10)
        except ValueError:
            raise BridgeError("seed", f"seed is not an integer: {values['seed']!r}") from None
    if "init_param" in values and values["init_param"] is not None:
        values["init_param"] = float(values["init_param"])
    if base is not None:
        filled = {k: getattr(base, k) for k in _CONFIG_FIELDS}
        filled.update(values)
        values = filled
    return NetworkConfig(**values)


def encode_samples(x: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(x, dtype="<f4").tobytes()).decode("ascii")


def decode_samples(payload: str, channels: int, n: int) -> np.ndarray:
    try:
        raw = base64.b64decode(payload, validate=True)
    except Exception:
        raise BridgeError("samples", "samples is not valid base64") from None
    if len(raw) != channels * n * 4:
        raise BridgeError(
            "samples", f"expected {channels * n * 4} bytes for {channels}x{n} "
                       f"float32 samples, got {len(raw)}")
    return np.frombuffer(raw, dtype="<f4").reshape(channels, n).astype(np.float32)


class _Session:
    """Message handling for one engine, independent of the transport."""

    def __init__(self, engine: StreamEngine):
        self.engine = engine
        # The engine adopts swaps lazily at block boundaries, so the last
        # acknowledged config is tracked here, not read back from it.
        self._acked_config = engine.config

    def indicators(self, config: NetworkConfig | None = None) -> dict:
        eng = self.engine
        cfg = self._acked_config if config is None else config
        rf = receptive_field(cfg)
        return {
            "rf_samples": rf,
            "rf_ms": rf_milliseconds(rf, eng.sample_rate),
            "rf_ms_text": format_rf_ms(rf, eng.sample_rate),
            "params": param_count(cfg),
            "seed": str(cfg.seed),
            "dead_network": eng.dead_network,
            "config": config_to_dict(cfg),
        }

    def handle(self, message: dict) -> dict:
        mtype = message.get("type")
        if mtype == "hello":
            return {
                "type": "hello",
                "protocol": PROTOCOL_VERSION,
                "block_size": self.engine.block_size,
                "sample_rate": self.engine.sample_rate,
                "bounds": {k: list(v) for k, v in FIELD_BOUNDS.items()},
                "indicators": self.indicators(),
            }
        if mtype == "set_config":
            new_config = config_from_dict(message.get("config", {}), self._acked_config)
            gains = message.get("gains", {})
            if not isinstance(gains, dict):
                raise BridgeError("gains", "gains must be an object")
            unknown = set(gains) - {"input_gain_db", "output_gain_db", "mix", "dc_blocker"}
            if unknown:
                raise BridgeError(sorted(unknown)[0], "unknown gain field")
            cal = None
            if new_config != self._acked_config:
                cal = self.engine.swap_network(new_config)
                self._acked_config = new_config
            self.engine.set_gains(
                input_gain_db=gains.get("input_gain_db"),
                output_gain_db=gains.get("output_gain_db"),
                mix=gains.get("mix"),
                dc_blocker=gains.get("dc_blocker"),
            )
            # Indicators reflect the just-acknowledged config even though
            # the audio path adopts it at the next block boundary.
            reply = {"type": "indicators"}
            reply.update(self.indicators(new_config))
            if cal is not None:
                reply["dead_network"] = cal.dead
            return reply
        if mtype == "audio_block":
            n = message.get("n")
            channels = message.get("channels")
            if not isinstance(n, int) or n < 1:
                raise BridgeError("n", f"n must be a positive integer, got {n!r}")
            if not isinstance(channels, int):
                raise BridgeError("channels", "channels must be an integer")
            x = decode_samples(message.get("samples", ""), channels, n)
            if not np.isfinite(x).all():
                raise BridgeError("samples", "samples contain NaN or Inf")
            out = self.engine.process_block(x)
            return {
                "type": "audio_block",
                "n": out.length,
                "channels": out.channels,
                "samples": encode_samples(out.samples),
            }
        if mtype == "reset":
            self.engine.reset()
            return {"type": "ok"}
        raise BridgeError("type", f"unknown message type {mtype!r}")


class BridgeServer:
    """Serves one engine over WebSocket on localhost."""

    def __init__(self, engine: StreamEngine, host: str = "127.0.0.1", port: int = 0):
        self.session = _Session(engine)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(1)
        self.host, self.port = self._sock.getsockname()
        self._running = True
        self._thread: threading.Thread | None = None
        self._client: socket.socket | None = None

    # -- websocket plumbing ---------------------------------------------------

    @staticmethod
    def _handshake(conn: socket.socket, rfile) -> bool:
        request = b""
        while b"\r\n\r\n" not in request:
            chunk = rfile.readline()
            if not chunk:
                return False
            request += chunk
            if len(request) > 65536:
                return False
        headers = {}
        for line in request.decode("latin-1").split("\r\n")[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        key = headers.get("sec-websocket-key")
        if headers.get("upgrade", "").lower() != "websocket" or not key:
            conn.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return False
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()).decode("ascii")
        conn.sendall(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\n"
            b"Connection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + accept.encode("ascii") + b"\r\n\r\n")
        return True

    @staticmethod
    def _read_frame(rfile):
        head = rfile.read(2)
        if len(head) < 2:
            return None, None
        fin = bool(head[0] & 0x80)
        opcode = head[0] & 0x0F
        masked = bool(head[1] & 0x80)
        length = head[1] & 0x7F
        if length == 126:
            ext = rfile.read(2)
            if len(ext) < 2:
                return None, None
            length = struct.unpack(">H", ext)[0]
        elif length == 127:
            ext = rfile.read(8)
            if len(ext) < 8:
                return None, None
            length = struct.unpack(">Q", ext)[0]
        if length > _MAX_MESSAGE:
            return None, None
        mask = rfile.read(4) if masked else b""
        payload = rfile.read(length) if length else b""
        if len(payload) < length:
            return None, None
        if masked and length:
            data = np.frombuffer(payload, dtype=np.uint8)
            key = np.frombuffer((mask * (length // 4 + 1))[:length], dtype=np.uint8)
            payload = (data ^ key).tobytes()
        return (fin, opcode), payload

    @staticmethod
    def _send_frame(conn: socket.socket, opcode: int, payload: bytes) -> None:
        header = bytearray([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header.append(n)
        elif n < 65536:
            header.append(126)
            header += struct.pack(">H", n)
        else:
            header.append(127)
            header += struct.pack(">Q", n)
        conn.sendall(bytes(header) + payload)

    def send_text(self, conn: socket.socket, text: str) -> None:
        self._send_frame(conn, _OP_TEXT, text.encode("utf-8"))

    # -- serving --------------------------------------------------------------

    def _serve_client(self, conn: socket.socket) -> None:
        rfile = conn.makefile("rb")
        if not self._handshake(conn, rfile):
            return
        fragments: list[bytes] = []
        frag_opcode = None
        while self._running:
            meta, payload = self._read_frame(rfile)
            if meta is None:
                return
            fin, opcode = meta
            if opcode == _OP_CLOSE:
                self._send_frame(conn, _OP_CLOSE, payload[:2])
                return
            if opcode == _OP_PING:
                self._send_frame(conn, _OP_PONG, payload)
                continue
            if opcode == _OP_PONG:
                continue
            if opcode == _OP_CONT:
                if frag_opcode is None:
                    return
                fragments.append(payload)
            elif opcode == _OP_TEXT:
                fragments = [payload]
                frag_opcode = opcode
            else:
                return  # binary frames are not part of the protocol
            if not fin:
                if sum(map(len, fragments)) > _MAX_MESSAGE:
                    return
                continue
            text = b"".join(fragments).decode("utf-8", errors="replace")
            fragments, frag_opcode = [], None
            self.send_text(conn, self._respond(text))

    def _respond(self, text: str) -> str:
        msg_id = None
        try:
            try:
                message = json.loads(text)
            except json.JSONDecodeError as e:
                raise BridgeError("", f"invalid JSON: {e}") from None
            if not isinstance(message, dict):
                raise BridgeError("", "message must be a JSON object")
            msg_id = message.get("id")
            reply = self.session.handle(message)
        except BridgeError as e:
            reply = {"type": "error", "field": e.field, "reason": e.reason}
        except TcnfxError as e:
            reply = {"type": "error", "field": _field_of(e), "reason": str(e)}
        if msg_id is not None:
            reply["id"] = msg_id
        return json.dumps(reply)

    def serve_forever(self) -> None:
        while self._running:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return  # listening socket closed by shutdown()
            with conn:
                self._client = conn
                try:
                    self._serve_client(conn)
                except (ConnectionError, OSError, ValueError):
                    pass
                finally:
                    self._client = None

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()

    def shutdown(self) -> None:
        self._running = False
        try:
            self._sock.close()
        except OSError:
            pass
        client = self._client
        if client is not None:
            try:
                client.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
        if self._thread is not None:
            self._thread.join(timeout=5.0)
