"""Binary state checkpoints.

Layout (all integers little-endian):

    bytes 0..3    magic "MPES"
    bytes 4..7    format version, uint32 (currently 1)
    bytes 8..19   grid dims nx, ny, np as three uint32
    next 4        config byte length L, uint32
    next L        serialized run configuration, UTF-8
    rest          four float64 arrays v1, v2, theta, q in physical space,
                  C order (ix, iy, ip) with ip fastest

The embedded configuration carries the resume time in time.t0, so a restart
rebuilds the exact state: the float64 payload round-trips bit-exactly.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DataError
from .fields import Field3D
from .state import State

MAGIC = b"MPES"
VERSION = 1


def write_checkpoint(path: str, state: State, cfg) -> None:
    """Write state plus its run configuration (resume time patched in)."""
    from . import config as config_mod

    phys = state.as_physical()
    cfg_text = config_mod.serialize(cfg.with_(t0=float(state.t)))
    blob = cfg_text.encode("utf-8")
    g = state.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<III", g.nx, g.ny, g.np))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for f in phys.fields:
            data = np.ascontiguousarray(f.data, dtype="<f8")
            fh.write(data.tobytes())


def read_checkpoint(path: str):
    """-> (RunConfig, State); the state's time is the stored time.t0."""
    from . import config as config_mod

    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 20 or raw[:4] != MAGIC:
        raise DataError(f"{path!r} is not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != VERSION:
        raise DataError(f"unsupported checkpoint version {version}")
    nx, ny, npp = struct.unpack_from("<III", raw, 8)
    (blob_len,) = struct.unpack_from("<I", raw, 20)
    blob_start = 24
    blob_end = blob_start + blob_len
    if len(raw) < blob_end:
        raise DataError("checkpoint truncated inside the config block")
    cfg = config_mod.parse(raw[blob_start:blob_end].decode("utf-8"))
    if (cfg.nx, cfg.ny, cfg.np) != (nx, ny, npp):
        raise DataError(
            f"checkpoint header dims {(nx, ny, npp)} disagree with its config "
            f"({cfg.nx}, {cfg.ny}, {cfg.np})")
    grid = config_mod.build_grid(cfg)
    count = nx * ny * npp
    need = blob_end + 4 * count * 8
    if len(raw) != need:
        raise DataError(f"checkpoint payload is {len(raw) - blob_end} bytes, expected {4 * count * 8}")
    fields = []
    offset = blob_end
    for _ in range(4):
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        fields.append(Field3D.physical(grid, arr.reshape(nx, ny, npp).copy()))
        offset += count * 8
    v1, v2, theta, q = fields
    return cfg, State(v1, v2, theta, q, t=cfg.t0)
