"""On-disk artifacts: atomic writes, binary field dumps, CSV exports.

Binary layout (shared by noise and trajectory dumps): a little-endian header
of five 64-bit fields ``(nx: int64, nt: int64, dx: float64, dt: float64,
seed: uint64)`` followed by the rows as row-major little-endian float64.
"""
from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

HEADER = struct.Struct("<qqddQ")


def atomic_write(path, data):
    """Write ``data`` (bytes or str) to ``path`` via a temp file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def pack_binary(rows, grid, seed):
    rows = np.ascontiguousarray(rows, dtype="<f8")
    seed = 0 if seed is None else int(seed) & (2**64 - 1)
    return HEADER.pack(grid.nx, grid.nt, grid.dx, grid.dt, seed) + rows.tobytes(order="C")


def write_binary(path, rows, grid, seed):
    atomic_write(path, pack_binary(rows, grid, seed))


def read_binary(path):
    """Returns ``(header_dict, array)`` with the array shaped ``(rows, nx)``."""
    raw = Path(path).read_bytes()
    nx, nt, dx, dt, seed = HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    return dict(nx=nx, nt=nt, dx=dx, dt=dt, seed=seed), data.reshape(-1, nx).copy()


def trajectory_csv(traj, every=1):
    """CSV text with columns ``t,x,m1,m2``; keeps every ``every``-th time row plus the last."""
    rows = list(range(0, traj.m1.shape[0], max(int(every), 1)))
    if rows[-1] != traj.m1.shape[0] - 1:
        rows.append(traj.m1.shape[0] - 1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "m1", "m2"])
    x = traj.grid.x
    for k in rows:
        t = k * traj.grid.dt
        for j in range(traj.grid.nx):
            w.writerow([repr(float(t)), repr(float(x[j])), repr(float(traj.m1[k, j])),
                        repr(float(traj.m2[k, j]))])
    return buf.getvalue()


def table_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def write_trajectory(out_dir, traj, sidecar_text, csv_every=1):
    """Write ``m1.bin``, ``m2.bin``, ``params.txt`` and ``trajectory.csv`` under ``out_dir``."""
    out_dir = Path(out_dir)
    seeds = traj.meta.get("seeds", (None, None))
    for name, rows, seed in zip(("m1", "m2"), traj.components, seeds):
        write_binary(out_dir / f"{name}.bin", rows, traj.grid, seed)
    atomic_write(out_dir / "params.txt", sidecar_text)
    atomic_write(out_dir / "trajectory.csv", trajectory_csv(traj, csv_every))
    return out_dir
