"""File formats: coordinate observation files, full-precision dense CSV,
binary PGM images, cube flattening, and newline-delimited result records.

The coordinate format is a header line ``m n nnz`` followed by nnz lines
``i j value`` with 1-based indices; lines starting with ``%`` are
comments.  Dense CSV and result records print floats with 17 significant
digits so write/read round-trips are lossless.  PGM files are binary
(P5) with 2-byte big-endian samples whenever maxval exceeds 255.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .masking import ObservedMatrix, SampleMask, as_matrix
from .metrics import EvalReport

__all__ = [
    "read_observed",
    "write_observed",
    "read_dense_csv",
    "write_dense_csv",
    "read_pgm",
    "write_pgm",
    "cube_to_matrix",
    "matrix_to_cube",
    "ResultRecord",
    "write_results",
    "read_results",
    "results_table",
]


def read_observed(path) -> ObservedMatrix:
    """Parse a coordinate observation file.

    Raises ValueError naming the offending line for malformed numbers,
    out-of-bounds indices, duplicate entries, or an entry count that
    disagrees with the header.
    """
    header = None
    m = n = nnz = 0
    entries: dict[tuple, int] = {}
    ii: list[int] = []
    jj: list[int] = []
    vals: list[float] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 3:
                    raise ValueError(f"{path}: line {lineno}: header must be 'm n nnz'")
                try:
                    m, n, nnz = (int(p) for p in parts)
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: header must hold three integers") from None
                if m <= 0 or n <= 0 or nnz < 0:
                    raise ValueError(f"{path}: line {lineno}: bad dimensions {m} {n} {nnz}")
                header = (m, n, nnz)
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 'i j value'")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: could not parse 'i j value'") from None
            if not (1 <= i <= m and 1 <= j <= n):
                raise ValueError(f"{path}: line {lineno}: index ({i}, {j}) outside 1..{m} x 1..{n}")
            if not math.isfinite(v):
                raise ValueError(f"{path}: line {lineno}: value is not finite")
            key = (i - 1, j - 1)
            if key in entries:
                raise ValueError(
                    f"{path}: line {lineno}: duplicate entry ({i}, {j}), first seen on line {entries[key]}")
            entries[key] = lineno
            ii.append(i - 1)
            jj.append(j - 1)
            vals.append(v)
    if header is None:
        raise ValueError(f"{path}: missing header line 'm n nnz'")
    if len(vals) != nnz:
        raise ValueError(f"{path}: header promises {nnz} entries, file holds {len(vals)}")
    ia = np.asarray(ii, dtype=np.int64)
    ja = np.asarray(jj, dtype=np.int64)
    va = np.asarray(vals, dtype=np.float64)
    order = np.argsort(ia * n + ja, kind="stable")
    mask = SampleMask(m, n, ia[order], ja[order])
    return ObservedMatrix(mask, va[order])


def write_observed(observed: ObservedMatrix, path) -> None:
    """Write a coordinate observation file in canonical (sorted) order."""
    m, n = observed.shape
    lines = [f"{m} {n} {observed.mask.count}"]
    for i, j, v in zip(observed.mask.ii, observed.mask.jj, observed.values):
        lines.append(f"{i + 1} {j + 1} {v:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_dense_csv(path) -> np.ndarray:
    """Read a dense comma-separated matrix, complaining per line."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
            if rows and len(row) != len(rows[0]):
                raise ValueError(
                    f"{path}: line {lineno}: ragged row of {len(row)} fields, expected {len(rows[0])}")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def write_dense_csv(a, path) -> None:
    """Write a matrix as CSV with 17 significant digits (lossless for
    float64)."""
    np.savetxt(path, as_matrix(a), fmt="%.17g", delimiter=",")


def _pgm_tokens(buf: bytes):
    """Yield header tokens, skipping whitespace and '#' comments."""
    pos = 0
    while pos < len(buf):
        c = buf[pos:pos + 1]
        if c.isspace():
            pos += 1
            continue
        if c == b"#":
            end = buf.find(b"\n", pos)
            pos = len(buf) if end < 0 else end + 1
            continue
        end = pos
        while end < len(buf) and not buf[end:end + 1].isspace():
            end += 1
        yield buf[pos:end], end
        pos = end


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a binary (P5) PGM image.

    Returns the pixel matrix as float64 plus the header maxval, which
    callers need as the PSNR peak.  Samples are two-byte big-endian when
    maxval exceeds 255.
    """
    buf = Path(path).read_bytes()
    tokens = _pgm_tokens(buf)
    magic = next(tokens, (b"", 0))[0]
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (expected magic P5, got {magic!r})")
    try:
        (wtok, _), (htok, _), (mtok, after) = next(tokens), next(tokens), next(tokens)
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except (StopIteration, ValueError) as exc:
        raise ValueError(f"{path}: malformed PGM header") from exc
    if width <= 0 or height <= 0 or not 1 <= maxval <= 65535:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height} maxval {maxval}")
    start = after + 1  # single whitespace byte separates header from payload
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    if len(buf) - start < need:
        raise ValueError(f"{path}: truncated payload, need {need} bytes, have {len(buf) - start}")
    pixels = np.frombuffer(buf, dtype=dtype, count=width * height, offset=start)
    return pixels.reshape(height, width).astype(np.float64), maxval


def write_pgm(a, max_i: int, path) -> None:
    """Write a matrix as a binary PGM, clamping to [0, max_i] and rounding."""
    a = as_matrix(a)
    max_i = int(max_i)
    if not 1 <= max_i <= 65535:
        raise ValueError(f"maxval must lie in 1..65535, got {max_i}")
    pixels = np.rint(np.clip(a, 0, max_i))
    dtype = np.dtype(">u2") if max_i > 255 else np.dtype("u1")
    h, w = a.shape
    header = f"P5\n{w} {h}\n{max_i}\n".encode("ascii")
    Path(path).write_bytes(header + pixels.astype(dtype).tobytes())


def cube_to_matrix(cube) -> np.ndarray:
    """Flatten a stack of k slices (h x w each) to an (h*w, k) matrix.

    Column j is slice j flattened column by column, so a 80x80x163 cube
    becomes a 6400x163 matrix.
    """
    slices = [as_matrix(s) for s in cube]
    if not slices:
        raise ValueError("cube holds no slices")
    shape = slices[0].shape
    for idx, s in enumerate(slices):
        if s.shape != shape:
            raise ValueError(f"slice {idx} has shape {s.shape}, expected {shape}")
    return np.stack([s.ravel(order="F") for s in slices], axis=1)


def matrix_to_cube(a, rows: int, cols: int) -> np.ndarray:
    """Inverse of cube_to_matrix: (rows*cols, k) back to k slices."""
    a = as_matrix(a)
    if a.shape[0] != rows * cols:
        raise ValueError(f"matrix has {a.shape[0]} rows, expected rows*cols = {rows * cols}")
    return np.stack([a[:, j].reshape((rows, cols), order="F") for j in range(a.shape[1])])


@dataclass
class ResultRecord:
    """Everything one solver run needs to be compared or reproduced:
    solver name, instance descriptor, parameter echo, quality metrics,
    iteration count, and stop reason."""

    solver: str
    m: int
    n: int
    q: int
    r: int | None
    sr: float
    seed: int
    params: dict
    iterations: int
    stop_reason: str
    eval: EvalReport | None = None


def _enc(x):
    if isinstance(x, float) and not math.isfinite(x):
        if math.isnan(x):
            return "nan"
        return "inf" if x > 0 else "-inf"
    return x


def _dec(x):
    return float(x) if isinstance(x, str) else x


def _record_to_dict(rec: ResultRecord) -> dict:
    d = asdict(rec)
    if rec.eval is not None:
        d["eval"] = {k: _enc(v) for k, v in asdict(rec.eval).items()}
    d["params"] = {k: _enc(v) for k, v in rec.params.items()}
    return d


def _record_from_dict(d: dict) -> ResultRecord:
    ev = d.get("eval")
    report = EvalReport(**{k: _dec(v) for k, v in ev.items()}) if ev is not None else None
    return ResultRecord(
        solver=d["solver"], m=d["m"], n=d["n"], q=d["q"], r=d["r"],
        sr=d["sr"], seed=d["seed"],
        params={k: _dec(v) for k, v in d["params"].items()},
        iterations=d["iterations"], stop_reason=d["stop_reason"], eval=report,
    )


def write_results(records, path, table_path=None) -> None:
    """Write records as one self-describing JSON object per line.

    Nonfinite floats are stored as the strings "inf", "-inf", "nan".
    When ``table_path`` is given an aligned human-readable table is
    written there as well.
    """
    with open(path, "w", encoding="ascii") as fh:
        for rec in records:
            fh.write(json.dumps(_record_to_dict(rec)) + "\n")
    if table_path is not None:
        Path(table_path).write_text(results_table(records), encoding="ascii")


def read_results(path) -> list:
    """Read back a result file written by :func:`write_results`."""
    records = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(_record_from_dict(json.loads(line)))
    return records


_TABLE_COLS = ("solver", "m", "n", "q", "r", "sr", "seed", "iters", "stop",
               "rel_err", "mse", "psnr", "cpu_s")


def _fmt_metric(x: float, spec: str) -> str:
    return "inf" if math.isinf(x) else format(x, spec)


def _table_row(rec: ResultRecord) -> tuple:
    ev = rec.eval
    if ev is None:
        rel = mse = psnr = cpu = "-"
    else:
        rel = _fmt_metric(ev.rel_err, ".4e")
        mse = _fmt_metric(ev.mse, ".4e")
        psnr = _fmt_metric(ev.psnr, ".2f")
        cpu = _fmt_metric(ev.cpu_seconds, ".3f")
    return (
        rec.solver, str(rec.m), str(rec.n), str(rec.q),
        "-" if rec.r is None else str(rec.r),
        format(rec.sr, ".3g"), str(rec.seed), str(rec.iterations), rec.stop_reason,
        rel, mse, psnr, cpu,
    )


def results_table(records) -> str:
    """Aligned text table of result records; header only when empty."""
    rows = [_TABLE_COLS] + [_table_row(r) for r in records]
    widths = [max(len(row[c]) for row in rows) for c in range(len(_TABLE_COLS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"
