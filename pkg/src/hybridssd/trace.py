"""Block-I/O trace ingestion and synthetic workload generation.

Two on-disk formats are understood:

* MSR-style: ``Timestamp,Hostname,DiskNumber,Type,Offset,Size,ResponseTime``
  with the timestamp in 100 ns ticks and offset/size in bytes.
* Simple CSV: ``timestamp_us,op,lba,size_bytes`` with ``op`` in ``{R, W}``
  and an optional header line.

LBAs are always 512-byte sectors.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional

import numpy as np

SECTOR_BYTES = 512
DEFAULT_PAGE_BYTES = 4096


class Op(enum.Enum):
    READ = "R"
    WRITE = "W"


class TraceError(ValueError):
    pass


class MalformedLine(TraceError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        self.reason = reason
        msg = f"malformed trace line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class EmptyTrace(TraceError):
    def __init__(self):
        super().__init__("trace contains no valid records")


class OutOfOrder(TraceError):
    def __init__(self, line_no: int, timestamp_us: int, previous_us: int):
        self.line_no = line_no
        super().__init__(
            f"line {line_no}: timestamp {timestamp_us} us precedes {previous_us} us"
        )


@dataclass(frozen=True)
class TraceRecord:
    timestamp_us: int
    op: Op
    lba: int
    size_bytes: int

    def __post_init__(self):
        if self.timestamp_us < 0:
            raise ValueError("timestamp_us must be non-negative")
        if self.lba < 0:
            raise ValueError("lba must be non-negative")
        if self.size_bytes <= 0:
            raise ValueError("size_bytes must be positive")

    @property
    def is_write(self) -> bool:
        return self.op is Op.WRITE

    def pages(self, page_size: int = DEFAULT_PAGE_BYTES) -> range:
        """Logical page numbers touched, starting at the request's first page."""
        first = self.lba * SECTOR_BYTES // page_size
        count = -(-self.size_bytes // page_size)
        return range(first, first + count)


@dataclass(frozen=True)
class SyntheticSpec:
    num_requests: int
    write_ratio: float
    zipf_s: float
    address_space_pages: int
    seed: int = 0

    def __post_init__(self):
        if self.num_requests < 1:
            raise ValueError("num_requests must be positive")
        if not 0.0 <= self.write_ratio <= 1.0:
            raise ValueError("write_ratio must lie in [0, 1]")
        if self.zipf_s < 0:
            raise ValueError("zipf_s must be non-negative")
        if self.address_space_pages < 1:
            raise ValueError("address_space_pages must be >= 1")


def _lines(source) -> Iterator[str]:
    if isinstance(source, str):
        source = io.StringIO(source)
    for line in source:
        if isinstance(line, bytes):
            line = line.decode()
        yield line


def _collect(
    parsed: Iterable[tuple], errors: Optional[list], rebase: bool
) -> List[TraceRecord]:
    # parsed yields (line_no, raw_ts, op, lba, size) or (line_no, MalformedLine)
    records: List[TraceRecord] = []
    base = None
    prev = None
    for item in parsed:
        if isinstance(item[1], MalformedLine):
            if errors is None:
                raise item[1]
            errors.append(item[1])
            continue
        line_no, ts, op, lba, size = item
        if base is None:
            base = ts if rebase else 0
        rel = ts - base
        if prev is not None and rel < prev:
            raise OutOfOrder(line_no, rel, prev)
        if rel < 0:
            raise OutOfOrder(line_no, rel, 0)
        prev = rel
        records.append(TraceRecord(rel, op, lba, size))
    if not records:
        raise EmptyTrace()
    return records


def parse_msr(lines, errors: Optional[list] = None) -> List[TraceRecord]:
    """Parse an MSR-Cambridge-style trace.

    Timestamps are converted from 100 ns ticks to microseconds and made
    relative to the first record. If ``errors`` is a list, malformed lines
    are appended to it as :class:`MalformedLine` and skipped; otherwise the
    first malformed line raises.
    """

    def rows():
        for line_no, line in enumerate(_lines(lines), start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 7:
                yield line_no, MalformedLine(line_no, f"expected 7 fields, got {len(fields)}")
                continue
            ts, _host, _disk, kind, offset, size, _resp = fields
            try:
                ticks = int(ts)
                offset_b = int(offset)
                size_b = int(size)
            except ValueError:
                yield line_no, MalformedLine(line_no, "non-numeric timestamp/offset/size")
                continue
            kind = kind.lower()
            if kind not in ("read", "write"):
                yield line_no, MalformedLine(line_no, f"unknown request type {fields[3]!r}")
                continue
            if ticks < 0 or offset_b < 0 or size_b <= 0:
                yield line_no, MalformedLine(line_no, "negative timestamp/offset or empty size")
                continue
            op = Op.WRITE if kind == "write" else Op.READ
            yield line_no, ticks // 10, op, offset_b // SECTOR_BYTES, size_b

    return _collect(rows(), errors, rebase=True)


def parse_csv(lines, errors: Optional[list] = None) -> List[TraceRecord]:
    """Parse ``timestamp_us,op,lba,size_bytes`` lines (header optional).

    Timestamps are kept as written so that :func:`write_csv` round-trips.
    """

    def rows():
        first = True
        for line_no, line in enumerate(_lines(lines), start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if first:
                first = False
                if fields and not fields[0].lstrip("-").isdigit():
                    continue  # header
            if len(fields) != 4:
                yield line_no, MalformedLine(line_no, f"expected 4 fields, got {len(fields)}")
                continue
            ts, op, lba, size = fields
            try:
                ts_i, lba_i, size_i = int(ts), int(lba), int(size)
            except ValueError:
                yield line_no, MalformedLine(line_no, "non-numeric field")
                continue
            op = op.upper()
            if op not in ("R", "W"):
                yield line_no, MalformedLine(line_no, f"op must be R or W, got {fields[1]!r}")
                continue
            if ts_i < 0 or lba_i < 0 or size_i <= 0:
                yield line_no, MalformedLine(line_no, "negative value or empty size")
                continue
            yield line_no, ts_i, Op(op), lba_i, size_i

    return _collect(rows(), errors, rebase=False)


def write_csv(records: Iterable[TraceRecord], header: bool = True) -> str:
    out = io.StringIO()
    if header:
        out.write("timestamp_us,op,lba,size_bytes\n")
    for r in records:
        out.write(f"{r.timestamp_us},{r.op.value},{r.lba},{r.size_bytes}\n")
    return out.getvalue()


def zipf_cdf(num_items: int, s: float) -> np.ndarray:
    weights = np.arange(1, num_items + 1, dtype=np.float64) ** -s
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return cdf


def generate_synthetic(
    spec: SyntheticSpec, page_size: int = DEFAULT_PAGE_BYTES
) -> List[TraceRecord]:
    """Single-page requests with Zipf-distributed pages (rank 1 is page 0)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed & 0xFFFF_FFFF_FFFF_FFFF))
    cdf = zipf_cdf(spec.address_space_pages, spec.zipf_s)
    u_addr = rng.random(spec.num_requests)
    u_op = rng.random(spec.num_requests)
    pages = np.searchsorted(cdf, u_addr, side="right")
    np.minimum(pages, spec.address_space_pages - 1, out=pages)
    writes = u_op < spec.write_ratio
    sectors = page_size // SECTOR_BYTES
    return [
        TraceRecord(i, Op.WRITE if w else Op.READ, int(p) * sectors, page_size)
        for i, (p, w) in enumerate(zip(pages.tolist(), writes.tolist()))
    ]
