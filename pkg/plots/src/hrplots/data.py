"""CSV loading and validation for the plotting pipeline.

Input schemas (produced by the ``hardyrog`` CLI):

* block-acov: ``lag,value,block,r`` where ``lag`` and ``r`` are decimal
  strings of arbitrary length (lags can run to 10^996) and ``block``/``r``
  are empty on structurally-zero rows.
* comparison: ``lag,theoretical[,empirical_mean,empirical_se,z]``; the
  empirical columns are optional so a theory-only overlay renders the same
  theoretical series.

Rows are kept verbatim and in input order: plotting never alters or reorders
data, and ``dump_rows`` re-emits exactly the rows a figure used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence


class SchemaError(ValueError):
    """The input CSV does not match the documented schema."""


ACOV_HEADER = ["lag", "value", "block", "r"]
OVERLAY_REQUIRED = ["lag", "theoretical"]
OVERLAY_EMPIRICAL = ["empirical_mean", "empirical_se"]


@dataclass(frozen=True)
class AcovRow:
    lag: str          # decimal string, may exceed float range
    value: float
    block: Optional[int]
    r: Optional[int]  # within-block ordinal; the plotting abscissa

    def fields(self) -> list[str]:
        return [
            self.lag,
            repr_float(self.value),
            "" if self.block is None else str(self.block),
            "" if self.r is None else str(self.r),
        ]


@dataclass(frozen=True)
class OverlayRow:
    lag: int
    theoretical: float
    empirical_mean: Optional[float]
    empirical_se: Optional[float]

    def fields(self) -> list[str]:
        out = [str(self.lag), repr_float(self.theoretical)]
        if self.empirical_mean is not None:
            out += [repr_float(self.empirical_mean), repr_float(self.empirical_se)]
        return out


def repr_float(v: float) -> str:
    return f"{v:.17g}"


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        return header, list(reader)


def load_acov(path) -> list[AcovRow]:
    """Parse a block-acov CSV, validating the exact four-column schema."""
    header, raw = _read_rows(path)
    if header != ACOV_HEADER:
        raise SchemaError(
            f"{path}: expected header {','.join(ACOV_HEADER)}, got {','.join(header)}"
        )
    rows = []
    for lineno, fields in enumerate(raw, start=2):
        if len(fields) != 4:
            raise SchemaError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
        lag, value, block, r = fields
        if not lag.lstrip("-").isdigit():
            raise SchemaError(f"{path}:{lineno}: lag {lag!r} is not a decimal integer")
        try:
            rows.append(
                AcovRow(
                    lag=lag,
                    value=float(value),
                    block=int(block) if block else None,
                    r=int(r) if r else None,
                )
            )
        except ValueError as err:
            raise SchemaError(f"{path}:{lineno}: {err}") from None
    return rows


def load_overlay(path) -> tuple[list[OverlayRow], bool]:
    """Parse a comparison CSV; returns rows and whether empirics are present."""
    header, raw = _read_rows(path)
    if header[: len(OVERLAY_REQUIRED)] != OVERLAY_REQUIRED:
        raise SchemaError(
            f"{path}: header must start with {','.join(OVERLAY_REQUIRED)}, "
            f"got {','.join(header)}"
        )
    has_empirics = len(header) > 2
    if has_empirics and header[2:4] != OVERLAY_EMPIRICAL:
        raise SchemaError(
            f"{path}: empirical columns must be {','.join(OVERLAY_EMPIRICAL)}"
        )
    rows = []
    for lineno, fields in enumerate(raw, start=2):
        if len(fields) != len(header):
            raise SchemaError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}"
            )
        try:
            rows.append(
                OverlayRow(
                    lag=int(fields[0]),
                    theoretical=float(fields[1]),
                    empirical_mean=float(fields[2]) if has_empirics else None,
                    empirical_se=float(fields[3]) if has_empirics else None,
                )
            )
        except ValueError as err:
            raise SchemaError(f"{path}:{lineno}: {err}") from None
    return rows, has_empirics


def plottable_acov(rows: Sequence[AcovRow]) -> list[AcovRow]:
    """The rows a block figure uses: in-block rows, input order preserved.

    Structurally-zero rows carry no block/ordinal (their lags may not even
    fit a float axis) and are identically zero, so they are dropped.
    """
    return [row for row in rows if row.block is not None and row.r is not None]


def dump_rows(rows: Sequence[AcovRow | OverlayRow], header: Sequence[str], path_or_file) -> None:
    """Re-emit exactly the rows used by a figure, unaltered and in order."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="\n") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row.fields())
    finally:
        if own:
            fh.close()


def dominant_spike_spacing(rows: Sequence[AcovRow]) -> Optional[float]:
    """Median ordinal spacing between dominant spikes of |value|.

    A spike is a local maximum of |value| at least half the global maximum.
    Returns None when fewer than two spikes exist.  Pure data analysis,
    independent of any rendering.
    """
    used = plottable_acov(rows)
    if not used:
        return None
    pairs = sorted((row.r, abs(row.value)) for row in used)
    rs = [p[0] for p in pairs]
    mags = [p[1] for p in pairs]
    peak_floor = 0.5 * max(mags)
    peaks = [
        rs[i]
        for i in range(len(mags))
        if mags[i] >= peak_floor
        and (i == 0 or mags[i] >= mags[i - 1])
        and (i == len(mags) - 1 or mags[i] >= mags[i + 1])
    ]
    if len(peaks) < 2:
        return None
    gaps = sorted(b - a for a, b in zip(peaks, peaks[1:]))
    return float(gaps[len(gaps) // 2])
