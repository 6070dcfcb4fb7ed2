"""File formats: wide CSVs, JSON reports, and the compact binary matrix.

All floats are rendered with ``repr``, the shortest round-trip form, so
re-running a pipeline with the same inputs reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import struct

import numpy as np

from .analysis import Ladder, LadderEntry
from .corrmat import CorrelationMatrix, OffDiagHistogram
from .errors import ParseError
from .ingest import DespikeRecord, RatePanel
from .rates import BaseChangeReport, ReturnPanel
from .spectra import EigenSpectrum, RmtBounds

FXCM_MAGIC = b"FXCM"


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------- panels


def panel_to_csv(panel: RatePanel) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["date", *panel.codes])
    for j, date in enumerate(panel.dates):
        writer.writerow([date.isoformat(), *(_fmt(p) for p in panel.prices[:, j])])
    return out.getvalue()


def panel_from_csv(text: str, quote_currency: str) -> RatePanel:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty panel file", line=1) from None
    if not header or header[0].strip().lower() != "date" or len(header) < 2:
        raise ParseError("expected header date,<code>,...", line=1)
    codes = [c.strip() for c in header[1:]]
    dates: list[dt.date] = []
    rows: list[list[float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(codes) + 1:
            raise ParseError(f"expected {len(codes) + 1} fields", line=lineno)
        try:
            dates.append(dt.date.fromisoformat(row[0].strip()))
            rows.append([float(x) for x in row[1:]])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if not rows:
        raise ParseError("panel has no data rows", line=2)
    try:
        return RatePanel(
            codes=codes,
            quote_currency=quote_currency,
            dates=dates,
            prices=np.array(rows).T,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def despike_log_to_csv(log: list[DespikeRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["currency", "date", "original", "replacement", "pass"])
    for rec in log:
        writer.writerow(
            [
                rec.currency,
                rec.date.isoformat(),
                _fmt(rec.original),
                _fmt(rec.replacement),
                rec.pass_number,
            ]
        )
    return out.getvalue()


def returns_to_csv(rp: ReturnPanel) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["date", *rp.codes])
    for j in range(rp.T):
        label = rp.dates[j].isoformat() if rp.dates is not None else str(j)
        writer.writerow([label, *(_fmt(x) for x in rp.returns[:, j])])
    return out.getvalue()


# ---------------------------------------------------- correlation matrices


def corr_to_csv(cm: CorrelationMatrix) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["code", *cm.codes])
    for i, code in enumerate(cm.codes):
        writer.writerow([code, *(_fmt(x) for x in cm.values[i])])
    return out.getvalue()


def corr_to_bytes(cm: CorrelationMatrix) -> bytes:
    """Magic 'FXCM', u32 row count, length-prefixed base code, then the
    row-major little-endian float64 entries."""
    base = cm.base.encode("utf-8")
    head = FXCM_MAGIC + struct.pack("<I", cm.m) + struct.pack("<I", len(base)) + base
    return head + cm.values.astype("<f8").tobytes(order="C")


def corr_from_bytes(data: bytes) -> tuple[str, np.ndarray]:
    if data[:4] != FXCM_MAGIC:
        raise ParseError("bad magic, not a correlation matrix blob")
    m, blen = struct.unpack_from("<II", data, 4)
    base = data[12 : 12 + blen].decode("utf-8")
    values = np.frombuffer(data, dtype="<f8", offset=12 + blen, count=m * m)
    return base, values.reshape(m, m).copy()


def histogram_to_csv(hist: OffDiagHistogram) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bin_center", "density"])
    for center, density in zip(hist.bin_centers(), hist.density):
        writer.writerow([_fmt(center), _fmt(density)])
    return out.getvalue()


# ----------------------------------------------------------- spectra, RMT


def spectrum_to_csv(spectrum: EigenSpectrum) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["index", "eigenvalue", "ipr"])
    for k in range(spectrum.m):
        writer.writerow([k + 1, _fmt(spectrum.eigenvalues[k]), _fmt(spectrum.ipr[k])])
    return out.getvalue()


def eigenvectors_to_csv(spectrum: EigenSpectrum, codes: list[str]) -> str:
    """Wide CSV keyed by currency code, one column per eigenvector index."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["code", *(f"v{k + 1}" for k in range(spectrum.m))])
    for i, code in enumerate(codes):
        writer.writerow([code, *(_fmt(x) for x in spectrum.eigenvectors[i])])
    return out.getvalue()


def bounds_to_json(bounds: RmtBounds) -> str:
    return json.dumps(
        {
            "q": bounds.q,
            "lambda_minus": bounds.lambda_minus,
            "lambda_plus": bounds.lambda_plus,
            "count_above": bounds.count_above,
            "count_below": bounds.count_below,
        },
        indent=2,
    )


def report_to_json(report: BaseChangeReport) -> str:
    return json.dumps(
        {
            "max_inverse_residual": report.max_inverse_residual,
            "max_triangle_residual": report.max_triangle_residual,
            "worst_triple": list(report.worst_triple),
        },
        indent=2,
    )


# ---------------------------------------------------------------- ladders


def _entry_dict(entry: LadderEntry) -> dict:
    return {
        "base": entry.base,
        "lambda_max": entry.lambda_max,
        "trace_fraction": entry.trace_fraction,
        "gap": entry.gap,
        "count_above_rmt": entry.count_above_rmt,
        "m": entry.m,
        "excluded": list(entry.excluded),
    }


def ladder_to_csv(ladder: Ladder) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["base", "lambda_max", "trace_fraction", "gap", "count_above_rmt", "m"])
    for e in ladder.entries:
        writer.writerow(
            [
                e.base,
                _fmt(e.lambda_max),
                _fmt(e.trace_fraction),
                _fmt(e.gap),
                e.count_above_rmt,
                e.m,
            ]
        )
    return out.getvalue()


def ladder_to_json(ladder: Ladder) -> str:
    return json.dumps(
        {
            "tau": ladder.tau,
            "T": ladder.T,
            "includes_fictitious": ladder.includes_fictitious,
            "entries": [_entry_dict(e) for e in ladder.entries],
            "omitted": [{"base": b, "reason": r} for b, r in ladder.omitted],
        },
        indent=2,
    )
