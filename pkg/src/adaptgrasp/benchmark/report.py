"""Success-matrix rendering for suite reports."""

from __future__ import annotations

import csv
import io

from .suite import SuiteReport

FORMATS = ("csv", "text")
FOOTER_LABEL = "mean%"


class UnsupportedFormat(ValueError):
    pass


def report_from_counts(counts: dict[str, dict[str, int]], trials_per_cell: int = 10) -> SuiteReport:
    """Wrap an object -> strategy -> successes mapping as a report."""
    objects = list(counts)
    strategies = list(next(iter(counts.values()))) if counts else []
    report = SuiteReport(strategies, objects, trials_per_cell)
    for s in strategies:
        report.counts[s] = {o: int(counts[o][s]) for o in objects}
    return report


def _rows(report: SuiteReport) -> list[list[str]]:
    rows = [["object", *report.strategies]]
    if not report.objects:
        return rows
    for o in report.objects:
        rows.append([o, *(str(report.counts[s][o]) for s in report.strategies)])
    rows.append([FOOTER_LABEL, *(f"{report.aggregate(s):.1f}" for s in report.strategies)])
    return rows


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _text(rows: list[list[str]], report: SuiteReport) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for n, r in enumerate(rows):
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0 or (report.objects and n == len(rows) - 2):
            lines.append("  ".join("-" * w for w in widths))
    if report.objects:
        lines.append(f"successes out of {report.trials_per_cell} trials per cell")
    for cell in sorted(report.errors):
        lines.append(f"error {cell}: {report.errors[cell]}")
    return "\n".join(lines) + "\n"


def emit_report(report: SuiteReport, fmt: str = "csv") -> bytes:
    """Render the per-object x strategy success matrix with a footer of aggregate rates."""
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"unsupported report format {fmt!r}; choose from {', '.join(FORMATS)}")
    rows = _rows(report)
    out = _csv(rows) if fmt == "csv" else _text(rows, report)
    return out.encode("utf-8")
