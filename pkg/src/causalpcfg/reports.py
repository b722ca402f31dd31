"""Render audit results as JSON objects, aligned text, and CSV."""

from __future__ import annotations

import csv
import dataclasses
import io
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .audit import EmpiricalAudit, QuadrantReport, SweepRow, UifVerdict, SWEEP_PAIRS
from .scm import CiResult


def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {
            (k if isinstance(k, str) else "|".join(map(str, k))): jsonable(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def render_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    rows = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(row):
        return "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def uif_text(verdicts: Sequence[UifVerdict]) -> str:
    rows = []
    for v in verdicts:
        witness = ""
        if v.witness_pair:
            a, b, tv = v.witness_pair
            witness = f"{a!r} vs {b!r} (TV {tv})"
        rows.append(
            [v.feature, v.label, v.definition, "yes" if v.satisfied else "NO",
             f"{v.mi_bits:.5f}", str(v.max_tv), witness]
        )
    return render_table(
        ["feature", "label", "definition", "satisfied", "mi_bits", "max_tv", "witness"],
        rows,
    )


def ci_text(results: Sequence[CiResult]) -> str:
    rows = []
    for r in results:
        witness = ""
        if r.witness:
            w = r.witness
            spans = ", ".join(f"{k}={v!r}" for k, v in w.unit.spans.items())
            witness = f"[{spans}] {w.intervention}: {w.factual_label} -> {w.counterfactual_label}"
        rows.append([r.feature, r.label, "yes" if r.invariant else "NO", witness])
    return render_table(["feature", "label", "invariant", "witness"], rows)


def quadrant_text(report: QuadrantReport) -> str:
    rows = [
        [e.feature, e.label, "yes" if e.uif_satisfied else "no",
         "yes" if e.ci_invariant else "no", e.classification]
        for e in report.entries
    ]
    return render_table(
        ["feature", "label", "uif", "ci-invariant", "classification"], rows
    )


def empirical_text(a: EmpiricalAudit) -> str:
    lines = [
        f"feature={a.feature} label={a.label} n={a.n}",
        f"chi2={a.chi2:.4f} dof={a.dof} p_value={a.p_value:.3e}",
        f"mi_bits={a.mi_bits:.5f}",
    ]
    if a.low_expected_counts:
        lines.append("warning: some expected cell counts are below 5")
    rows = sorted((str(k[0]), str(k[1]), v) for k, v in a.contingency.items())
    lines.append(render_table([a.feature, a.label, "count"], rows))
    return "\n".join(lines)


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["alpha", "beta_plus", "beta_minus"]
    for f, l in SWEEP_PAIRS:
        header += [f"indep_{f}_{l}", f"pred_{f}_{l}", f"ci_{f}_{l}"]
    header += ["alpha_float", "beta_plus_float", "beta_minus_float", "matches"]
    writer.writerow(header)
    for row in rows:
        cells = [str(row.alpha), str(row.beta_plus), str(row.beta_minus)]
        for pair in SWEEP_PAIRS:
            cells += [
                str(row.independent[pair]).lower(),
                str(row.predicted[pair]).lower(),
                str(row.ci_invariant[pair]).lower(),
            ]
        cells += [
            repr(float(row.alpha)), repr(float(row.beta_plus)),
            repr(float(row.beta_minus)), str(row.matches).lower(),
        ]
        writer.writerow(cells)
    return buf.getvalue()
