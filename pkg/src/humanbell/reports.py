"""Text, CSV and JSON renderings of analysis and planning results."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Sequence

from .planner import D_SEP_LABEL, FeasibilityReport, human_duration
from .stats import (
    ALL,
    ChshEstimate,
    Condition,
    InsufficientData,
    chsh,
    estimate_correlation,
    full_ensemble_shift,
    retarded_histogram,
)

CSV_COLUMNS = ("condition", "n", "E_or_S", "stderr", "sigma")


def _num(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return x


def analysis_rows(records, conditions: Sequence[Condition] = (ALL,), quad=(0, 1, 0, 1)) -> list[dict]:
    """One row per setting-pair correlation plus one CHSH row per condition."""
    rows = []
    a, a2, b, b2 = quad
    for cond in conditions:
        label = cond.label()
        for i, j in [(a2, b2), (a2, b), (a, b2), (a, b)]:
            est = estimate_correlation(records, i, j, cond)
            rows.append({"condition": f"{label}:E({i},{j})", "n": est.n, "E_or_S": _num(est.e_hat),
                         "stderr": _num(est.stderr), "sigma": None})
        try:
            s: ChshEstimate = chsh(records, quad, cond)
            rows.append({"condition": f"{label}:S", "n": sum(c.n for c in s.cells), "E_or_S": s.s,
                         "stderr": s.stderr, "sigma": _num(s.sigma_violation)})
        except InsufficientData:
            rows.append({"condition": f"{label}:S", "n": 0, "E_or_S": None, "stderr": None, "sigma": None})
    return rows


def analysis_document(records, conditions: Sequence[Condition] = (ALL,), quad=(0, 1, 0, 1),
                      alpha_expected: float | None = None) -> dict:
    doc = {"rows": analysis_rows(records, conditions, quad),
           "retarded_histogram": {f"{k[0]},{k[1]}": v for k, v in retarded_histogram(records).items()}}
    if alpha_expected is not None:
        try:
            sh = full_ensemble_shift(records, quad, alpha_expected)
        except InsufficientData:
            sh = None
        if sh is not None:
            doc["shift"] = {
                "s_full": sh.s_full.s,
                "s_internal": sh.s_internal.s if sh.s_internal else None,
                "s_complement": sh.s_complement.s,
                "s_external": sh.s_external.s if sh.s_external else None,
                "internal_fraction": sh.internal_fraction,
                "alpha_expected": alpha_expected,
                "alpha_z": _num(sh.alpha_z) if alpha_expected > 0 else None,
                "mixture_prediction": sh.mixture_prediction,
                "shift_coefficient": sh.shift_coefficient,
                "max_cell_identity_error": sh.max_cell_identity_error,
            }
    return doc


def text_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    cells = [[fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) if cells else len(c) for k, c in enumerate(columns)]
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()  # noqa: E731
    out = [line(columns), line(["-" * w for w in widths])]
    out += [line(r) for r in cells]
    return "\n".join(out) + "\n"


def csv_table(rows: Sequence[dict], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: "" if r.get(k) is None else r[k] for k in columns})
    return buf.getvalue()


PLAN_COLUMNS = ("experiment", "d_sep", "T_exp(sig)", "alpha", "alpha_exact", "T_exp_human(sig)",
                "T_exp_human_s", "r_coinc_human")


def plan_rows(reports: Sequence[FeasibilityReport], label_param: str | None = None) -> list[dict]:
    rows = []
    for rep in reports:
        p = rep.plan
        name = p.name if label_param is None else f"{p.name}[{label_param}={getattr(p, label_param):g}]"
        rows.append({
            "experiment": name,
            "d_sep": D_SEP_LABEL.get(p.name, f"{p.geometry.distance:g}m" if p.geometry else "-"),
            "T_exp(sig)": f"{human_duration(p.t_exp_baseline)}({p.baseline_sigma:g})",
            "alpha": rep.alpha_linear,
            "alpha_exact": rep.alpha_exact,
            "T_exp_human(sig)": f"{human_duration(rep.t_exp_human)}({p.baseline_sigma:g})",
            "T_exp_human_s": rep.t_exp_human,
            "r_coinc_human": rep.r_coinc_human,
        })
    return rows


def plan_json(reports: Sequence[FeasibilityReport]) -> str:
    docs = []
    for rep in reports:
        p = rep.plan
        docs.append({
            "name": p.name, "n_a": p.n_a, "n_b": p.n_b, "r_human": p.r_human,
            "tau_a": p.tau_a, "tau_b": p.tau_b, "t_exp_baseline": p.t_exp_baseline,
            "baseline_sigma": p.baseline_sigma, "r_coinc": p.r_coinc,
            "alpha_linear": rep.alpha_linear, "alpha_exact": rep.alpha_exact,
            "r_coinc_human": rep.r_coinc_human, "r_coinc_human_exact": rep.r_coinc_human_exact,
            "t_exp_human": _num(rep.t_exp_human), "t_exp_human_exact": _num(rep.t_exp_human_exact),
            "projected_sigma": {f"{k:g}": v for k, v in rep.projection.items()},
        })
    return json.dumps(docs, indent=2)
