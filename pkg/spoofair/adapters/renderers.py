"""
Report renderers. Each format maps a ReportBundle to ``{file name: bytes}``;
output is a pure function of the bundle.
"""

import csv
import io
import json
import logging
from typing import Dict, Iterable, List, Optional

from ..schemas import (
    METRIC_ORDER,
    FairnessRow,
    GroupPerformance,
    MetricName,
    ReportBundle,
    ReportFormat,
)

logger = logging.getLogger(__name__)

GROUP_DISPLAY = {"F": "Female", "M": "Male"}
ALL_LABEL = "All"
P_DISPLAY_FLOOR = 1e-16
UNDEFINED = "undef"
NOT_TESTED = "n/a"

METRIC_DECIMALS = 3
TE_DECIMALS = 4
EER_DECIMALS = 2

MARKDOWN_FILE = "report.md"
JSON_FILE = "report.json"
EER_CSV = "eer.csv"

TE_FOOTNOTE = (
    "TE p-values test the proportion fp/(fp+fn), an order-preserving transform of fp/fn, "
    "since the ratio itself is not a proportion."
)
EO_MEAN_FOOTNOTE = "EO in the tpr_fpr_mean variant averages two rates and has no single-proportion test (n/a)."


def group_display(group: str) -> str:
    return GROUP_DISPLAY.get(group, group)


def metric_csv_name(metric: MetricName) -> str:
    return f"{metric.value.lower()}.csv"


# Number formatting --------------------------------------------------------
def fmt_fixed(value: Optional[float], decimals: int) -> str:
    if value is None:
        return UNDEFINED
    text = f"{value:.{decimals}f}"
    if text.startswith("-") and float(text) == 0.0:
        text = text[1:]
    return text


def fmt_percent(value: Optional[float], decimals: int = EER_DECIMALS) -> str:
    return fmt_fixed(None if value is None else value * 100.0, decimals)


def fmt_p(value: Optional[float]) -> str:
    if value is None:
        return NOT_TESTED
    if value < P_DISPLAY_FLOOR:
        return "<1e-16"
    return f"{value:.4g}"


def metric_decimals(metric: MetricName) -> int:
    return TE_DECIMALS if metric is MetricName.TE else METRIC_DECIMALS


def display_row(row: FairnessRow) -> Dict[str, str]:
    decimals = metric_decimals(row.metric)
    cells = {g: fmt_fixed(row.values[g].value, decimals) for g in row.groups}
    cells["diff"] = fmt_fixed(row.diff_f_minus_m, decimals)
    cells["p_raw"] = fmt_p(row.p_raw)
    p_holm = fmt_p(row.p_holm)
    cells["p_holm"] = p_holm + "*" if row.significant else p_holm
    return cells


def _performance_index(rows: Iterable[GroupPerformance]) -> Dict[str, Dict[str, GroupPerformance]]:
    out: Dict[str, Dict[str, GroupPerformance]] = {}
    for row in rows:
        out.setdefault(row.system, {})[row.group] = row
    return out


# Markdown -----------------------------------------------------------------
def _md_table(header: List[str], rows: List[List[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(r) + " |" for r in rows)
    return lines


def _provenance_lines(bundle: ReportBundle) -> List[str]:
    prov = bundle.provenance
    lines = [
        f"- Toolkit: {prov.toolkit} {prov.version}",
        f"- Positive class (Y=1): {prov.positive_class.value}",
        "- Score polarity: " + ", ".join(f"{s}={prov.polarity[s].value}" for s in bundle.systems),
        f"- Groups compared: {group_display(prov.groups[0])} ({prov.groups[0]}) vs {group_display(prov.groups[1])} ({prov.groups[1]})",
        f"- Metric variants: EO={prov.eo_variant.value}, TE={prov.te_variant.value}",
        f"- Significance: pooled two-proportion z-test, Holm correction ({prov.holm_family.value}), alpha={prov.alpha!r}",
    ]
    for system in bundle.systems:
        op = bundle.operating_points[system]
        lines.append(
            f"- Operating point {system}: {op.source_split.value} EER {fmt_percent(op.eer_at_derivation)}%, "
            f"{op.raw_rule}"
        )
    if prov.generated_at is not None:
        lines.append(f"- Generated at: {prov.generated_at.isoformat()}")
    return lines


def render_markdown(bundle: ReportBundle) -> bytes:
    groups = list(bundle.provenance.groups)
    with_auc = bool(bundle.provenance.config.get("with_auc"))
    perf = _performance_index(bundle.performance)

    lines = ["# Gender fairness report", ""]
    lines.extend(_provenance_lines(bundle))
    lines.extend(["", "## Performance in terms of EER (%)", ""])
    columns = groups + [ALL_LABEL]
    header = ["Model"] + [group_display(g) for g in columns]
    if with_auc:
        header += [f"AUC {group_display(g)}" for g in columns]
    body = []
    for system in bundle.systems:
        cells = perf.get(system, {})
        row = [system] + [fmt_percent(cells[g].eer) if g in cells else UNDEFINED for g in columns]
        if with_auc:
            row += [fmt_fixed(cells[g].auc, 4) if g in cells else UNDEFINED for g in columns]
        body.append(row)
    lines.extend(_md_table(header, body))

    for metric in METRIC_ORDER:
        rows = bundle.fairness.get(metric, [])
        variant = rows[0].variant if rows and rows[0].variant else None
        title = f"{metric.display_name} ({metric.value}" + (f", {variant})" if variant else ")")
        lines.extend(["", f"## {title}", ""])
        header = ["Model"] + [group_display(g) for g in groups] + [
            f"Diff ({groups[0]}-{groups[1]})",
            "p-value (Holm)",
        ]
        body = []
        for row in rows:
            cells = display_row(row)
            body.append([row.system] + [cells[g] for g in groups] + [cells["diff"], cells["p_holm"]])
        lines.extend(_md_table(header, body))
        if metric is MetricName.TE:
            lines.extend(["", f"Note: {TE_FOOTNOTE}"])
        if metric is MetricName.EO and variant == "tpr_fpr_mean":
            lines.extend(["", f"Note: {EO_MEAN_FOOTNOTE}"])

    lines.extend(["", f"`*` marks Holm-adjusted p < alpha. `{UNDEFINED}`: zero denominator. `{NOT_TESTED}`: not tested.", ""])
    return "\n".join(lines).encode("utf-8")


# CSV ----------------------------------------------------------------------
def _num(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_bytes(header: List[str], rows: Iterable[List[str]]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue().encode("utf-8")


def render_csv(bundle: ReportBundle) -> Dict[str, bytes]:
    files: Dict[str, bytes] = {}
    files[EER_CSV] = _csv_bytes(
        ["system", "group", "n_trials", "eer", "eer_threshold", "auc"],
        ([p.system, p.group, _num(p.n_trials), _num(p.eer), _num(p.eer_threshold), _num(p.auc)] for p in bundle.performance),
    )
    g1, g2 = bundle.provenance.groups
    header = ["system", "metric", "variant", f"value_{g1}", f"value_{g2}", "diff", "z", "p_raw", "p_holm", "significant"]
    for g in (g1, g2):
        header += [f"tp_{g}", f"fp_{g}", f"tn_{g}", f"fn_{g}"]
    for metric in METRIC_ORDER:
        body = []
        for row in bundle.fairness.get(metric, []):
            line = [
                row.system,
                row.metric.value,
                row.variant or "",
                _num(row.values[g1].value),
                _num(row.values[g2].value),
                _num(row.diff_f_minus_m),
                _num(row.z),
                _num(row.p_raw),
                _num(row.p_holm),
                _num(row.significant),
            ]
            for g in (g1, g2):
                cc = (row.counts or {}).get(g)
                line += [_num(cc.tp), _num(cc.fp), _num(cc.tn), _num(cc.fn)] if cc else ["", "", "", ""]
            body.append(line)
        files[metric_csv_name(metric)] = _csv_bytes(header, body)
    return files


# JSON ---------------------------------------------------------------------
def _display_block(bundle: ReportBundle) -> Dict[str, object]:
    perf = {
        f"{p.system}/{p.group}": {"eer_percent": fmt_percent(p.eer), "auc": fmt_fixed(p.auc, 4) if p.auc is not None else None}
        for p in bundle.performance
    }
    metrics = {
        metric.value: {row.system: display_row(row) for row in bundle.fairness.get(metric, [])} for metric in METRIC_ORDER
    }
    return {"performance": perf, "fairness": metrics}


def render_json(bundle: ReportBundle) -> bytes:
    document = {"bundle": bundle.model_dump(mode="json"), "display": _display_block(bundle)}
    return (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_json(data: bytes) -> ReportBundle:
    return ReportBundle.model_validate(json.loads(data.decode("utf-8"))["bundle"])


def render(bundle: ReportBundle, fmt: ReportFormat) -> Dict[str, bytes]:
    if fmt is ReportFormat.markdown:
        files = {MARKDOWN_FILE: render_markdown(bundle)}
    elif fmt is ReportFormat.csv:
        files = render_csv(bundle)
    else:
        files = {JSON_FILE: render_json(bundle)}
    logger.debug("Rendered %s: %s", fmt.value, sorted(files))
    return files
