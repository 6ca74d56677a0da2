"""
Plain-text tables for the sectional and verify commands
"""

import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List

from ..utils.serialization import to_jsonable


RULE = "=" * 60


def format_value(value: Any) -> str:
    """Rationals as p/q, floats with 12 significant digits, None as a dash"""
    if value is None:
        return "-"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def _verdict(check: Any) -> str:
    data = to_jsonable(check)
    if isinstance(data, dict):
        return data.get("verdict", "-")
    return str(data)


def format_sectional(report: Dict[str, Any]) -> str:
    """Q-plane table of one vector"""
    lines: List[str] = [
        RULE,
        "Q-PLANE DATA",
        RULE,
        f"vector          : ({', '.join(format_value(v) for v in report['vector'])})",
        f"cos phi         : {format_value(report['cos_phi'])}",
        f"phi             : {format_value(report['phi'])}",
        f"non-degenerate  : {_verdict(report['nondegenerate'])}",
        f"L2 / Einstein   : {format_value(report['l2'])} / {format_value(report['einstein'])}",
        "",
        f"{'plane':<10}{'k direct':>24}{'k closed form':>24}  via",
        "-" * 64,
    ]
    for plane in report["planes"]:
        lines.append(
            f"{plane['plane']:<10}{format_value(plane['k_direct']):>24}"
            f"{format_value(plane['k_closed_form']):>24}  {plane['via']}"
        )
    lines += [
        "",
        f"{'vector':<10}{'isotropic':>10}{'r direct':>22}{'r closed form':>22}  via",
        "-" * 70,
    ]
    for entry in report["ricci"]:
        lines.append(
            f"{entry['vector']:<10}{format_value(entry['isotropic']):>10}"
            f"{format_value(entry['r_direct']):>22}{format_value(entry['r_closed_form']):>22}  {entry['via']}"
        )
    for name, trace in sorted(report.get("limits", {}).items()):
        lines.append("")
        lines.append(f"limit ({name}): {format_value(trace['limit'])}, converged: {format_value(trace['converged'])}")
        for offset, value in zip(trace["offsets"], trace["values"]):
            lines.append(f"  offset {offset:<10.1e} value {value:.12g}")
    return "\n".join(lines) + "\n"


def format_suites(results: Iterable[Any]) -> str:
    """Pass/fail summary with per-check statistics and the failing instances"""
    lines: List[str] = []
    results = list(results)
    for result in results:
        data = result.to_dict()
        status = "PASS" if data["passed"] else "FAIL"
        lines += [
            RULE,
            f"{data['suite']}: {status}  (samples {data['samples']}, seed {data['seed']})",
            RULE,
            f"{'check':<34}{'count':>7}{'failed':>8}{'border':>8}{'max residual':>16}",
        ]
        for name, stats in data["checks"].items():
            lines.append(
                f"{name:<34}{stats['count']:>7}{stats['failed']:>8}{stats['borderline']:>8}"
                f"{stats['max_residual']:>16.3e}"
            )
        for failure in data["failures"]:
            lines.append(
                f"  sample {failure['sample']} {failure['check']}: {failure['verdict']}, "
                f"residual {format_value(failure['residual'])}"
            )
            lines.append(f"    instance: {json.dumps(to_jsonable(failure['instance']), sort_keys=True)}")
        hidden = data["failure_count"] - len(data["failures"])
        if hidden > 0:
            lines.append(f"  ... and {hidden} more failed checks")
        lines.append("")
    passed = sum(1 for r in results if r.passed)
    lines.append(f"{passed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
