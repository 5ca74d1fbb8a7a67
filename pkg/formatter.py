# formatter.py
"""
Formatter - renders systems, substitutions, stats and check reports as text
"""
from typing import Iterable

import slp
from results import Outcome, RunStats
from slp import Slp
from terms import Path, StandardSystem, Substitution, format_term

# stats fields printed as binary lengths
_BINARY = {"max_label_length"}


def format_slp_section(labels: Iterable[Slp]) -> str:
    lines = slp.dump(labels)
    if not lines:
        return ""
    return "\n".join(["SLP:", *lines])


def format_substitution(sigma: Substitution) -> str:
    """
    One binding per line, names sorted; lateral bindings as [slp:Ni] * Y followed
    by the SLP section. parse_substitution_text reads this back.
    """
    lines = []
    for name in sorted(sigma.domain):
        if name in sigma.lateral:
            lines.append(f"{name} -> {sigma.lateral[name]}")
        else:
            lines.append(f"{name} -> {format_term(sigma.bindings[name])}")
    section = format_slp_section(path.label for path in sigma.lateral.values())
    if section:
        lines.append(section)
    return "\n".join(lines)


def format_stats(stats: RunStats) -> str:
    """key=value lines; rule counts as rule.<name>=<count>."""
    lines = [f"algorithm={stats.algorithm}"]
    if stats.fragment:
        lines.append(f"fragment={stats.fragment}")
    for rule in sorted(stats.rule_counts):
        lines.append(f"rule.{rule}={stats.rule_counts[rule]}")
    lines.append(f"rules_total={stats.total_rules}")
    lines.append(f"splitting={stats.splitting}")
    for key in (
        "sum_transformations",
        "fresh_variables",
        "restarts",
        "label_vars_initial",
        "label_vars_final",
        "class_count",
        "max_slp_size",
        "max_slp_depth",
        "max_label_length",
    ):
        value = getattr(stats, key)
        lines.append(f"{key}={bin(value) if key in _BINARY else value}")
    if stats.failure_rule:
        lines.append(f"failure_rule={stats.failure_rule}")
    lines.append(f"wall_time={stats.wall_time:.6f}")
    return "\n".join(lines)


def format_system(s: StandardSystem) -> str:
    """Problem-file syntax. Lateral paths of solved forms are shown but do not parse back."""
    lines = [str(eq) for eq in s.equations]
    labels = [eq.rhs.label for eq in s.equations if isinstance(eq.rhs, Path)]
    section = format_slp_section(labels)
    if section:
        lines.append(section)
    return "\n".join(lines)


def format_trace(stats: RunStats) -> str:
    return "\n".join(str(entry) for entry in stats.trace)


def format_outcome(outcome: Outcome) -> str:
    line = outcome.verdict.value
    if outcome.reason is not None:
        line += f" ({outcome.reason.value})"
    if outcome.witness:
        line += "\nwitness: " + " -> ".join(str(w) for w in outcome.witness)
    return line


def format_check_result(report: dict) -> str:
    """One marked line per equation plus a summary line."""
    marks = {"passed": "✅", "failed": "❌", "not-materializable": "⚠️"}
    lines = []
    for detail in report["check_details"]:
        lines.append(f"{marks.get(detail['status'], '?')} {detail['equation']}: {detail['message']}")
    if report["passed"]:
        lines.append("✅ substitution verified")
    elif report.get("not_materializable") and not report["violations"]:
        lines.append(f"⚠️ {report['not_materializable']} equation(s) not materializable")
    else:
        lines.append(f"❌ {len(report['violations'])} violation(s)")
    return "\n".join(lines)
