"""Final experiment report: standings, totals, timing and grid usage."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from gridarena import xmlio
from gridarena.grid.engine import UsageStats
from gridarena.tournament.manifest import ExperimentManifest, ExperimentTotals, experiment_totals
from gridarena.tournament.standings import Standings


@dataclass(frozen=True)
class BaselineFigures:
    """Reference figures for a full-scale 126-agent deployment, reported
    alongside each run for comparison: one-minute matches extrapolate to a
    26,000-hour sequential run, while the grid needed about 24 days,
    i.e. roughly a fiftieth of the time."""

    agents: int = 126
    games_per_match: int = 100
    match_minutes: float = 1.0
    sequential_hours: float = 26_000.0
    grid_days: float = 24.0
    speedup: float = 50.0


BASELINE = BaselineFigures()


def estimate_sequential_seconds(manifest: ExperimentManifest, per_match_minutes: float) -> float:
    """One worker playing every match back to back."""
    if per_match_minutes <= 0:
        raise ValueError(f"per_match_minutes must be > 0, got {per_match_minutes}")
    return experiment_totals(manifest).total_matches * per_match_minutes * 60.0


def speedup_ratio(sequential_seconds: float, makespan_seconds: float) -> float | None:
    if sequential_seconds > 0 and makespan_seconds > 0:
        return sequential_seconds / makespan_seconds
    return None


@dataclass(frozen=True)
class ExperimentReport:
    experiment_id: str
    state: str
    totals: ExperimentTotals
    standings: Standings
    makespan_seconds: float
    estimated_sequential_seconds: float
    speedup: float | None
    usage: UsageStats
    failure_counts: dict[str, int] = field(default_factory=dict)
    resubmissions: int = 0
    permanently_failed: tuple[str, ...] = ()
    baseline: BaselineFigures = BASELINE


def report_to_xml(report: ExperimentReport) -> ET.Element:
    root = ET.Element("report", {"experiment": report.experiment_id, "state": report.state})
    t = report.totals
    ET.SubElement(
        root,
        "totals",
        {
            "agents": str(t.agents),
            "matches": str(t.total_matches),
            "unique_games": str(t.unique_games),
            "per_agent_games": str(t.per_agent_games),
            "participation_games": str(t.participation_games),
        },
    )
    ET.SubElement(
        root,
        "timing",
        {
            "makespan_seconds": xmlio.fmt_float(report.makespan_seconds),
            "estimated_sequential_seconds": xmlio.fmt_float(report.estimated_sequential_seconds),
            "speedup": "" if report.speedup is None else xmlio.fmt_float(report.speedup),
        },
    )
    standings_el = ET.SubElement(root, "standings")
    for row in report.standings.rows:
        ET.SubElement(
            standings_el,
            "row",
            {
                "agent": row.agent_id,
                "matches": str(row.matches_played),
                "match_wins": str(row.match_wins),
                "match_draws": str(row.match_draws),
                "match_losses": str(row.match_losses),
                "game_wins": str(row.game_wins),
                "game_losses": str(row.game_losses),
                "game_draws": str(row.game_draws),
                "points": str(row.points),
            },
        )
    usage_el = ET.SubElement(root, "usage", {"makespan": xmlio.fmt_float(report.usage.makespan)})
    for cluster_id in sorted(report.usage.per_cluster):
        u = report.usage.per_cluster[cluster_id]
        ET.SubElement(
            usage_el,
            "cluster",
            {
                "id": cluster_id,
                "jobs_run": str(u.jobs_run),
                "busy": xmlio.fmt_float(u.busy_time),
                "idle": xmlio.fmt_float(u.idle_time),
                "bytes_in": str(u.bytes_staged_in),
                "bytes_out": str(u.bytes_staged_out),
                "failures": str(u.failures),
            },
        )
    failures_el = ET.SubElement(root, "failures", {"resubmissions": str(report.resubmissions)})
    for reason in sorted(report.failure_counts):
        ET.SubElement(failures_el, "reason", {"kind": reason, "count": str(report.failure_counts[reason])})
    for match_id in report.permanently_failed:
        ET.SubElement(failures_el, "forfeit", {"match_id": match_id})
    b = report.baseline
    ET.SubElement(
        root,
        "baseline",
        {
            "agents": str(b.agents),
            "games_per_match": str(b.games_per_match),
            "match_minutes": xmlio.fmt_float(b.match_minutes),
            "sequential_hours": xmlio.fmt_float(b.sequential_hours),
            "grid_days": xmlio.fmt_float(b.grid_days),
            "speedup": xmlio.fmt_float(b.speedup),
        },
    )
    return root


def report_text(report: ExperimentReport) -> str:
    t = report.totals
    lines = [
        f"experiment {report.experiment_id}: {report.state}",
        "",
        f"agents {t.agents}, matches {t.total_matches}, "
        f"unique games {t.unique_games}, per-agent games {t.per_agent_games}, "
        f"participation total {t.participation_games}",
        "",
        "standings (points, match W/D/L, game W/D/L):",
    ]
    for pos, row in enumerate(report.standings.rows, start=1):
        lines.append(
            f"  {pos:2d}. {row.agent_id:<16} {row.points:4d}  "
            f"{row.match_wins}/{row.match_draws}/{row.match_losses}  "
            f"{row.game_wins}/{row.game_draws}/{row.game_losses}"
        )
    lines.append("")
    makespan_h = report.makespan_seconds / 3600.0
    sequential_h = report.estimated_sequential_seconds / 3600.0
    lines.append(
        f"timing: makespan {report.makespan_seconds:.1f} s ({makespan_h:.2f} h), "
        f"sequential estimate {report.estimated_sequential_seconds:.1f} s ({sequential_h:.2f} h)"
    )
    if report.speedup is not None:
        lines.append(f"speedup: {report.speedup:.2f}x")
    lines.append("")
    lines.append("grid usage:")
    for cluster_id in sorted(report.usage.per_cluster):
        u = report.usage.per_cluster[cluster_id]
        lines.append(
            f"  {cluster_id}: jobs {u.jobs_run}, busy {u.busy_time:.1f} s, "
            f"idle {u.idle_time:.1f} s, in {u.bytes_staged_in} B, "
            f"out {u.bytes_staged_out} B, failures {u.failures}"
        )
    lines.append("")
    if report.failure_counts:
        per_reason = ", ".join(f"{k}={v}" for k, v in sorted(report.failure_counts.items()))
        lines.append(f"failures: {per_reason}; resubmissions {report.resubmissions}")
    else:
        lines.append("failures: none")
    if report.permanently_failed:
        lines.append("permanently failed matches: " + ", ".join(report.permanently_failed))
    b = report.baseline
    lines.append("")
    lines.append(
        f"reference full-scale deployment: {b.agents} agents at "
        f"{b.games_per_match} games/match and {b.match_minutes:g}-minute matches "
        f"extrapolate to {b.sequential_hours:,.0f} hours sequentially; "
        f"the grid run took about {b.grid_days:g} days, roughly 1/{b.speedup:.0f} "
        "of the sequential time"
    )
    return "\n".join(lines) + "\n"
