"""Aggregates over match-log records: hero rates, player distributions,
team indicators, pair relations, and patch before/after comparison.

Conventions (fixed so results are bit-stable across implementations):
  - KDA divides by max(deaths, 1); the textbook formula is undefined at 0.
  - participation = (kills + assists) / team kills, 0 when the team had none.
  - quartiles use the inclusive-median method (the middle element joins
    both halves when the count is odd); whiskers at 1.5 * IQR.
  - per-round means; rates are undefined (None) when the denominator is 0.

All functions are pure over immutable record lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .dataio import MatchRecord

PLAYER_METRICS = ("kda", "damage_per_min", "damage_taken_per_min", "gold_per_min", "participation")

RELATIONS = ("synergy", "counters", "countered_by")


class AnalyticsError(Exception):
    pass


def kda(kills: int, deaths: int, assists: int) -> float:
    return (kills + assists) / max(deaths, 1)


def filter_matches(
    matches: Sequence[MatchRecord],
    date_from: str | None = None,
    date_to: str | None = None,
    patch: str | None = None,
    team: str | None = None,
) -> list[MatchRecord]:
    """Record filter; ISO date strings compare lexicographically. ``date_to``
    is exclusive. Filters compose: applying them sequentially equals one call."""
    out = []
    for m in matches:
        if date_from is not None and m.date < date_from:
            continue
        if date_to is not None and m.date >= date_to:
            continue
        if patch is not None and m.patch != patch:
            continue
        if team is not None and team not in (m.blue_team, m.red_team):
            continue
        out.append(m)
    return out


def _team_side(m: MatchRecord, team: str) -> int | None:
    if m.blue_team == team:
        return 1
    if m.red_team == team:
        return 2
    return None


@dataclass(frozen=True)
class HeroStats:
    hero: int
    picks: int
    bans: int
    wins: int
    matches_total: int
    picked_rate: float
    banned_rate: float
    win_rate: float | None  # None when never picked
    avg_kills: float | None
    avg_deaths: float | None
    avg_assists: float | None


def hero_stats(
    matches: Sequence[MatchRecord],
    date_from: str | None = None,
    date_to: str | None = None,
    patch: str | None = None,
    team: str | None = None,
) -> dict[int, HeroStats]:
    """Per-hero rates over the filtered records. With a team filter, only
    that team's picks/bans/wins count (rates still divide by the filtered
    match total). Heroes absent from the filtered records are omitted."""
    selected = filter_matches(matches, date_from, date_to, patch, team)
    total = len(selected)
    picks: dict[int, int] = {}
    bans: dict[int, int] = {}
    wins: dict[int, int] = {}
    k_sum: dict[int, int] = {}
    d_sum: dict[int, int] = {}
    a_sum: dict[int, int] = {}
    for m in selected:
        side_filter = _team_side(m, team) if team is not None else None
        for step in m.steps:
            if side_filter is not None and step.side != side_filter:
                continue
            if step.kind == "ban":
                bans[step.hero] = bans.get(step.hero, 0) + 1
            else:
                picks[step.hero] = picks.get(step.hero, 0) + 1
                if step.side == m.winner_side:
                    wins[step.hero] = wins.get(step.hero, 0) + 1
        for side in (1, 2):
            if side_filter is not None and side != side_filter:
                continue
            for p in m.players[str(side)]:
                k_sum[p.hero] = k_sum.get(p.hero, 0) + p.kills
                d_sum[p.hero] = d_sum.get(p.hero, 0) + p.deaths
                a_sum[p.hero] = a_sum.get(p.hero, 0) + p.assists
    out = {}
    for hero in sorted(set(picks) | set(bans)):
        n_picks = picks.get(hero, 0)
        out[hero] = HeroStats(
            hero=hero,
            picks=n_picks,
            bans=bans.get(hero, 0),
            wins=wins.get(hero, 0),
            matches_total=total,
            picked_rate=n_picks / total if total else 0.0,
            banned_rate=bans.get(hero, 0) / total if total else 0.0,
            win_rate=wins.get(hero, 0) / n_picks if n_picks else None,
            avg_kills=k_sum.get(hero, 0) / n_picks if n_picks else None,
            avg_deaths=d_sum.get(hero, 0) / n_picks if n_picks else None,
            avg_assists=a_sum.get(hero, 0) / n_picks if n_picks else None,
        )
    return out


# ---------------------------------------------------------------------------
# Player distributions
# ---------------------------------------------------------------------------

def _median(sorted_vals: Sequence[float]) -> float:
    n = len(sorted_vals)
    mid = n // 2
    if n % 2 == 1:
        return float(sorted_vals[mid])
    return (sorted_vals[mid - 1] + sorted_vals[mid]) / 2.0


def quartiles(values: Iterable[float]) -> tuple[float, float, float]:
    """(q1, median, q3) by the inclusive-median method."""
    vals = sorted(values)
    if not vals:
        raise AnalyticsError("quartiles of an empty sample")
    n = len(vals)
    med = _median(vals)
    if n == 1:
        return float(vals[0]), med, float(vals[0])
    half = n // 2
    lower = vals[: half + 1] if n % 2 == 1 else vals[:half]
    upper = vals[half:]
    return _median(lower), med, _median(upper)


@dataclass(frozen=True)
class PlayerPoint:
    value: float
    hero: int
    match_id: str
    highlighted: bool


@dataclass(frozen=True)
class PlayerDistribution:
    player: str
    metric: str
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    points: tuple[PlayerPoint, ...]


def player_metric_value(m: MatchRecord, side: int, p) -> dict[str, float]:
    team_kills = sum(q.kills for q in m.players[str(side)])
    return {
        "kda": kda(p.kills, p.deaths, p.assists),
        "damage_per_min": p.damage / m.duration_min,
        "damage_taken_per_min": p.damage_taken / m.duration_min,
        "gold_per_min": p.gold / m.duration_min,
        "participation": (p.kills + p.assists) / team_kills if team_kills else 0.0,
    }


def player_box_stats(
    matches: Sequence[MatchRecord],
    player: str,
    metric: str,
    highlight_hero: int | None = None,
) -> PlayerDistribution:
    if metric not in PLAYER_METRICS:
        raise AnalyticsError(f"unknown metric {metric!r}; one of {PLAYER_METRICS}")
    points = []
    for m in matches:
        for side in (1, 2):
            for p in m.players[str(side)]:
                if p.player != player:
                    continue
                value = player_metric_value(m, side, p)[metric]
                points.append(
                    PlayerPoint(
                        value=value,
                        hero=p.hero,
                        match_id=m.match_id,
                        highlighted=highlight_hero is not None and p.hero == highlight_hero,
                    )
                )
    if not points:
        raise AnalyticsError(f"player {player!r} not found in the records")
    values = [pt.value for pt in points]
    q1, med, q3 = quartiles(values)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = [v for v in values if lo <= v <= hi]
    return PlayerDistribution(
        player=player,
        metric=metric,
        minimum=min(values),
        q1=q1,
        median=med,
        q3=q3,
        maximum=max(values),
        whisker_low=min(inside),
        whisker_high=max(inside),
        outliers=tuple(sorted(v for v in values if v < lo or v > hi)),
        points=tuple(points),
    )


# ---------------------------------------------------------------------------
# Team radar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TeamRadar:
    team: str
    hero_subset: tuple[int, ...]
    sample: int
    win_rate: float | None
    team_kda: float | None
    avg_tyrants: float | None
    avg_dragons: float | None
    avg_towers: float | None
    avg_duration: float | None


def team_radar(
    matches: Sequence[MatchRecord], team: str, hero_subset: Iterable[int] = ()
) -> TeamRadar:
    """Six indicators over the rounds where ``team`` picked every hero in
    the subset (empty subset = all of the team's rounds)."""
    subset = tuple(sorted(set(int(h) for h in hero_subset)))
    wins = 0
    kills = deaths = assists = 0
    tyrants = dragons = towers = 0
    duration = 0.0
    sample = 0
    for m in matches:
        side = _team_side(m, team)
        if side is None:
            continue
        picks = {p.hero for p in m.players[str(side)]}
        if not set(subset) <= picks:
            continue
        sample += 1
        wins += m.winner_side == side
        for p in m.players[str(side)]:
            kills += p.kills
            deaths += p.deaths
            assists += p.assists
        obj = m.objectives[str(side)]
        tyrants += obj.tyrants
        dragons += obj.dragons
        towers += obj.towers
        duration += m.duration_min
    if sample == 0:
        return TeamRadar(team, subset, 0, None, None, None, None, None, None)
    return TeamRadar(
        team=team,
        hero_subset=subset,
        sample=sample,
        win_rate=wins / sample,
        team_kda=(kills + assists) / max(deaths, 1),
        avg_tyrants=tyrants / sample,
        avg_dragons=dragons / sample,
        avg_towers=towers / sample,
        avg_duration=duration / sample,
    )


# ---------------------------------------------------------------------------
# Hero relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationEntry:
    hero: int
    other: int
    relation: str
    joint_games: int
    rate: float  # joint win rate from the relation's reference side


def relations_top3(
    matches: Sequence[MatchRecord],
    hero: int,
    relation: str,
    min_support: int = 3,
) -> list[RelationEntry]:
    """Top-3 partners/opponents by joint win rate.

    synergy:      co-picked same side; rate = that side's win rate.
    counters:     opposing picks; rate = ``hero``'s side win rate.
    countered_by: opposing picks; rate = the opponent's side win rate, so
                  countered_by(a) lists b exactly when counters(b) lists a.
    """
    if relation not in RELATIONS:
        raise AnalyticsError(f"unknown relation {relation!r}; one of {RELATIONS}")
    if min_support < 1:
        raise AnalyticsError("min_support must be >= 1")
    joint: dict[int, int] = {}
    score: dict[int, int] = {}
    for m in matches:
        pick_side = {}
        for step in m.steps:
            if step.kind == "pick":
                pick_side[step.hero] = step.side
        if hero not in pick_side:
            continue
        side = pick_side[hero]
        hero_won = m.winner_side == side
        for other, other_side in pick_side.items():
            if other == hero:
                continue
            same = other_side == side
            if relation == "synergy" and same:
                joint[other] = joint.get(other, 0) + 1
                score[other] = score.get(other, 0) + (1 if hero_won else 0)
            elif relation == "counters" and not same:
                joint[other] = joint.get(other, 0) + 1
                score[other] = score.get(other, 0) + (1 if hero_won else 0)
            elif relation == "countered_by" and not same:
                joint[other] = joint.get(other, 0) + 1
                score[other] = score.get(other, 0) + (0 if hero_won else 1)
    entries = [
        RelationEntry(
            hero=hero,
            other=other,
            relation=relation,
            joint_games=joint[other],
            rate=score.get(other, 0) / joint[other],
        )
        for other in joint
        if joint[other] >= min_support
    ]
    entries.sort(key=lambda e: (-e.rate, -e.joint_games, e.other))
    return entries[:3]


# ---------------------------------------------------------------------------
# Patch comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PatchWindow:
    matches_total: int
    picks: int
    bans: int
    wins: int
    win_rate: float | None
    picked_rate: float
    banned_rate: float
    avg_kills: float | None
    avg_deaths: float | None
    avg_assists: float | None


@dataclass(frozen=True)
class PatchDiff:
    hero: int
    patch_date: str
    before: PatchWindow
    after: PatchWindow
    team: str | None
    team_before: PatchWindow | None
    team_after: PatchWindow | None

    def delta(self, metric: str) -> float | None:
        b = getattr(self.before, metric)
        a = getattr(self.after, metric)
        if b is None or a is None:
            return None
        return a - b


def _window(matches: Sequence[MatchRecord], hero: int, team: str | None) -> PatchWindow | None:
    stats = hero_stats(matches, team=team)
    total = len(filter_matches(matches, team=team))
    if total == 0:
        return None
    s = stats.get(hero)
    if s is None:
        return PatchWindow(total, 0, 0, 0, None, 0.0, 0.0, None, None, None)
    return PatchWindow(
        matches_total=total,
        picks=s.picks,
        bans=s.bans,
        wins=s.wins,
        win_rate=s.win_rate,
        picked_rate=s.picked_rate,
        banned_rate=s.banned_rate,
        avg_kills=s.avg_kills,
        avg_deaths=s.avg_deaths,
        avg_assists=s.avg_assists,
    )


def patch_compare(
    matches: Sequence[MatchRecord],
    patch_date: str,
    hero: int,
    team: str | None = None,
) -> PatchDiff:
    """Hero rates before (date < patch_date) vs after (date >= patch_date).

    The global windows must both contain matches; an empty side raises,
    naming it. The optional team overlay is None on a side where the team
    has no matches."""
    before = [m for m in matches if m.date < patch_date]
    after = [m for m in matches if m.date >= patch_date]
    if not before:
        raise AnalyticsError(f"no matches before {patch_date}")
    if not after:
        raise AnalyticsError(f"no matches on or after {patch_date}")
    return PatchDiff(
        hero=hero,
        patch_date=patch_date,
        before=_window(before, hero, None),
        after=_window(after, hero, None),
        team=team,
        team_before=_window(before, hero, team) if team else None,
        team_after=_window(after, hero, team) if team else None,
    )
