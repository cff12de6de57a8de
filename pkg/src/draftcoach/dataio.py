"""Match-log schema, loading/validation, and a synthetic data generator.

The match-log file is versioned JSON (field-by-field description in the
README): a hero registry, a team/player registry, a patch timeline, and a
list of round records. Loading replays every round through the rules
engine, and rounds sharing a ``series_id`` are additionally replayed as a
series so carry-over violations are caught.

The generator fabricates series from a latent strength model with a
closed-form round win probability:

    p(blue wins) = sigmoid((score(blue) - score(red)) / tau)
    score(T)     = sum(beta[h] for h in T)
                   + sum(synergy[a, b] for a < b in T)
                   + sum(counter[a, b] for a in T, b in opponent)

with ``synergy`` symmetric (zero diagonal) and ``counter`` antisymmetric,
so swapping sides maps p to 1 - p exactly. Draft agents pick by softmax
over the marginal value of each legal hero, which gives the corpora real,
learnable transition structure. Everything is deterministic in the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable

import numpy as np

from . import winmodel
from .rules import (
    ActionKind,
    DEFAULT_HERO_COUNT,
    DraftState,
    DraftTemplate,
    GlobalBpPolicy,
    RuleViolation,
    SeriesState,
    TEMPLATES,
    advance_round,
    apply_action,
    encode_features,
    legal_actions,
    parse_template,
)

MATCH_LOG_KIND = "draftcoach-match-log"
MATCH_LOG_VERSION = 1

ROLES = ("top", "jungle", "mid", "carry", "support")


class DataError(Exception):
    """Schema violation or illegal content in a match-log file."""


@dataclass(frozen=True)
class HeroInfo:
    id: int
    name: str
    role: str


@dataclass(frozen=True)
class PlayerRoundStats:
    player: str
    hero: int
    role: str
    kills: int
    deaths: int
    assists: int
    damage: float
    damage_taken: float
    gold: float
    minutes: float


@dataclass(frozen=True)
class TeamRoundStats:
    tyrants: int
    dragons: int
    towers: int


@dataclass(frozen=True)
class StepRecord:
    side: int
    kind: str  # "ban" | "pick"
    hero: int


@dataclass(frozen=True)
class MatchRecord:
    """One round (battle). Rounds of a series share ``series_id``."""

    match_id: str
    series_id: str
    round_in_series: int
    date: str  # ISO yyyy-mm-dd
    patch: str
    template: str
    blue_team: str
    red_team: str
    winner_side: int
    duration_min: float
    steps: tuple[StepRecord, ...]
    players: dict[str, tuple[PlayerRoundStats, ...]]  # keyed by side "1"/"2"
    objectives: dict[str, TeamRoundStats]  # keyed by side "1"/"2"

    def hero_sequence(self) -> list[int]:
        return [s.hero for s in self.steps]

    def picks(self, side: int) -> list[int]:
        return [s.hero for s in self.steps if s.kind == "pick" and s.side == side]


@dataclass(frozen=True)
class MatchLogFile:
    policy: GlobalBpPolicy
    templates: dict[str, str]  # name -> step string
    heroes: tuple[HeroInfo, ...]
    teams: dict[str, tuple[str, ...]]  # team name -> player names
    patches: tuple[dict, ...]  # {"id", "date"}
    matches: tuple[MatchRecord, ...]

    @property
    def hero_count(self) -> int:
        return len(self.heroes)

    def template_of(self, name: str) -> DraftTemplate:
        if name not in self.templates:
            raise DataError(f"unknown template {name!r}")
        return parse_template(self.templates[name], name=name)


# ---------------------------------------------------------------------------
# Persistence and validation
# ---------------------------------------------------------------------------

def _record_to_json(m: MatchRecord) -> dict:
    doc = asdict(m)
    doc["steps"] = [asdict(s) for s in m.steps]
    doc["players"] = {k: [asdict(p) for p in v] for k, v in m.players.items()}
    doc["objectives"] = {k: asdict(v) for k, v in m.objectives.items()}
    return doc


def _record_from_json(doc: dict) -> MatchRecord:
    return MatchRecord(
        match_id=doc["match_id"],
        series_id=doc["series_id"],
        round_in_series=doc["round_in_series"],
        date=doc["date"],
        patch=doc["patch"],
        template=doc["template"],
        blue_team=doc["blue_team"],
        red_team=doc["red_team"],
        winner_side=doc["winner_side"],
        duration_min=doc["duration_min"],
        steps=tuple(StepRecord(**s) for s in doc["steps"]),
        players={
            k: tuple(PlayerRoundStats(**p) for p in v) for k, v in doc["players"].items()
        },
        objectives={k: TeamRoundStats(**v) for k, v in doc["objectives"].items()},
    )


def to_json(file: MatchLogFile) -> str:
    doc = {
        "kind": MATCH_LOG_KIND,
        "version": MATCH_LOG_VERSION,
        "policy": file.policy.value,
        "templates": file.templates,
        "heroes": [asdict(h) for h in file.heroes],
        "teams": {k: list(v) for k, v in file.teams.items()},
        "patches": list(file.patches),
        "matches": [_record_to_json(m) for m in file.matches],
    }
    return json.dumps(doc)


def save_matches(file: MatchLogFile, path: str | Path) -> None:
    Path(path).write_text(to_json(file), encoding="utf-8")


def load_matches(path: str | Path) -> MatchLogFile:
    """Load and fully validate a match-log file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: not valid JSON ({e})")
    if doc.get("kind") != MATCH_LOG_KIND:
        raise DataError(f"{path}: not a match-log file")
    if doc.get("version") != MATCH_LOG_VERSION:
        raise DataError(f"{path}: unsupported version {doc.get('version')!r}")
    try:
        file = MatchLogFile(
            policy=GlobalBpPolicy(doc["policy"]),
            templates=dict(doc["templates"]),
            heroes=tuple(HeroInfo(**h) for h in doc["heroes"]),
            teams={k: tuple(v) for k, v in doc["teams"].items()},
            patches=tuple(doc["patches"]),
            matches=tuple(_record_from_json(m) for m in doc["matches"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{path}: malformed document ({e})")
    validate(file)
    return file


def _infer_best_of(rounds: list[MatchRecord]) -> int:
    """Smallest odd N under which no recorded round starts after the series
    is already decided. The winner sequence is tracked per series-team (team
    1 = blue side of round 0)."""
    team_a = rounds[0].blue_team
    winners = [
        1 if (m.winner_side == 1) == (m.blue_team == team_a) else 2 for m in rounds
    ]
    n = len(winners)
    lowest = n if n % 2 == 1 else n + 1
    for candidate in range(max(lowest, 3), 2 * n + 2, 2):
        need = (candidate + 1) // 2
        w1 = w2 = 0
        ok = True
        for w in winners:
            if w1 >= need or w2 >= need:
                ok = False
                break
            if w == 1:
                w1 += 1
            else:
                w2 += 1
        if ok:
            return candidate
    return 2 * n + 1


def validate(file: MatchLogFile) -> None:
    """Raise DataError (naming the match and step) on any rule violation."""
    ids = [h.id for h in file.heroes]
    if ids != list(range(len(ids))):
        raise DataError("hero registry ids must be contiguous from 0")
    if len({h.name for h in file.heroes}) != len(ids):
        raise DataError("hero registry names must be unique")
    hero_count = len(ids)
    seen_match_ids = set()
    by_series: dict[str, list[MatchRecord]] = {}
    for m in file.matches:
        if m.match_id in seen_match_ids:
            raise DataError(f"match {m.match_id}: duplicate match id")
        seen_match_ids.add(m.match_id)
        if m.winner_side not in (1, 2):
            raise DataError(f"match {m.match_id}: winner_side must be 1 or 2")
        if m.duration_min <= 0:
            raise DataError(f"match {m.match_id}: duration must be positive")
        for team in (m.blue_team, m.red_team):
            if team not in file.teams:
                raise DataError(f"match {m.match_id}: unknown team {team!r}")
        by_series.setdefault(m.series_id, []).append(m)

    for series_id, rounds in by_series.items():
        rounds.sort(key=lambda m: m.round_in_series)
        if [m.round_in_series for m in rounds] != list(range(len(rounds))):
            raise DataError(f"series {series_id}: round indices must be contiguous from 0")
        names = {rounds[0].blue_team, rounds[0].red_team}
        template = file.template_of(rounds[0].template)
        n_rounds = _infer_best_of(rounds)
        blue_schedule = []
        team_a = rounds[0].blue_team  # "team 1" within this series
        for m in rounds:
            if {m.blue_team, m.red_team} != names:
                raise DataError(f"match {m.match_id}: teams change within series {series_id}")
            if m.template != rounds[0].template:
                raise DataError(f"match {m.match_id}: template changes within series {series_id}")
            blue_schedule.append(1 if m.blue_team == team_a else 2)
        while len(blue_schedule) < n_rounds:
            blue_schedule.append(1)
        series = SeriesState(
            n_rounds=n_rounds,
            round_index=0,
            blue_schedule=tuple(blue_schedule),
            pr1=frozenset(),
            pr2=frozenset(),
            wins1=0,
            wins2=0,
            policy=file.policy,
        )
        for m in rounds:
            if series.is_series_over:
                raise DataError(
                    f"match {m.match_id}: series {series_id} already decided before this round"
                )
            state = DraftState.new(template, hero_count)
            for i, step in enumerate(m.steps):
                want = template.steps[i] if i < len(template.steps) else None
                kind = ActionKind.BAN if step.kind == "ban" else ActionKind.PICK
                if want is None or step.side != want.side or kind != want.kind:
                    raise DataError(
                        f"match {m.match_id} step {i}: ({step.kind}{step.side}) does not "
                        f"match template {m.template!r}"
                    )
                if not 0 <= step.hero < hero_count:
                    raise DataError(f"match {m.match_id} step {i}: unknown hero {step.hero}")
                try:
                    state = apply_action(series, state, step.hero)
                except RuleViolation as e:
                    raise DataError(f"match {m.match_id} step {i}: {e} [{e.rule}]")
            if not state.is_round_complete:
                raise DataError(f"match {m.match_id}: draft has only {len(m.steps)} steps")
            _validate_players(file, m, state, hero_count)
            series = advance_round(series, state, series.team_on_side(m.winner_side))


def _validate_players(file: MatchLogFile, m: MatchRecord, state: DraftState, hero_count: int):
    for side in (1, 2):
        key = str(side)
        if key not in m.players or key not in m.objectives:
            raise DataError(f"match {m.match_id}: missing side {side} stats")
        side_picks = set(state.picks(side))
        stat_heroes = [p.hero for p in m.players[key]]
        if sorted(stat_heroes) != sorted(side_picks):
            raise DataError(
                f"match {m.match_id}: side {side} player heroes {sorted(stat_heroes)} "
                f"do not match picks {sorted(side_picks)}"
            )
        team = m.blue_team if side == 1 else m.red_team
        roster = set(file.teams[team])
        for p in m.players[key]:
            if p.player not in roster:
                raise DataError(f"match {m.match_id}: player {p.player!r} not in team {team!r}")
            if min(p.kills, p.deaths, p.assists) < 0:
                raise DataError(f"match {m.match_id}: negative stat for {p.player!r}")


# ---------------------------------------------------------------------------
# Synthetic generator with closed-form oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SyntheticConfig:
    """Latent strength model parameters; see the module docstring for the
    probability formula."""

    hero_count: int = DEFAULT_HERO_COUNT
    beta: np.ndarray | None = None  # per-hero strength, defaults to zeros
    synergy: np.ndarray | None = None  # symmetric, zero diagonal
    counter: np.ndarray | None = None  # antisymmetric
    tau: float = 1.0
    draft_temp: float = 1.0
    seed: int = 0
    n_teams: int = 4
    template_name: str = "hok"
    n_rounds: int = 3
    policy: GlobalBpPolicy = GlobalBpPolicy.EITHER_TEAM
    skill_spread: float = 0.15
    player_skill: dict[str, float] | None = None
    start_date: str = "2025-01-01"
    season_days: int = 180
    patch_at: float | None = None  # fraction of the season where the patch lands
    patch_beta_shift: dict[int, float] | None = None

    def __post_init__(self):
        h = self.hero_count
        if self.beta is None:
            object.__setattr__(self, "beta", np.zeros(h))
        if self.synergy is None:
            object.__setattr__(self, "synergy", np.zeros((h, h)))
        if self.counter is None:
            object.__setattr__(self, "counter", np.zeros((h, h)))
        if self.beta.shape != (h,):
            raise DataError("beta must have one entry per hero")
        if self.synergy.shape != (h, h) or not np.allclose(self.synergy, self.synergy.T):
            raise DataError("synergy matrix must be symmetric")
        if np.diag(self.synergy).any():
            raise DataError("synergy diagonal must be zero")
        if self.counter.shape != (h, h) or not np.allclose(self.counter, -self.counter.T):
            raise DataError("counter matrix must be antisymmetric")
        if self.tau <= 0:
            raise DataError("tau must be positive")

    @staticmethod
    def random(
        hero_count: int = DEFAULT_HERO_COUNT,
        seed: int = 0,
        beta_scale: float = 1.0,
        synergy_scale: float = 0.25,
        counter_scale: float = 0.25,
        **kwargs,
    ) -> SyntheticConfig:
        """Random latent parameters with the required symmetries."""
        rng = np.random.default_rng(seed)
        beta = rng.normal(0.0, beta_scale, hero_count)
        raw_s = rng.normal(0.0, synergy_scale, (hero_count, hero_count))
        synergy = (raw_s + raw_s.T) / 2.0
        np.fill_diagonal(synergy, 0.0)
        raw_c = rng.normal(0.0, counter_scale, (hero_count, hero_count))
        counter = (raw_c - raw_c.T) / 2.0
        return SyntheticConfig(
            hero_count=hero_count, beta=beta, synergy=synergy, counter=counter,
            seed=seed, **kwargs,
        )


def team_score(
    config: SyntheticConfig, picks: Iterable[int], opponent: Iterable[int],
    beta: np.ndarray | None = None,
) -> float:
    picks = list(picks)
    opponent = list(opponent)
    beta = config.beta if beta is None else beta
    score = float(sum(beta[h] for h in picks))
    for i, a in enumerate(picks):
        for b in picks[i + 1 :]:
            score += float(config.synergy[a, b])
    for a in picks:
        for b in opponent:
            score += float(config.counter[a, b])
    return score


def round_win_prob(
    config: SyntheticConfig, blue: Iterable[int], red: Iterable[int],
    beta: np.ndarray | None = None,
) -> float:
    """Closed-form P(blue wins) for any pick sets (no count restriction)."""
    blue, red = list(blue), list(red)
    diff = team_score(config, blue, red, beta) - team_score(config, red, blue, beta)
    return 1.0 / (1.0 + math.exp(-diff / config.tau))


def oracle_winrate(config: SyntheticConfig, blue: Iterable[int], red: Iterable[int]) -> float:
    """P(blue wins) for a complete 5-a-side round."""
    blue, red = list(blue), list(red)
    if len(blue) != 5 or len(red) != 5:
        raise DataError(f"oracle expects 5 picks per side, got {len(blue)}/{len(red)}")
    if len(set(blue) | set(red)) != 10:
        raise DataError("picks must be 10 distinct heroes")
    return round_win_prob(config, blue, red)


class SyntheticOracle:
    """Win-model adapter around the closed-form probability.

    ``predict_proba`` decodes the 2H draft encoding back into pick sets, so
    it slots in wherever a trained model is expected. It reflects the base
    parameters; a configured patch shift applies only to generated outcomes
    after the patch date.
    """

    def __init__(self, config: SyntheticConfig):
        self.config = config
        self.n_features = 2 * config.hero_count

    def predict_proba(self, features: np.ndarray) -> float:
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (self.n_features,):
            raise DataError(f"expected {self.n_features} features, got {features.shape}")
        h = self.config.hero_count
        blue = np.nonzero(features[:h] > 0.5)[0]
        red = np.nonzero(features[h:] > 0.5)[0]
        return round_win_prob(self.config, blue, red)

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_proba(row) for row in np.asarray(X)])


def _effective_beta(config: SyntheticConfig, after_patch: bool) -> np.ndarray:
    if not after_patch or not config.patch_beta_shift:
        return config.beta
    beta = config.beta.copy()
    for hero, delta in config.patch_beta_shift.items():
        beta[int(hero)] += delta
    return beta


def _softmax_draw(rng: np.random.Generator, values: np.ndarray, temp: float) -> int:
    z = (values - values.max()) / max(temp, 1e-9)
    w = np.exp(z)
    return int(rng.choice(len(values), p=w / w.sum()))


def _draft_round(
    rng: np.random.Generator,
    config: SyntheticConfig,
    template: DraftTemplate,
    series: SeriesState,
    beta: np.ndarray,
) -> tuple[DraftState, list[int]]:
    state = DraftState.new(template, config.hero_count)
    sequence: list[int] = []
    while not state.is_round_complete:
        step = state.step()
        legal = sorted(legal_actions(series, state))
        own = list(state.picks(step.side))
        opp = list(state.picks(3 - step.side))
        legal_arr = np.array(legal)
        base = beta[legal_arr]
        if step.kind == ActionKind.PICK:
            values = base.copy()
            if own:
                values = values + config.synergy[np.ix_(legal_arr, own)].sum(axis=1)
            if opp:
                values = values + config.counter[np.ix_(legal_arr, opp)].sum(axis=1)
        else:
            # Ban what the other side would most like to have.
            values = base.copy()
            if opp:
                values = values + config.synergy[np.ix_(legal_arr, opp)].sum(axis=1)
            if own:
                values = values + config.counter[np.ix_(legal_arr, own)].sum(axis=1)
        hero = legal[_softmax_draw(rng, values, config.draft_temp)]
        sequence.append(hero)
        state = apply_action(series, state, hero)
    return state, sequence


def _player_stats(
    rng: np.random.Generator,
    player: str,
    hero: int,
    role: str,
    won: bool,
    skill: float,
    duration: float,
) -> PlayerRoundStats:
    lift = math.exp(skill)
    k_rate = (4.0 if won else 2.2) * lift
    d_rate = 2.4 if won else 4.2
    a_rate = (6.5 if won else 4.0) * lift
    return PlayerRoundStats(
        player=player,
        hero=int(hero),
        role=role,
        kills=int(rng.poisson(k_rate)),
        deaths=int(rng.poisson(d_rate)),
        assists=int(rng.poisson(a_rate)),
        damage=float(np.round(rng.normal(620.0 if won else 520.0, 90.0) * lift * duration, 1)),
        damage_taken=float(np.round(rng.normal(480.0, 80.0) * duration, 1)),
        gold=float(np.round(rng.normal(640.0 if won else 560.0, 60.0) * duration, 1)),
        minutes=duration,
    )


def generate_synthetic(
    config: SyntheticConfig, n_matches: int
) -> tuple[MatchLogFile, SyntheticOracle]:
    """Fabricate ``n_matches`` rounds of best-of-N series play."""
    if n_matches < 1:
        raise DataError("n_matches must be >= 1")
    rng = np.random.default_rng(config.seed)
    template = TEMPLATES[config.template_name]
    # The last round must still find len(template) untouched heroes after the
    # carry-over masks have grown through the earlier rounds.
    masked_per_round = 10 if config.policy == GlobalBpPolicy.EITHER_TEAM else 5
    need = masked_per_round * (config.n_rounds - 1) + len(template.steps)
    if config.hero_count < need:
        raise DataError(
            f"hero pool of {config.hero_count} cannot complete best-of-{config.n_rounds} "
            f"under {config.policy.value}; need at least {need}"
        )
    heroes = tuple(
        HeroInfo(id=i, name=f"Hero{i:03d}", role=ROLES[i % len(ROLES)])
        for i in range(config.hero_count)
    )
    team_names = [f"Team{chr(65 + i)}" for i in range(config.n_teams)]
    teams = {name: tuple(f"{name}_{role}" for role in ROLES) for name in team_names}
    skills = dict(config.player_skill or {})
    for name in team_names:
        for p in teams[name]:
            if p not in skills:
                skills[p] = float(rng.normal(0.0, config.skill_spread))

    start = date.fromisoformat(config.start_date)
    patch_date = None
    if config.patch_at is not None:
        patch_date = start + timedelta(days=int(config.season_days * config.patch_at))
    patches = [{"id": "p1", "date": config.start_date}]
    if patch_date is not None:
        patches.append({"id": "p2", "date": patch_date.isoformat()})

    matches: list[MatchRecord] = []
    series_idx = 0
    # Rough series-per-round estimate so dates cover the season.
    est_series = max(1, math.ceil(n_matches / ((config.n_rounds + 1) // 2 + 0.5)))
    while len(matches) < n_matches:
        pair = rng.choice(config.n_teams, size=2, replace=False)
        name1, name2 = team_names[int(pair[0])], team_names[int(pair[1])]
        day = start + timedelta(
            days=int(config.season_days * min(series_idx / est_series, 1.0))
        )
        after_patch = patch_date is not None and day >= patch_date
        beta = _effective_beta(config, after_patch)
        patch_id = "p2" if after_patch else "p1"
        series = SeriesState.new(config.n_rounds, policy=config.policy)
        while not series.is_series_over and len(matches) < n_matches:
            state, sequence = _draft_round(rng, config, template, series, beta)
            blue_name = name1 if series.blue_team == 1 else name2
            red_name = name2 if series.blue_team == 1 else name1
            p_blue = round_win_prob(config, state.picks(1), state.picks(2), beta)
            winner_side = 1 if rng.random() < p_blue else 2
            duration = float(np.round(max(8.0, rng.normal(16.0, 3.0)), 1))
            players = {}
            for side, tname in ((1, blue_name), (2, red_name)):
                picks = state.picks(side)
                roster = teams[tname]
                players[str(side)] = tuple(
                    _player_stats(
                        rng, roster[i], picks[i], ROLES[i],
                        won=(side == winner_side), skill=skills[roster[i]],
                        duration=duration,
                    )
                    for i in range(5)
                )
            objectives = {
                str(side): TeamRoundStats(
                    tyrants=int(rng.poisson(2.2 if side == winner_side else 1.0)),
                    dragons=int(rng.poisson(3.0 if side == winner_side else 1.6)),
                    towers=int(rng.poisson(7.5 if side == winner_side else 3.0)),
                )
                for side in (1, 2)
            }
            matches.append(
                MatchRecord(
                    match_id=f"m{len(matches):05d}",
                    series_id=f"s{series_idx:04d}",
                    round_in_series=series.round_index,
                    date=day.isoformat(),
                    patch=patch_id,
                    template=config.template_name,
                    blue_team=blue_name,
                    red_team=red_name,
                    winner_side=winner_side,
                    duration_min=duration,
                    steps=tuple(
                        StepRecord(
                            side=s.side,
                            kind="ban" if s.kind == ActionKind.BAN else "pick",
                            hero=h,
                        )
                        for s, h in zip(template.steps, sequence)
                    ),
                    players=players,
                    objectives=objectives,
                )
            )
            series = advance_round(series, state, series.team_on_side(winner_side))
        series_idx += 1

    file = MatchLogFile(
        policy=config.policy,
        templates={config.template_name: template.text()},
        heroes=heroes,
        teams=teams,
        patches=tuple(patches),
        matches=tuple(matches),
    )
    return file, SyntheticOracle(config)


# ---------------------------------------------------------------------------
# Bridges to the model layers
# ---------------------------------------------------------------------------

def build_dataset(file: MatchLogFile) -> winmodel.Dataset:
    """Draft encodings with 1 = blue side won."""
    rows_X = []
    rows_y = []
    neutral = SeriesState.new(1)
    for m in file.matches:
        template = file.template_of(m.template)
        state = DraftState.new(template, file.hero_count)
        for step in m.steps:
            state = apply_action(neutral, state, step.hero)
        rows_X.append(encode_features(state))
        rows_y.append(1 if m.winner_side == 1 else 0)
    return winmodel.Dataset(np.array(rows_X), np.array(rows_y, dtype=np.int8))


def markov_corpus(file: MatchLogFile) -> list[list[int]]:
    return [m.hero_sequence() for m in file.matches]
