"""Ban/pick rules for best-of-N drafting series.

A draft round follows a fixed step template such as
``b1-b2-b1-b2-p1-p2-p2-p1-p1-p2-b2-b1-b2-b1-p2-p1-p1-p2`` where ``b``/``p``
is ban/pick and ``1``/``2`` is the blue/red side. The round state is an
array over the hero pool: 0 untouched, -1 banned, 1/2 picked by that side.

Across a series, heroes picked in earlier rounds become unavailable for
later picks (the carry-over rule). Which picks bar which team is a policy
choice: under ``EITHER_TEAM`` every pick bars both teams, under
``SELF_ONLY`` a team is only barred from repeating its own picks. Bans
never carry over; they reset each round.

Teams are stable across the series (1 = our team, 2 = opponent); sides are
per-round (1 = blue, 2 = red) and assigned by a configurable schedule,
alternating by default. All state objects here are immutable values:
transitions return new objects, so states can be shared freely between
concurrent searches.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Iterable

import numpy as np

DEFAULT_HERO_COUNT = 110

# Slot values in the round state array.
UNTOUCHED = 0
BANNED = -1
BLUE_SIDE = 1
RED_SIDE = 2

PICKS_PER_SIDE = 5


class ActionKind(IntEnum):
    BAN = 0
    PICK = 1


class GlobalBpPolicy(Enum):
    """Scope of the carry-over rule for picks from earlier rounds."""

    SELF_ONLY = "self_only"
    EITHER_TEAM = "either_team"


class DraftError(Exception):
    """Base class for drafting rule errors."""


class TemplateError(DraftError):
    """Malformed or invalid step template."""


class RuleViolation(DraftError):
    """An action that breaks a drafting rule; ``rule`` names which one."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


@dataclass(frozen=True, slots=True)
class TemplateStep:
    side: int
    kind: ActionKind


@dataclass(frozen=True)
class DraftTemplate:
    """Ordered ban/pick steps for one round."""

    name: str
    steps: tuple[TemplateStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def text(self) -> str:
        return "-".join(f"{'bp'[s.kind]}{s.side}" for s in self.steps)

    def count(self, side: int, kind: ActionKind) -> int:
        return sum(1 for s in self.steps if s.side == side and s.kind == kind)

    def side_codes(self) -> np.ndarray:
        return np.array([s.side for s in self.steps], dtype=np.int8)

    def kind_codes(self) -> np.ndarray:
        return np.array([int(s.kind) for s in self.steps], dtype=np.int8)


def parse_template(text: str, name: str = "custom") -> DraftTemplate:
    """Parse a dash-separated step string such as ``b1-b2-p1-p2-...``.

    Raises TemplateError for a malformed token (naming it), a pick count
    other than 5 per side, or unequal ban counts. ``template.text()``
    round-trips to the input string.
    """
    steps = []
    for token in text.strip().split("-"):
        if len(token) != 2 or token[0] not in "bp" or token[1] not in "12":
            raise TemplateError(f"malformed step token {token!r} (expected [bp][12])")
        kind = ActionKind.BAN if token[0] == "b" else ActionKind.PICK
        steps.append(TemplateStep(side=int(token[1]), kind=kind))
    template = DraftTemplate(name=name, steps=tuple(steps))
    p1 = template.count(1, ActionKind.PICK)
    p2 = template.count(2, ActionKind.PICK)
    if p1 != PICKS_PER_SIDE or p2 != PICKS_PER_SIDE:
        raise TemplateError(
            f"template must give each side exactly {PICKS_PER_SIDE} picks, got {p1}/{p2}"
        )
    b1 = template.count(1, ActionKind.BAN)
    b2 = template.count(2, ActionKind.BAN)
    if b1 != b2:
        raise TemplateError(f"ban counts must be equal per side, got {b1}/{b2}")
    return template


def _toy_template(text: str, name: str) -> DraftTemplate:
    # Bypasses the 5-pick validation; intended for small test games only.
    steps = tuple(
        TemplateStep(side=int(t[1]), kind=ActionKind.BAN if t[0] == "b" else ActionKind.PICK)
        for t in text.strip().split("-")
    )
    return DraftTemplate(name=name, steps=steps)


TEMPLATES: dict[str, DraftTemplate] = {
    "hok": parse_template(
        "b1-b2-b1-b2-p1-p2-p2-p1-p1-p2-b2-b1-b2-b1-p2-p1-p1-p2", name="hok"
    ),
    "lol": parse_template(
        "b1-b2-b1-b2-b1-b2-p1-p2-p2-p1-p1-p2-b2-b1-b2-b1-p2-p1-p1-p2", name="lol"
    ),
    "dota2": parse_template(
        "b1-b2-b1-b2-p1-p2-p2-p1-b1-b2-b1-b2-b1-b2-p2-p1-p1-p2-b1-b2-b1-b2-p1-p2",
        name="dota2",
    ),
}


@dataclass(frozen=True)
class DraftState:
    """Immutable round state: slot array, cursor into the template."""

    template: DraftTemplate
    slots: tuple[int, ...]
    cursor: int

    @staticmethod
    def new(template: DraftTemplate, hero_count: int = DEFAULT_HERO_COUNT) -> DraftState:
        if hero_count < 1:
            raise ValueError("hero_count must be positive")
        return DraftState(template=template, slots=(UNTOUCHED,) * hero_count, cursor=0)

    @property
    def hero_count(self) -> int:
        return len(self.slots)

    @property
    def is_round_complete(self) -> bool:
        return self.cursor >= len(self.template.steps)

    def step(self) -> TemplateStep:
        if self.is_round_complete:
            raise RuleViolation("terminal", "round is complete; no current step")
        return self.template.steps[self.cursor]

    def picks(self, side: int) -> tuple[int, ...]:
        return tuple(h for h, v in enumerate(self.slots) if v == side)

    def bans(self) -> tuple[int, ...]:
        return tuple(h for h, v in enumerate(self.slots) if v == BANNED)

    def slots_array(self) -> np.ndarray:
        return np.array(self.slots, dtype=np.int8)


def current_actor(state: DraftState) -> tuple[int, ActionKind]:
    """Side and action kind of the step at the cursor. Errors when complete."""
    step = state.step()
    return step.side, step.kind


@dataclass(frozen=True)
class SeriesState:
    """Best-of-N context: round index, side schedule, carry-over masks, wins.

    ``pr1``/``pr2`` are the per-TEAM sets of heroes barred from future picks
    by the carry-over rule. ``blue_schedule[r]`` is the team drafting blue
    in round r.
    """

    n_rounds: int
    round_index: int
    blue_schedule: tuple[int, ...]
    pr1: frozenset[int]
    pr2: frozenset[int]
    wins1: int
    wins2: int
    policy: GlobalBpPolicy

    @staticmethod
    def new(
        n_rounds: int = 3,
        policy: GlobalBpPolicy = GlobalBpPolicy.EITHER_TEAM,
        blue_schedule: tuple[int, ...] | None = None,
        first_blue: int = 1,
    ) -> SeriesState:
        if n_rounds < 1 or n_rounds % 2 == 0:
            raise ValueError("n_rounds must be a positive odd integer")
        if blue_schedule is None:
            # Default: sides alternate round to round.
            blue_schedule = tuple(
                first_blue if r % 2 == 0 else 3 - first_blue for r in range(n_rounds)
            )
        if len(blue_schedule) != n_rounds or any(t not in (1, 2) for t in blue_schedule):
            raise ValueError("blue_schedule must list a team (1 or 2) per round")
        return SeriesState(
            n_rounds=n_rounds,
            round_index=0,
            blue_schedule=blue_schedule,
            pr1=frozenset(),
            pr2=frozenset(),
            wins1=0,
            wins2=0,
            policy=policy,
        )

    @property
    def blue_team(self) -> int:
        return self.blue_schedule[self.round_index]

    def side_of_team(self, team: int) -> int:
        return BLUE_SIDE if team == self.blue_team else RED_SIDE

    def team_on_side(self, side: int) -> int:
        return self.blue_team if side == BLUE_SIDE else 3 - self.blue_team

    def pr_mask(self, team: int) -> frozenset[int]:
        return self.pr1 if team == 1 else self.pr2

    @property
    def wins_needed(self) -> int:
        return (self.n_rounds + 1) // 2

    @property
    def is_series_over(self) -> bool:
        return self.wins1 >= self.wins_needed or self.wins2 >= self.wins_needed

    @property
    def rounds_remaining(self) -> int:
        """Rounds left including the current one."""
        return self.n_rounds - self.round_index

    def swapped(self) -> SeriesState:
        """The same series viewed from the other team's perspective."""
        return SeriesState(
            n_rounds=self.n_rounds,
            round_index=self.round_index,
            blue_schedule=tuple(3 - t for t in self.blue_schedule),
            pr1=self.pr2,
            pr2=self.pr1,
            wins1=self.wins2,
            wins2=self.wins1,
            policy=self.policy,
        )


def legal_actions(series: SeriesState, state: DraftState) -> frozenset[int]:
    """Heroes selectable at the current step.

    Excludes every touched hero (banned or picked this round). On pick steps
    it additionally excludes heroes barred for the acting team by the
    carry-over mask; bans ignore the masks (they reset per round).
    """
    side, kind = current_actor(state)
    out = {h for h, v in enumerate(state.slots) if v == UNTOUCHED}
    if kind == ActionKind.PICK:
        out -= series.pr_mask(series.team_on_side(side))
    return frozenset(out)


def apply_action(series: SeriesState, state: DraftState, hero: int) -> DraftState:
    """Apply the current step's action on ``hero``; returns the new state.

    Pure transition: the input state is unchanged. Raises RuleViolation with
    the broken rule's name for illegal heroes.
    """
    side, kind = current_actor(state)
    if not isinstance(hero, (int, np.integer)) or not 0 <= hero < state.hero_count:
        raise RuleViolation("bad-phase", f"hero id {hero!r} outside pool [0, {state.hero_count})")
    hero = int(hero)
    if state.slots[hero] != UNTOUCHED:
        raise RuleViolation("duplicate", f"hero {hero} already banned or picked this round")
    if kind == ActionKind.PICK and hero in series.pr_mask(series.team_on_side(side)):
        raise RuleViolation("previous-round", f"hero {hero} was picked in a previous round")
    slots = list(state.slots)
    slots[hero] = BANNED if kind == ActionKind.BAN else side
    return replace(state, slots=tuple(slots), cursor=state.cursor + 1)


def replay_round(
    series: SeriesState,
    template: DraftTemplate,
    heroes: Iterable[int],
    hero_count: int = DEFAULT_HERO_COUNT,
) -> DraftState:
    """Replay a round's hero list from scratch, validating every step."""
    state = DraftState.new(template, hero_count)
    for hero in heroes:
        state = apply_action(series, state, hero)
    return state


def advance_round(series: SeriesState, final_state: DraftState, winner: int) -> SeriesState:
    """Record a finished round: tally the winning team, extend carry-over masks.

    Under EITHER_TEAM all ten picks are added to both masks; under SELF_ONLY
    each team's own picks are added to its own mask only.
    """
    if not final_state.is_round_complete:
        raise RuleViolation("round-incomplete", "cannot advance: round draft is not finished")
    if series.is_series_over:
        raise RuleViolation("series-over", "series already has a winner")
    if winner not in (1, 2):
        raise ValueError("winner must be team 1 or 2")
    picks_by_team = {
        1: set(final_state.picks(series.side_of_team(1))),
        2: set(final_state.picks(series.side_of_team(2))),
    }
    if series.policy == GlobalBpPolicy.EITHER_TEAM:
        everything = picks_by_team[1] | picks_by_team[2]
        pr1 = series.pr1 | everything
        pr2 = series.pr2 | everything
    else:
        pr1 = series.pr1 | picks_by_team[1]
        pr2 = series.pr2 | picks_by_team[2]
    return replace(
        series,
        round_index=series.round_index + 1,
        pr1=frozenset(pr1),
        pr2=frozenset(pr2),
        wins1=series.wins1 + (1 if winner == 1 else 0),
        wins2=series.wins2 + (1 if winner == 2 else 0),
    )


def encode_features(state: DraftState) -> np.ndarray:
    """Concatenated pick indicators: first H entries blue, last H red.

    Bans are deliberately absent from the encoding; unpicked slots are 0,
    so partial drafts encode fine.
    """
    h = state.hero_count
    out = np.zeros(2 * h, dtype=np.float64)
    for hero, v in enumerate(state.slots):
        if v == BLUE_SIDE:
            out[hero] = 1.0
        elif v == RED_SIDE:
            out[h + hero] = 1.0
    return out
