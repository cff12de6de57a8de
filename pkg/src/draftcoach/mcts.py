"""UCT search over the remaining ban/pick steps, plus baselines and harnesses.

The recommender treats the series as a two-player zero-sum game and runs
the four classic stages per iteration:

  1. Selection   — descend fully-expanded nodes by the UCT rule
                   argmax_a  Q'(a) + c * sqrt(ln t / N(a)),
                   where Q'(a) is the child mean reward from the acting
                   team's perspective: rewards are stored from OUR team's
                   side everywhere, and when the opponent acts the value is
                   flipped to (ceiling - Q) (negamax-style single scalar).
  2. Expansion   — pop one untried action; candidates per node are the
                   opponent-model top-k over the legal set, which keeps the
                   branching factor far below the hero pool.
  3. Simulation  — a kernel rollout completes the current round (sampling
                   the transition model, uniform where it is blank) and
                   plays out every remaining round under updated carry-over
                   masks, scoring each finished round with the win model.
  4. Backprop    — every node on the path gains the rollout's reward.

Reward is the number of wins our team takes in the remaining rounds
(including the current one): the sum of per-round win probabilities by
default, optionally Bernoulli-sampled per round, or the probability of
winning the series majority computed from the same per-round values.
Search trees stay within the current round; rollouts own the future ones.

Ban steps need no special casing: banning a hero the opponent would win
with emerges from the zero-sum tree itself.

Everything is deterministic given the config seed. One search owns its
tree; shared models are read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum

import numpy as np

from . import kernels, markov
from .markov import TransitionModel
from .rules import (
    ActionKind,
    DraftError,
    DraftState,
    GlobalBpPolicy,
    RuleViolation,
    SeriesState,
    TEMPLATES,
    advance_round,
    apply_action,
    current_actor,
    encode_features,
    legal_actions,
)


class WrongTurnError(DraftError):
    pass


class RolloutPolicy(Enum):
    MARKOV_SAMPLED = "markov_sampled"
    UNIFORM_LEGAL = "uniform_legal"


class RewardMode(IntEnum):
    EXPECTED_WINS = 0
    BERNOULLI_SAMPLED = 1
    SERIES_WIN_PROB = 2


@dataclass(frozen=True)
class MctsConfig:
    c: float = math.sqrt(2.0)
    iterations: int = 10_000
    candidate_breadth: int = 10
    rollout_policy: RolloutPolicy = RolloutPolicy.MARKOV_SAMPLED
    reward_mode: RewardMode = RewardMode.EXPECTED_WINS
    seed: int = 0
    backend: str | None = None  # None = whichever kernel backend is active

    def __post_init__(self):
        if self.c < 0 or self.iterations < 1 or self.candidate_breadth < 1:
            raise ValueError("need c >= 0, iterations >= 1, candidate_breadth >= 1")


@dataclass(eq=False)
class MctsNode:
    state: DraftState
    actor_team: int | None  # None when the round draft is complete
    reward_ceiling: float
    visits: int = 0
    total_reward: float = 0.0
    own_rollouts: int = 0
    untried: list[int] = field(default_factory=list)
    children: dict[int, "MctsNode"] = field(default_factory=dict)
    slots_cache: np.ndarray | None = field(default=None, repr=False)

    def slots_array(self) -> np.ndarray:
        if self.slots_cache is None:
            self.slots_cache = self.state.slots_array()
        return self.slots_cache

    @property
    def q(self) -> float:
        if self.visits == 0:
            raise ValueError("Q undefined before the first visit")
        return self.total_reward / self.visits


def uct_select(node: MctsNode, c: float) -> int:
    """The UCT-maximizing child action; ties break to the lowest hero id."""
    if node.untried or not node.children:
        raise ValueError("uct_select requires a fully expanded node")
    log_t = math.log(node.visits)
    best_hero = -1
    best_score = -math.inf
    for hero in sorted(node.children):
        child = node.children[hero]
        if child.visits < 1:
            raise ValueError("uct_select requires every child visited at least once")
        q = child.total_reward / child.visits
        value = q if node.actor_team == 1 else node.reward_ceiling - q
        score = value + c * math.sqrt(log_t / child.visits)
        if score > best_score:
            best_score = score
            best_hero = hero
    return best_hero


@dataclass(frozen=True)
class Recommendation:
    chosen: int
    ranked: tuple[tuple[int, float, int], ...]  # (hero, child Q, visits)
    iterations: int
    seed: int


class _Search:
    def __init__(
        self,
        series: SeriesState,
        state: DraftState,
        win_model,
        markov_model: TransitionModel | None,
        config: MctsConfig,
    ):
        self.series = series
        self.config = config
        backend = (
            kernels.backend_module(config.backend) if config.backend else None
        )
        self._rollout_fn = backend.rollout_reward if backend else kernels.rollout_reward
        self.markov_model = markov_model
        self.predictor = kernels.predictor_spec(win_model, state.hero_count)
        if config.rollout_policy == RolloutPolicy.MARKOV_SAMPLED and markov_model is not None:
            self.tables = kernels.markov_tables(markov_model)
            self.use_markov = 1
        else:
            self.tables = None
            self.use_markov = 0
        if config.reward_mode == RewardMode.SERIES_WIN_PROB:
            self.ceiling = 1.0
        else:
            self.ceiling = float(series.rounds_remaining)
        self.step_side = state.template.side_codes()
        self.step_kind = state.template.kind_codes()
        h = state.hero_count
        self.pr1_arr = np.zeros(h, dtype=np.uint8)
        self.pr2_arr = np.zeros(h, dtype=np.uint8)
        for hero in series.pr1:
            self.pr1_arr[hero] = 1
        for hero in series.pr2:
            self.pr2_arr[hero] = 1
        self.blue_by_round = np.array(
            [series.blue_schedule[r] for r in range(series.round_index, series.n_rounds)],
            dtype=np.int8,
        )
        self.seeds = kernels.SeedStream(config.seed)
        self.root = self._make_node(state)

    def _make_node(self, state: DraftState) -> MctsNode:
        if state.is_round_complete:
            return MctsNode(state=state, actor_team=None, reward_ceiling=self.ceiling)
        side, _ = current_actor(state)
        team = self.series.team_on_side(side)
        legal = sorted(legal_actions(self.series, state))
        k = self.config.candidate_breadth
        if self.markov_model is not None:
            cands = markov.candidate_ranking(self.markov_model, state, legal, k)
        else:
            cands = legal[:k]
        return MctsNode(
            state=state, actor_team=team, reward_ceiling=self.ceiling, untried=cands
        )

    def rollout(self, state: DraftState, slots_arr: np.ndarray | None = None) -> float:
        return self._rollout_fn(
            state.slots_array() if slots_arr is None else slots_arr,
            state.cursor,
            self.step_side,
            self.step_kind,
            self.pr1_arr,
            self.pr2_arr,
            self.blue_by_round,
            1 if self.series.policy == GlobalBpPolicy.EITHER_TEAM else 0,
            1,  # rewards are always from our team's perspective
            int(self.config.reward_mode),
            self.series.wins1,
            self.series.wins_needed,
            self.use_markov,
            self.tables,
            self.predictor,
            self.seeds.next_seed(),
        )

    def run_iteration(self) -> None:
        node = self.root
        path = [node]
        while node.actor_team is not None and not node.untried and node.children:
            node = node.children[uct_select(node, self.config.c)]
            path.append(node)
        if node.actor_team is not None and node.untried:
            hero = node.untried.pop(0)
            child = self._make_node(apply_action(self.series, node.state, hero))
            node.children[hero] = child
            node = child
            path.append(node)
        node.own_rollouts += 1
        reward = self.rollout(node.state, node.slots_array())
        for n in path:
            n.visits += 1
            n.total_reward += reward

    def run(self) -> None:
        for _ in range(self.config.iterations):
            self.run_iteration()


def _require_turn(series: SeriesState, state: DraftState, team: int) -> None:
    side, _ = current_actor(state)
    actor = series.team_on_side(side)
    if actor != team:
        if team == 1:
            raise WrongTurnError(
                "it is the opponent's turn; use predict_opponent for their step"
            )
        raise WrongTurnError("it is our turn; use recommend for our step")


def recommend(
    series: SeriesState,
    state: DraftState,
    win_model,
    markov_model: TransitionModel | None,
    config: MctsConfig = MctsConfig(),
) -> Recommendation:
    """Run the search and rank root actions by (visits, Q, id)."""
    _require_turn(series, state, team=1)
    search = _Search(series, state, win_model, markov_model, config)
    search.run()
    ranked = sorted(
        (
            (hero, child.total_reward / child.visits, child.visits)
            for hero, child in search.root.children.items()
        ),
        key=lambda t: (-t[2], -t[1], t[0]),
    )
    return Recommendation(
        chosen=ranked[0][0],
        ranked=tuple(ranked),
        iterations=config.iterations,
        seed=config.seed,
    )


def predict_opponent(
    series: SeriesState,
    state: DraftState,
    markov_model: TransitionModel,
    k: int = 3,
) -> list[tuple[int, float]]:
    """Transition-model top-k for the opponent's current step."""
    _require_turn(series, state, team=2)
    legal = legal_actions(series, state)
    return markov.top_k(markov_model, state, legal, k=k)


# ---------------------------------------------------------------------------
# Path building and draft comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathStep:
    index: int  # cursor position in the template
    side: int
    team: int
    action: str  # "ban" | "pick"
    kind: str  # "recommended" | "predicted" | "custom"
    hero: int
    alternatives: tuple[tuple[int, float], ...]  # top-3 (hero, score or prob)


@dataclass(frozen=True)
class DraftPath:
    steps: tuple[PathStep, ...]

    def final_state(self, series: SeriesState, state: DraftState) -> DraftState:
        for step in self.steps:
            state = apply_action(series, state, step.hero)
        return state


def build_path(
    series: SeriesState,
    state: DraftState,
    depth: int,
    win_model,
    markov_model: TransitionModel,
    config: MctsConfig = MctsConfig(),
    overrides: dict[int, int] | None = None,
) -> DraftPath:
    """Alternate recommend/predict for ``depth`` steps from ``state``.

    ``overrides`` maps 0-based path positions to heroes the caller commits
    instead of the model's top entry; downstream steps then continue from
    the overridden state. The model's top-3 alternatives are recorded either
    way.
    """
    remaining = len(state.template.steps) - state.cursor
    if depth < 0 or depth > remaining:
        raise ValueError(f"depth must be in [0, {remaining}]")
    overrides = overrides or {}
    steps: list[PathStep] = []
    cur = state
    for pos in range(depth):
        side, action = current_actor(cur)
        team = series.team_on_side(side)
        if team == 1:
            rec = recommend(series, cur, win_model, markov_model, config)
            alts = tuple((hero, q) for hero, q, _ in rec.ranked[:3])
            hero = rec.chosen
            kind = "recommended"
        else:
            top3 = predict_opponent(series, cur, markov_model)
            alts = tuple(top3)
            hero = top3[0][0]
            kind = "predicted"
        if pos in overrides:
            hero = overrides[pos]
            kind = "custom"
        cur = apply_action(series, cur, hero)
        steps.append(
            PathStep(
                index=cur.cursor - 1,
                side=side,
                team=team,
                action="ban" if action == ActionKind.BAN else "pick",
                kind=kind,
                hero=hero,
                alternatives=alts,
            )
        )
    return DraftPath(steps=tuple(steps))


@dataclass(frozen=True)
class DraftComparison:
    round_win_prob: float
    expected_total_wins: float
    future_expected_wins: float
    flagged: bool  # round win probability under the 50% line


def compare_drafts(
    series: SeriesState,
    drafts: list[DraftState],
    win_model,
    markov_model: TransitionModel | None,
    config: MctsConfig = MctsConfig(),
    samples: int = 200,
) -> list[DraftComparison]:
    """Expected win counts per completed round draft.

    Each draft contributes its round win probability plus the Monte-Carlo
    mean of expected wins over the remaining rounds (``samples`` simulated
    futures). Each draft restarts the same seed stream, so identical drafts
    compare identically.
    """
    out = []
    for state in drafts:
        if not state.is_round_complete:
            raise RuleViolation("round-incomplete", "compare_drafts needs finished drafts")
        search = _Search(
            series, state, win_model, markov_model,
            replace(config, reward_mode=RewardMode.EXPECTED_WINS),
        )
        p_blue = kernels.eval_state(search.predictor, state.slots_array())
        p_our = p_blue if series.side_of_team(1) == 1 else 1.0 - p_blue
        total = 0.0
        for _ in range(samples):
            total += search.rollout(state)
        expected = total / samples
        out.append(
            DraftComparison(
                round_win_prob=p_our,
                expected_total_wins=expected,
                future_expected_wins=expected - p_our,
                flagged=p_our < 0.5,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Baselines and the series experiment harness
# ---------------------------------------------------------------------------

def baseline_random(series: SeriesState, state: DraftState, stream: kernels.SeedStream) -> int:
    """Uniform choice over the legal set."""
    legal = sorted(legal_actions(series, state))
    if not legal:
        raise RuleViolation("terminal", "no legal action available")
    idx = int(stream.next_float() * len(legal))
    return legal[min(idx, len(legal) - 1)]


def baseline_hwr(series: SeriesState, state: DraftState, win_model) -> int:
    """Greedy highest-round-win-rate pick, one step deep.

    Every legal hero is scored by the round win probability of the state
    where the hero is hypothetically added to our picks; on ban steps that
    hypothetical ranks the heroes we would most want, which is also what we
    deny. Ties break to the lowest id.
    """
    legal = sorted(legal_actions(series, state))
    if not legal:
        raise RuleViolation("terminal", "no legal action available")
    our_side = series.side_of_team(1)
    spec = kernels.predictor_spec(win_model, state.hero_count)
    slots = state.slots_array()
    best_hero = -1
    best_p = -math.inf
    for hero in legal:
        slots[hero] = our_side
        p_blue = kernels.eval_state(spec, slots)
        slots[hero] = 0
        p_our = p_blue if our_side == 1 else 1.0 - p_blue
        if p_our > best_p:
            best_p = p_our
            best_hero = hero
    return best_hero


class RandomPolicy:
    name = "rd"

    def __init__(self, **_):
        pass

    def __call__(self, series: SeriesState, state: DraftState, stream) -> int:
        return baseline_random(series, state, stream)


class HwrPolicy:
    name = "hwr"

    def __init__(self, win_model, **_):
        self.win_model = win_model

    def __call__(self, series: SeriesState, state: DraftState, stream) -> int:
        return baseline_hwr(series, state, self.win_model)


class MctsPolicy:
    name = "mcts"

    def __init__(self, win_model, markov_model, config: MctsConfig):
        self.win_model = win_model
        self.markov_model = markov_model
        self.config = config

    def __call__(self, series: SeriesState, state: DraftState, stream) -> int:
        cfg = replace(self.config, seed=stream.next_seed())
        return recommend(series, state, self.win_model, self.markov_model, cfg).chosen


@dataclass(frozen=True)
class ExperimentResult:
    win_rate: float
    ci_half: float  # 1.96 * sqrt(p(1-p)/trials)
    wins: int
    trials: int

    def __str__(self) -> str:
        return f"{self.win_rate:.3f} +/- {self.ci_half:.3f} ({self.wins}/{self.trials})"


def run_series_experiment(
    policy_a,
    policy_b,
    n_rounds: int,
    trials: int,
    seed: int,
    outcome_model,
    template_name: str = "hok",
    hero_count: int | None = None,
    policy: GlobalBpPolicy = GlobalBpPolicy.EITHER_TEAM,
) -> ExperimentResult:
    """Simulate full best-of-N series: A drafts team 1, B drafts team 2.

    Sides alternate per round; each finished round's winner is sampled
    Bernoulli from ``outcome_model``. Policies always see the series from
    their own team's perspective (the view is label-swapped for B).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    template = TEMPLATES[template_name]
    if hero_count is None:
        hero_count = getattr(outcome_model, "n_features", 220) // 2
    stream = kernels.SeedStream(seed)
    wins_a = 0
    for _ in range(trials):
        series = SeriesState.new(n_rounds, policy=policy)
        while not series.is_series_over:
            state = DraftState.new(template, hero_count)
            while not state.is_round_complete:
                side, _ = current_actor(state)
                team = series.team_on_side(side)
                if team == 1:
                    hero = policy_a(series, state, stream)
                else:
                    hero = policy_b(series.swapped(), state, stream)
                state = apply_action(series, state, hero)
            p_blue = outcome_model.predict_proba(encode_features(state))
            winner_side = 1 if stream.next_float() < p_blue else 2
            series = advance_round(series, state, series.team_on_side(winner_side))
        if series.wins1 > series.wins2:
            wins_a += 1
    rate = wins_a / trials
    ci = 1.96 * math.sqrt(rate * (1.0 - rate) / trials)
    return ExperimentResult(win_rate=rate, ci_half=ci, wins=wins_a, trials=trials)
