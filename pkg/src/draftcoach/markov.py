"""Opponent ban/pick prediction from historical draft sequences.

The estimator is a transition count table: for a draft context ``s`` met
during fitting, count how often each hero was the next action, and predict
with the count ratio. A context keyed on the full slot array is far too
sparse for a real corpus (thousands of rounds over a 110-hero pool), so
counts are kept at three granularities and prediction falls back from the
most specific context with data:

    FULL_STATE       cursor + the entire slot array
    STAGE_OWN_PICKS  cursor + the acting side's own picks so far
    STAGE_ONLY       cursor alone

Probabilities are Laplace-smoothed over the *legal* hero mask only, so
masked heroes get exactly 0 and rows renormalize over what is selectable:

    p(h) = (count(h) + alpha) / (sum_{m in mask} count(m) + alpha * |mask|)

With alpha = 0 this is the plain count ratio. A context with no mass on
the mask degrades to uniform over the mask (an unseen context carries no
information). A fitted model is immutable and safe to share across
concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .rules import DraftState, DraftTemplate, SeriesState, apply_action, parse_template

FORMAT_KIND = "draftcoach-transition-model"
FORMAT_VERSION = 1

_SLOT_CHARS = {0: ".", -1: "x", 1: "1", 2: "2"}
_CHAR_SLOTS = {v: k for k, v in _SLOT_CHARS.items()}


class ContextLevel(Enum):
    FULL_STATE = "full_state"
    STAGE_OWN_PICKS = "stage_own_picks"
    STAGE_ONLY = "stage_only"


FALLBACK_ORDER = (
    ContextLevel.FULL_STATE,
    ContextLevel.STAGE_OWN_PICKS,
    ContextLevel.STAGE_ONLY,
)


class CorpusError(Exception):
    """Invalid training corpus."""


def full_state_key(state: DraftState) -> tuple[int, tuple[int, ...]]:
    return (state.cursor, state.slots)


def stage_own_key(state: DraftState) -> tuple[int, tuple[int, ...]]:
    side = state.template.steps[state.cursor].side
    return (state.cursor, state.picks(side))


@dataclass(frozen=True, eq=False)
class TransitionModel:
    """Immutable fitted transition counts with hierarchical fallback."""

    template: DraftTemplate
    hero_count: int
    alpha: float
    n_sequences: int
    full: dict[tuple[int, tuple[int, ...]], dict[int, float]] = field(repr=False)
    own: dict[tuple[int, tuple[int, ...]], dict[int, float]] = field(repr=False)
    stage: np.ndarray = field(repr=False)  # (n_steps, hero_count) counts

    def context_counts(self, level: ContextLevel, state: DraftState) -> dict[int, float]:
        """Raw next-hero counts for the state's context at one level."""
        if level == ContextLevel.FULL_STATE:
            return dict(self.full.get(full_state_key(state), {}))
        if level == ContextLevel.STAGE_OWN_PICKS:
            return dict(self.own.get(stage_own_key(state), {}))
        row = self.stage[state.cursor]
        return {h: float(c) for h, c in enumerate(row) if c > 0}


def fit(
    corpus: Sequence[Sequence[int]],
    template: DraftTemplate,
    hero_count: int,
    alpha: float = 0.5,
) -> TransitionModel:
    """Count transitions in a corpus of complete single-round sequences.

    Every sequence is replayed through the rules engine, so an illegal
    sequence (duplicate hero, wrong length) raises. Counting is oblivious
    to series context: carry-over masks apply at prediction time, not here.
    """
    if not corpus:
        raise CorpusError("corpus is empty")
    if alpha < 0:
        raise CorpusError("alpha must be >= 0")
    n_steps = len(template.steps)
    full: dict[tuple[int, tuple[int, ...]], dict[int, float]] = {}
    own: dict[tuple[int, tuple[int, ...]], dict[int, float]] = {}
    stage = np.zeros((n_steps, hero_count), dtype=np.float64)
    # Replay against a mask-free series so only intra-round rules apply.
    neutral = SeriesState.new(1)
    for i, seq in enumerate(corpus):
        if len(seq) != n_steps:
            raise CorpusError(
                f"sequence {i} has {len(seq)} steps, template {template.name!r} needs {n_steps}"
            )
        state = DraftState.new(template, hero_count)
        for hero in seq:
            fcnt = full.setdefault(full_state_key(state), {})
            fcnt[hero] = fcnt.get(hero, 0.0) + 1.0
            ocnt = own.setdefault(stage_own_key(state), {})
            ocnt[hero] = ocnt.get(hero, 0.0) + 1.0
            stage[state.cursor, hero] += 1.0
            state = apply_action(neutral, state, hero)
    return TransitionModel(
        template=template,
        hero_count=hero_count,
        alpha=alpha,
        n_sequences=len(corpus),
        full=full,
        own=own,
        stage=stage,
    )


def _select_counts(model: TransitionModel, state: DraftState) -> dict[int, float]:
    """Counts from the deepest fallback level whose raw total is positive."""
    counts = model.full.get(full_state_key(state))
    if counts:
        return counts
    counts = model.own.get(stage_own_key(state))
    if counts:
        return counts
    if state.cursor < model.stage.shape[0]:
        row = model.stage[state.cursor]
        if row.sum() > 0:
            return {h: float(row[h]) for h in np.nonzero(row)[0]}
    return {}


def predict_distribution(
    model: TransitionModel, state: DraftState, mask: Iterable[int]
) -> np.ndarray:
    """Next-action probabilities over the hero pool, zero outside ``mask``."""
    mask = sorted(set(int(h) for h in mask))
    if not mask:
        raise ValueError("mask is empty: no legal action to predict")
    if any(h < 0 or h >= model.hero_count for h in mask):
        raise ValueError("mask contains hero ids outside the pool")
    counts = _select_counts(model, state)
    out = np.zeros(model.hero_count, dtype=np.float64)
    weights = np.array([counts.get(h, 0.0) + model.alpha for h in mask], dtype=np.float64)
    total = weights.sum()
    if total <= 0.0:
        # No signal on the mask at any level: uniform is the only symmetric choice.
        out[mask] = 1.0 / len(mask)
        return out
    out[mask] = weights / total
    return out


def top_k(
    model: TransitionModel, state: DraftState, mask: Iterable[int], k: int = 3
) -> list[tuple[int, float]]:
    """The k most probable next actions, ties broken by ascending hero id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = predict_distribution(model, state, mask)
    ranked = sorted(
        ((int(h), float(dist[h])) for h in np.nonzero(dist)[0]), key=lambda t: (-t[1], t[0])
    )
    return ranked[:k]


def candidate_ranking(
    model: TransitionModel, state: DraftState, mask: Iterable[int], k: int
) -> list[int]:
    """Up to k legal heroes the model has actually seen continue this
    context, for search expansion.

    Unlike ``top_k`` this never pads from the smoothing floor (which would
    rank by hero id, polluting candidate lists at sparse contexts): heroes
    are taken by raw count at the most specific level first, then filled
    from shallower levels, and only as a last resort from the remaining
    legal set in id order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    mask = sorted(set(int(h) for h in mask))
    mask_set = set(mask)
    out: list[int] = []
    seen: set[int] = set()

    def drain(pairs) -> bool:
        for h, _ in sorted(pairs, key=lambda t: (-t[1], t[0])):
            out.append(int(h))
            seen.add(int(h))
            if len(out) == k:
                return True
        return False

    full = model.full.get(full_state_key(state))
    if full and drain((h, c) for h, c in full.items() if h in mask_set):
        return out
    own = model.own.get(stage_own_key(state))
    if own and drain((h, c) for h, c in own.items() if h in mask_set and h not in seen):
        return out
    if state.cursor < model.stage.shape[0]:
        row = model.stage[state.cursor]
        idx = np.array(mask, dtype=np.intp)
        vals = row[idx]
        live = vals > 0
        if live.any() and drain(
            (h, c) for h, c in zip(idx[live].tolist(), vals[live].tolist()) if h not in seen
        ):
            return out
    for h in mask:
        if h not in seen:
            out.append(h)
            if len(out) == k:
                break
    return out


def save(model: TransitionModel, path: str | Path) -> None:
    """Persist as a versioned JSON document (format documented in the README)."""

    def slots_str(slots: tuple[int, ...]) -> str:
        return "".join(_SLOT_CHARS[v] for v in slots)

    doc = {
        "kind": FORMAT_KIND,
        "version": FORMAT_VERSION,
        "template": {"name": model.template.name, "steps": model.template.text()},
        "hero_count": model.hero_count,
        "alpha": model.alpha,
        "n_sequences": model.n_sequences,
        "full": [
            {"cursor": c, "slots": slots_str(slots), "counts": {str(h): v for h, v in cnt.items()}}
            for (c, slots), cnt in model.full.items()
        ],
        "own": [
            {"cursor": c, "picks": list(picks), "counts": {str(h): v for h, v in cnt.items()}}
            for (c, picks), cnt in model.own.items()
        ],
        "stage": model.stage.tolist(),
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load(path: str | Path) -> TransitionModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("kind") != FORMAT_KIND:
        raise ValueError(f"{path}: not a transition model file")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')!r}")
    template = parse_template(doc["template"]["steps"], name=doc["template"]["name"])
    full = {
        (e["cursor"], tuple(_CHAR_SLOTS[ch] for ch in e["slots"])): {
            int(h): float(v) for h, v in e["counts"].items()
        }
        for e in doc["full"]
    }
    own = {
        (e["cursor"], tuple(e["picks"])): {int(h): float(v) for h, v in e["counts"].items()}
        for e in doc["own"]
    }
    return TransitionModel(
        template=template,
        hero_count=doc["hero_count"],
        alpha=doc["alpha"],
        n_sequences=doc["n_sequences"],
        full=full,
        own=own,
        stage=np.array(doc["stage"], dtype=np.float64),
    )
