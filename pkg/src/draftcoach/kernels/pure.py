"""Pure-Python kernel backend.

This module is the reference for the compiled twin: every arithmetic
operation here (accumulation order, sampling by inversion, sigmoid clamps)
is mirrored exactly in ``_fast.pyx`` so the two backends return
bit-identical rewards for the same rollout seed. Keep them in lockstep.
"""

from __future__ import annotations

import logging
import math

import numpy as np

logger = logging.getLogger("draftcoach.kernels")

_MASK64 = (1 << 64) - 1

# reward modes
EXPECTED_WINS = 0
BERNOULLI_SAMPLED = 1
SERIES_WIN_PROB = 2


class _Rng:
    """splitmix64; mirrors the stream in the compiled backend."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_float(self) -> float:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z = z ^ (z >> 31)
        return (z >> 11) * 2.0**-53


def _sigmoid(z: float) -> float:
    if z <= -500.0:
        return 0.0
    if z >= 500.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(-z))


def eval_state(predictor: dict, slots: np.ndarray) -> float:
    """P(blue wins) for a round's slot array under a predictor spec."""
    h = len(slots)
    kind = predictor["type"]
    if kind == "forest":
        feature = predictor["feature"]
        left = predictor["left"]
        right = predictor["right"]
        value = predictor["value"]
        roots = predictor["roots"]
        total = 0.0
        for root in roots:
            node = int(root)
            while feature[node] >= 0:
                f = int(feature[node])
                on = slots[f] == 1 if f < h else slots[f - h] == 2
                node = int(right[node]) if on else int(left[node])
            total += float(value[node])
        return total / len(roots)
    if kind == "linear":
        weights = predictor["weights"]
        z = float(predictor["bias"])
        for i in range(h):
            v = slots[i]
            if v == 1:
                z += float(weights[i])
            elif v == 2:
                z += float(weights[h + i])
        return _sigmoid(z)
    if kind == "oracle":
        beta = predictor["beta"]
        synergy = predictor["synergy"]
        counter = predictor["counter"]
        tau = predictor["tau"]
        blue = [i for i in range(h) if slots[i] == 1]
        red = [i for i in range(h) if slots[i] == 2]
        score_blue = 0.0
        for a in blue:
            score_blue += float(beta[a])
        for i in range(len(blue)):
            for j in range(i + 1, len(blue)):
                score_blue += float(synergy[blue[i], blue[j]])
        for a in blue:
            for b in red:
                score_blue += float(counter[a, b])
        score_red = 0.0
        for a in red:
            score_red += float(beta[a])
        for i in range(len(red)):
            for j in range(i + 1, len(red)):
                score_red += float(synergy[red[i], red[j]])
        for a in red:
            for b in blue:
                score_red += float(counter[a, b])
        return _sigmoid((score_blue - score_red) / tau)
    if kind == "callable":
        features = np.zeros(2 * h, dtype=np.float64)
        for i in range(h):
            if slots[i] == 1:
                features[i] = 1.0
            elif slots[i] == 2:
                features[h + i] = 1.0
        return float(predictor["fn"](features))
    raise ValueError(f"unknown predictor type {kind!r}")


def rollout_reward(
    slots: np.ndarray,
    cursor: int,
    step_side: np.ndarray,
    step_kind: np.ndarray,
    pr1: np.ndarray,
    pr2: np.ndarray,
    blue_team_by_round: np.ndarray,
    policy_either: int,
    our_team: int,
    reward_mode: int,
    wins_our: int,
    wins_needed: int,
    use_markov: int,
    tables: dict | None,
    predictor: dict,
    rng_state: int,
) -> float:
    """Complete the current round and simulate every remaining round.

    Returns the accumulated reward from our team's perspective: sum of
    per-round win probabilities (EXPECTED_WINS), sum of sampled outcomes
    (BERNOULLI_SAMPLED), or the probability of reaching the series majority
    computed from the per-round probabilities (SERIES_WIN_PROB). A round
    that deadlocks (no legal action) contributes 0 and is logged.
    """
    h = len(slots)
    n_steps = len(step_side)
    rounds = len(blue_team_by_round)
    rng = _Rng(rng_state)
    work = np.array(slots, dtype=np.int8)
    my_pr1 = np.array(pr1, dtype=np.uint8)
    my_pr2 = np.array(pr2, dtype=np.uint8)
    ctx = np.zeros(h, dtype=np.float64)
    probs: list[float] = []
    total = 0.0

    if tables is not None:
        alpha = float(tables["alpha"])
        full_tbl = tables["full"]
        own_tbl = tables["own"]
        stage_tbl = tables["stage"]
    else:
        alpha = 0.0
        full_tbl = own_tbl = None
        stage_tbl = None

    for r in range(rounds):
        if r > 0:
            work[:] = 0
            at = 0
        else:
            at = cursor
        blue_team = int(blue_team_by_round[r])
        deadlocked = False
        while at < n_steps:
            side = int(step_side[at])
            is_pick = int(step_kind[at]) == 1
            acting_team = blue_team if side == 1 else 3 - blue_team
            pr = my_pr1 if acting_team == 1 else my_pr2
            legal = []
            for hero in range(h):
                if work[hero] != 0:
                    continue
                if is_pick and pr[hero]:
                    continue
                legal.append(hero)
            if not legal:
                logger.warning("rollout deadlocked at step %d of round %d", at, r)
                deadlocked = True
                break
            chosen = -1
            if use_markov:
                ctx[:] = 0.0
                found = None
                key = (at, work.tobytes())
                found = full_tbl.get(key)
                if found is None:
                    own_picks = np.array(
                        [hero for hero in range(h) if work[hero] == side], dtype=np.int16
                    )
                    found = own_tbl.get((at, own_picks.tobytes()))
                if found is not None:
                    heroes, vals = found
                    for i in range(len(heroes)):
                        ctx[heroes[i]] = vals[i]
                elif stage_tbl is not None and at < stage_tbl.shape[0]:
                    row = stage_tbl[at]
                    for hero in range(h):
                        ctx[hero] = row[hero]
                weight_total = 0.0
                for hero in legal:
                    weight_total += ctx[hero] + alpha
                if weight_total > 0.0:
                    u = rng.next_float() * weight_total
                    cum = 0.0
                    for hero in legal:
                        cum += ctx[hero] + alpha
                        if u < cum:
                            chosen = hero
                            break
                    if chosen < 0:
                        chosen = legal[-1]
            if chosen < 0:  # uniform: no tables, or zero mass on the mask
                idx = int(rng.next_float() * len(legal))
                if idx >= len(legal):
                    idx = len(legal) - 1
                chosen = legal[idx]
            work[chosen] = side if is_pick else -1
            at += 1

        if deadlocked:
            p_our = 0.0
        else:
            p_blue = eval_state(predictor, work)
            p_our = p_blue if blue_team == our_team else 1.0 - p_blue
        probs.append(p_our)
        if reward_mode == EXPECTED_WINS:
            total += p_our
        elif reward_mode == BERNOULLI_SAMPLED:
            if rng.next_float() < p_our:
                total += 1.0

        if r + 1 < rounds:
            # Extend the carry-over masks with this round's picks.
            for hero in range(h):
                v = work[hero]
                if v != 1 and v != 2:
                    continue
                picked_team = blue_team if v == 1 else 3 - blue_team
                if policy_either:
                    my_pr1[hero] = 1
                    my_pr2[hero] = 1
                elif picked_team == 1:
                    my_pr1[hero] = 1
                else:
                    my_pr2[hero] = 1

    if reward_mode == SERIES_WIN_PROB:
        need = wins_needed - wins_our
        if need <= 0:
            return 1.0
        if need > rounds:
            return 0.0
        f = [0.0] * (need + 1)
        f[0] = 1.0
        for p in probs:
            for j in range(need, -1, -1):
                if j == need:
                    f[j] = f[j] + f[j - 1] * p
                elif j == 0:
                    f[j] = f[j] * (1.0 - p)
                else:
                    f[j] = f[j] * (1.0 - p) + f[j - 1] * p
        return f[need]
    return total
