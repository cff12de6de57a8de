# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Twin of ``draftcoach.kernels.pure``: the arithmetic (accumulation order,
inversion sampling, sigmoid clamps, splitmix64 stream) matches the pure
module operation for operation, so both backends return bit-identical
rewards for the same rollout seed. Any change here must land there too.
"""

import logging

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

logger = logging.getLogger("draftcoach.kernels")

DEF MODE_EXPECTED = 0
DEF MODE_BERNOULLI = 1
DEF MODE_SERIES = 2


cdef struct Rng:
    unsigned long long state


cdef inline double rng_next_float(Rng* rng) nogil:
    cdef unsigned long long z
    rng.state = rng.state + <unsigned long long>0x9E3779B97F4A7C15
    z = rng.state
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return <double>(z >> 11) * (2.0 ** -53)


cdef inline double _sigmoid(double z) nogil:
    if z <= -500.0:
        return 0.0
    if z >= 500.0:
        return 1.0
    return 1.0 / (1.0 + exp(-z))


cdef double _eval_forest(
    cnp.int32_t[::1] feature,
    cnp.int32_t[::1] left,
    cnp.int32_t[::1] right,
    double[::1] value,
    cnp.int32_t[::1] roots,
    cnp.int8_t[::1] slots,
    int h,
) nogil:
    cdef double total = 0.0
    cdef Py_ssize_t i
    cdef int node, f
    cdef bint on
    for i in range(roots.shape[0]):
        node = roots[i]
        while feature[node] >= 0:
            f = feature[node]
            if f < h:
                on = slots[f] == 1
            else:
                on = slots[f - h] == 2
            node = right[node] if on else left[node]
        total += value[node]
    return total / roots.shape[0]


cdef double _eval_linear(double[::1] weights, double bias, cnp.int8_t[::1] slots, int h) nogil:
    cdef double z = bias
    cdef int i
    for i in range(h):
        if slots[i] == 1:
            z += weights[i]
        elif slots[i] == 2:
            z += weights[h + i]
    return _sigmoid(z)


cdef double _eval_oracle(
    double[::1] beta,
    double[:, ::1] synergy,
    double[:, ::1] counter,
    double tau,
    cnp.int8_t[::1] slots,
    int h,
    int* blue_buf,
    int* red_buf,
) nogil:
    cdef int n_blue = 0, n_red = 0
    cdef int i, j
    for i in range(h):
        if slots[i] == 1:
            blue_buf[n_blue] = i
            n_blue += 1
        elif slots[i] == 2:
            red_buf[n_red] = i
            n_red += 1
    cdef double score_blue = 0.0
    for i in range(n_blue):
        score_blue += beta[blue_buf[i]]
    for i in range(n_blue):
        for j in range(i + 1, n_blue):
            score_blue += synergy[blue_buf[i], blue_buf[j]]
    for i in range(n_blue):
        for j in range(n_red):
            score_blue += counter[blue_buf[i], red_buf[j]]
    cdef double score_red = 0.0
    for i in range(n_red):
        score_red += beta[red_buf[i]]
    for i in range(n_red):
        for j in range(i + 1, n_red):
            score_red += synergy[red_buf[i], red_buf[j]]
    for i in range(n_red):
        for j in range(n_blue):
            score_red += counter[red_buf[i], blue_buf[j]]
    return _sigmoid((score_blue - score_red) / tau)


cdef double _eval_predictor(dict predictor, cnp.int8_t[::1] slots, object slots_obj):
    cdef int h = slots.shape[0]
    cdef str kind = predictor["type"]
    cdef cnp.ndarray blue_idx
    cdef cnp.ndarray red_idx
    if kind == "forest":
        return _eval_forest(
            predictor["feature"], predictor["left"], predictor["right"],
            predictor["value"], predictor["roots"], slots, h,
        )
    if kind == "linear":
        return _eval_linear(predictor["weights"], predictor["bias"], slots, h)
    if kind == "oracle":
        blue_idx = np.empty(h, dtype=np.int32)
        red_idx = np.empty(h, dtype=np.int32)
        return _eval_oracle(
            predictor["beta"], predictor["synergy"], predictor["counter"],
            predictor["tau"], slots, h,
            <int*> cnp.PyArray_DATA(blue_idx), <int*> cnp.PyArray_DATA(red_idx),
        )
    if kind == "callable":
        features = np.zeros(2 * h, dtype=np.float64)
        for i in range(h):
            if slots[i] == 1:
                features[i] = 1.0
            elif slots[i] == 2:
                features[h + i] = 1.0
        return float(predictor["fn"](features))
    raise ValueError(f"unknown predictor type {kind!r}")


def eval_state(dict predictor, object slots):
    """P(blue wins) for a round's slot array under a predictor spec."""
    arr = np.ascontiguousarray(slots, dtype=np.int8)
    return _eval_predictor(predictor, arr, arr)


def rollout_reward(
    object slots,
    int cursor,
    object step_side,
    object step_kind,
    object pr1,
    object pr2,
    object blue_team_by_round,
    int policy_either,
    int our_team,
    int reward_mode,
    int wins_our,
    int wins_needed,
    int use_markov,
    object tables,
    dict predictor,
    object rng_state,
):
    """Mirror of ``pure.rollout_reward``; see that docstring."""
    cdef cnp.ndarray work_arr = np.array(slots, dtype=np.int8)
    cdef cnp.int8_t[::1] work = work_arr
    cdef cnp.int8_t[::1] side_mv = np.ascontiguousarray(step_side, dtype=np.int8)
    cdef cnp.int8_t[::1] kind_mv = np.ascontiguousarray(step_kind, dtype=np.int8)
    cdef cnp.ndarray pr1_arr = np.array(pr1, dtype=np.uint8)
    cdef cnp.ndarray pr2_arr = np.array(pr2, dtype=np.uint8)
    cdef cnp.uint8_t[::1] my_pr1 = pr1_arr
    cdef cnp.uint8_t[::1] my_pr2 = pr2_arr
    cdef cnp.int8_t[::1] blue_by_round = np.ascontiguousarray(blue_team_by_round, dtype=np.int8)

    cdef int h = work.shape[0]
    cdef int n_steps = side_mv.shape[0]
    cdef int rounds = blue_by_round.shape[0]
    cdef Rng rng
    rng.state = <unsigned long long>(int(rng_state) & 0xFFFFFFFFFFFFFFFF)

    cdef cnp.ndarray ctx_arr = np.zeros(h, dtype=np.float64)
    cdef double[::1] ctx = ctx_arr
    cdef cnp.ndarray legal_arr = np.empty(h, dtype=np.int32)
    cdef cnp.int32_t[::1] legal = legal_arr
    cdef cnp.ndarray own_arr = np.empty(h, dtype=np.int16)
    cdef cnp.int16_t[::1] own_mv = own_arr
    cdef cnp.ndarray probs_arr = np.empty(rounds if rounds > 0 else 1, dtype=np.float64)
    cdef double[::1] probs = probs_arr

    cdef dict full_tbl = None
    cdef dict own_tbl = None
    cdef double[:, ::1] stage_tbl = None
    cdef bint have_stage = False
    cdef double alpha = 0.0
    if tables is not None:
        alpha = float(tables["alpha"])
        full_tbl = tables["full"]
        own_tbl = tables["own"]
        stage_tbl = tables["stage"]
        have_stage = True

    cdef double total = 0.0
    cdef int r, at, blue_team, side, acting_team, hero, chosen, n_legal, idx, i, n_own
    cdef bint is_pick, deadlocked
    cdef double weight_total, u, cum, p_blue, p_our
    cdef object found, key
    cdef cnp.int32_t[::1] ctx_heroes
    cdef double[::1] ctx_vals
    cdef cnp.uint8_t[::1] pr

    for r in range(rounds):
        if r > 0:
            for i in range(h):
                work[i] = 0
            at = 0
        else:
            at = cursor
        blue_team = blue_by_round[r]
        deadlocked = False
        while at < n_steps:
            side = side_mv[at]
            is_pick = kind_mv[at] == 1
            acting_team = blue_team if side == 1 else 3 - blue_team
            pr = my_pr1 if acting_team == 1 else my_pr2
            n_legal = 0
            for hero in range(h):
                if work[hero] != 0:
                    continue
                if is_pick and pr[hero]:
                    continue
                legal[n_legal] = hero
                n_legal += 1
            if n_legal == 0:
                logger.warning("rollout deadlocked at step %d of round %d", at, r)
                deadlocked = True
                break
            chosen = -1
            if use_markov:
                for i in range(h):
                    ctx[i] = 0.0
                key = (at, work_arr.tobytes())
                found = full_tbl.get(key)
                if found is None:
                    n_own = 0
                    for hero in range(h):
                        if work[hero] == side:
                            own_mv[n_own] = <cnp.int16_t>hero
                            n_own += 1
                    found = own_tbl.get((at, own_arr[:n_own].tobytes()))
                if found is not None:
                    ctx_heroes = found[0]
                    ctx_vals = found[1]
                    for i in range(ctx_heroes.shape[0]):
                        ctx[ctx_heroes[i]] = ctx_vals[i]
                elif have_stage and at < stage_tbl.shape[0]:
                    for hero in range(h):
                        ctx[hero] = stage_tbl[at, hero]
                weight_total = 0.0
                for i in range(n_legal):
                    weight_total += ctx[legal[i]] + alpha
                if weight_total > 0.0:
                    u = rng_next_float(&rng) * weight_total
                    cum = 0.0
                    for i in range(n_legal):
                        cum += ctx[legal[i]] + alpha
                        if u < cum:
                            chosen = legal[i]
                            break
                    if chosen < 0:
                        chosen = legal[n_legal - 1]
            if chosen < 0:
                idx = <int>(rng_next_float(&rng) * n_legal)
                if idx >= n_legal:
                    idx = n_legal - 1
                chosen = legal[idx]
            work[chosen] = side if is_pick else -1
            at += 1

        if deadlocked:
            p_our = 0.0
        else:
            p_blue = _eval_predictor(predictor, work, work_arr)
            p_our = p_blue if blue_team == our_team else 1.0 - p_blue
        probs[r] = p_our
        if reward_mode == MODE_EXPECTED:
            total += p_our
        elif reward_mode == MODE_BERNOULLI:
            if rng_next_float(&rng) < p_our:
                total += 1.0

        if r + 1 < rounds:
            for hero in range(h):
                if work[hero] != 1 and work[hero] != 2:
                    continue
                if policy_either:
                    my_pr1[hero] = 1
                    my_pr2[hero] = 1
                elif (blue_team if work[hero] == 1 else 3 - blue_team) == 1:
                    my_pr1[hero] = 1
                else:
                    my_pr2[hero] = 1

    cdef int need, j
    cdef double p
    cdef cnp.ndarray f_arr
    cdef double[::1] f
    if reward_mode == MODE_SERIES:
        need = wins_needed - wins_our
        if need <= 0:
            return 1.0
        if need > rounds:
            return 0.0
        f_arr = np.zeros(need + 1, dtype=np.float64)
        f = f_arr
        f[0] = 1.0
        for r in range(rounds):
            p = probs[r]
            for j in range(need, -1, -1):
                if j == need:
                    f[j] = f[j] + f[j - 1] * p
                elif j == 0:
                    f[j] = f[j] * (1.0 - p)
                else:
                    f[j] = f[j] * (1.0 - p) + f[j - 1] * p
        return f[need]
    return total
