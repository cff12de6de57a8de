#!/usr/bin/env python3
"""Benchmark: pure-Python vs compiled rollout kernels.

Times the two backends on identical mid-draft rollout workloads (the MCTS
hot loop) and on single-state predictor evaluation, then prints a table
with the speedup. Run after `python setup.py build_ext --inplace`:

    python3 benchmarks/bench_kernels.py [--rollouts 2000]
"""

import argparse
import time

import numpy as np

from draftcoach import dataio, kernels, markov, winmodel
from draftcoach.dataio import SyntheticConfig, generate_synthetic
from draftcoach.kernels import markov_tables, predictor_spec
from draftcoach.mcts import RewardMode
from draftcoach.rules import DraftState, SeriesState, apply_action, legal_actions

H = 110


def build_world(seed=0):
    config = SyntheticConfig.random(hero_count=H, seed=seed, n_teams=8)
    data, oracle = generate_synthetic(config, 300)
    template = data.template_of("hok")
    transition = markov.fit(dataio.markov_corpus(data), template, H, alpha=0.5)
    dataset = dataio.build_dataset(data)
    rf = winmodel.train_rf(
        dataset, winmodel.RfParams(n_trees=100, max_depth=12, min_leaf=5, seed=0)
    )
    return template, transition, oracle, rf


def mid_draft_state(template, steps=9, seed=1):
    rng = np.random.default_rng(seed)
    series = SeriesState.new(3)
    state = DraftState.new(template, H)
    for _ in range(steps):
        acts = sorted(legal_actions(series, state))
        state = apply_action(series, state, acts[rng.integers(len(acts))])
    return series, state


def time_rollouts(backend, n, state, series, tables, predictor):
    args_static = (
        state.slots_array(),
        state.cursor,
        state.template.side_codes(),
        state.template.kind_codes(),
        np.zeros(H, dtype=np.uint8),
        np.zeros(H, dtype=np.uint8),
        np.array([1, 2, 1], dtype=np.int8),
        1,
        1,
        int(RewardMode.EXPECTED_WINS),
        0,
        2,
        1 if tables is not None else 0,
        tables,
        predictor,
    )
    start = time.perf_counter()
    acc = 0.0
    for i in range(n):
        acc += backend.rollout_reward(*args_static, i)
    elapsed = time.perf_counter() - start
    return elapsed, acc


def time_eval(backend, n, state, predictor):
    slots = state.slots_array()
    start = time.perf_counter()
    acc = 0.0
    for _ in range(n):
        acc += backend.eval_state(predictor, slots)
    return time.perf_counter() - start, acc


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rollouts", type=int, default=2000)
    parser.add_argument("--evals", type=int, default=20000)
    args = parser.parse_args()

    pure = kernels.backend_module("pure")
    try:
        fast = kernels.backend_module("compiled")
    except RuntimeError:
        print("compiled backend not built; run: python3 setup.py build_ext --inplace")
        return 1

    template, transition, oracle, rf = build_world()
    series, state = mid_draft_state(template)
    tables = markov_tables(transition)

    rows = []
    for label, predictor_model, use_tables in (
        ("rollout markov+forest", rf, True),
        ("rollout markov+oracle", oracle, True),
        ("rollout uniform+forest", rf, False),
    ):
        spec = predictor_spec(predictor_model, H)
        tbl = tables if use_tables else None
        t_pure, acc_pure = time_rollouts(pure, args.rollouts, state, series, tbl, spec)
        t_fast, acc_fast = time_rollouts(fast, args.rollouts, state, series, tbl, spec)
        assert acc_pure == acc_fast, "backends disagree"
        rows.append((label, args.rollouts, t_pure, t_fast))
    for label, predictor_model in (("eval forest", rf), ("eval oracle", oracle)):
        spec = predictor_spec(predictor_model, H)
        t_pure, acc_pure = time_eval(pure, args.evals, state, spec)
        t_fast, acc_fast = time_eval(fast, args.evals, state, spec)
        assert acc_pure == acc_fast, "backends disagree"
        rows.append((label, args.evals, t_pure, t_fast))

    print(f"{'workload':<24} {'n':>7} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for label, n, t_pure, t_fast in rows:
        print(
            f"{label:<24} {n:>7} {t_pure:>9.3f}s {t_fast:>9.3f}s "
            f"{t_pure / t_fast:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
