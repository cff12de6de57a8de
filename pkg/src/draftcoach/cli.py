"""Command-line harness: data generation, training, drafting queries, the
series experiment, analytics CSV export, and the HTTP service.

Every flag that names a file has an environment-variable twin
(DRAFTCOACH_DATA, DRAFTCOACH_MARKOV_MODEL, DRAFTCOACH_WIN_MODEL,
DRAFTCOACH_PORT) so the service can be configured without arguments.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from . import analytics, dataio, markov, mcts, service, winmodel
from .dataio import SyntheticConfig, SyntheticOracle, generate_synthetic, load_matches
from .mcts import (
    HwrPolicy,
    MctsConfig,
    MctsPolicy,
    RandomPolicy,
    RewardMode,
    run_series_experiment,
)
from .rules import (
    DraftState,
    GlobalBpPolicy,
    SeriesState,
    TEMPLATES,
    apply_action,
)


def _env(name: str, default=None):
    return os.environ.get(f"DRAFTCOACH_{name}", default)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--data", default=_env("DATA"), help="match-log file")
    p.add_argument("--markov-model", default=_env("MARKOV_MODEL"))
    p.add_argument("--win-model", default=_env("WIN_MODEL"))


def _add_position_flags(p: argparse.ArgumentParser):
    p.add_argument("--template", default="hok")
    p.add_argument("--heroes", type=int, default=None, help="hero pool size")
    p.add_argument("--n-rounds", type=int, default=3)
    p.add_argument("--policy", choices=["either_team", "self_only"], default="either_team")
    p.add_argument("--round-index", type=int, default=0)
    p.add_argument("--first-blue", type=int, choices=[1, 2], default=1,
                   help="team on blue in round 1 (1 = ours)")
    p.add_argument("--steps", default="", help="committed heroes this round, comma-separated")
    p.add_argument("--prev-picks1", default="", help="heroes barred for our team")
    p.add_argument("--prev-picks2", default="", help="heroes barred for the opponent")


def _add_mcts_flags(p: argparse.ArgumentParser):
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--c", type=float, default=MctsConfig.c)
    p.add_argument("--breadth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reward-mode", choices=[m.name for m in RewardMode],
                   default="EXPECTED_WINS")
    p.add_argument("--backend", choices=["pure", "compiled"], default=None)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _load_models(args):
    data = load_matches(args.data) if args.data else None
    mk = markov.load(args.markov_model) if args.markov_model else None
    win = winmodel.load(args.win_model) if args.win_model else None
    return data, mk, win


def _build_position(args, hero_count):
    base = SeriesState.new(
        args.n_rounds, policy=GlobalBpPolicy(args.policy), first_blue=args.first_blue
    )
    r = args.round_index
    if not 0 <= r < args.n_rounds:
        raise SystemExit(f"round index must be in [0, {args.n_rounds})")
    # Fabricate a non-terminal tally consistent with being at round r.
    w1 = min((r + 1) // 2, base.wins_needed - 1)
    series = SeriesState(
        n_rounds=base.n_rounds,
        round_index=r,
        blue_schedule=base.blue_schedule,
        pr1=frozenset(_ints(args.prev_picks1)),
        pr2=frozenset(_ints(args.prev_picks2)),
        wins1=w1,
        wins2=r - w1,
        policy=base.policy,
    )
    template = TEMPLATES[args.template]
    state = DraftState.new(template, hero_count)
    for hero in _ints(args.steps):
        state = apply_action(series, state, hero)
    return series, state


def _mcts_config(args) -> MctsConfig:
    return MctsConfig(
        c=args.c,
        iterations=args.iterations,
        candidate_breadth=args.breadth,
        reward_mode=RewardMode[args.reward_mode],
        seed=args.seed,
        backend=args.backend,
    )


def cmd_synth(args) -> int:
    shift = {}
    for spec in args.patch_shift or []:
        hero, _, delta = spec.partition("=")
        shift[int(hero)] = float(delta)
    config = SyntheticConfig.random(
        hero_count=args.heroes,
        seed=args.seed,
        beta_scale=args.beta_scale,
        synergy_scale=args.synergy_scale,
        counter_scale=args.counter_scale,
        tau=args.tau,
        draft_temp=args.draft_temp,
        n_teams=args.teams,
        n_rounds=args.n_rounds,
        policy=GlobalBpPolicy(args.policy),
        patch_at=args.patch_at,
        patch_beta_shift=shift or None,
    )
    file, _ = generate_synthetic(config, args.matches)
    dataio.save_matches(file, args.out)
    print(f"wrote {len(file.matches)} matches to {args.out}")
    return 0


def cmd_train(args) -> int:
    data = load_matches(args.data)
    corpus = dataio.markov_corpus(data)
    template = data.template_of(data.matches[0].template)
    transition = markov.fit(corpus, template, data.hero_count, alpha=args.alpha)
    if args.out_markov:
        markov.save(transition, args.out_markov)
        print(f"markov model -> {args.out_markov} ({transition.n_sequences} sequences)")
    dataset = dataio.build_dataset(data)
    train, test = winmodel.split(dataset, ratio=args.ratio, seed=args.seed)
    rf = winmodel.train_rf(
        train,
        winmodel.RfParams(
            n_trees=args.trees, max_depth=args.depth, min_leaf=args.min_leaf, seed=args.seed
        ),
    )
    print(f"rf  {winmodel.evaluate(rf, test)}")
    lr = winmodel.train_lr(train, winmodel.LrParams(seed=args.seed))
    print(f"lr  {winmodel.evaluate(lr, test)}")
    choice = rf if args.model == "rf" else lr
    if args.out_win:
        winmodel.save(choice, args.out_win)
        print(f"win model ({args.model}) -> {args.out_win}")
    return 0


def cmd_recommend(args) -> int:
    data, mk, win = _load_models(args)
    hero_count = args.heroes or (data.hero_count if data else 110)
    series, state = _build_position(args, hero_count)
    rec = mcts.recommend(series, state, win, mk, _mcts_config(args))
    names = {h.id: h.name for h in data.heroes} if data else {}
    print(f"chosen: {rec.chosen} {names.get(rec.chosen, '')}")
    for hero, q, visits in rec.ranked[:10]:
        print(f"  hero {hero:>3} {names.get(hero, ''):<12} q={q:.4f} visits={visits}")
    return 0


def cmd_predict(args) -> int:
    data, mk, _ = _load_models(args)
    hero_count = args.heroes or (data.hero_count if data else 110)
    series, state = _build_position(args, hero_count)
    top = mcts.predict_opponent(series, state, mk, k=args.k)
    names = {h.id: h.name for h in data.heroes} if data else {}
    for hero, p in top:
        print(f"hero {hero:>3} {names.get(hero, ''):<12} p={p:.4f}")
    return 0


def cmd_path(args) -> int:
    data, mk, win = _load_models(args)
    hero_count = args.heroes or (data.hero_count if data else 110)
    series, state = _build_position(args, hero_count)
    overrides = {}
    for spec in args.override or []:
        pos, _, hero = spec.partition("=")
        overrides[int(pos)] = int(hero)
    depth = args.depth if args.depth is not None else len(state.template.steps) - state.cursor
    path = mcts.build_path(series, state, depth, win, mk, _mcts_config(args), overrides)
    for step in path.steps:
        alts = ", ".join(f"{h}:{v:.3f}" for h, v in step.alternatives)
        print(
            f"[{step.index:>2}] side {step.side} team {step.team} {step.action:<4} "
            f"hero {step.hero:>3} ({step.kind})  alternatives: {alts}"
        )
    return 0


def cmd_compare(args) -> int:
    data, mk, win = _load_models(args)
    hero_count = args.heroes or (data.hero_count if data else 110)
    series, state = _build_position(args, hero_count)
    drafts = []
    for plan in args.draft:
        cur = DraftState.new(state.template, hero_count)
        for hero in _ints(plan):
            cur = apply_action(series, cur, hero)
        drafts.append(cur)
    rows = mcts.compare_drafts(series, drafts, win, mk, _mcts_config(args), samples=args.samples)
    for i, row in enumerate(rows):
        flag = "  (below 50%)" if row.flagged else ""
        print(
            f"draft {i}: round p={row.round_win_prob:.4f} "
            f"expected wins={row.expected_total_wins:.4f}{flag}"
        )
    return 0


def _experiment_policy(name: str, win, mk, config: MctsConfig):
    if name == "rd":
        return RandomPolicy()
    if name == "hwr":
        return HwrPolicy(win)
    if name == "mcts":
        return MctsPolicy(win, mk, config)
    raise SystemExit(f"unknown policy {name!r}")


def cmd_experiment(args) -> int:
    if args.oracle_seed is not None:
        config = SyntheticConfig.random(
            hero_count=args.heroes or 110,
            seed=args.oracle_seed,
            beta_scale=args.beta_scale,
            synergy_scale=args.synergy_scale,
            counter_scale=args.counter_scale,
            tau=args.tau,
        )
        win = SyntheticOracle(config)
        mk = None
    else:
        _, mk, win = _load_models(args)
    mcts_config = _mcts_config(args)
    policy_a = _experiment_policy(args.a, win, mk, mcts_config)
    policy_b = _experiment_policy(args.b, win, mk, mcts_config)
    result = run_series_experiment(
        policy_a, policy_b, n_rounds=args.n_rounds, trials=args.trials, seed=args.seed,
        outcome_model=win, hero_count=args.heroes or 110,
        policy=GlobalBpPolicy(args.policy),
    )
    print(f"{args.a} vs {args.b} (best-of-{args.n_rounds}, {args.trials} trials)")
    print(f"win rate of {args.a}: {result}")
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(["policy_a", "policy_b", "n_rounds", "trials", "win_rate", "ci_half"])
        writer.writerow([args.a, args.b, args.n_rounds, result.trials,
                         f"{result.win_rate:.6f}", f"{result.ci_half:.6f}"])
    return 0


def cmd_stats(args) -> int:
    data = load_matches(args.data)
    out = csv.writer(open(args.out, "w", newline="") if args.out else sys.stdout)
    if args.kind == "hero":
        stats = analytics.hero_stats(
            data.matches, date_from=args.date_from, date_to=args.date_to,
            patch=args.patch, team=args.team,
        )
        out.writerow(["hero", "picks", "bans", "wins", "matches_total",
                      "picked_rate", "banned_rate", "win_rate",
                      "avg_kills", "avg_deaths", "avg_assists"])
        for s in stats.values():
            out.writerow([s.hero, s.picks, s.bans, s.wins, s.matches_total,
                          s.picked_rate, s.banned_rate, s.win_rate,
                          s.avg_kills, s.avg_deaths, s.avg_assists])
    elif args.kind == "player":
        dist = analytics.player_box_stats(
            data.matches, args.player, args.metric,
            highlight_hero=args.highlight_hero,
        )
        out.writerow(["player", "metric", "min", "q1", "median", "q3", "max",
                      "whisker_low", "whisker_high", "outliers"])
        out.writerow([dist.player, dist.metric, dist.minimum, dist.q1, dist.median,
                      dist.q3, dist.maximum, dist.whisker_low, dist.whisker_high,
                      ";".join(f"{v:.6f}" for v in dist.outliers)])
    elif args.kind == "team":
        radar = analytics.team_radar(data.matches, args.team, _ints(args.hero_subset))
        out.writerow(["team", "subset", "sample", "win_rate", "team_kda",
                      "avg_tyrants", "avg_dragons", "avg_towers", "avg_duration"])
        out.writerow([radar.team, ";".join(map(str, radar.hero_subset)), radar.sample,
                      radar.win_rate, radar.team_kda, radar.avg_tyrants,
                      radar.avg_dragons, radar.avg_towers, radar.avg_duration])
    elif args.kind == "relations":
        entries = analytics.relations_top3(
            data.matches, args.hero, args.relation, args.min_support
        )
        out.writerow(["hero", "other", "relation", "joint_games", "rate"])
        for e in entries:
            out.writerow([e.hero, e.other, e.relation, e.joint_games, e.rate])
    elif args.kind == "patch-diff":
        diff = analytics.patch_compare(data.matches, args.date, args.hero, team=args.team)
        out.writerow(["window", "matches_total", "picks", "bans", "wins",
                      "win_rate", "picked_rate", "banned_rate",
                      "avg_kills", "avg_deaths", "avg_assists"])
        for label, w in (("before", diff.before), ("after", diff.after),
                         ("team_before", diff.team_before), ("team_after", diff.team_after)):
            if w is None:
                continue
            out.writerow([label, w.matches_total, w.picks, w.bans, w.wins, w.win_rate,
                          w.picked_rate, w.banned_rate, w.avg_kills, w.avg_deaths,
                          w.avg_assists])
    return 0


def cmd_serve(args) -> int:
    data, mk, win = _load_models(args)
    api = service.Api(
        data=data, markov_model=mk, win_model=win, seed=args.seed,
        max_iterations=args.max_iterations, default_iterations=args.default_iterations,
    )
    service.serve(api, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="draftcoach",
        description="Draft planning engine for best-of-N ban/pick series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic match log")
    p.add_argument("--out", required=True)
    p.add_argument("--matches", type=int, default=1200)
    p.add_argument("--heroes", type=int, default=110)
    p.add_argument("--teams", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--draft-temp", type=float, default=1.0)
    p.add_argument("--beta-scale", type=float, default=1.0)
    p.add_argument("--synergy-scale", type=float, default=0.25)
    p.add_argument("--counter-scale", type=float, default=0.25)
    p.add_argument("--n-rounds", type=int, default=3)
    p.add_argument("--policy", choices=["either_team", "self_only"], default="either_team")
    p.add_argument("--patch-at", type=float, default=None)
    p.add_argument("--patch-shift", action="append", metavar="HERO=DELTA")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("train", help="fit the transition and win models; print eval report")
    p.add_argument("--data", default=_env("DATA"), required=_env("DATA") is None)
    p.add_argument("--out-markov")
    p.add_argument("--out-win")
    p.add_argument("--model", choices=["rf", "lr"], default="rf")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("recommend", help="search the current step for our team")
    _add_model_flags(p)
    _add_position_flags(p)
    _add_mcts_flags(p)
    p.set_defaults(fn=cmd_recommend)

    p = sub.add_parser("predict", help="top-k opponent prediction for their step")
    _add_model_flags(p)
    _add_position_flags(p)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("path", help="alternating recommend/predict path")
    _add_model_flags(p)
    _add_position_flags(p)
    _add_mcts_flags(p)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--override", action="append", metavar="POS=HERO")
    p.set_defaults(fn=cmd_path)

    p = sub.add_parser("compare", help="expected wins per candidate round draft")
    _add_model_flags(p)
    _add_position_flags(p)
    _add_mcts_flags(p)
    p.add_argument("--draft", action="append", required=True,
                   help="full round sequence, comma-separated hero ids (repeatable)")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("experiment", help="policy-vs-policy series win rates")
    _add_model_flags(p)
    _add_mcts_flags(p)
    p.add_argument("--a", choices=["mcts", "hwr", "rd"], default="mcts")
    p.add_argument("--b", choices=["mcts", "hwr", "rd"], default="rd")
    p.add_argument("--n-rounds", type=int, default=3)
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--heroes", type=int, default=None)
    p.add_argument("--policy", choices=["either_team", "self_only"], default="either_team")
    p.add_argument("--oracle-seed", type=int, default=None,
                   help="use a synthetic oracle instead of a trained model")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--beta-scale", type=float, default=1.0)
    p.add_argument("--synergy-scale", type=float, default=0.25)
    p.add_argument("--counter-scale", type=float, default=0.25)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("stats", help="CSV export of one aggregate")
    p.add_argument("--data", default=_env("DATA"), required=_env("DATA") is None)
    p.add_argument("--kind", choices=["hero", "player", "team", "relations", "patch-diff"],
                   required=True)
    p.add_argument("--out")
    p.add_argument("--date-from")
    p.add_argument("--date-to")
    p.add_argument("--patch")
    p.add_argument("--team")
    p.add_argument("--player")
    p.add_argument("--metric", default="kda", choices=analytics.PLAYER_METRICS)
    p.add_argument("--highlight-hero", type=int, default=None)
    p.add_argument("--hero", type=int, default=None)
    p.add_argument("--hero-subset", default="")
    p.add_argument("--relation", choices=analytics.RELATIONS, default="synergy")
    p.add_argument("--min-support", type=int, default=3)
    p.add_argument("--date")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP JSON API")
    _add_model_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(_env("PORT", "8100")))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=20_000)
    p.add_argument("--default-iterations", type=int, default=2_000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
