"""HTTP JSON API exposing drafting sessions, models, and analytics.

The route logic lives in ``Api.handle(method, path, query, body)``, a pure
mapping from request to ``(status, payload)`` — the HTTP layer on top is a
thin stdlib ``ThreadingHTTPServer`` wrapper, so everything is unit-testable
in process. Responses are serialized with sorted keys: the same session
state, request, and seed produce byte-identical bodies.

Errors use a structured body: ``{"error": {"code", "rule", "message"}}``.

Sessions hold immutable (series, state) snapshots; commit/undo/advance push
and pop the snapshot stack under a per-session lock, so concurrent requests
on one session serialize while distinct sessions never interact. Models are
loaded once at startup and shared read-only; searches are request-scoped.
MCTS requests run synchronously under a server-side iteration cap, and the
response reports the iteration count actually used.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import asdict, dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import analytics, kernels, mcts
from .dataio import MatchLogFile
from .markov import TransitionModel
from .mcts import MctsConfig, RewardMode, WrongTurnError
from .rules import (
    ActionKind,
    DEFAULT_HERO_COUNT,
    DraftState,
    GlobalBpPolicy,
    RuleViolation,
    SeriesState,
    TEMPLATES,
    advance_round,
    apply_action,
    current_actor,
    legal_actions,
    parse_template,
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, rule: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.rule = rule
        self.message = message

    def payload(self) -> dict:
        return {"error": {"code": self.code, "rule": self.rule, "message": self.message}}


@dataclass
class Session:
    session_id: str
    template_name: str
    our_team: str
    opp_team: str
    snapshots: list[tuple[SeriesState, DraftState]]
    committed: list[dict]
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def series(self) -> SeriesState:
        return self.snapshots[-1][0]

    @property
    def state(self) -> DraftState:
        return self.snapshots[-1][1]


class Api:
    def __init__(
        self,
        data: MatchLogFile | None = None,
        markov_model: TransitionModel | None = None,
        win_model=None,
        seed: int = 0,
        max_iterations: int = 20_000,
        default_iterations: int = 2_000,
    ):
        self.data = data
        self.markov_model = markov_model
        self.win_model = win_model
        self.seed = seed
        self.max_iterations = max_iterations
        self.default_iterations = default_iterations
        self.hero_count = data.hero_count if data else DEFAULT_HERO_COUNT
        self._sessions: dict[str, Session] = {}
        self._store_lock = threading.Lock()
        self._routes = [
            ("GET", re.compile(r"^/health$"), self._health),
            ("GET", re.compile(r"^/heroes$"), self._heroes),
            ("GET", re.compile(r"^/templates$"), self._templates),
            ("GET", re.compile(r"^/patches$"), self._patches),
            ("POST", re.compile(r"^/session$"), self._create_session),
            ("GET", re.compile(r"^/session/(?P<sid>[\w-]+)$"), self._get_session),
            ("POST", re.compile(r"^/session/(?P<sid>[\w-]+)/step$"), self._commit_step),
            ("POST", re.compile(r"^/session/(?P<sid>[\w-]+)/undo$"), self._undo_step),
            ("POST", re.compile(r"^/session/(?P<sid>[\w-]+)/round$"), self._advance_round),
            ("GET", re.compile(r"^/session/(?P<sid>[\w-]+)/legal$"), self._legal),
            ("POST", re.compile(r"^/recommend$"), self._recommend),
            ("POST", re.compile(r"^/predict$"), self._predict),
            ("POST", re.compile(r"^/path$"), self._path),
            ("POST", re.compile(r"^/compare$"), self._compare),
            ("GET", re.compile(r"^/stats/hero$"), self._stats_hero),
            ("GET", re.compile(r"^/stats/player$"), self._stats_player),
            ("GET", re.compile(r"^/stats/team$"), self._stats_team),
            ("GET", re.compile(r"^/relations$"), self._relations),
            ("GET", re.compile(r"^/patch-diff$"), self._patch_diff),
        ]

    # -- plumbing ----------------------------------------------------------

    def handle(self, method: str, path: str, query: dict | None = None, body: dict | None = None):
        query = query or {}
        body = body or {}
        try:
            for want_method, pattern, fn in self._routes:
                m = pattern.match(path)
                if m and method == want_method:
                    payload = fn(query=query, body=body, **m.groupdict())
                    # Every success body carries the seed/config that produced it.
                    payload.setdefault("meta", {"seed": self.seed, "config": {}})
                    return 200, payload
            for _, pattern, _ in self._routes:
                if pattern.match(path):
                    raise ApiError(405, "method_not_allowed", f"wrong method for {path}")
            raise ApiError(404, "not_found", f"no such endpoint: {path}")
        except ApiError as e:
            return e.status, e.payload()
        except RuleViolation as e:
            return 409, ApiError(409, "rule_violation", str(e), rule=e.rule).payload()
        except WrongTurnError as e:
            return 409, ApiError(409, "wrong_turn", str(e)).payload()
        except analytics.AnalyticsError as e:
            return 400, ApiError(400, "bad_request", str(e)).payload()
        except (KeyError, ValueError, TypeError) as e:
            return 400, ApiError(400, "bad_request", f"{type(e).__name__}: {e}").payload()

    def _session(self, sid: str) -> Session:
        with self._store_lock:
            session = self._sessions.get(sid)
        if session is None:
            raise ApiError(404, "not_found", f"no such session: {sid}")
        return session

    def _template(self, name: str):
        if self.data and name in self.data.templates:
            return parse_template(self.data.templates[name], name=name)
        if name in TEMPLATES:
            return TEMPLATES[name]
        raise ApiError(400, "unknown_template", f"unknown template: {name}")

    def _require_models(self):
        if self.win_model is None or self.markov_model is None:
            raise ApiError(409, "models_unavailable", "win/markov models are not loaded")

    def _require_data(self):
        if self.data is None:
            raise ApiError(409, "data_unavailable", "no match log loaded")
        return self.data

    def _mcts_config(self, body: dict) -> tuple[MctsConfig, dict]:
        iterations = min(int(body.get("iterations", self.default_iterations)), self.max_iterations)
        config = MctsConfig(
            c=float(body.get("c", MctsConfig.c)),
            iterations=iterations,
            candidate_breadth=int(body.get("candidate_breadth", MctsConfig.candidate_breadth)),
            reward_mode=RewardMode[body.get("reward_mode", "EXPECTED_WINS")],
            seed=int(body.get("seed", self.seed)),
        )
        meta = {
            "seed": config.seed,
            "config": {
                "c": config.c,
                "iterations": config.iterations,
                "candidate_breadth": config.candidate_breadth,
                "reward_mode": config.reward_mode.name,
                "backend": kernels.BACKEND,
            },
        }
        return config, meta

    # -- misc endpoints ------------------------------------------------------

    def _health(self, query, body):
        return {"status": "ok", "backend": kernels.BACKEND, "sessions": len(self._sessions)}

    def _heroes(self, query, body):
        if self.data:
            heroes = [asdict(h) for h in self.data.heroes]
        else:
            heroes = [{"id": i, "name": f"Hero{i:03d}", "role": "unknown"}
                      for i in range(self.hero_count)]
        return {"heroes": heroes}

    def _templates(self, query, body):
        out = {name: t.text() for name, t in TEMPLATES.items()}
        if self.data:
            out.update(self.data.templates)
        return {"templates": out}

    def _patches(self, query, body):
        return {"patches": list(self._require_data().patches)}

    # -- sessions ------------------------------------------------------------

    def _summary(self, session: Session) -> dict:
        series, state = session.series, session.state
        if state.is_round_complete:
            actor = None
        else:
            side, kind = current_actor(state)
            actor = {
                "side": side,
                "team": series.team_on_side(side),
                "action": "ban" if kind == ActionKind.BAN else "pick",
            }
        return {
            "session_id": session.session_id,
            "template": session.template_name,
            "template_steps": state.template.text(),
            "hero_count": state.hero_count,
            "our_team": session.our_team,
            "opp_team": session.opp_team,
            "n_rounds": series.n_rounds,
            "round_index": series.round_index,
            "blue_team": series.blue_team if not series.is_series_over else None,
            "policy": series.policy.value,
            "wins": {"ours": series.wins1, "theirs": series.wins2},
            "series_over": series.is_series_over,
            "cursor": state.cursor,
            "round_complete": state.is_round_complete,
            "bans": sorted(state.bans()),
            "picks": {"blue": sorted(state.picks(1)), "red": sorted(state.picks(2))},
            "barred": {"ours": sorted(series.pr1), "theirs": sorted(series.pr2)},
            "actor": actor,
            "committed": list(session.committed),
        }

    def _create_session(self, query, body):
        template = self._template(body.get("template", "hok"))
        n_rounds = int(body.get("n_rounds", 3))
        policy = GlobalBpPolicy(body.get("policy", "either_team"))
        first_blue = 1 if body.get("first_blue", "ours") == "ours" else 2
        series = SeriesState.new(n_rounds, policy=policy, first_blue=first_blue)
        state = DraftState.new(template, self.hero_count)
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            template_name=template.name,
            our_team=str(body.get("our_team", "ours")),
            opp_team=str(body.get("opp_team", "theirs")),
            snapshots=[(series, state)],
            committed=[],
        )
        with self._store_lock:
            self._sessions[session.session_id] = session
        return self._summary(session)

    def _get_session(self, query, body, sid):
        return self._summary(self._session(sid))

    def _commit_step(self, query, body, sid):
        session = self._session(sid)
        hero = int(body["hero"])
        with session.lock:
            series, state = session.series, session.state
            side, kind = current_actor(state)
            new_state = apply_action(series, state, hero)
            session.snapshots.append((series, new_state))
            session.committed.append(
                {
                    "type": "step",
                    "side": side,
                    "action": "ban" if kind == ActionKind.BAN else "pick",
                    "hero": hero,
                }
            )
            return self._summary(session)

    def _undo_step(self, query, body, sid):
        session = self._session(sid)
        with session.lock:
            if len(session.snapshots) == 1:
                raise ApiError(409, "nothing_to_undo", "session has no committed steps")
            session.snapshots.pop()
            session.committed.pop()
            return self._summary(session)

    def _advance_round(self, query, body, sid):
        session = self._session(sid)
        winner_side = int(body["winner_side"])
        if winner_side not in (1, 2):
            raise ApiError(400, "bad_request", "winner_side must be 1 or 2")
        with session.lock:
            series, state = session.series, session.state
            winner_team = series.team_on_side(winner_side)
            new_series = advance_round(series, state, winner_team)
            new_state = DraftState.new(state.template, state.hero_count)
            session.snapshots.append((new_series, new_state))
            session.committed.append(
                {"type": "round", "winner_side": winner_side, "winner_team": winner_team}
            )
            return self._summary(session)

    def _legal(self, query, body, sid):
        session = self._session(sid)
        series, state = session.series, session.state
        if state.is_round_complete:
            return {"legal": []}
        return {"legal": sorted(legal_actions(series, state))}

    # -- model endpoints -------------------------------------------------------

    def _recommend(self, query, body):
        self._require_models()
        session = self._session(str(body["session_id"]))
        config, meta = self._mcts_config(body)
        rec = mcts.recommend(session.series, session.state, self.win_model,
                             self.markov_model, config)
        return {
            "result": {
                "chosen": rec.chosen,
                "ranked": [
                    {"hero": h, "score": q, "visits": v} for h, q, v in rec.ranked
                ],
                "iterations_run": rec.iterations,
            },
            "meta": meta,
        }

    def _predict(self, query, body):
        self._require_models()
        session = self._session(str(body["session_id"]))
        k = int(body.get("k", 3))
        top = mcts.predict_opponent(session.series, session.state, self.markov_model, k=k)
        return {
            "result": {"top": [{"hero": h, "probability": p} for h, p in top]},
            "meta": {"seed": self.seed, "config": {"k": k}},
        }

    def _path(self, query, body):
        self._require_models()
        session = self._session(str(body["session_id"]))
        config, meta = self._mcts_config(body)
        series, state = session.series, session.state
        remaining = len(state.template.steps) - state.cursor
        depth = int(body.get("depth", remaining))
        warning = None
        if depth > remaining:
            warning = f"depth {depth} clamped to {remaining} (steps left this round)"
            depth = remaining
        overrides = {int(k): int(v) for k, v in (body.get("overrides") or {}).items()}
        path = mcts.build_path(series, state, depth, self.win_model, self.markov_model,
                               config, overrides=overrides)
        return {
            "result": {
                "steps": [
                    {
                        "index": s.index,
                        "side": s.side,
                        "team": s.team,
                        "action": s.action,
                        "kind": s.kind,
                        "hero": s.hero,
                        "alternatives": [
                            {"hero": h, "score": v} for h, v in s.alternatives
                        ],
                    }
                    for s in path.steps
                ],
                "warning": warning,
            },
            "meta": meta,
        }

    def _compare(self, query, body):
        self._require_models()
        session = self._session(str(body["session_id"]))
        config, meta = self._mcts_config(body)
        samples = int(body.get("samples", 200))
        series, state = session.series, session.state
        drafts = []
        for plan in body["drafts"]:
            cur = DraftState.new(state.template, state.hero_count)
            for hero in plan:
                cur = apply_action(series, cur, int(hero))
            if not cur.is_round_complete:
                raise ApiError(400, "bad_request",
                               f"draft plan has {len(plan)} steps; the round takes "
                               f"{len(state.template.steps)}")
            drafts.append(cur)
        rows = mcts.compare_drafts(series, drafts, self.win_model, self.markov_model,
                                   config, samples=samples)
        meta["config"]["samples"] = samples
        return {
            "result": {
                "rows": [
                    {
                        "round_win_prob": r.round_win_prob,
                        "expected_total_wins": r.expected_total_wins,
                        "future_expected_wins": r.future_expected_wins,
                        "flagged": r.flagged,
                    }
                    for r in rows
                ]
            },
            "meta": meta,
        }

    # -- analytics endpoints -----------------------------------------------------

    @staticmethod
    def _q(query: dict, key: str, default=None):
        value = query.get(key, default)
        if isinstance(value, list):
            return value[0] if value else default
        return value

    def _stats_hero(self, query, body):
        data = self._require_data()
        stats = analytics.hero_stats(
            data.matches,
            date_from=self._q(query, "date_from"),
            date_to=self._q(query, "date_to"),
            patch=self._q(query, "patch"),
            team=self._q(query, "team"),
        )
        hero = self._q(query, "hero")
        if hero is not None:
            entry = stats.get(int(hero))
            return {"stats": [asdict(entry)] if entry else []}
        return {"stats": [asdict(s) for s in stats.values()]}

    def _stats_player(self, query, body):
        data = self._require_data()
        player = self._q(query, "player")
        if player is None:
            raise ApiError(400, "bad_request", "player parameter is required")
        metric = self._q(query, "metric", "kda")
        highlight = self._q(query, "highlight_hero")
        dist = analytics.player_box_stats(
            data.matches, player, metric,
            highlight_hero=int(highlight) if highlight is not None else None,
        )
        return {"distribution": asdict(dist)}

    def _stats_team(self, query, body):
        data = self._require_data()
        team = self._q(query, "team")
        if team is None:
            raise ApiError(400, "bad_request", "team parameter is required")
        heroes = self._q(query, "heroes", "")
        subset = [int(h) for h in heroes.split(",") if h != ""] if heroes else []
        radar = analytics.team_radar(data.matches, team, subset)
        return {"radar": asdict(radar)}

    def _relations(self, query, body):
        data = self._require_data()
        hero = self._q(query, "hero")
        if hero is None:
            raise ApiError(400, "bad_request", "hero parameter is required")
        relation = self._q(query, "relation", "synergy")
        min_support = int(self._q(query, "min_support", 3))
        entries = analytics.relations_top3(data.matches, int(hero), relation, min_support)
        return {"relations": [asdict(e) for e in entries]}

    def _patch_diff(self, query, body):
        data = self._require_data()
        date = self._q(query, "date")
        hero = self._q(query, "hero")
        if date is None or hero is None:
            raise ApiError(400, "bad_request", "date and hero parameters are required")
        diff = analytics.patch_compare(
            data.matches, date, int(hero), team=self._q(query, "team")
        )
        return {"diff": asdict(diff)}


def render(payload: dict) -> bytes:
    """Canonical response bytes: sorted keys, stable separators."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def make_server(api: Api, host: str = "127.0.0.1", port: int = 8100) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        def _respond(self, status: int, payload: dict):
            body = render(payload)
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_GET(self):
            url = urlparse(self.path)
            status, payload = api.handle("GET", url.path, parse_qs(url.query), None)
            self._respond(status, payload)

        def do_POST(self):
            url = urlparse(self.path)
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw or b"{}")
            except json.JSONDecodeError:
                self._respond(400, {"error": {"code": "bad_request", "rule": None,
                                              "message": "body is not valid JSON"}})
                return
            status, payload = api.handle("POST", url.path, parse_qs(url.query), body)
            self._respond(status, payload)

        def log_message(self, fmt, *args):  # quiet by default
            pass

    return ThreadingHTTPServer((host, port), Handler)


def serve(api: Api, host: str = "127.0.0.1", port: int = 8100) -> None:
    server = make_server(api, host, port)
    print(f"draftcoach service on http://{host}:{port} (kernel backend: {kernels.BACKEND})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
