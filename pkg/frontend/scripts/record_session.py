#!/usr/bin/env python3
"""Record a real service session for the frontend round-trip test.

Drives the in-process service API through the documented client flow
(hero registry, session, 4 bans + 2 picks, a depth-6 path, an override at
path position 2, extension to the round end, and two comparison pins) and
writes every request/response pair to tests/fixtures/recorded_session.json.
The frontend test replays the same flow against a fetch mock and asserts
the exact call sequence plus verbatim rendering of the served numbers.

Run from the repository root after installing the Python package:

    python3 frontend/scripts/record_session.py
"""

import json
import sys
from pathlib import Path

from draftcoach import dataio, markov, service
from draftcoach.dataio import SyntheticConfig, generate_synthetic

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "recorded_session.json"

ITERATIONS = 40
SEED = 5
SAMPLES = 16
COMMITS = [10, 22, 7, 31, 3, 15]  # 4 bans + 2 picks on the 18-step template


def main() -> int:
    config = SyntheticConfig.random(hero_count=40, seed=50, n_teams=4)
    data, oracle = generate_synthetic(config, 120)
    transition = markov.fit(
        dataio.markov_corpus(data), data.template_of("hok"), data.hero_count, alpha=0.5
    )
    api = service.Api(data=data, markov_model=transition, win_model=oracle, seed=0)

    entries = []

    def call(method: str, path: str, body=None):
        status, payload = api.handle(method, path, {}, body)
        if status != 200:
            raise SystemExit(f"{method} {path} -> {status}: {payload}")
        entries.append(
            {"method": method, "path": path, "body": body, "status": status,
             "response": payload}
        )
        return payload

    call("GET", "/heroes")
    summary = call(
        "POST", "/session",
        {"template": "hok", "n_rounds": 3, "our_team": "ours", "opp_team": "theirs",
         "first_blue": "ours"},
    )
    sid = summary["session_id"]
    for hero in COMMITS:
        call("POST", f"/session/{sid}/step", {"hero": hero})

    def path_body(depth, overrides=None):
        body = {"session_id": sid, "depth": depth, "iterations": ITERATIONS, "seed": SEED}
        if overrides:
            body["overrides"] = overrides
        return body

    preview = call("POST", "/path", path_body(6))
    # Override path position 2 (absolute template step 8): take the second
    # alternative the service offered there.
    step8 = next(s for s in preview["result"]["steps"] if s["index"] == 8)
    x = step8["alternatives"][1]["hero"]
    call("POST", "/path", path_body(6, {"2": x}))
    extended = call("POST", "/path", path_body(12, {"2": x}))

    plan1 = COMMITS + [s["hero"] for s in extended["result"]["steps"]]
    call("POST", "/compare",
         {"session_id": sid, "drafts": [plan1], "samples": SAMPLES, "seed": SEED})

    step8b = next(s for s in extended["result"]["steps"] if s["index"] == 8)
    y = next(a["hero"] for a in step8b["alternatives"] if a["hero"] != x)
    second = call("POST", "/path", path_body(12, {"2": y}))
    plan2 = COMMITS + [s["hero"] for s in second["result"]["steps"]]
    call("POST", "/compare",
         {"session_id": sid, "drafts": [plan1, plan2], "samples": SAMPLES, "seed": SEED})

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(entries, indent=1), encoding="utf-8")
    print(f"recorded {len(entries)} calls -> {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
