"""Hot-loop kernels: draft rollouts and single-row predictor evaluation.

Two interchangeable backends implement the same contract:

* ``draftcoach.kernels._fast`` — Cython extension (built by setup.py)
* ``draftcoach.kernels.pure`` — pure-Python twin, always available

Both consume the same plain-data specs (below) and the same splitmix64
random stream, so given one rollout seed they return bit-identical rewards.
The compiled backend is preferred at import when present; set
DRAFTCOACH_BACKEND=pure to force the fallback. ``benchmarks/bench_kernels.py``
compares the two.

Predictor spec (dict):
    {"type": "forest", "feature", "left", "right", "value", "roots"}
    {"type": "oracle", "beta", "synergy", "counter", "tau"}
    {"type": "linear", "weights", "bias"}
    {"type": "callable", "fn": features -> P(blue wins)}

Markov tables spec (dict):
    {"alpha": float,
     "full":  {(cursor, slots_bytes): (hero_ids int32[], counts f64[])},
     "own":   {(cursor, picks_bytes): (hero_ids int32[], counts f64[])},
     "stage": f64[n_steps, hero_count]}
"""

from __future__ import annotations

import importlib
import os
import weakref

import numpy as np

from .. import dataio, winmodel
from ..markov import TransitionModel

from . import pure

_fast = None
if os.environ.get("DRAFTCOACH_BACKEND", "") != "pure":
    try:
        _fast = importlib.import_module(__name__ + "._fast")
    except ImportError:
        _fast = None

BACKEND = "compiled" if _fast is not None else "pure"
_active = _fast if _fast is not None else pure

rollout_reward = _active.rollout_reward
eval_state = _active.eval_state


def backend_module(name: str):
    """Explicit backend lookup for tests and benchmarks."""
    if name == "pure":
        return pure
    if name == "compiled":
        if _fast is None:
            raise RuntimeError("compiled kernel backend is not built")
        return _fast
    raise ValueError(f"unknown backend {name!r}")


# ---------------------------------------------------------------------------
# splitmix64: the shared deterministic stream
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance the splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


class SeedStream:
    """Deterministic stream of 64-bit rollout seeds derived from one seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_seed(self) -> int:
        self._state, out = splitmix64_next(self._state)
        return out

    def next_float(self) -> float:
        return (self.next_seed() >> 11) * 2.0**-53


# ---------------------------------------------------------------------------
# Spec builders
# ---------------------------------------------------------------------------

def predictor_spec(model, hero_count: int) -> dict:
    """Kernel-consumable view of a win model."""
    if isinstance(model, winmodel.ForestModel):
        if model.n_features != 2 * hero_count:
            raise ValueError("forest feature width does not match the hero pool")
        return {
            "type": "forest",
            "feature": model.feature,
            "left": model.left,
            "right": model.right,
            "value": model.value,
            "roots": model.roots,
        }
    if isinstance(model, winmodel.LogisticModel):
        if model.n_features != 2 * hero_count:
            raise ValueError("logistic feature width does not match the hero pool")
        return {"type": "linear", "weights": model.weights, "bias": float(model.bias)}
    if isinstance(model, dataio.SyntheticOracle):
        cfg = model.config
        if cfg.hero_count != hero_count:
            raise ValueError("oracle hero pool does not match")
        return {
            "type": "oracle",
            "beta": np.ascontiguousarray(cfg.beta, dtype=np.float64),
            "synergy": np.ascontiguousarray(cfg.synergy, dtype=np.float64),
            "counter": np.ascontiguousarray(cfg.counter, dtype=np.float64),
            "tau": float(cfg.tau),
        }
    if hasattr(model, "predict_proba"):
        return {"type": "callable", "fn": model.predict_proba}
    raise TypeError(f"cannot build predictor spec from {type(model).__name__}")


_tables_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def markov_tables(model: TransitionModel | None) -> dict | None:
    """Kernel-consumable view of a transition model (cached per model)."""
    if model is None:
        return None
    cached = _tables_cache.get(model)
    if cached is not None:
        return cached
    full = {}
    for (cursor, slots), counts in model.full.items():
        key = (cursor, np.array(slots, dtype=np.int8).tobytes())
        heroes = np.array(sorted(counts), dtype=np.int32)
        vals = np.array([counts[int(h)] for h in heroes], dtype=np.float64)
        full[key] = (heroes, vals)
    own = {}
    for (cursor, picks), counts in model.own.items():
        key = (cursor, np.array(picks, dtype=np.int16).tobytes())
        heroes = np.array(sorted(counts), dtype=np.int32)
        vals = np.array([counts[int(h)] for h in heroes], dtype=np.float64)
        own[key] = (heroes, vals)
    tables = {
        "alpha": float(model.alpha),
        "full": full,
        "own": own,
        "stage": np.ascontiguousarray(model.stage, dtype=np.float64),
    }
    _tables_cache[model] = tables
    return tables
