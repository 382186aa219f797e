"""JSON readers for state and settings files used by the CLI.

State files take one of these shapes::

    {"n": 4, "kind": "blocks", "partition": [3, 1],
     "blocks": [{"type": "ghz"}, {"type": "basis", "index": 0}]}
    {"n": 2, "kind": "amplitudes", "re": [...], "im": [...]}
    {"kind": "mixture", "components": [{"weight": 0.5, "state": {...}}, ...]}
    {"n": 3, "kind": "ghz"}

Block entries accept ``ghz``, ``basis`` (``index``), ``plus``, ``haar``
(``seed``) and ``amplitudes`` (``re``/``im``).
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidArgument
from .partitions import Partition
from .states import (
    Settings,
    State,
    basis,
    block_product,
    ghz,
    make_pure,
    mix,
    plus,
    random_pure,
)


def _amplitudes(n: int, obj: dict):
    re = obj.get("re")
    if re is None:
        raise InvalidArgument("amplitude state needs 're'")
    im = obj.get("im") or [0.0] * len(re)
    if len(im) != len(re):
        raise InvalidArgument("'re' and 'im' have different lengths")
    return make_pure(n, [complex(a, b) for a, b in zip(re, im)])


def _block(k: int, obj: dict):
    kind = obj.get("type")
    if kind == "ghz":
        return ghz(k) if k >= 2 else basis(1, 0)
    if kind == "basis":
        return basis(k, int(obj.get("index", 0)))
    if kind == "plus":
        if k != 1:
            raise InvalidArgument("'plus' block must be a single qubit")
        return plus()
    if kind == "haar":
        return random_pure(k, obj.get("seed", 0))
    if kind == "amplitudes":
        return _amplitudes(k, obj)
    raise InvalidArgument(f"unknown block type {kind!r}")


def state_from_json(obj: dict) -> State:
    if not isinstance(obj, dict):
        raise InvalidArgument("state spec must be a JSON object")
    kind = obj.get("kind")
    try:
        if kind == "mixture":
            comps = obj["components"]
            return mix([(float(c["weight"]), state_from_json(c["state"])) for c in comps])
        n = int(obj["n"])
        if kind == "amplitudes":
            return _amplitudes(n, obj)
        if kind == "ghz":
            return ghz(n)
        if kind == "blocks":
            p = Partition(tuple(obj["partition"]))
            if p.n != n:
                raise InvalidArgument(f"partition {p} does not sum to n={n}")
            specs = obj["blocks"]
            if len(specs) != len(p.parts):
                raise InvalidArgument("one block spec per partition part is required")
            return block_product(p, [_block(k, b) for k, b in zip(p.parts, specs)])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"malformed state spec: {exc!r}") from exc
    raise InvalidArgument(f"unknown state kind {kind!r}")


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InvalidArgument(f"{path}: {exc.strerror}") from exc


def load_state(path) -> State:
    return state_from_json(_read_json(path))


def load_settings(path) -> Settings:
    return Settings.from_json(_read_json(path))
