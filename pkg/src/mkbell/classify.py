"""Class verdicts from Bell values: bounds, certified classes and ACC point clouds.

An E-entangled state obeys ``<F_n>^2 + <F_n'>^2 <= 2^(E+1)``; seeing a larger
value therefore rules out every class below. The totally separable states
additionally obey ``max(|<F_n>|, |<F_n'>|) <= 2``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InconsistentValue, InvalidArgument
from .mk import linear_bell_max, mk_pair_product_form, quadratic_bell
from .optimize import OptimizerConfig, maximize, maximize_linear
from .partitions import Partition, enumerate_partitions, stats
from .states import (
    Settings,
    State,
    extremal_state,
    block_product,
    extremal_block,
    random_block_state,
    random_product_state,
    random_pure,
    random_settings,
)

SEPARABLE_LINEAR_BOUND = 2.0
DEFAULT_TOL = 1e-6
MAX_ACC_QUBITS = 10
MAX_RANDOM_SAMPLES = 10**6
MAX_OPTIMIZED_SAMPLES = 10**3


def class_bound(E: int) -> float:
    """Largest quadratic Bell value of an E-entangled state, ``2^(E+1)``."""
    if E < 2:
        raise InvalidArgument(f"entanglement index must be >= 2, got {E}")
    return float(2 ** (E + 1))


def acc_radius(E: int) -> float:
    return class_bound(E) ** 0.5


@dataclass(frozen=True)
class BoundTable:
    n: int
    quadratic: dict[int, float]
    radius: dict[int, float]
    separable_linear: float = SEPARABLE_LINEAR_BOUND

    @classmethod
    def for_n(cls, n: int) -> "BoundTable":
        if n < 2:
            raise InvalidArgument("bound table needs n >= 2")
        es = range(2, n + 1)
        return cls(n, {e: class_bound(e) for e in es}, {e: acc_radius(e) for e in es})

    def radii_json(self) -> dict[str, float]:
        return {str(e): r for e, r in self.radius.items()}


def witness_class(B: float, n: int, tol: float = DEFAULT_TOL) -> int:
    """Smallest E in ``2..n`` whose bound admits the quadratic value ``B``."""
    if n < 2:
        raise InvalidArgument("n must be >= 2")
    if B < -tol:
        raise InvalidArgument(f"quadratic Bell value cannot be negative: {B}")
    for e in range(2, n + 1):
        if B <= class_bound(e) + tol:
            return e
    raise InconsistentValue(
        f"quadratic Bell value {B} exceeds the {n}-qubit ceiling {class_bound(n)}"
    )


@dataclass
class ClassificationReport:
    n: int
    best_quadratic: float
    best_linear: float
    certified_E_at_least: int
    separable_excluded: bool
    settings: Settings
    partitions_excluded: list[Partition]
    linear_settings: Settings | None = None
    optimized: bool = True
    tol: float = DEFAULT_TOL

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "best_quadratic": self.best_quadratic,
            "best_linear": self.best_linear,
            "certified_E_at_least": self.certified_E_at_least,
            "separable_excluded": self.separable_excluded,
            "settings": self.settings.to_json(),
            "linear_settings": None if self.linear_settings is None else self.linear_settings.to_json(),
            "partitions_excluded": [p.to_json() for p in self.partitions_excluded],
            "optimized": self.optimized,
            "tol": self.tol,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClassificationReport":
        lin = obj.get("linear_settings")
        return cls(
            n=int(obj["n"]),
            best_quadratic=float(obj["best_quadratic"]),
            best_linear=float(obj["best_linear"]),
            certified_E_at_least=int(obj["certified_E_at_least"]),
            separable_excluded=bool(obj["separable_excluded"]),
            settings=Settings.from_json(obj["settings"]),
            partitions_excluded=[Partition.from_parts(p) for p in obj["partitions_excluded"]],
            linear_settings=None if lin is None else Settings.from_json(lin),
            optimized=bool(obj.get("optimized", True)),
            tol=float(obj.get("tol", DEFAULT_TOL)),
        )


def _report(n, quad, lin, settings, lin_settings, optimized, tol) -> ClassificationReport:
    e = witness_class(quad, n, tol)
    return ClassificationReport(
        n=n,
        best_quadratic=quad,
        best_linear=lin,
        certified_E_at_least=e,
        separable_excluded=lin > SEPARABLE_LINEAR_BOUND + tol,
        settings=settings,
        partitions_excluded=[p for p in enumerate_partitions(n) if stats(p).E < e],
        linear_settings=lin_settings,
        optimized=optimized,
        tol=tol,
    )


def classify(
    state: State,
    config: OptimizerConfig | None = None,
    tol: float = DEFAULT_TOL,
    settings: Settings | None = None,
) -> ClassificationReport:
    """Certify a lower bound on the entanglement class of ``state``.

    With ``settings`` given, no optimization runs: both Bell values are
    evaluated at those settings only.
    """
    if settings is not None:
        quad = quadratic_bell(state, settings)
        lin = linear_bell_max(state, settings)
        return _report(state.n, quad, lin, settings, settings, False, tol)
    config = config or OptimizerConfig()
    q = maximize(state, config)
    l = maximize_linear(state, config)
    return _report(state.n, q.best_value, l.best_value, q.best_settings, l.best_settings, True, tol)


# ---------------------------------------------------------------- ACC diagram data

TypeSpec = Union[Partition, str]


def parse_type_spec(text: str) -> TypeSpec:
    text = text.strip()
    if text in ("separable", "haar"):
        return text
    return Partition.parse(text)


def _type_label(t: TypeSpec) -> str:
    return t if isinstance(t, str) else ",".join(map(str, t.parts))


@dataclass
class AccPoints:
    n: int
    type: str
    policy: str
    points: np.ndarray  # shape (samples, 2): <F_n>, <F_n'>
    bounds: BoundTable = field(repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["f", "fprime", "type", "policy"])
        for f, fp in self.points:
            w.writerow([f"{f:.17g}", f"{fp:.17g}", self.type, self.policy])
        return buf.getvalue()

    def radii_json(self) -> str:
        return json.dumps(self.bounds.radii_json(), indent=2)


def _sample_state(n: int, t: TypeSpec, rng: np.random.Generator, blocks: str) -> State:
    if t == "haar":
        return random_pure(n, rng)
    if t == "separable":
        return random_product_state(n, rng)
    if blocks == "ghz":
        return block_product(t, [random_pure(1, rng) if k == 1 else extremal_block(k) for k in t.parts])
    return random_block_state(t, rng)


def acc_points(
    n: int,
    type_spec: TypeSpec,
    samples: int,
    seed: int = 0,
    policy: str = "random",
    blocks: str = "haar",
    config: OptimizerConfig | None = None,
) -> AccPoints:
    """Sample ``(<F_n>, <F_n'>)`` pairs for states of one type.

    ``blocks`` picks how partition blocks are filled: ``"haar"`` draws each
    block at random, ``"ghz"`` uses GHZ/Bell blocks (lone qubits stay random).
    """
    if not 2 <= n <= MAX_ACC_QUBITS:
        raise InvalidArgument(f"ACC data supports 2 <= n <= {MAX_ACC_QUBITS}, got {n}")
    if policy not in ("random", "optimized"):
        raise InvalidArgument(f"unknown settings policy {policy!r}")
    if blocks not in ("haar", "ghz"):
        raise InvalidArgument(f"unknown block kind {blocks!r}")
    cap = MAX_RANDOM_SAMPLES if policy == "random" else MAX_OPTIMIZED_SAMPLES
    if not 1 <= samples <= cap:
        raise InvalidArgument(f"samples must be in 1..{cap} for policy {policy!r}")
    if isinstance(type_spec, str) and type_spec not in ("separable", "haar"):
        raise InvalidArgument(f"unknown state type {type_spec!r}")
    if isinstance(type_spec, Partition) and type_spec.n != n:
        raise InvalidArgument(f"partition {type_spec} does not sum to n={n}")
    config = config or OptimizerConfig(seed=seed)

    points = np.empty((samples, 2))
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        state = _sample_state(n, type_spec, rng, blocks)
        if policy == "random":
            s = random_settings(n, rng)
        else:
            s = maximize(state, config).best_settings
        points[i] = mk_pair_product_form(state, s)
    return AccPoints(n, _type_label(type_spec), policy, points, BoundTable.for_n(n))
