"""Multi-start ascent of MK Bell values over measurement settings.

Each measurement direction is a point on the unit sphere given by polar and
azimuthal angles. Fixing the norm at 1 loses nothing: for fixed other
settings the objective is the square (or absolute value) of a linear
function of each direction, hence convex on the unit ball and maximized on
its boundary.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityExceeded, InvalidArgument
from .mk import PRIMED_WEIGHT, PRODUCT_PREFACTOR, UNPRIMED_WEIGHT, product_factors
from .states import PAULI, Settings, State

MAX_OPT_QUBITS = 12
OBJECTIVES = ("quadratic", "linear")


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    step_tol: float = 1e-10
    value_tol: float = 1e-9
    seed: int = 0
    gradient: str = "analytic"  # or "fd" (central differences, step 1e-6)
    workers: int | None = None  # None: read MKBELL_THREADS, default 1
    record_trace: bool = False

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise InvalidArgument("restarts and max_iterations must be positive")
        if self.step_tol <= 0 or self.value_tol <= 0:
            raise InvalidArgument("tolerances must be positive")
        if self.seed < 0:
            raise InvalidArgument("seed must be nonnegative")
        if self.gradient not in ("analytic", "fd"):
            raise InvalidArgument(f"unknown gradient mode {self.gradient!r}")


@dataclass
class OptimizerResult:
    best_value: float
    best_settings: Settings
    restarts_converged: int
    history: list[float]
    best_restart: int = 0
    traces: list[list[float]] | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "value": self.best_value,
            "settings": self.best_settings.to_json(),
            "restarts_converged": self.restarts_converged,
            "best_restart": self.best_restart,
            "history": list(self.history),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OptimizerResult":
        return cls(
            best_value=float(obj["value"]),
            best_settings=Settings.from_json(obj["settings"]),
            restarts_converged=int(obj["restarts_converged"]),
            history=[float(v) for v in obj["history"]],
            best_restart=int(obj.get("best_restart", 0)),
        )


# ---------------------------------------------------------------- parameterization


def angles_to_array(angles: np.ndarray) -> np.ndarray:
    """``(n, 2, 2)`` angles ``(theta, phi)`` -> ``(n, 2, 3)`` unit vectors."""
    angles = np.asarray(angles, dtype=float)
    th, ph = angles[..., 0], angles[..., 1]
    st = np.sin(th)
    return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=-1)


def angles_to_settings(angles) -> Settings:
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 3 or angles.shape[1:] != (2, 2):
        raise InvalidArgument(f"angles must have shape (n, 2, 2), got {angles.shape}")
    return Settings.from_array(angles_to_array(angles))


def _direction_jacobian(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    th, ph = angles[..., 0], angles[..., 1]
    ct, st, cp, sp = np.cos(th), np.sin(th), np.cos(ph), np.sin(ph)
    d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    d_phi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return d_theta, d_phi


# ---------------------------------------------------------------- objective
#
# Everything below works on batches: ``amps`` has shape (B, C, 2^n) holding the
# C pure components of each of B problems (zero-weight padding allowed) and
# ``weights`` has shape (B, C).


def _pack(states: Sequence[State]) -> tuple[np.ndarray, np.ndarray]:
    n = states[0].n
    width = max(len(s.components) for s in states)
    amps = np.zeros((len(states), width, 2**n), dtype=complex)
    weights = np.zeros((len(states), width))
    for b, s in enumerate(states):
        if s.n != n:
            raise InvalidArgument("batched states must share the qubit count")
        for c, (w, psi) in enumerate(s.components):
            amps[b, c] = psi.amplitudes
            weights[b, c] = w
    return amps, weights


def _apply(psi: np.ndarray, ops: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply per-problem 2x2 ``ops`` (B, 2, 2) to ``qubit`` of ``psi`` (B, C, 2^n)."""
    B, C = psi.shape[:2]
    view = psi.reshape(B, C, 2**qubit, 2, 2 ** (n - qubit - 1))
    lo, hi = view[:, :, :, 0], view[:, :, :, 1]
    o = ops[:, None, None, :, :, None]
    # explicit 2x2 combination; batched matmul on tiny matrices is much slower
    out = np.stack([o[..., 0, 0, :] * lo + o[..., 0, 1, :] * hi, o[..., 1, 0, :] * lo + o[..., 1, 1, :] * hi], axis=3)
    return out.reshape(B, C, -1)


def _amplitudes(amps, weights, vecs) -> np.ndarray:
    """Product amplitude ``w`` for each problem, shape (B,)."""
    n = vecs.shape[1]
    zs = product_factors(vecs)
    phi = amps
    for q in range(n):
        phi = _apply(phi, zs[:, q], q, n)
    return np.einsum("bc,bci,bci->b", weights, amps.conj(), phi)


def _amplitudes_and_grad(amps, weights, vecs) -> tuple[np.ndarray, np.ndarray]:
    """``w`` (B,) and ``dw/dvecs`` (B, n, 2, 3)."""
    B, n = vecs.shape[:2]
    zs = product_factors(vecs)
    zs_dag = np.conj(np.swapaxes(zs, -1, -2))
    suffix = [None] * n
    chi = amps
    for q in range(n - 1, -1, -1):
        suffix[q] = chi
        chi = _apply(chi, zs_dag[:, q], q, n)
    reduced = np.empty((B, n, 2, 2), dtype=complex)
    phi = amps
    for q in range(n):
        shape = (B, -1, 2**q, 2, 2 ** (n - q - 1))
        reduced[:, q] = np.einsum(
            "bc,bclar,bclsr->bas", weights, suffix[q].conj().reshape(shape), phi.reshape(shape)
        )
        phi = _apply(phi, zs[:, q], q, n)
    w = np.einsum("bc,bci,bci->b", weights, amps.conj(), phi)
    # dw/dZ_q[a, b] = reduced[q, a, b]; Z_q is linear in the two direction vectors
    per_pauli = np.einsum("bqas,kas->bqk", reduced, PAULI)
    grad = np.stack([UNPRIMED_WEIGHT * per_pauli, PRIMED_WEIGHT * per_pauli], axis=2)
    return w, grad


def _objective_from_amplitudes(w: np.ndarray, objective: str) -> np.ndarray:
    g = PRODUCT_PREFACTOR * w
    if objective == "quadratic":
        return np.abs(g) ** 2
    return np.abs(g.real)


def _batch_value(amps, weights, angles, objective) -> np.ndarray:
    return _objective_from_amplitudes(_amplitudes(amps, weights, angles_to_array(angles)), objective)


def _batch_value_grad(amps, weights, angles, objective):
    w, dw = _amplitudes_and_grad(amps, weights, angles_to_array(angles))
    g = PRODUCT_PREFACTOR * w
    dg = PRODUCT_PREFACTOR * dw
    if objective == "quadratic":
        value = np.abs(g) ** 2
        dvec = 2 * np.real(np.conj(g)[:, None, None, None] * dg)
    else:
        value = np.abs(g.real)
        dvec = np.sign(g.real)[:, None, None, None] * np.real(dg)
    d_theta, d_phi = _direction_jacobian(angles)
    grad = np.stack([np.sum(dvec * d_theta, axis=-1), np.sum(dvec * d_phi, axis=-1)], axis=-1)
    return value, grad


def _check_objective(objective: str) -> None:
    if objective not in OBJECTIVES:
        raise InvalidArgument(f"unknown objective {objective!r}")


def objective_value(state: State, angles, objective: str = "quadratic") -> float:
    """``<F>^2 + <F'>^2`` (or ``|<F>|``) at the given ``(n, 2, 2)`` angles."""
    _check_objective(objective)
    amps, weights = _pack([state])
    return float(_batch_value(amps, weights, np.asarray(angles, dtype=float)[None], objective)[0])


def objective_and_gradient(state: State, angles, objective: str = "quadratic"):
    """Objective and its analytic gradient with respect to the ``(n, 2, 2)`` angles."""
    _check_objective(objective)
    amps, weights = _pack([state])
    value, grad = _batch_value_grad(amps, weights, np.asarray(angles, dtype=float)[None], objective)
    return float(value[0]), grad[0]


def finite_difference_gradient(state: State, angles, objective: str = "quadratic", step: float = 1e-6):
    """Central differences of :func:`objective_value`."""
    angles = np.asarray(angles, dtype=float)
    grad = np.zeros_like(angles)
    for idx in np.ndindex(angles.shape):
        up, down = angles.copy(), angles.copy()
        up[idx] += step
        down[idx] -= step
        grad[idx] = (objective_value(state, up, objective) - objective_value(state, down, objective)) / (2 * step)
    return grad


# ---------------------------------------------------------------- ascent


def _fd_value_grad(amps, weights, angles, objective, step=1e-6):
    value = _batch_value(amps, weights, angles, objective)
    grad = np.zeros_like(angles)
    for idx in np.ndindex(angles.shape[1:]):
        up, down = angles.copy(), angles.copy()
        up[(slice(None),) + idx] += step
        down[(slice(None),) + idx] -= step
        grad[(slice(None),) + idx] = (
            _batch_value(amps, weights, up, objective) - _batch_value(amps, weights, down, objective)
        ) / (2 * step)
    return value, grad


def _ascend(amps, weights, start, objective: str, config: OptimizerConfig):
    """Quasi-Newton (BFGS) ascent with Armijo backtracking, for B problems at once.

    Returns ``(angles, values, converged, traces)``. Each trace holds the value
    after every accepted step of one problem and is non-decreasing.
    """
    value_grad = _fd_value_grad if config.gradient == "fd" else _batch_value_grad
    B, shape = start.shape[0], start.shape[1:]
    P = int(np.prod(shape))
    x = start.reshape(B, P).copy()
    value, grad = value_grad(amps, weights, x.reshape((B,) + shape), objective)
    grad = grad.reshape(B, P)
    inv_hess = np.tile(np.eye(P), (B, 1, 1))
    traces = [[float(v)] for v in value]
    converged = np.zeros(B, dtype=bool)
    active = np.ones(B, dtype=bool)

    for _ in range(config.max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        g = grad[idx]
        direction = np.einsum("bij,bj->bi", inv_hess[idx], g)
        slope = np.sum(g * direction, axis=1)
        reset = slope <= 0
        if reset.any():
            inv_hess[idx[reset]] = np.eye(P)
            direction[reset] = g[reset]
            slope[reset] = np.sum(g[reset] ** 2, axis=1)
        flat = slope == 0.0
        if flat.any():
            converged[idx[flat]] = True
            active[idx[flat]] = False
            keep = ~flat
            idx, g, direction, slope = idx[keep], g[keep], direction[keep], slope[keep]
            if idx.size == 0:
                continue

        dnorm = np.linalg.norm(direction, axis=1)
        step = np.ones(idx.size)
        trial = x[idx] + direction
        trial_value = _batch_value(amps[idx], weights[idx], trial.reshape((-1,) + shape), objective)
        while True:
            tiny = step * dnorm < config.step_tol
            failing = (trial_value < value[idx] + 1e-4 * step * slope) & ~tiny
            if not failing.any():
                break
            step[failing] *= 0.5
            sub = np.flatnonzero(failing)
            trial[sub] = x[idx[sub]] + step[sub, None] * direction[sub]
            trial_value[sub] = _batch_value(
                amps[idx[sub]], weights[idx[sub]], trial[sub].reshape((-1,) + shape), objective
            )

        stop = (trial_value < value[idx]) | (step * dnorm < config.step_tol)
        if stop.any():
            converged[idx[stop]] = True
            active[idx[stop]] = False
        go = ~stop
        idx, trial = idx[go], trial[go]
        if idx.size == 0:
            continue

        new_value, new_grad = value_grad(amps[idx], weights[idx], trial.reshape((-1,) + shape), objective)
        new_grad = new_grad.reshape(idx.size, P)
        s = trial - x[idx]
        y = grad[idx] - new_grad
        sy = np.sum(s * y, axis=1)
        upd = sy > 1e-14
        if upd.any():
            h = inv_hess[idx[upd]]
            su, yu, rho = s[upd], y[upd], 1.0 / sy[upd]
            hy = np.einsum("bij,bj->bi", h, yu)
            coef = rho * rho * np.sum(yu * hy, axis=1) + rho
            h += coef[:, None, None] * su[:, :, None] * su[:, None, :]
            h -= rho[:, None, None] * (hy[:, :, None] * su[:, None, :] + su[:, :, None] * hy[:, None, :])
            inv_hess[idx[upd]] = h
        x[idx], value[idx], grad[idx] = trial, new_value, new_grad
        for b, v in zip(idx, new_value):
            t = traces[b]
            t.append(float(v))
            if len(t) > 5 and t[-1] - t[-6] < config.value_tol:
                converged[b] = True
                active[b] = False
    return x.reshape((B,) + shape), value, converged, traces


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([seed, restart])


def _random_angles(n: int, rng: np.random.Generator) -> np.ndarray:
    angles = np.empty((n, 2, 2))
    angles[..., 0] = rng.uniform(0, np.pi, size=(n, 2))
    angles[..., 1] = rng.uniform(0, 2 * np.pi, size=(n, 2))
    return angles


def _worker_count(config: OptimizerConfig) -> int:
    if config.workers is not None:
        return max(1, config.workers)
    try:
        return max(1, int(os.environ.get("MKBELL_THREADS", "1")))
    except ValueError:
        return 1


def _check_state(state: State) -> None:
    if state.n > MAX_OPT_QUBITS:
        raise CapacityExceeded(f"optimizer limited to {MAX_OPT_QUBITS} qubits, got {state.n}")
    if state.n < 2:
        raise InvalidArgument("MK Bell values need at least 2 qubits")


def maximize_many(states: Sequence[State], config: OptimizerConfig | None = None, objective: str = "quadratic") -> list[OptimizerResult]:
    """Run :func:`maximize` (or the linear variant) on many same-size states in one batch.

    Each result equals what a separate call would give for that state.
    """
    config = config or OptimizerConfig()
    _check_objective(objective)
    if not states:
        return []
    for s in states:
        _check_state(s)
    widths = [len(s.components) for s in states]
    if len(set(widths)) > 1:
        # optimize each component count separately so pure states skip the padding
        results = [None] * len(states)
        for w in sorted(set(widths)):
            idx = [i for i, k in enumerate(widths) if k == w]
            for i, r in zip(idx, maximize_many([states[i] for i in idx], config, objective)):
                results[i] = r
        return results
    n, R = states[0].n, config.restarts
    amps, weights = _pack(states)
    starts = np.stack([_random_angles(n, _restart_rng(config.seed, r)) for r in range(R)])
    # problem index = state * R + restart
    amps = np.repeat(amps, R, axis=0)
    weights = np.repeat(weights, R, axis=0)
    starts = np.tile(starts, (len(states), 1, 1, 1))

    workers = min(_worker_count(config), len(starts))
    chunks = np.array_split(np.arange(len(starts)), workers)

    def run(chunk):
        return _ascend(amps[chunk], weights[chunk], starts[chunk], objective, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(chunks[0])]
    angles = np.concatenate([p[0] for p in parts])
    values = np.concatenate([p[1] for p in parts])
    conv = np.concatenate([p[2] for p in parts])
    traces = [t for p in parts for t in p[3]]

    results = []
    for i in range(len(states)):
        sl = slice(i * R, (i + 1) * R)
        history = [float(v) for v in values[sl]]
        best = int(np.argmax(history))  # first index on ties
        results.append(
            OptimizerResult(
                best_value=history[best],
                best_settings=angles_to_settings(angles[sl][best]),
                restarts_converged=int(conv[sl].sum()),
                history=history,
                best_restart=best,
                traces=traces[sl] if config.record_trace else None,
            )
        )
    return results


def maximize(state: State, config: OptimizerConfig | None = None) -> OptimizerResult:
    """Maximize ``<F_n>^2 + <F_n'>^2`` over unit measurement directions."""
    return maximize_many([state], config, "quadratic")[0]


def maximize_linear(state: State, config: OptimizerConfig | None = None) -> OptimizerResult:
    """Maximize ``|<F_n>|`` over unit measurement directions."""
    return maximize_many([state], config, "linear")[0]
