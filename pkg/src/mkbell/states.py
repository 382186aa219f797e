"""Dense statevectors, block products, mixtures and Pauli-direction expectations.

Convention: qubit 0 is the most significant bit of the basis index, so the
amplitude array reshaped to ``(2,) * n`` has qubit ``i`` on axis ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CapacityExceeded, DegenerateState, InvalidArgument
from .partitions import Partition

MAX_QUBITS = 14
NORM_TOL = 1e-12

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _check_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityExceeded(f"{n} qubits exceeds the statevector cap of {MAX_QUBITS}")


@dataclass(frozen=True, eq=False)
class PureState:
    n: int
    amplitudes: np.ndarray
    # tensor factors when built by block_product, else None
    blocks: tuple["PureState", ...] | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n,):
            raise InvalidArgument(f"expected {2**self.n} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    @property
    def components(self) -> list[tuple[float, "PureState"]]:
        return [(1.0, self)]


@dataclass(frozen=True, eq=False)
class MixedState:
    n: int
    components: tuple[tuple[float, PureState], ...]


State = Union[PureState, MixedState]


@dataclass(frozen=True)
class Direction:
    """Real 3-vector ``v`` standing for the observable ``v . sigma``."""

    v: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise InvalidArgument(f"direction must be a finite 3-vector, got {self.v!r}")
        if np.linalg.norm(v) > 1 + 1e-12:
            raise InvalidArgument(f"direction norm exceeds 1: {np.linalg.norm(v)}")
        object.__setattr__(self, "v", tuple(float(x) for x in v))

    @classmethod
    def in_plane(cls, alpha: float) -> "Direction":
        """Unit vector ``(cos a, sin a, 0)`` in the x-y plane."""
        return cls((np.cos(alpha), np.sin(alpha), 0.0))

    @property
    def matrix(self) -> np.ndarray:
        return np.tensordot(np.asarray(self.v), PAULI, axes=1)


X = Direction((1.0, 0.0, 0.0))
Y = Direction((0.0, 1.0, 0.0))
Z = Direction((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class Settings:
    """Per-qubit (unprimed, primed) measurement directions."""

    pairs: tuple[tuple[Direction, Direction], ...]

    def __post_init__(self):
        pairs = tuple((_as_direction(a), _as_direction(b)) for a, b in self.pairs)
        if not pairs:
            raise InvalidArgument("settings need at least one qubit")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_array(cls, arr) -> "Settings":
        """From an array of shape ``(n, 2, 3)``: ``arr[i, 0]`` unprimed, ``arr[i, 1]`` primed."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 3 or arr.shape[1:] != (2, 3):
            raise InvalidArgument(f"settings array must have shape (n, 2, 3), got {arr.shape}")
        return cls(tuple((Direction(tuple(a)), Direction(tuple(b))) for a, b in arr))

    @classmethod
    def in_plane(cls, alphas, alphas_primed) -> "Settings":
        return cls(
            tuple(
                (Direction.in_plane(a), Direction.in_plane(b))
                for a, b in zip(alphas, alphas_primed, strict=True)
            )
        )

    def as_array(self) -> np.ndarray:
        return np.array([[a.v, b.v] for a, b in self.pairs], dtype=float)

    def swapped(self) -> "Settings":
        """Exchange primed and unprimed directions on every qubit."""
        return Settings(tuple((b, a) for a, b in self.pairs))

    def to_json(self) -> dict:
        return {"qubits": [{"a": list(a.v), "ap": list(b.v)} for a, b in self.pairs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Settings":
        try:
            return cls(tuple((Direction(tuple(q["a"])), Direction(tuple(q["ap"]))) for q in obj["qubits"]))
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed settings JSON: {exc}") from exc


def _as_direction(d) -> Direction:
    return d if isinstance(d, Direction) else Direction(tuple(d))


# ---------------------------------------------------------------- constructors


def make_pure(n: int, amplitudes) -> PureState:
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    _check_capacity(n)
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    if amps.shape != (2**n,):
        raise InvalidArgument(f"expected {2**n} amplitudes for {n} qubits, got {amps.size}")
    norm = np.linalg.norm(amps)
    if norm == 0 or not np.isfinite(norm):
        raise DegenerateState("amplitude vector has zero (or non-finite) norm")
    return PureState(n, amps / norm)


def basis(n: int, index: int) -> PureState:
    if not 0 <= index < 2**n:
        raise InvalidArgument(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1
    return make_pure(n, amps)


def plus() -> PureState:
    return make_pure(1, [1, 1])


def ghz(k: int) -> PureState:
    if k < 2:
        raise InvalidArgument("GHZ state needs k >= 2")
    _check_capacity(k)
    amps = np.zeros(2**k, dtype=complex)
    amps[0] = amps[-1] = 1
    return make_pure(k, amps)


def bell_phi_plus() -> PureState:
    return ghz(2)


def tensor(states: Sequence[PureState]) -> PureState:
    if not states:
        raise InvalidArgument("tensor product of an empty list")
    n = sum(s.n for s in states)
    _check_capacity(n)
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
    return make_pure(n, amps)


def block_product(p: Partition, blocks: Sequence[PureState]) -> PureState:
    """Tensor the blocks in partition order and remember the factorization."""
    if len(blocks) != len(p.parts) or any(b.n != k for b, k in zip(blocks, p.parts)):
        raise InvalidArgument(
            f"blocks of sizes {[b.n for b in blocks]} do not match partition {p}"
        )
    state = tensor(blocks)
    return PureState(state.n, state.amplitudes, blocks=tuple(blocks))


def extremal_block(k: int) -> PureState:
    """GHZ for k >= 2 (Phi+ when k == 2), |0> for a lone qubit."""
    return basis(1, 0) if k == 1 else ghz(k)


def extremal_state(p: Partition) -> PureState:
    return block_product(p, [extremal_block(k) for k in p.parts])


def random_pure(k: int, seed=None) -> PureState:
    """Haar-random ``k``-qubit state from i.i.d. complex Gaussian amplitudes."""
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    _check_capacity(k)
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(2**k) + 1j * rng.standard_normal(2**k)
    return make_pure(k, amps)


def random_block_state(p: Partition, seed=None) -> PureState:
    """Block product of independent Haar blocks of the given partition."""
    rng = np.random.default_rng(seed)
    return block_product(p, [random_pure(k, rng) for k in p.parts])


def mix(components: Iterable[tuple[float, State]]) -> MixedState:
    """Probability-weighted ensemble; nested mixtures are flattened."""
    flat: list[tuple[float, PureState]] = []
    for w, s in components:
        w = float(w)
        if w < 0 or not np.isfinite(w):
            raise InvalidArgument(f"mixture weight must be nonnegative, got {w}")
        for w2, psi in s.components:
            flat.append((w * w2, psi))
    if not flat:
        raise InvalidArgument("empty mixture")
    ns = {psi.n for _, psi in flat}
    if len(ns) != 1:
        raise InvalidArgument(f"mixture components have different qubit counts {sorted(ns)}")
    total = sum(w for w, _ in flat)
    if total <= 0:
        raise InvalidArgument("mixture weights sum to zero")
    return MixedState(ns.pop(), tuple((w / total, psi) for w, psi in flat))


# ---------------------------------------------------------------- expectations


def apply_1q(psi: np.ndarray, op: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 matrix to axis ``qubit`` of a ``(2,)*n`` tensor."""
    out = np.tensordot(op, psi, axes=([1], [qubit]))
    return np.moveaxis(out, 0, qubit)


def _check_ops(n: int, ops) -> list[tuple[int, np.ndarray]]:
    seen = set()
    out = []
    for q, d in ops:
        if not 0 <= q < n:
            raise InvalidArgument(f"qubit index {q} out of range for {n} qubits")
        if q in seen:
            raise InvalidArgument(f"duplicate qubit index {q}")
        seen.add(q)
        out.append((q, _as_direction(d).matrix))
    return out


def _pure_expectation(psi: PureState, ops: list[tuple[int, np.ndarray]]) -> complex:
    phi = psi.tensor
    for q, m in ops:
        phi = apply_1q(phi, m, q)
    return np.vdot(psi.tensor, phi)


def expectation(state: State, ops) -> float:
    """``<(x)_i v_i . sigma_i>`` with identity on unlisted qubits."""
    checked = _check_ops(state.n, ops)
    val = sum(w * _pure_expectation(psi, checked) for w, psi in state.components)
    if abs(np.imag(val)) > 1e-10:
        raise AssertionError(f"expectation of a Hermitian product has imaginary part {val.imag}")
    return float(np.real(val))


def random_block_mixture(p: Partition, seed=None, components: int = 4) -> MixedState:
    """Dirichlet-uniform mixture of independent Haar block states of one partition."""
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(components))
    return mix([(w, random_block_state(p, rng)) for w in weights])


def random_unit_vectors(shape, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(tuple(shape) + (3,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_settings(n: int, seed=None) -> Settings:
    return Settings.from_array(random_unit_vectors((n, 2), np.random.default_rng(seed)))


def random_product_state(n: int, seed=None) -> PureState:
    """Product of ``n`` independent Haar single-qubit states."""
    return random_block_state(Partition((1,) * n), seed)
