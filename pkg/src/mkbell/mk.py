"""Mermin-Klyshko polynomials as exact sparse term maps, and their expectations.

A term is keyed by a prime pattern: a bitstring whose character ``i`` is
``"1"`` when qubit ``i`` measures its primed observable. Coefficients are
exact dyadic rationals (``fractions.Fraction`` with power-of-two denominators).

The recursion used is::

    F_N  = 1/2 (D + D') F_{N-1} + 1/2 (D - D') F'_{N-1}

with ``F_2 = AB + AB' + A'B - A'B'``; ``F'_N`` swaps primed and unprimed
observables everywhere, which on term maps is pattern complement.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import CapacityExceeded, InvalidArgument
from .states import PAULI, MAX_QUBITS, PureState, Settings, State, apply_1q

MAX_DENSE_QUBITS = 8
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TermMap:
    n: int
    terms: Mapping[str, Fraction]

    def __post_init__(self):
        terms = {s: Fraction(c) for s, c in sorted(self.terms.items()) if c != 0}
        for s in terms:
            if len(s) != self.n or set(s) - {"0", "1"}:
                raise InvalidArgument(f"bad prime pattern {s!r} for n={self.n}")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, pattern: str) -> Fraction:
        return self.terms.get(pattern, Fraction(0))

    def complement(self) -> "TermMap":
        return TermMap(self.n, {_flip(s): c for s, c in self.terms.items()})

    def dump(self) -> str:
        """One ``<pattern> <numerator>/2^<exponent>`` line per term, sorted by pattern."""
        return "\n".join(f"{s} {c.numerator}/2^{_dyadic_exponent(c)}" for s, c in self.terms.items())


def _flip(s: str) -> str:
    return s.translate(str.maketrans("01", "10"))


def _dyadic_exponent(c: Fraction) -> int:
    d = c.denominator
    if d & (d - 1):
        raise ValueError(f"{c} is not a dyadic rational")
    return d.bit_length() - 1


_F2 = {"00": Fraction(1), "01": Fraction(1), "10": Fraction(1), "11": Fraction(-1)}


def _check_mk_n(n: int) -> None:
    if n < 2:
        raise InvalidArgument(f"MK polynomials need n >= 2, got {n}")
    if n > MAX_QUBITS:
        raise CapacityExceeded(f"n={n} exceeds the cap of {MAX_QUBITS}")


@lru_cache(maxsize=None)
def build_mk(n: int) -> tuple[TermMap, TermMap]:
    """Return ``(F_n, F_n')`` by exact recursion from ``F_2``."""
    _check_mk_n(n)
    if n == 2:
        f = TermMap(2, _F2)
        return f, f.complement()
    prev, prev_p = build_mk(n - 1)
    terms: dict[str, Fraction] = {}
    for s in set(prev.terms) | set(prev_p.terms):
        a, b = prev.coefficient(s), prev_p.coefficient(s)
        terms[s + "0"] = _HALF * (a + b)
        terms[s + "1"] = _HALF * (a - b)
    f = TermMap(n, terms)
    return f, f.complement()


def _product(left: TermMap, right: TermMap) -> dict[str, Fraction]:
    return {sl + sr: cl * cr for sl, cl in left.terms.items() for sr, cr in right.terms.items()}


def _add(acc: dict[str, Fraction], terms: Mapping[str, Fraction], scale: Fraction) -> None:
    for s, c in terms.items():
        acc[s] = acc.get(s, Fraction(0)) + scale * c


def build_mk_split(n: int, k: int) -> TermMap:
    """Assemble ``F_n`` from an ``(n-k)``-qubit and a trailing ``k``-qubit block.

    Uses ``F_n = 1/4 (F_{n-k} (F_k + F_k') + F'_{n-k} (F_k - F_k'))``.
    """
    _check_mk_n(n)
    if not 2 <= k <= n - 2:
        raise InvalidArgument(f"block size k={k} must satisfy 2 <= k <= n-2 for n={n}")
    head, head_p = build_mk(n - k)
    tail, tail_p = build_mk(k)
    tail_sum, tail_diff = {}, {}
    _add(tail_sum, tail.terms, Fraction(1))
    _add(tail_sum, tail_p.terms, Fraction(1))
    _add(tail_diff, tail.terms, Fraction(1))
    _add(tail_diff, tail_p.terms, Fraction(-1))
    acc: dict[str, Fraction] = {}
    _add(acc, _product(head, TermMap(k, tail_sum)), Fraction(1, 4))
    _add(acc, _product(head_p, TermMap(k, tail_diff)), Fraction(1, 4))
    return TermMap(n, acc)


# ---------------------------------------------------------------- evaluation


def _check_dims(F: TermMap, s: Settings, state: State) -> None:
    if not F.n == s.n == state.n:
        raise InvalidArgument(f"dimension mismatch: F has n={F.n}, settings n={s.n}, state n={state.n}")


def _setting_mats(s: Settings) -> np.ndarray:
    # shape (n, 2, 2, 2): qubit, primed?, row, col
    return np.einsum("ipk,kab->ipab", s.as_array(), PAULI)


def _correlators(psi: PureState, mats: np.ndarray, patterns: Sequence[str]) -> dict[str, complex]:
    """``<psi| (x)_i O_i^{pattern_i} |psi>`` for each pattern, sharing prefixes."""
    out: dict[str, complex] = {}
    bra = psi.tensor

    def walk(depth: int, phi: np.ndarray, group: list[str]) -> None:
        if depth == psi.n:
            out[group[0]] = np.vdot(bra, phi)
            return
        for bit in "01":
            sub = [p for p in group if p[depth] == bit]
            if sub:
                walk(depth + 1, apply_1q(phi, mats[depth, int(bit)], depth), sub)

    walk(0, bra, list(patterns))
    return out


def pattern_correlators(state: State, s: Settings, patterns: Sequence[str]) -> dict[str, float]:
    """Expectations of the pattern-selected product observables, for each pattern."""
    mats = _setting_mats(s)
    acc = dict.fromkeys(patterns, 0.0)
    for w, psi in state.components:
        for p, v in _correlators(psi, mats, patterns).items():
            acc[p] += w * v.real
    return acc


def evaluate(F: TermMap, s: Settings, state: State) -> float:
    """``<F>`` for the given settings; terms summed in sorted pattern order."""
    _check_dims(F, s, state)
    corr = pattern_correlators(state, s, list(F.terms))
    return float(sum(float(c) * corr[p] for p, c in F.terms.items()))


def evaluate_pair(state: State, s: Settings) -> tuple[float, float]:
    """``(<F_n>, <F_n'>)`` from one shared pass over the correlators."""
    F, Fp = build_mk(state.n)
    _check_dims(F, s, state)
    patterns = sorted(set(F.terms) | set(Fp.terms))
    corr = pattern_correlators(state, s, patterns)
    f = sum(float(c) * corr[p] for p, c in F.terms.items())
    fp = sum(float(c) * corr[p] for p, c in Fp.terms.items())
    return float(f), float(fp)


def evaluate_product_fast(F: TermMap, s: Settings, blocks: Sequence[PureState] | PureState) -> float:
    """``<F>`` on a block-product state using per-block expectation tables."""
    if isinstance(blocks, PureState):
        if blocks.blocks is None:
            raise InvalidArgument("state was not built with block_product")
        blocks = blocks.blocks
    n = sum(b.n for b in blocks)
    if not F.n == s.n == n:
        raise InvalidArgument(f"dimension mismatch: F has n={F.n}, settings n={s.n}, blocks n={n}")
    mats = _setting_mats(s)
    tables, spans, start = [], [], 0
    for b in blocks:
        span = slice(start, start + b.n)
        subs = sorted({p[span] for p in F.terms})
        tables.append({k: v.real for k, v in _correlators(b, mats[span], subs).items()})
        spans.append(span)
        start += b.n
    total = 0.0
    for p, c in F.terms.items():
        prod = 1.0
        for table, span in zip(tables, spans):
            prod *= table[p[span]]
        total += float(c) * prod
    return total


def quadratic_bell(state: State, s: Settings) -> float:
    """``<F_n>^2 + <F_n'>^2``."""
    f, fp = evaluate_pair(state, s)
    return f * f + fp * fp


def linear_bell_max(state: State, s: Settings) -> float:
    """``max(|<F_n>|, |<F_n'>|)``, the separable-bound quantity."""
    f, fp = evaluate_pair(state, s)
    return max(abs(f), abs(fp))


def dense_operator(F: TermMap, s: Settings) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of ``F``; test oracle only."""
    if F.n != s.n:
        raise InvalidArgument(f"dimension mismatch: F has n={F.n}, settings n={s.n}")
    if F.n > MAX_DENSE_QUBITS:
        raise CapacityExceeded(f"dense operator limited to {MAX_DENSE_QUBITS} qubits")
    mats = _setting_mats(s)
    out = np.zeros((2**F.n, 2**F.n), dtype=complex)
    for p, c in F.terms.items():
        m = np.ones((1, 1), dtype=complex)
        for q, bit in enumerate(p):
            m = np.kron(m, mats[q, int(bit)])
        out += float(c) * m
    return out


# ---------------------------------------------------------------- product form
#
# F_n + i F_n' = 2 (1 + i) (x)_j Z_j  with  Z_j = ((1 - i) D_j + (1 + i) D_j') / 2,
# so the pair of MK expectations costs one product-operator expectation.

PRODUCT_PREFACTOR = 2 * (1 + 1j)
UNPRIMED_WEIGHT = (1 - 1j) / 2
PRIMED_WEIGHT = (1 + 1j) / 2


def product_factors(settings_array: np.ndarray) -> np.ndarray:
    """Per-qubit ``Z_j`` matrices, shape ``(..., n, 2, 2)``, from ``(..., n, 2, 3)``."""
    combo = UNPRIMED_WEIGHT * settings_array[..., 0, :] + PRIMED_WEIGHT * settings_array[..., 1, :]
    return np.einsum("...k,kab->...ab", combo, PAULI)


def product_amplitude(state: State, settings_array: np.ndarray) -> complex:
    """``sum_c w_c <psi_c| (x)_j Z_j |psi_c>`` (without the ``2(1+i)`` prefactor)."""
    zs = product_factors(settings_array)
    total = 0j
    for w, psi in state.components:
        phi = psi.tensor
        for q in range(psi.n):
            phi = apply_1q(phi, zs[q], q)
        total += w * np.vdot(psi.tensor, phi)
    return total


def mk_pair_product_form(state: State, s: Settings) -> tuple[float, float]:
    """``(<F_n>, <F_n'>)`` via the factorized complex form."""
    if s.n != state.n:
        raise InvalidArgument(f"dimension mismatch: settings n={s.n}, state n={state.n}")
    g = PRODUCT_PREFACTOR * product_amplitude(state, s.as_array())
    return float(g.real), float(g.imag)
