"""Integer partitions of the qubit count and their entanglement indices.

A partition lists the sizes of fully entangled groups in non-increasing
order, e.g. ``(3, 1)`` is a 3-qubit entangled block plus one lone qubit.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InvalidArgument

MAX_PARTITION_N = 64


@dataclass(frozen=True, order=False)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise InvalidArgument("partition must have at least one part")
        if any(p < 1 for p in parts):
            raise InvalidArgument(f"partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise InvalidArgument(f"partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_parts(cls, parts) -> "Partition":
        """Build from any iterable of positive sizes; order does not matter."""
        return cls(tuple(sorted((int(p) for p in parts), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"3,1"`` or ``"(3,1)"``."""
        body = text.strip().strip("()[]")
        try:
            parts = [int(tok) for tok in body.split(",") if tok.strip()]
        except ValueError as exc:
            raise InvalidArgument(f"cannot parse partition {text!r}") from exc
        return cls.from_parts(parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def is_separable(self) -> bool:
        return all(p == 1 for p in self.parts)

    def to_json(self) -> list[int]:
        return list(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class PartitionStats:
    n: int
    L: int
    K1: int
    Kk: dict[int, int] = field(compare=True)
    E: int
    S: int
    separable: bool


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise InvalidArgument(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 1 or n > MAX_PARTITION_N:
        raise InvalidArgument(f"n must be in 1..{MAX_PARTITION_N}, got {n}")
    return n


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    # partitions of n with every part <= largest, reverse-lexicographic
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic order.

    >>> [str(p) for p in enumerate_partitions(4)]
    ['(4)', '(3,1)', '(2,2)', '(2,1,1)', '(1,1,1,1)']
    """
    n = _check_n(n)
    return [Partition(p) for p in _partitions(n, n)]


def stats(p: Partition) -> PartitionStats:
    counts = Counter(p.parts)
    K1 = counts.get(1, 0)
    L = sum(m for k, m in counts.items() if k >= 2)
    n = p.n
    return PartitionStats(
        n=n,
        L=L,
        K1=K1,
        Kk=dict(sorted(counts.items())),
        E=n - K1 - 2 * L + 2,
        S=2 * L + K1,
        separable=p.is_separable,
    )


def entanglement_index(p: Partition) -> int:
    return stats(p).E


def classes(n: int) -> dict[int, list[Partition]]:
    """Group the non-separable partitions of ``n`` by entanglement index.

    Keys run over ``2..n``. The totally separable partition ``(1,...,1)`` is
    left out; see :func:`separable_partition`.
    """
    n = _check_n(n)
    if n < 2:
        raise InvalidArgument("entanglement classes need n >= 2")
    out: dict[int, list[Partition]] = {e: [] for e in range(2, n + 1)}
    for p in enumerate_partitions(n):
        if p.is_separable:
            continue
        out[stats(p).E].append(p)
    return out


def separable_partition(n: int) -> Partition:
    return Partition((1,) * _check_n(n))
