"""Index sequences ``(n_k)``: computable bijections of the positive integers.

The generalized function reads the argument's digits in the order
``i_{n_1}, i_{n_2}, ...``. Three families are supported; each one knows its
inverse, where it becomes periodic, and how far it deviates from the identity.
"""

import bisect

from abc import ABC, abstractmethod
from typing import Dict, Sequence, Tuple, Type

from salemgen._constants import Deviation, PermKind
from salemgen._constants import SeriesDefaultValues
from salemgen._utils._series import Settle, lcm
from salemgen.exceptions import DomainError, UnsupportedPermutationError


def _check_position(k: int) -> None:
    if k < 1:
        raise DomainError(f"Indices start at 1, got {k}")


def _check_table(table: Sequence[int], name: str) -> Tuple[int, ...]:
    table = tuple(int(n) for n in table)
    if sorted(table) != list(range(1, len(table) + 1)):
        raise DomainError(f"{name} {table} is not a permutation of 1..{len(table)}")
    return table


def _inverse(table: Tuple[int, ...]) -> Tuple[int, ...]:
    inverse = [0] * len(table)
    for k, n in enumerate(table, start=1):
        inverse[n - 1] = k
    return tuple(inverse)


class IndexSequence(ABC):
    """The map ``k -> n_k``."""

    kind: str = ""

    @abstractmethod
    def n_at(self, k: int) -> int:
        pass

    @abstractmethod
    def preimage(self, n: int) -> int:
        pass

    @abstractmethod
    def deviation_class(self) -> str:
        pass

    @abstractmethod
    def settles_at(self, start: int) -> Tuple[int, int]:
        """``(K, L)`` with ``n_{k+L} = n_k + L`` and ``n_k >= start`` for all ``k >= K``."""

    @abstractmethod
    def to_json(self) -> dict:
        pass

    def k0_for_m(self, m: int) -> int:
        """Largest ``k`` with ``n_k`` in ``1..m``."""
        _check_position(m)
        return max(self.preimage(n) for n in range(1, m + 1))

    def prefix(self, count: int) -> Tuple[int, ...]:
        return tuple(self.n_at(k) for k in range(1, count + 1))

    def after(self, k: int) -> "IndexSequence":
        """Order in which the digits left after deleting ``n_1..n_k`` are read."""
        if k < 0:
            raise DomainError(f"Step count must be non-negative, got {k}")
        if k == 0:
            return self
        return ResidualSequence(self, k)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(repr(self))


class Identity(IndexSequence):
    kind = PermKind.identity

    def n_at(self, k: int) -> int:
        _check_position(k)
        return k

    def preimage(self, n: int) -> int:
        _check_position(n)
        return n

    def deviation_class(self) -> str:
        return Deviation.identity_everywhere

    def settles_at(self, start: int) -> Tuple[int, int]:
        return max(1, start), 1

    def k0_for_m(self, m: int) -> int:
        _check_position(m)
        return m

    def after(self, k: int) -> IndexSequence:
        return self

    def to_json(self) -> dict:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return "Identity()"


class FinitePermutation(IndexSequence):
    """A permutation of ``1..N``, the identity beyond ``N``."""

    kind = PermKind.finite

    def __init__(self, table: Sequence[int]) -> None:
        self.table = _check_table(table, "table")
        if not self.table:
            raise DomainError("A finite permutation table must not be empty")
        self._inverse = _inverse(self.table)

    def n_at(self, k: int) -> int:
        _check_position(k)
        return self.table[k - 1] if k <= len(self.table) else k

    def preimage(self, n: int) -> int:
        _check_position(n)
        return self._inverse[n - 1] if n <= len(self._inverse) else n

    def deviation_class(self) -> str:
        if all(n == k for k, n in enumerate(self.table, start=1)):
            return Deviation.identity_everywhere
        return Deviation.finite

    def settles_at(self, start: int) -> Tuple[int, int]:
        return max(len(self.table) + 1, start), 1

    def to_json(self) -> dict:
        return {"kind": self.kind, "table": list(self.table)}

    def __repr__(self) -> str:
        return f"FinitePermutation(table={self.table})"


class BlockPermutation(IndexSequence):
    """The same permutation of ``1..B`` applied inside every block of ``B`` positions."""

    kind = PermKind.block

    def __init__(self, b: int, block_map: Sequence[int]) -> None:
        self.b = int(b)
        if self.b < 1:
            raise DomainError(f"Block length must be positive, got {b}")
        self.block_map = _check_table(block_map, "map")
        if len(self.block_map) != self.b:
            raise DomainError(f"Block map {self.block_map} does not have length b={self.b}")
        self._inverse = _inverse(self.block_map)

    def n_at(self, k: int) -> int:
        _check_position(k)
        block, slot = divmod(k - 1, self.b)
        return block * self.b + self.block_map[slot]

    def preimage(self, n: int) -> int:
        _check_position(n)
        block, slot = divmod(n - 1, self.b)
        return block * self.b + self._inverse[slot]

    def deviation_class(self) -> str:
        if all(n == k for k, n in enumerate(self.block_map, start=1)):
            return Deviation.identity_everywhere
        return Deviation.infinite

    def settles_at(self, start: int) -> Tuple[int, int]:
        blocks = max(0, -(-(start - 1) // self.b))
        return blocks * self.b + 1, self.b

    def to_json(self) -> dict:
        return {"kind": self.kind, "b": self.b, "map": list(self.block_map)}

    def __repr__(self) -> str:
        return f"BlockPermutation(b={self.b}, map={self.block_map})"


class ResidualSequence(IndexSequence):
    """Reading order of the digits that remain after ``steps`` generalized shifts.

    Position ``j`` of the shifted string is original position ``n_{steps+j}``
    renumbered past the deleted positions ``n_1..n_steps``.
    """

    def __init__(self, base: IndexSequence, steps: int) -> None:
        self.base = base
        self.steps = steps
        self.deleted = tuple(sorted(base.n_at(k) for k in range(1, steps + 1)))
        self.kind = base.kind

    def _renumber(self, n: int) -> int:
        return n - bisect.bisect_left(self.deleted, n)

    def _original(self, position: int) -> int:
        original = position
        for gone in self.deleted:
            if gone <= original:
                original += 1
        return original

    def n_at(self, k: int) -> int:
        _check_position(k)
        return self._renumber(self.base.n_at(self.steps + k))

    def preimage(self, n: int) -> int:
        _check_position(n)
        return self.base.preimage(self._original(n)) - self.steps

    def deviation_class(self) -> str:
        raise UnsupportedPermutationError("Residual orders carry no deviation class")

    def settles_at(self, start: int) -> Tuple[int, int]:
        floor = max(start + self.steps, self.deleted[-1] + 1)
        k, period = self.base.settles_at(floor)
        return max(1, k - self.steps), period

    def after(self, k: int) -> IndexSequence:
        return self.base.after(self.steps + k) if k else self

    def to_json(self) -> dict:
        return {"kind": "residual", "base": self.base.to_json(), "steps": self.steps}

    def __repr__(self) -> str:
        return f"ResidualSequence(base={self.base!r}, steps={self.steps})"


index_sequence_kind: Dict[str, Type[IndexSequence]] = {
    PermKind.identity: Identity,
    PermKind.finite: FinitePermutation,
    PermKind.block: BlockPermutation,
}


def from_descriptor(descriptor: dict) -> IndexSequence:
    """Build an index sequence from ``{"kind": ..., ...}``.

    Non-deviating tables and block maps reduce to :class:`Identity`.

    :raises DomainError: on an unknown kind or an invalid table
    """
    kind = descriptor.get("kind")
    if kind not in index_sequence_kind:
        raise DomainError(
            f"Invalid permutation kind: {kind}. Valid kinds are: {list(index_sequence_kind.keys())}"
        )
    if kind == PermKind.identity:
        return Identity()
    if kind == PermKind.finite:
        sequence = FinitePermutation(descriptor.get("table") or ())
    else:
        sequence = BlockPermutation(descriptor.get("b", 0), descriptor.get("map") or ())
    if sequence.deviation_class() == Deviation.identity_everywhere:
        return Identity()
    return sequence


def n_at(seq: IndexSequence, k: int) -> int:
    return seq.n_at(k)


def preimage(seq: IndexSequence, n: int) -> int:
    return seq.preimage(n)


def k0_for_m(seq: IndexSequence, m: int) -> int:
    return seq.k0_for_m(m)


def deviation_class(seq: IndexSequence) -> str:
    return seq.deviation_class()


def permuted_settle(d_settle: Settle, seq: IndexSequence) -> Settle:
    """Where the stream ``d(n_1), d(n_2), ...`` becomes periodic, given ``d``'s own."""
    if d_settle is None:
        return None
    start, period = d_settle
    k, seq_period = seq.settles_at(start)
    combined = lcm(period, seq_period)
    if combined > SeriesDefaultValues.max_closed_period:
        return None
    return k, combined
