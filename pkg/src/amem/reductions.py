"""Bit-string pairing, binary/unary conversion and truth-table reductions."""
from __future__ import annotations

import enum
from collections.abc import Callable, Sequence
from dataclasses import dataclass


def interleave(a: str, b: str) -> str:
    """Pair two bit strings as ``b_k a_k ... b_0 a_0``.

    The shorter argument is left-padded with zeros.
    """
    width = max(len(a), len(b))
    a, b = a.zfill(width), b.zfill(width)
    return "".join(y + x for x, y in zip(a, b))


def deinterleave(s: str) -> tuple[str, str]:
    if len(s) % 2:
        raise ValueError(f"cannot de-interleave an odd-length string ({len(s)} bits)")
    return s[1::2], s[0::2]


def _bits(k: int) -> str:
    return format(k, "b")


def pair(a: int, b: int) -> int:
    """Integer value of the interleaving of ``a`` and ``b`` written in binary."""
    return int(interleave(_bits(a), _bits(b)), 2)


def unpair(v: int) -> tuple[int, int]:
    s = _bits(v)
    if len(s) % 2:
        s = "0" + s
    a, b = deinterleave(s)
    return int(a, 2), int(b, 2)


def prefix_width(n: int) -> int:
    """Number of leading bits read by :func:`bin_to_unary` on a length-``n`` word."""
    if n <= 1:
        return n
    return (n - 1).bit_length()


def bin_prefix_value(w: str) -> int:
    k = prefix_width(len(w))
    return int(w[:k], 2) if k else 0


def bin_to_unary(w: str) -> str:
    """``1^x`` where x is the value of the first ceil(log2 |w|) bits of ``w``."""
    return "1" * bin_prefix_value(w)


def unary_to_bin(w: str) -> str:
    """Binary count of ones in a word of shape ``0...01...1``."""
    ones = w.count("1")
    if "1" * ones != w[len(w) - ones:] or set(w) - {"0", "1"}:
        raise ValueError(f"expected a word of the form 0*1*, got {w!r}")
    return _bits(ones)


class Combiner(str, enum.Enum):
    OR = "or"
    AND = "and"
    IDENTITY = "identity"


@dataclass(frozen=True)
class ReductionQuery:
    """Queries ``a_1..a_l`` combined by a truth table.

    Unary queries are held as their lengths.
    """

    queries: tuple
    combiner: Combiner
    answers: tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.answers is not None and len(self.answers) != len(self.queries):
            raise ValueError("answers must match queries")
        if self.combiner is Combiner.IDENTITY and len(self.queries) != 1:
            raise ValueError("an identity (many-one) reduction asks exactly one query")


def combine(combiner: Combiner, answers: Sequence[bool]) -> bool:
    if combiner is Combiner.OR:
        return any(answers)
    if combiner is Combiner.AND:
        return all(answers)
    if len(answers) != 1:
        raise ValueError("an identity (many-one) reduction asks exactly one query")
    return bool(answers[0])


def eval_reduction(q: ReductionQuery, oracle: Callable[[object], bool]) -> bool:
    answers = q.answers if q.answers is not None else tuple(bool(oracle(a)) for a in q.queries)
    return combine(q.combiner, answers)
