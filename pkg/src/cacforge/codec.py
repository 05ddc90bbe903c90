"""Enumerative codec mapping data words onto codebook members.

A rank table counts, for every scan position and every recent-bit state,
how many legal codeword completions exist.  Encoding walks the bus most
significant bit first and skips the zero-branch count whenever the rank
calls for a one; decoding reverses the walk.  Only floor(log2 M) data
bits are usable for a book of M words, so codewords ranked at or beyond
2**k are never produced by encode although decode still ranks them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

from .codebook import (ClassicCodeFamily, Codeword, ConstraintConfig,
                       IOLC_FIRST5, IOLC_LAST5_SEED0, IOLC_LAST5_SEED1,
                       IOLC_PROVENANCE, seed_codebooks)
from .errors import (ConfigError, MembershipError, UnsupportedConstraintError,
                     WidthError)

Subject = Union[ConstraintConfig, ClassicCodeFamily, str]
StepRule = Callable[[int, tuple[int, ...], int], bool]

_ALTERNATING3 = frozenset({(0, 1, 0), (1, 0, 1)})
_SIDE_FAMILY = {1: ClassicCodeFamily.OLC, 2: ClassicCodeFamily.FPC,
                3: ClassicCodeFamily.FOC}


@dataclass(frozen=True)
class RankTable:
    """Completion counts for ranking the codewords of one book.

    counts maps (bits placed, recent-bit state) to the number of legal
    completions reachable by appending a zero and by appending a one;
    the pair at the empty root sums to the book size.  States keep the
    last four bits, enough to extend any five-wire window by one.
    """

    subject: str
    width: int
    parity: Optional[int]
    counts: Mapping[tuple[int, tuple[int, ...]], tuple[int, int]]
    total: int

    @property
    def data_bits(self) -> int:
        """Usable payload width: floor(log2(total))."""
        return self.total.bit_length() - 1


def _family_rule(family: ClassicCodeFamily, parity: int) -> StepRule:
    """Per-bit legality when growing a classic-family word.

    position is 1-based; tail holds the last min(position - 1, 4) bits
    already placed.  The rules only ever look two bits back.
    """

    def fp(position: int, tail: tuple[int, ...], bit: int) -> bool:
        return position < 3 or (tail[-2], tail[-1], bit) not in _ALTERNATING3

    def ft(position: int, tail: tuple[int, ...], bit: int) -> bool:
        if position < 2:
            return True
        boundary = position - 1
        forbidden = (1, 0) if (boundary % 2 == 1) == (parity == 0) else (0, 1)
        return (tail[-1], bit) != forbidden

    def fo(position: int, tail: tuple[int, ...], bit: int) -> bool:
        if position < 3:
            return True
        center = position - 1
        forbidden = (1, 0, 1) if (center % 2 == 0) == (parity == 0) else (0, 1, 0)
        return (tail[-2], tail[-1], bit) != forbidden

    if family is ClassicCodeFamily.FPC:
        return fp
    if family is ClassicCodeFamily.FTC:
        return ft
    if family is ClassicCodeFamily.FOC:
        return fo
    return lambda position, tail, bit: (fp(position, tail, bit)
                                        and ft(position, tail, bit))


def _constraint_rule(constraint: ConstraintConfig, seed_parity: int) -> StepRule:
    seed0, seed1 = seed_codebooks(constraint)
    sides = (seed0.decimal_set, seed1.decimal_set)
    if seed_parity == 1:
        sides = sides[::-1]

    def step(position: int, tail: tuple[int, ...], bit: int) -> bool:
        if position < 5:
            return True
        window = ((tail[0] << 4) | (tail[1] << 3) | (tail[2] << 2)
                  | (tail[3] << 1) | bit)
        return window in sides[(position - 5) % 2]

    return step


def _pruned_rule(n: int) -> StepRule:
    base = _constraint_rule(ConstraintConfig(2, 1), 0)
    last5 = IOLC_LAST5_SEED0 if n % 2 == 1 else IOLC_LAST5_SEED1

    def step(position: int, tail: tuple[int, ...], bit: int) -> bool:
        if not base(position, tail, bit):
            return False
        if position < 5:
            return True
        window = ((tail[0] << 4) | (tail[1] << 3) | (tail[2] << 2)
                  | (tail[3] << 1) | bit)
        if position == 5 and window not in IOLC_FIRST5:
            return False
        if position == n and window not in last5:
            return False
        return True

    return step


def _resolve(subject: Subject, n: int, parity: int,
             ) -> tuple[str, Optional[int], StepRule]:
    if isinstance(subject, ConstraintConfig):
        key = (subject.middle, subject.side)
        if key == (0, 0):
            raise UnsupportedConstraintError(
                "(C0,0C) is too restrictive to support a usable codebook")
        if key == (6, 4):
            return subject.label, parity, lambda position, tail, bit: True
        if n < 5:
            family = _SIDE_FAMILY[subject.side]
            return subject.label, parity, _family_rule(family, parity)
        return subject.label, parity, _constraint_rule(subject, parity)
    if isinstance(subject, ClassicCodeFamily):
        stored = None if subject is ClassicCodeFamily.FPC else parity
        return subject.value, stored, _family_rule(subject, parity)
    if isinstance(subject, str) and subject.upper() == IOLC_PROVENANCE:
        if parity != 0:
            raise UnsupportedConstraintError(
                "the pruned book is only defined for seed parity 0")
        if n < 5:
            raise WidthError(f"the pruned book needs n >= 5, got {n}")
        return IOLC_PROVENANCE, 0, _pruned_rule(n)
    raise UnsupportedConstraintError(f"no codec subject for {subject!r}")


def build_rank_table(subject: Subject, n: int, parity: int = 0) -> RankTable:
    """Completion-count table for a codebook at width n.

    subject names a constraint pair, a classic family, or the pruned
    book as the string "IOLC".  The table is a dynamic program over the
    last four bits placed: a state with no bits left to place counts 1,
    otherwise each branch counts the completions of its successor state
    when the step is legal.  Build cost is O(n) states times O(1) work;
    encode and decode then run in O(n) lookups.
    """
    if n < 1:
        raise WidthError(f"rank tables need n >= 1, got {n}")
    if parity not in (0, 1):
        raise ConfigError(f"parity must be 0 or 1, got {parity}")
    label, stored_parity, rule = _resolve(subject, n, parity)
    counts: dict[tuple[int, tuple[int, ...]], tuple[int, int]] = {}
    for placed in range(n - 1, -1, -1):
        state_bits = min(placed, 4)
        for value in range(1 << state_bits):
            state = tuple((value >> (state_bits - 1 - i)) & 1
                          for i in range(state_bits))
            branch = [0, 0]
            for bit in (0, 1):
                if rule(placed + 1, state, bit):
                    successor = (state + (bit,))[-4:]
                    if placed + 1 == n:
                        branch[bit] = 1
                    else:
                        zero, one = counts[placed + 1, successor]
                        branch[bit] = zero + one
            counts[placed, state] = (branch[0], branch[1])
    root_zero, root_one = counts[0, ()]
    return RankTable(subject=label, width=n, parity=stored_parity,
                     counts=counts, total=root_zero + root_one)


def encode(data: int, table: RankTable) -> Codeword:
    """The data-th codeword of the table's book in decimal order.

    data must lie in [0, 2**k) with k = table.data_bits; all-zero data
    always maps to the all-zeros word because every book contains it.
    """
    limit = 1 << table.data_bits
    if not 0 <= data < limit:
        raise ConfigError(
            f"data word {data} out of range [0, {limit}) for "
            f"{table.subject} at width {table.width}")
    rank = data
    state: tuple[int, ...] = ()
    bits = []
    for placed in range(table.width):
        zero, _ = table.counts[placed, state]
        if rank < zero:
            bit = 0
        else:
            rank -= zero
            bit = 1
        bits.append(bit)
        state = (state + (bit,))[-4:]
    return Codeword(tuple(bits))


def decode(word: Codeword, table: RankTable) -> int:
    """Rank of a codeword within its book; inverse of encode.

    Accepts every book member, including surplus words ranked at or
    beyond 2**data_bits that encode never emits.
    """
    if word.width != table.width:
        raise WidthError(
            f"word width {word.width} does not match table width {table.width}")
    rank = 0
    state: tuple[int, ...] = ()
    for placed, bit in enumerate(word.bits):
        zero, one = table.counts[placed, state]
        if bit:
            rank += zero
            taken = one
        else:
            taken = zero
        if taken == 0:
            raise MembershipError(
                f"{word} is not in the {table.subject} codebook "
                f"at width {table.width}")
        state = (state + (bit,))[-4:]
    return rank
