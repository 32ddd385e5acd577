"""Sparse GF(2) linear algebra on int bitsets.

A vector over GF(2) is a Python ``int``; bit ``k`` is the coefficient of the
k-th coordinate.  XOR of two ints is vector addition and runs in C, which is
what makes elimination on ~10^5 coordinates practical.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple


def bits(indices: Iterable[int]) -> int:
    """Pack coordinate indices into a bitset (repeated indices cancel)."""
    v = 0
    for k in indices:
        v ^= 1 << k
    return v


def support(v: int) -> List[int]:
    """Indices of the set bits of ``v``, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


class PivotBasis:
    """Echelon basis of a GF(2) subspace, keyed by leading (highest) bit.

    Every stored vector has a distinct leading bit, so a vector lies in the
    span iff repeated cancellation of its leading bit reaches zero.  With
    ``track=True`` each stored vector also carries the combination of input
    vectors (as a bitset over insertion labels) that produced it.
    """

    __slots__ = ("pivots", "combos", "track")

    def __init__(self, track: bool = False):
        self.pivots: dict = {}
        self.combos: dict = {}
        self.track = track

    def __len__(self) -> int:
        return len(self.pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: int) -> int:
        piv = self.pivots
        while v:
            w = piv.get(v.bit_length() - 1)
            if w is None:
                return v
            v ^= w
        return 0

    def reduce_tracked(self, v: int, combo: int = 0) -> Tuple[int, int]:
        piv, com = self.pivots, self.combos
        while v:
            top = v.bit_length() - 1
            w = piv.get(top)
            if w is None:
                break
            v ^= w
            combo ^= com[top]
        return v, combo

    def add(self, v: int, label: Optional[int] = None) -> int:
        """Insert ``v``; return its residual (0 when dependent).

        ``label`` is the insertion label recorded in tracked mode.
        """
        if self.track:
            combo = 0 if label is None else 1 << label
            r, combo = self.reduce_tracked(v, combo)
            if r:
                top = r.bit_length() - 1
                self.pivots[top] = r
                self.combos[top] = combo
            return r
        r = self.reduce(v)
        if r:
            self.pivots[r.bit_length() - 1] = r
        return r

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def express(self, v: int) -> Optional[int]:
        """Combination of insertion labels summing to ``v``, or None."""
        if not self.track:
            raise ValueError("express() needs a tracked basis")
        r, combo = self.reduce_tracked(v)
        return None if r else combo


def rank(columns: Sequence[int]) -> int:
    basis = PivotBasis()
    for c in columns:
        basis.add(c)
    return basis.rank


def kernel(columns: Sequence[int]) -> Tuple[PivotBasis, List[int]]:
    """Image basis and a kernel basis for the matrix with the given columns.

    Kernel vectors are bitsets over column positions.
    """
    basis = PivotBasis(track=True)
    ker = []
    for idx, c in enumerate(columns):
        r, combo = basis.reduce_tracked(c, 1 << idx)
        if r:
            top = r.bit_length() - 1
            basis.pivots[top] = r
            basis.combos[top] = combo
        else:
            ker.append(combo)
    return basis, ker


def apply(columns: Sequence[int], v: int) -> int:
    """Matrix-vector product: sum of the columns selected by ``v``."""
    out = 0
    for k in support(v):
        out ^= columns[k]
    return out
