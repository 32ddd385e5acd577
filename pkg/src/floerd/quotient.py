"""Homology of the quotient complexes C{max(i, j - m) >= 0}.

The translate ``U^-t x`` lies in the quotient iff ``t >= -max(i_x, j_x - m)``.
Each grading slice is finite, and the differential is cut down to the slice:
arrows that land outside the region are dropped (quotient convention).

The infinite complex is truncated to a window of gradings
``g_low <= g <= g_low + 2N + 1``, where ``g_low`` is the lowest grading
present.  Homology is exact for gradings strictly below the top of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gf2
from .complex import BifilteredComplex
from .errors import WindowTooSmallError

U_ACTION_LIMIT = 4000  # generators per grading beyond which the U-matrix is skipped
CACHE_LIMIT = 20000


def filtration_width(c: BifilteredComplex) -> int:
    s = c.i + c.j
    return int(s.max() - s.min())


@dataclass(frozen=True, eq=False)
class TruncatedQuotientComplex:
    complex: BifilteredComplex
    m: int
    window: int

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")

    # lowest in-region translate of every basis element
    @property
    def _tmin(self) -> np.ndarray:
        c = self.complex
        return -np.maximum(c.i, c.j - self.m)

    @property
    def g_low(self) -> int:
        return int((self.complex.gr + 2 * self._tmin).min())

    @property
    def g_saturated(self) -> int:
        """From this grading up, every translate is in the region."""
        return int((self.complex.gr + 2 * self._tmin).max())

    @property
    def g_top(self) -> int:
        return self.g_low + 2 * self.window + 1

    def gradings(self) -> range:
        """Gradings where the truncated homology is exact."""
        return range(self.g_low, self.g_top)

    def generators(self, g: int) -> np.ndarray:
        """Basis indices with an in-region translate in grading g (ordered)."""
        c = self.complex
        if g > self.g_top or g < self.g_low:
            return np.zeros(0, dtype=np.int64)
        t2 = g - c.gr
        ok = (t2 % 2 == 0) & (t2 // 2 >= self._tmin)
        idx = np.nonzero(ok)[0]
        level = (c.i + c.j - c.gr)[idx]
        return idx[np.lexsort((idx, level))]

    def boundary_columns(self, g: int) -> Tuple[np.ndarray, np.ndarray, List[int]]:
        """d: A_g -> A_{g-1} as bitset columns.

        Returns (sources, targets, columns); column k is the boundary of
        sources[k] written in the positions of ``targets``.
        """
        c = self.complex
        srcs = self.generators(g)
        tgts = self.generators(g - 1)
        if not len(srcs):
            return srcs, tgts, []
        spos = np.full(c.n, -1, dtype=np.int64)
        spos[srcs] = np.arange(len(srcs))
        tpos = np.full(c.n, -1, dtype=np.int64)
        tpos[tgts] = np.arange(len(tgts))
        ok = (spos[c.src] >= 0) & (tpos[c.dst] >= 0)
        cols = [0] * len(srcs)
        for s, t in zip(spos[c.src[ok]].tolist(), tpos[c.dst[ok]].tolist()):
            cols[s] ^= 1 << t
        return srcs, tgts, cols


class _Engine:
    """Per-grading eliminations, cached for reuse across window sizes."""

    def __init__(self, c: BifilteredComplex, m: int):
        self.c = c
        self.m = m
        self.images: Dict[int, Tuple[gf2.PivotBasis, np.ndarray]] = {}
        self.ranks: Dict[int, int] = {}
        # echelon bases of big complexes run to ~10^2 MB per grading
        self.keep_all = c.n <= CACHE_LIMIT

    def tq(self, window: int) -> TruncatedQuotientComplex:
        return TruncatedQuotientComplex(self.c, self.m, window)

    def image_into(self, tq: TruncatedQuotientComplex, g: int):
        """Echelon basis of im(d: A_{g+1} -> A_g), with target positions."""
        if g not in self.images:
            _, tgts, cols = tq.boundary_columns(g + 1)
            basis = gf2.PivotBasis()
            for v in cols:
                if v:
                    basis.add(v)
            pos = np.full(self.c.n, -1, dtype=np.int64)
            pos[tgts] = np.arange(len(tgts))
            if not self.keep_all:
                self.images.clear()
            self.images[g] = (basis, pos)
            self.ranks[g + 1] = basis.rank
        return self.images[g]

    def rank_out_of(self, tq: TruncatedQuotientComplex, g: int) -> int:
        if g not in self.ranks:
            self.image_into(tq, g - 1)
        return self.ranks[g]


def _engine(c: BifilteredComplex, m: int) -> _Engine:
    key = ("engine", m)
    eng = c._cache.get(key)
    if eng is None:
        eng = c._cache[key] = _Engine(c, m)
    return eng


def default_window(c: BifilteredComplex, m: int) -> int:
    """Width of i+j plus 2, enlarged if needed to reach the saturated range."""
    base = filtration_width(c) + 2
    probe = TruncatedQuotientComplex(c, m, 1)
    need = (probe.g_saturated + 2 - probe.g_low + 1) // 2 + 1
    return max(base, need)


def truncated_quotient(c: BifilteredComplex, m: int, window: Optional[int] = None) -> TruncatedQuotientComplex:
    return TruncatedQuotientComplex(c, m, default_window(c, m) if window is None else window)


@dataclass
class Tower:
    bottom: int              # grading of the lowest nonzero tower class
    top: int                 # grading of the reference class (saturated range)
    cycle: Tuple[int, ...]   # basis indices of the generating cycle


def _tower(tq: TruncatedQuotientComplex) -> Tower:
    c = tq.complex
    eng = _engine(c, tq.m)
    gen = c.generator_cycle()
    parity = int(c.gr[gen[0]]) % 2
    top = tq.g_top - 1
    if top % 2 != parity:
        top -= 1
    if top - 1 < tq.g_saturated:
        raise WindowTooSmallError(
            f"window {tq.window} reaches grading {top}; the tower needs "
            f"grading >= {tq.g_saturated + 1} (m={tq.m})"
        )
    tmin = tq._tmin
    g = top
    bottom = top
    while True:
        # U^k of the generator, projected into A_g
        t = (g - c.gr[list(gen)]) // 2
        alive = [k for k, tk in zip(gen, t.tolist()) if tk >= tmin[k]]
        if not alive:
            break
        basis, pos = eng.image_into(tq, g)
        if gf2.bits(int(pos[k]) for k in alive) in basis:
            break
        bottom = g
        g -= 2
    return Tower(bottom, top, tuple(gen))


def tower_bottom(tq: TruncatedQuotientComplex) -> int:
    """Grading of the bottom of the U-nontorsion tower."""
    return _tower(tq).bottom


@dataclass
class TruncatedHomology:
    m: int
    window: int
    dims: Dict[int, int]
    tower: List[int]
    u_action: Optional[Dict[int, np.ndarray]] = field(default=None, repr=False)
    reps: Optional[Dict[int, List[List[int]]]] = field(default=None, repr=False)

    @property
    def tower_bottom(self) -> int:
        return min(self.tower)

    def torsion_dims(self) -> Dict[int, int]:
        return {g: d - (1 if g in self.tower else 0) for g, d in self.dims.items()}


def _cycle_bases(tq: TruncatedQuotientComplex, g: int):
    """Homology representatives in grading g plus a tracked reducer.

    The reducer holds im(d) followed by the representatives, so reducing any
    cycle expresses its class in the representative basis.
    """
    srcs, _, cols = tq.boundary_columns(g)
    _, ker = gf2.kernel(cols)
    _, tgts, incoming = tq.boundary_columns(g + 1)
    # positions of A_g: boundary_columns(g+1) targets == generators(g) == srcs
    red = gf2.PivotBasis(track=True)
    for v in incoming:
        if v:
            red.add(v)  # label None: boundaries carry no class
    reps = []
    for z in ker:
        label = len(reps)
        if red.add(z, label=label):
            reps.append([int(srcs[k]) for k in gf2.support(z)])
    return reps, red, srcs


def truncated_homology(tq: TruncatedQuotientComplex, with_u_action: bool = True) -> TruncatedHomology:
    """Dimensions of H_g of the truncated quotient in every exact grading.

    With ``with_u_action`` (and small slices) also returns, for each g, the
    matrix of multiplication by U from H_g to H_{g-2} in the chosen bases.
    """
    c = tq.complex
    eng = _engine(c, tq.m)
    dims = {}
    for g in tq.gradings():
        n_g = len(tq.generators(g))
        dims[g] = n_g - eng.rank_out_of(tq, g) - eng.image_into(tq, g)[0].rank
    tw = _tower(tq)
    tower = list(range(tw.bottom, tw.top + 1, 2))

    small = all(len(tq.generators(g)) <= U_ACTION_LIMIT for g in tq.gradings())
    if not (with_u_action and small):
        return TruncatedHomology(tq.m, tq.window, dims, tower)

    tmin = tq._tmin
    bases = {g: _cycle_bases(tq, g) for g in tq.gradings()}
    u_action = {}
    for g in tq.gradings():
        if g - 2 not in bases:
            continue
        reps, _, _ = bases[g]
        reps_lo, red_lo, srcs_lo = bases[g - 2]
        pos = np.full(c.n, -1, dtype=np.int64)
        pos[srcs_lo] = np.arange(len(srcs_lo))
        mat = np.zeros((len(reps_lo), len(reps)), dtype=np.uint8)
        for col, rep in enumerate(reps):
            image = [k for k in rep if (g - 2 - int(c.gr[k])) // 2 >= tmin[k]]
            r, combo = red_lo.reduce_tracked(gf2.bits(int(pos[k]) for k in image))
            assert r == 0, "U maps cycles to cycles"
            for row in gf2.support(combo):
                mat[row, col] = 1
        u_action[g] = mat
    return TruncatedHomology(
        tq.m, tq.window, dims, tower, u_action, {g: b[0] for g, b in bases.items()}
    )


def is_homologous_to_tower(tq: TruncatedQuotientComplex, grading: int, chain: Sequence[int]) -> bool:
    """Does ``chain`` (translates in ``grading``) represent the tower class there?

    True iff the chain is a cycle of the quotient, and chain + U^k(generator)
    is a boundary while the tower class in that grading is nonzero.
    """
    c = tq.complex
    tw = _tower(tq)
    if grading < tw.bottom or grading > tw.top or (tw.top - grading) % 2:
        return False
    tmin = tq._tmin
    inside = [k for k in chain if (grading - int(c.gr[k])) % 2 == 0
              and (grading - int(c.gr[k])) // 2 >= tmin[k]]
    if len(inside) != len(chain):
        return False
    srcs, tgts, cols = tq.boundary_columns(grading)
    spos = {int(k): n for n, k in enumerate(srcs)}
    if gf2.apply(cols, gf2.bits(spos[k] for k in chain)):
        return False
    gen_part = [k for k in tw.cycle if (grading - int(c.gr[k])) // 2 >= tmin[k]]
    basis, pos = _engine(c, tq.m).image_into(tq, grading)
    diff = gf2.bits(int(pos[k]) for k in chain) ^ gf2.bits(int(pos[k]) for k in gen_part)
    return diff in basis
