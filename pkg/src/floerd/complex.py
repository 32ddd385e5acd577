"""Reduced bifiltered chain complexes over F2[U, U^-1].

A complex is stored by its F2[U, U^-1]-basis: each basis element ``x`` has a
Maslov grading and a filtration pair ``(i, j)``.  The translate ``U^-t x``
sits in grading ``gr + 2t`` at filtration ``(i + t, j + t)``.  A differential
entry ``(src, dst, u)`` means ``d(src)`` contains ``U^u dst``.

Because the differential is homogeneous, the grading-g slice of the complex is
the F2-span of one translate of every basis element whose grading has the
parity of g.  Setting ``U = 1`` therefore identifies every slice of a given
parity with the same vector space, and most homological checks run on that
``U = 1`` matrix split by parity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import gf2
from .errors import InvalidComplexError


@dataclass(frozen=True)
class BasisElement:
    id: str
    gr: int
    filt: Tuple[int, int]


@dataclass(frozen=True)
class DifferentialEntry:
    source: str
    target: str
    upower: int


def _frozen(a, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype).reshape(-1)
    arr.setflags(write=False)
    return arr


class BifilteredComplex:
    """Finitely generated reduced complex; immutable after construction.

    ``genus`` is optional metadata (top Alexander grading of the knot).
    ``generator`` optionally names basis indices whose sum is a cycle that
    generates homology; it is verified before use, never trusted.
    """

    def __init__(
        self,
        name: str,
        ids: Sequence[str],
        gr,
        i,
        j,
        src=(),
        dst=(),
        upow=(),
        *,
        genus: Optional[int] = None,
        generator: Optional[Sequence[int]] = None,
    ):
        self.name = name
        self.ids: Tuple[str, ...] = tuple(ids)
        self.gr = _frozen(gr)
        self.i = _frozen(i)
        self.j = _frozen(j)
        self.src = _frozen(src)
        self.dst = _frozen(dst)
        self.upow = _frozen(upow)
        n = len(self.ids)
        if not (len(self.gr) == len(self.i) == len(self.j) == n):
            raise ValueError("basis arrays have mismatched lengths")
        if not (len(self.src) == len(self.dst) == len(self.upow)):
            raise ValueError("differential arrays have mismatched lengths")
        if len(self.src) and (self.src.min() < 0 or self.src.max() >= n
                              or self.dst.min() < 0 or self.dst.max() >= n):
            raise ValueError("differential refers to a missing basis element")
        self.genus = genus
        self.generator = None if generator is None else tuple(sorted(set(generator)))
        self._cache: dict = {}

    # ---- construction helpers -------------------------------------------------

    @classmethod
    def from_elements(
        cls,
        name: str,
        basis: Sequence[BasisElement],
        diff: Sequence[DifferentialEntry] = (),
        **kw,
    ) -> "BifilteredComplex":
        ids = [b.id for b in basis]
        index = {x: k for k, x in enumerate(ids)}
        if len(index) != len(ids):
            dup = next(x for x in ids if ids.count(x) > 1)
            raise InvalidComplexError("ids", f"duplicate basis id {dup!r}")
        try:
            src = [index[e.source] for e in diff]
            dst = [index[e.target] for e in diff]
        except KeyError as exc:
            raise InvalidComplexError("ids", f"unknown basis id {exc.args[0]!r}") from None
        return cls(
            name,
            ids,
            [b.gr for b in basis],
            [b.filt[0] for b in basis],
            [b.filt[1] for b in basis],
            src,
            dst,
            [e.upower for e in diff],
            **kw,
        )

    @property
    def n(self) -> int:
        return len(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def basis(self) -> List[BasisElement]:
        return [
            BasisElement(x, int(g), (int(a), int(b)))
            for x, g, a, b in zip(self.ids, self.gr, self.i, self.j)
        ]

    @property
    def diff(self) -> List[DifferentialEntry]:
        return [
            DifferentialEntry(self.ids[s], self.ids[t], int(u))
            for s, t, u in zip(self.src, self.dst, self.upow)
        ]

    @property
    def index(self) -> Dict[str, int]:
        if "index" not in self._cache:
            self._cache["index"] = {x: k for k, x in enumerate(self.ids)}
        return self._cache["index"]

    def __repr__(self) -> str:
        return f"BifilteredComplex({self.name!r}, {self.n} generators, {len(self.src)} arrows)"

    def _diff_key(self):
        order = np.lexsort((self.dst, self.src))
        return self.src[order], self.dst[order], self.upow[order]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BifilteredComplex):
            return NotImplemented
        if self.ids != other.ids:
            return False
        if not (np.array_equal(self.gr, other.gr) and np.array_equal(self.i, other.i)
                and np.array_equal(self.j, other.j)):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._diff_key(), other._diff_key()))

    __hash__ = None

    def isomorphic(self, other: "BifilteredComplex") -> bool:
        """Equality up to relabeling of basis ids (same basis order)."""
        if self.n != other.n:
            return False
        relabeled = BifilteredComplex(
            other.name, self.ids, other.gr, other.i, other.j,
            other.src, other.dst, other.upow,
        )
        return relabeled == self

    # ---- translates and chains ------------------------------------------------

    def translate(self, k: int, grading: int) -> Tuple[int, int]:
        """Filtration of the translate of basis element ``k`` in ``grading``."""
        diff = grading - int(self.gr[k])
        if diff % 2:
            raise ValueError(f"{self.ids[k]} has no translate in grading {grading}")
        t = diff // 2
        return int(self.i[k]) + t, int(self.j[k]) + t

    def chain_at(self, grading: int, filt: Tuple[int, int]) -> List[int]:
        """Basis indices whose grading-``grading`` translate sits at ``filt``."""
        t2 = grading - self.gr
        ok = (t2 % 2 == 0)
        t = t2 // 2
        ok &= (self.i + t == filt[0]) & (self.j + t == filt[1])
        return [int(k) for k in np.nonzero(ok)[0]]

    def boundary(self, chain: Iterable[int]) -> List[int]:
        """U=1 boundary of a chain (a set of basis indices), as sorted indices."""
        chain = set(chain)
        out: Dict[int, int] = {}
        for s, t in zip(self.src.tolist(), self.dst.tolist()):
            if s in chain:
                out[t] = out.get(t, 0) ^ 1
        return sorted(k for k, v in out.items() if v)

    def is_cycle(self, chain: Iterable[int]) -> bool:
        return not self.boundary(chain)

    # ---- U = 1 linear algebra -------------------------------------------------

    def _parity_order(self, parity: int) -> np.ndarray:
        """Basis indices of the given grading parity in elimination order.

        Ordered by the filtration level of the translate into a common grading,
        so leading bits behave like persistence "lowest ones".
        """
        key = f"order{parity}"
        if key not in self._cache:
            idx = np.nonzero(self.gr % 2 == parity)[0]
            level = (self.i + self.j - self.gr)[idx]
            self._cache[key] = idx[np.lexsort((idx, level))]
        return self._cache[key]

    def _image_basis(self, parity: int):
        """Echelon basis of the image of d into the given parity (U=1)."""
        key = f"image{parity}"
        if key not in self._cache:
            tgt = self._parity_order(parity)
            pos = np.full(self.n, -1, dtype=np.int64)
            pos[tgt] = np.arange(len(tgt))
            srcs = self._parity_order(1 - parity)
            mask = (self.gr[self.src] % 2) == (1 - parity)
            s_arr, t_arr = self.src[mask], pos[self.dst[mask]]
            cols: Dict[int, int] = {}
            for s, t in zip(s_arr.tolist(), t_arr.tolist()):
                cols[s] = cols.get(s, 0) ^ (1 << t)
            basis = gf2.PivotBasis()
            for s in srcs.tolist():
                v = cols.get(s)
                if v:
                    basis.add(v)
            self._cache[key] = (basis, pos)
        return self._cache[key]

    def d_rank(self) -> int:
        return self._image_basis(0)[0].rank + self._image_basis(1)[0].rank

    def homology_rank(self) -> int:
        """Rank of homology over F2[U, U^-1]."""
        return self.n - 2 * self.d_rank()

    def is_boundary(self, chain: Iterable[int]) -> bool:
        chain = list(chain)
        if not chain:
            return True
        parity = int(self.gr[chain[0]]) % 2
        if any(int(self.gr[k]) % 2 != parity for k in chain):
            raise ValueError("chain mixes grading parities")
        basis, pos = self._image_basis(parity)
        return gf2.bits(int(pos[k]) for k in chain) in basis

    def represents_generator(self, chain: Iterable[int]) -> bool:
        """True iff ``chain`` is a cycle that is nonzero in homology.

        For complexes with rank-1 homology that is the same as generating it.
        """
        chain = list(chain)
        return bool(chain) and self.is_cycle(chain) and not self.is_boundary(chain)

    def generator_cycle(self) -> Tuple[int, ...]:
        """A cycle generating homology (verified hint, else computed)."""
        if "generator" in self._cache:
            return self._cache["generator"]
        gen = self.generator
        if gen is not None and not self.represents_generator(gen):
            gen = None
        if gen is None:
            gen = self._compute_generator()
        self._cache["generator"] = gen
        return gen

    def _compute_generator(self) -> Tuple[int, ...]:
        for parity in (0, 1):
            srcs = self._parity_order(parity)
            tgt = self._parity_order(1 - parity)
            pos = np.full(self.n, -1, dtype=np.int64)
            pos[tgt] = np.arange(len(tgt))
            cols: Dict[int, int] = {}
            for s, t in zip(self.src.tolist(), self.dst.tolist()):
                if self.gr[s] % 2 == parity:
                    cols[s] = cols.get(s, 0) ^ (1 << int(pos[t]))
            _, ker = gf2.kernel([cols.get(s, 0) for s in srcs.tolist()])
            image, ipos = self._image_basis(parity)
            local = srcs.tolist()
            for z in ker:
                chain = [local[k] for k in gf2.support(z)]
                if gf2.bits(int(ipos[k]) for k in chain) not in image:
                    return tuple(sorted(chain))
        raise InvalidComplexError("rank", "homology is zero; no generator exists")

    def min_filtration_sum(self, grading: int) -> Optional[int]:
        """Minimum of i+j over all translates in ``grading`` (None if empty)."""
        t2 = grading - self.gr
        ok = t2 % 2 == 0
        if not ok.any():
            return None
        return int((self.i + self.j + t2)[ok].min())

    def alexander_top(self) -> int:
        """Largest j among the i=0 translates: top Alexander grading."""
        return int((self.j - self.i).max())

    def hfk_ranks(self) -> Dict[Tuple[int, int], int]:
        """Ranks of the i=0 associated graded, keyed by (j, grading).

        For a reduced complex the associated graded has zero differential, so
        this just counts the i=0 translates.
        """
        out: Dict[Tuple[int, int], int] = {}
        for a, g in zip((self.j - self.i).tolist(), (self.gr - 2 * self.i).tolist()):
            out[(a, g)] = out.get((a, g), 0) + 1
        return dict(sorted(out.items()))


# ---- validation ---------------------------------------------------------------

@dataclass
class ValidationReport:
    name: str
    checks: Dict[str, bool] = field(default_factory=dict)
    failure: Optional[str] = None
    homology_rank: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.failure is None and all(self.checks.values())

    def raise_if_failed(self) -> None:
        if not self.ok:
            check = next((k for k, v in self.checks.items() if not v), "unknown")
            raise InvalidComplexError(check, self.failure or "failed")

    def __str__(self) -> str:
        lines = [f"{self.name}: {'pass' if self.ok else 'FAIL'}"]
        lines += [f"  {k}: {'pass' if v else 'FAIL'}" for k, v in self.checks.items()]
        if self.failure:
            lines.append(f"  first violation: {self.failure}")
        return "\n".join(lines)


def _d_squared_violation(c: BifilteredComplex) -> Optional[Tuple[int, int]]:
    if not len(c.src):
        return None
    ones = np.ones(len(c.src), dtype=np.int64)
    D = sp.csr_matrix((ones, (c.dst, c.src)), shape=(c.n, c.n))
    D2 = (D @ D).tocoo()
    odd = D2.data % 2 == 1
    if not odd.any():
        return None
    k = int(np.nonzero(odd)[0][0])
    return int(D2.col[k]), int(D2.row[k])


def validate(c: BifilteredComplex, check_rank: bool = True) -> ValidationReport:
    """Check the grading law, strict filtration drop, d^2 = 0 and rank-1 homology.

    Stops at the first failing check and names the offending entry.
    """
    rep = ValidationReport(c.name)
    ids = c.ids

    rep.checks["ids"] = len(set(ids)) == len(ids)
    if not rep.checks["ids"]:
        seen = set()
        dup = next(x for x in ids if x in seen or seen.add(x))
        rep.failure = f"duplicate basis id {dup!r}"
        return rep

    def entry(k):
        return f"{ids[c.src[k]]} -> U^{c.upow[k]} {ids[c.dst[k]]}"

    pairs = set()
    for k, (s, t) in enumerate(zip(c.src.tolist(), c.dst.tolist())):
        if (s, t) in pairs or c.upow[k] < 0:
            rep.checks["entries"] = False
            rep.failure = f"duplicate or negative-power entry {entry(k)}"
            return rep
        pairs.add((s, t))
    rep.checks["entries"] = True

    bad = np.nonzero(c.gr[c.dst] - 2 * c.upow != c.gr[c.src] - 1)[0]
    rep.checks["grading"] = not len(bad)
    if len(bad):
        rep.failure = f"grading law violated by {entry(int(bad[0]))}"
        return rep

    ti, tj = c.i[c.dst] - c.upow, c.j[c.dst] - c.upow
    si, sj = c.i[c.src], c.j[c.src]
    bad = np.nonzero(~((ti <= si) & (tj <= sj) & ((ti < si) | (tj < sj))))[0]
    rep.checks["filtration"] = not len(bad)
    if len(bad):
        rep.failure = f"filtration not strictly lowered by {entry(int(bad[0]))}"
        return rep

    v = _d_squared_violation(c)
    rep.checks["d_squared"] = v is None
    if v is not None:
        rep.failure = f"d^2 != 0: {ids[v[0]]} reaches {ids[v[1]]} an odd number of times"
        return rep

    if check_rank:
        r = c.homology_rank()
        rep.homology_rank = r
        rep.checks["rank"] = r == 1
        if r != 1:
            rep.failure = f"homology over F2[U,U^-1] has rank {r}, expected 1"
    return rep


# ---- operations ---------------------------------------------------------------

def unknot() -> BifilteredComplex:
    return BifilteredComplex("unknot", ["u"], [0], [0], [0], genus=0, generator=[0])


def tensor(a: BifilteredComplex, b: BifilteredComplex, name: Optional[str] = None) -> BifilteredComplex:
    """Filtered tensor product over F2[U, U^-1] (Leibniz rule, no signs).

    Basis element ``(x, y)`` gets id ``"x|y"``, so nested products flatten
    and the product is strictly associative on ids.
    """
    na, nb = a.n, b.n
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    ids = [f"{x}|{y}" for x in a.ids for y in b.ids]

    ea = len(a.src)
    eb = len(b.src)
    # d(x) (x) y for every y
    s1 = (a.src[:, None] * nb + np.arange(nb)[None, :]).reshape(-1)
    t1 = (a.dst[:, None] * nb + np.arange(nb)[None, :]).reshape(-1)
    u1 = np.repeat(a.upow, nb)
    # x (x) d(y) for every x
    s2 = (np.arange(na)[:, None] * nb + b.src[None, :]).reshape(-1)
    t2 = (np.arange(na)[:, None] * nb + b.dst[None, :]).reshape(-1)
    u2 = np.tile(b.upow, na)
    src = np.concatenate([s1, s2]) if ea + eb else np.zeros(0, dtype=np.int64)
    dst = np.concatenate([t1, t2]) if ea + eb else np.zeros(0, dtype=np.int64)
    upow = np.concatenate([u1, u2]) if ea + eb else np.zeros(0, dtype=np.int64)
    order = np.lexsort((dst, src))

    genus = None if a.genus is None or b.genus is None else a.genus + b.genus
    generator = None
    if a.generator is not None and b.generator is not None:
        generator = [x * nb + y for x in a.generator for y in b.generator]
    return BifilteredComplex(
        name or f"{a.name} # {b.name}",
        ids,
        a.gr[ia] + b.gr[ib],
        a.i[ia] + b.i[ib],
        a.j[ia] + b.j[ib],
        src[order],
        dst[order],
        upow[order],
        genus=genus,
        generator=generator,
    )


def tensor_power(c: BifilteredComplex, k: int) -> BifilteredComplex:
    if k < 0:
        raise ValueError("tensor power must be nonnegative")
    out = unknot()
    for step in range(k):
        out = c if step == 0 else tensor(out, c)
    if k > 1:
        out.name = f"{k}*({c.name})"
    return out


def transpose(c: BifilteredComplex) -> BifilteredComplex:
    """Swap the two filtrations; gradings and arrows are unchanged."""
    name = c.name[:-2] if c.name.endswith("^t") else c.name + "^t"
    return BifilteredComplex(
        name, c.ids, c.gr, c.j, c.i, c.src, c.dst, c.upow,
        genus=c.genus, generator=c.generator,
    )


# ---- JSON ---------------------------------------------------------------------

def to_json(c: BifilteredComplex) -> str:
    """Canonical JSON text: one basis element / arrow per line."""
    d = json.dumps
    lines = ["{", f'  "name": {d(c.name, ensure_ascii=False)},', '  "basis": [']
    items = [
        f'    {{"id": {d(x, ensure_ascii=False)}, "gr": {int(g)}, "i": {int(a)}, "j": {int(b)}}}'
        for x, g, a, b in zip(c.ids, c.gr, c.i, c.j)
    ]
    lines.append(",\n".join(items))
    lines.append("  ],")
    lines.append('  "diff": [')
    items = [
        f'    {{"src": {d(c.ids[s], ensure_ascii=False)}, "dst": {d(c.ids[t], ensure_ascii=False)}, "u": {int(u)}}}'
        for s, t, u in zip(c.src, c.dst, c.upow)
    ]
    if items:
        lines.append(",\n".join(items))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_json(text: str) -> BifilteredComplex:
    obj = json.loads(text)
    try:
        basis = [BasisElement(str(b["id"]), int(b["gr"]), (int(b["i"]), int(b["j"])))
                 for b in obj["basis"]]
        diff = [DifferentialEntry(str(e["src"]), str(e["dst"]), int(e["u"]))
                for e in obj.get("diff", [])]
        name = str(obj.get("name", "complex"))
    except (KeyError, TypeError) as exc:
        raise InvalidComplexError("schema", f"malformed complex JSON ({exc})") from None
    return BifilteredComplex.from_elements(name, basis, diff)
