"""Metabolizers of (Z/p^2)^n and the relations they force among d-bar values.

Elements of (Z/p^2)^n are tuples of ints in [0, p^2).  Subgroups are stored by
the Hermite normal form of the lattice L with p^2 Z^n <= L <= Z^n they lift to,
which gives a canonical, lexicographically ordered enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from .errors import BudgetExceededError, PreconditionError

Vector = Tuple[int, ...]
DEFAULT_BUDGET = 10**7


# ---- linking forms ----------------------------------------------------------------

@dataclass(frozen=True)
class LinkingForm:
    """Diagonal form lambda(a, b) = sum eps_i a_i b_i / p^2 in Q/Z."""

    p: int
    signs: Tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise PreconditionError("linking form signs must be +1 or -1")

    @classmethod
    def parse(cls, p: int, spec: str) -> "LinkingForm":
        if not spec or any(ch not in "+-" for ch in spec):
            raise PreconditionError(f"form must be a string of '+'/'-', got {spec!r}")
        return cls(p, tuple(1 if ch == "+" else -1 for ch in spec))

    @property
    def n(self) -> int:
        return len(self.signs)

    def value(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        num = sum(s * x * y for s, x, y in zip(self.signs, a, b))
        return Fraction(num % (self.p * self.p), self.p * self.p)

    def vanishes(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.value(a, b) == 0

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


# ---- subgroups ----------------------------------------------------------------------

def span(gens: Iterable[Sequence[int]], modulus: int, n: int) -> FrozenSet[Vector]:
    """All Z-combinations of ``gens`` modulo ``modulus``."""
    elems = {tuple([0] * n)}
    for g in gens:
        g = tuple(x % modulus for x in g)
        if not any(g):
            continue
        layer = set(elems)
        step = g
        while step not in elems:
            layer |= {tuple((x + y) % modulus for x, y in zip(e, step)) for e in elems}
            step = tuple((x + y) % modulus for x, y in zip(step, g))
        # closure under adding g
        frontier = set(layer)
        while True:
            new = {tuple((x + y) % modulus for x, y in zip(e, g)) for e in frontier} - layer
            if not new:
                break
            layer |= new
            frontier = new
        elems = layer
    return frozenset(elems)


@dataclass(frozen=True, eq=False)
class Metabolizer:
    """A subgroup of (Z/p^2)^n given by HNF rows (reduced mod p^2)."""

    p: int
    n: int
    hnf: Tuple[Vector, ...]

    @property
    def gens(self) -> Tuple[Vector, ...]:
        m = self.p * self.p
        rows = (tuple(x % m for x in r) for r in self.hnf)
        return tuple(r for r in rows if any(r))

    @property
    def elements(self) -> FrozenSet[Vector]:
        cache = self.__dict__.get("_elements")
        if cache is None:
            cache = span(self.gens, self.p * self.p, self.n)
            object.__setattr__(self, "_elements", cache)
        return cache

    @property
    def order(self) -> int:
        out = 1
        for k, r in enumerate(self.hnf):
            out *= self.p * self.p // r[k]
        return out

    def p_torsion(self) -> List[Vector]:
        """M_p: elements killed by p, sorted."""
        return sorted(e for e in self.elements if all(x % self.p == 0 for x in e))

    def __contains__(self, v) -> bool:
        return tuple(x % (self.p * self.p) for x in v) in self.elements

    def __eq__(self, other) -> bool:
        return isinstance(other, Metabolizer) and (self.p, self.n, self.hnf) == (other.p, other.n, other.hnf)

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.hnf))

    def __repr__(self) -> str:
        return f"Metabolizer(p={self.p}, gens={list(self.gens)})"

    @classmethod
    def from_generators(cls, p: int, gens: Sequence[Sequence[int]]) -> "Metabolizer":
        """Canonical (HNF) form of the subgroup generated by ``gens``."""
        if not gens:
            raise PreconditionError("need at least one generator")
        n = len(gens[0])
        m = p * p
        rows = [list(g) for g in gens] + [[m if a == b else 0 for b in range(n)] for a in range(n)]
        return cls(p, n, tuple(tuple(r) for r in _hnf(rows, n)))


def _hnf(rows: List[List[int]], n: int) -> List[List[int]]:
    """Upper-triangular row HNF of a full-rank integer lattice in Z^n."""
    rows = [list(r) for r in rows]
    out = []
    for col in range(n):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                f = r[col] // piv[col]
                r = [x - f * y for x, y in zip(r, piv)]
                (nxt if r[col] else rest).append(r)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        rows = rest
    for c in range(n):
        for r in range(c):
            f = out[r][c] // out[c][c]
            out[r] = [x - f * y for x, y in zip(out[r], out[c])]
    return out


def _in_lattice(v: Sequence[int], H: Sequence[Sequence[int]]) -> bool:
    v = list(v)
    for k, r in enumerate(H):
        c, rem = divmod(v[k], r[k])
        if rem:
            return False
        if c:
            v = [x - c * y for x, y in zip(v, r)]
    return True


def subgroups_of_order(p: int, n: int, order: int, budget: int = DEFAULT_BUDGET) -> List[Metabolizer]:
    """All subgroups of (Z/p^2)^n of the given order, in lexicographic HNF order."""
    m = p * p
    index = m**n // order
    if m**n % order:
        return []
    if m * order > budget:
        raise BudgetExceededError(f"p^2 * |M| = {m * order} exceeds budget {budget}")
    out = []
    for diag in itertools.product((1, p, m), repeat=n):
        prod = 1
        for d in diag:
            prod *= d
        if prod != index:
            continue
        slots = [(r, c) for r in range(n) for c in range(r + 1, n)]
        ranges = [range(diag[c]) for _, c in slots]
        for vals in itertools.product(*ranges):
            H = [[0] * n for _ in range(n)]
            for k in range(n):
                H[k][k] = diag[k]
            for (r, c), v in zip(slots, vals):
                H[r][c] = v
            if all(_in_lattice([m if a == b else 0 for b in range(n)], H) for a in range(n)):
                out.append(Metabolizer(p, n, tuple(tuple(r) for r in H)))
    out.sort(key=lambda M: M.hnf)
    return out


def is_metabolizer(M: Metabolizer, form: LinkingForm) -> bool:
    gens = M.gens
    return all(form.vanishes(a, b) for a, b in itertools.combinations_with_replacement(gens, 2))


def enumerate_metabolizers(p: int, n: int, form: Optional[LinkingForm] = None,
                           budget: int = DEFAULT_BUDGET) -> List[Metabolizer]:
    """Subgroups of order p^n of (Z/p^2)^n on which the linking form vanishes."""
    if n < 1 or n > 3:
        raise BudgetExceededError("enumeration supports 1 <= n <= 3")
    if p * p * p**n > budget:
        raise BudgetExceededError(f"p^2 * p^n = {p * p * p**n} exceeds budget {budget}")
    form = form or LinkingForm(p, (1,) * n)
    if form.n != n:
        raise PreconditionError("form rank does not match n")
    return [M for M in subgroups_of_order(p, n, p**n, budget) if is_metabolizer(M, form)]


# ---- special vectors ---------------------------------------------------------------

@dataclass
class SpecialVector:
    z: Vector
    pivots: List[int]          # columns where z has entry p, in pivot order
    permutation: List[int]     # pivot columns first, then the rest
    unit_pivots: int
    p_pivots: int


def special_vector(M: Metabolizer) -> SpecialVector:
    """An element of M with all entries divisible by p and >= n/2 entries equal to p.

    Gauss-Jordan over Z/p^2, pivoting on unit entries first and on entries of
    valuation one afterwards; then scale the unit rows by p, clear them in the
    valuation-one pivot columns, and add everything up.
    """
    p, n = M.p, M.n
    mod = p * p
    rows = [list(r) for r in M.gens]
    used_rows, used_cols = set(), set()
    unit_piv: List[Tuple[int, int]] = []

    def first_entry(pred):
        for r in range(len(rows)):
            if r in used_rows:
                continue
            for c in range(n):
                if c not in used_cols and pred(rows[r][c]):
                    return r, c
        return None

    def eliminate(r, c, step):
        for r2 in range(len(rows)):
            if r2 != r and rows[r2][c] % mod:
                f = rows[r2][c] // step if step == p else rows[r2][c]
                rows[r2] = [(x - f * y) % mod for x, y in zip(rows[r2], rows[r])]

    while (hit := first_entry(lambda x: x % p != 0)) is not None:
        r, c = hit
        inv = pow(rows[r][c], -1, mod)
        rows[r] = [(x * inv) % mod for x in rows[r]]
        eliminate(r, c, 1)
        used_rows.add(r)
        used_cols.add(c)
        unit_piv.append((r, c))

    p_piv: List[Tuple[int, int]] = []
    while (hit := first_entry(lambda x: x % mod != 0)) is not None:
        r, c = hit
        inv = pow(rows[r][c] // p, -1, p)
        rows[r] = [(x * inv) % mod for x in rows[r]]
        # only rows whose entries are all multiples of p may be cleared here
        for r2 in range(len(rows)):
            if r2 != r and r2 not in {u for u, _ in unit_piv} and rows[r2][c]:
                f = rows[r2][c] // p
                rows[r2] = [(x - f * y) % mod for x, y in zip(rows[r2], rows[r])]
        used_rows.add(r)
        used_cols.add(c)
        p_piv.append((r, c))

    if 2 * len(unit_piv) + len(p_piv) != n:
        raise PreconditionError(
            f"subgroup has order p^{2 * len(unit_piv) + len(p_piv)}, expected p^{n}"
        )

    z = [0] * n
    for r, c in unit_piv:
        w = [(p * x) % mod for x in rows[r]]
        for r2, c2 in p_piv:
            f = (w[c2] // p) % p
            if f:
                w = [(x - f * y) % mod for x, y in zip(w, rows[r2])]
        z = [(a + b) % mod for a, b in zip(z, w)]
    for r, _ in p_piv:
        z = [(a + b) % mod for a, b in zip(z, rows[r])]

    pivots = [c for _, c in unit_piv] + [c for _, c in p_piv]
    rest = [c for c in range(n) if c not in pivots]
    return SpecialVector(tuple(z), pivots, pivots + rest, len(unit_piv), len(p_piv))


# ---- psi and rho ---------------------------------------------------------------------

def fold(x: int, p: int) -> int:
    """Representative in 0..(p-1)/2 of x modulo +-1 (mod p)."""
    x %= p
    return min(x, p - x)


def psi(m: Sequence[int], p: int) -> Tuple[int, ...]:
    """Counts alpha_j of coordinates m_i/p congruent to +-j mod p, j = 1..(p-1)/2."""
    q = (p - 1) // 2
    if any(x % p for x in m):
        raise PreconditionError("psi needs an element killed by p (all entries divisible by p)")
    alpha = [0] * q
    for x in m:
        j = fold((x % (p * p)) // p, p)
        if j:
            alpha[j - 1] += 1
    return tuple(alpha)


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise PreconditionError(f"{a} is not a unit mod {p}")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def primitive_root(p: int) -> int:
    """Smallest generator of Z_p^*."""
    for a in range(2, p):
        if multiplicative_order(a, p) == p - 1:
            return a
    if p == 2:
        return 1
    raise PreconditionError(f"no primitive root mod {p}")


@dataclass(frozen=True)
class RhoPermutation:
    p: int
    a: int
    sigma: Mapping[int, int]   # j -> fold(a*j), on 1..q
    cycle: Tuple[int, ...]     # orbit of 1: 1, fold(a), fold(a^2), ...

    @property
    def q(self) -> int:
        return (self.p - 1) // 2

    def apply(self, alpha: Sequence) -> tuple:
        """rho on Q^q: the coefficient of d-bar_j moves to d-bar_{sigma(j)}."""
        out = [0] * self.q
        for j, v in enumerate(alpha, start=1):
            out[self.sigma[j] - 1] = v
        return tuple(out)

    def t_coefficients(self, alpha: Sequence) -> List:
        """alpha in the t-power basis: t^i <-> d-bar_{fold(a^i)}."""
        return [alpha[j - 1] for j in self.cycle]


def rho_permutation(p: int, a: Optional[int] = None) -> RhoPermutation:
    """Cyclic permutation of {1..q} induced by multiplication by a mod +-1."""
    if p < 3 or p % 2 == 0:
        raise PreconditionError("rho needs an odd prime")
    q = (p - 1) // 2
    a = primitive_root(p) if a is None else a % p
    if a == 0 or multiplicative_order(a, p) != p - 1:
        raise PreconditionError(f"{a} does not generate Z_{p}^*")
    sigma = {j: fold(a * j, p) for j in range(1, q + 1)}
    cycle = [1]
    while len(cycle) < q:
        cycle.append(sigma[cycle[-1]])
    if sigma[cycle[-1]] != 1 or len(set(cycle)) != q:
        raise PreconditionError(f"multiplication by {a} is not a {q}-cycle")
    return RhoPermutation(p, a, sigma, tuple(cycle))


# ---- rational linear algebra and group ring ----------------------------------------

def rational_rank(rows: Iterable[Sequence]) -> int:
    mat = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pr = mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col] / pr[col]
                mat[r] = [x - f * y for x, y in zip(mat[r], pr)]
        rank += 1
    return rank


_t = sympy.Symbol("t")


def cyclotomic_gcd(coeffs: Sequence[int], q: int) -> sympy.Poly:
    """gcd(f(t), t^q - 1) in Q[t], monic; f given by ascending coefficients."""
    f = sympy.Poly(list(reversed([int(c) for c in coeffs])), _t, domain="QQ")
    g = sympy.Poly(_t**q - 1, _t, domain="QQ")
    return sympy.gcd(f, g).monic()


def orbit_rank(coeffs: Sequence[int], q: int) -> int:
    """Rank over Q of the q cyclic shifts of a coefficient vector."""
    coeffs = list(coeffs) + [0] * (q - len(coeffs))
    rows = [coeffs[-k:] + coeffs[:-k] if k else list(coeffs) for k in range(q)]
    return rational_rank(rows)


@dataclass
class SpanCertificate:
    full: bool
    q: int
    z: Vector
    psi_z: Tuple[int, ...]
    f_coeffs: List[int]
    gcd: str
    orbit_rank: int
    relation_rank: int

    @property
    def deciders_agree(self) -> bool:
        return (self.orbit_rank == self.q) == (self.gcd == "1")


def group_ring_coprime(coeffs: Sequence[int], q: int) -> Tuple[bool, bool, str]:
    """Is sum c_i t^i a unit in Q[t]/(t^q - 1)?  Returns (by rank, by gcd, gcd)."""
    g = cyclotomic_gcd(coeffs, q)
    return orbit_rank(coeffs, q) == q, g.degree() == 0, str(g.as_expr())


def relation_span_is_full(M: Metabolizer, p: int, a: Optional[int] = None) -> SpanCertificate:
    """Do the relations coming from M_p span all of Q^q?

    Decided by the rank of the relation matrix (rho-orbit of psi(z) plus psi of
    every p-torsion element) and cross-checked against gcd(f_z, t^q - 1).
    """
    q = (p - 1) // 2
    rho = rho_permutation(p, a)
    z = special_vector(M).z
    alpha = psi(z, p)
    orbit = [alpha]
    for _ in range(q - 1):
        orbit.append(rho.apply(orbit[-1]))
    f = rho.t_coefficients(alpha)
    g = cyclotomic_gcd(f, q)
    rows = orbit + [psi(m, p) for m in M.p_torsion()]
    cert = SpanCertificate(
        full=rational_rank(rows) == q,
        q=q,
        z=z,
        psi_z=alpha,
        f_coeffs=list(f),
        gcd=str(g.as_expr()),
        orbit_rank=rational_rank(orbit),
        relation_rank=rational_rank(rows),
    )
    if not cert.deciders_agree:
        raise ArithmeticError("rank and gcd deciders disagree")
    return cert


# ---- the obstruction check --------------------------------------------------------------

def _dbar_lookup(dbar: Mapping[int, Fraction], label: int, p: int) -> Optional[Fraction]:
    mod = p * p
    x = label % mod
    x = min(x, mod - x)
    return dbar.get(x)


@dataclass
class MetabolizerVerdict:
    metabolizer: Metabolizer
    relation_rank: int
    forces_zero: bool
    consistent: Optional[bool] = None
    violated: Optional[Vector] = None

    def to_dict(self) -> dict:
        out = {
            "generators": [list(g) for g in self.metabolizer.gens],
            "relation_rank": self.relation_rank,
            "forces_zero": self.forces_zero,
        }
        if self.consistent is not None:
            out["consistent"] = self.consistent
            out["violated_by"] = None if self.violated is None else list(self.violated)
        return out


@dataclass
class AppendixVerdict:
    p: int
    n: int
    form: str
    q: int
    metabolizers: List[MetabolizerVerdict] = field(default_factory=list)
    verdict: Optional[str] = None

    @property
    def all_force_zero(self) -> bool:
        return all(v.forces_zero for v in self.metabolizers)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "form": self.form,
            "q": self.q,
            "all_force_zero": self.all_force_zero,
            "verdict": self.verdict,
            "metabolizers": [v.to_dict() for v in self.metabolizers],
        }


def verify_appendix_theorem(p: int, n: int, form: Optional[LinkingForm] = None,
                            dbar: Optional[Mapping[int, Fraction]] = None,
                            budget: int = DEFAULT_BUDGET) -> AppendixVerdict:
    """Check every metabolizer of (Z/p^2)^n against the vanishing of d-bar.

    ``dbar`` maps Spin^c labels (0 <= m <= (p^2-1)/2) to d-bar of the single
    summand; labels are folded by conjugation symmetry.  Each element of M
    whose labels are all tabulated imposes sum_i d-bar(m_i) = 0.
    """
    form = form or LinkingForm(p, (1,) * n)
    q = (p - 1) // 2
    out = AppendixVerdict(p, n, str(form), q)
    for M in enumerate_metabolizers(p, n, form, budget):
        rows = [psi(m, p) for m in M.p_torsion()]
        rank = rational_rank(rows)
        v = MetabolizerVerdict(M, rank, rank == q)
        if dbar is not None:
            v.consistent = True
            for m in sorted(M.elements):
                vals = [_dbar_lookup(dbar, x, p) for x in m]
                if any(x is None for x in vals):
                    continue
                if sum(vals) != 0:
                    v.consistent = False
                    v.violated = m
                    break
        out.metabolizers.append(v)
    if dbar is not None:
        nonzero = any(_dbar_lookup(dbar, p * k, p) not in (None, 0) for k in range(1, q + 1))
        if any(v.consistent for v in out.metabolizers):
            out.verdict = "unobstructed"
        elif nonzero:
            out.verdict = "obstructed"
        else:
            out.verdict = "inconclusive"
    return out
