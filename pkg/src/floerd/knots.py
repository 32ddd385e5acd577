"""Model complexes: L-space staircases, the doubled trefoil, and L_p.

Staircase generators are normalized to ``i = 0``: generator ``x_s`` sits at
``(0, n_s)`` with grading ``delta_s`` where ``n_s`` runs over the exponents of
the Alexander polynomial with nonzero coefficient.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import gf2
from .complex import (
    BasisElement,
    BifilteredComplex,
    DifferentialEntry,
    tensor,
)
from .errors import PreconditionError, SizeGuardError

DEFAULT_MAX_GENERATORS = 500_000


def max_generators() -> int:
    raw = os.environ.get("FLOERD_MAX_GENERATORS")
    return int(raw) if raw else DEFAULT_MAX_GENERATORS


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


# ---- Alexander polynomials ------------------------------------------------------

@dataclass(frozen=True)
class AlexanderPoly:
    """Symmetric Laurent polynomial with Delta(1) = 1, as {exponent: coeff}."""

    coeffs: Mapping[int, int]

    def __post_init__(self):
        clean = {int(e): int(a) for e, a in self.coeffs.items() if a}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        for e, a in clean.items():
            if clean.get(-e, 0) != a:
                raise PreconditionError(f"coefficients of t^{e} and t^{-e} differ")
        if sum(clean.values()) != 1:
            raise PreconditionError("Alexander polynomial must evaluate to 1 at t=1")

    @property
    def genus(self) -> int:
        return max(self.coeffs)

    def exponents(self) -> List[int]:
        return list(self.coeffs)

    def __call__(self, t):
        return sum(a * t**e for e, a in self.coeffs.items())

    def __str__(self) -> str:
        terms = []
        for e, a in sorted(self.coeffs.items(), reverse=True):
            mono = "1" if e == 0 else ("t" if e == 1 else f"t^{e}")
            coef = "" if (abs(a) == 1 and e != 0) else str(abs(a))
            terms.append(("-" if a < 0 else "+") + " " + (coef + mono if e else str(abs(a))))
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else s


def _polymul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for x, ca in enumerate(a):
        if ca:
            for y, cb in enumerate(b):
                out[x + y] += ca * cb
    return out


def _polydiv_exact(num: List[int], den: List[int]) -> List[int]:
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    lead = den[-1]
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c, r = divmod(num[k + len(den) - 1], lead)
        if r:
            raise ArithmeticError("inexact polynomial division")
        q[k] = c
        for m, d in enumerate(den):
            num[k + m] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


def _binomial_minus_one(deg: int) -> List[int]:
    return [-1] + [0] * (deg - 1) + [1]


def torus_alexander(p: int) -> AlexanderPoly:
    """Alexander polynomial of the (p-1, p) torus knot, p odd."""
    if p < 3 or p % 2 == 0:
        raise PreconditionError(f"torus_alexander needs odd p >= 3, got {p}")
    num = _polymul(_binomial_minus_one((p - 1) * p), _binomial_minus_one(1))
    den = _polymul(_binomial_minus_one(p - 1), _binomial_minus_one(p))
    poly = _polydiv_exact(num, den)
    g = (p - 2) * (p - 1) // 2
    if len(poly) - 1 != 2 * g:
        raise ArithmeticError("unexpected degree")
    return AlexanderPoly({e - g: a for e, a in enumerate(poly) if a})


# ---- staircases ----------------------------------------------------------------

@dataclass(frozen=True)
class StaircaseData:
    exponents: Tuple[int, ...]  # n_{-k} < ... < n_k
    deltas: Tuple[int, ...]     # delta_s aligned with exponents

    def __post_init__(self):
        ex, de = self.exponents, self.deltas
        if len(ex) != len(de) or len(ex) % 2 == 0:
            raise PreconditionError("need an odd number of exponents with one delta each")
        if any(b <= a for a, b in zip(ex, ex[1:])):
            raise PreconditionError("exponents must be strictly increasing")
        if any(a != -b for a, b in zip(ex, reversed(ex))):
            raise PreconditionError("exponent sequence must be symmetric")
        if de[-1] != 0:
            raise PreconditionError("top delta must be 0")

    @property
    def k(self) -> int:
        return len(self.exponents) // 2

    def n(self, s: int) -> int:
        return self.exponents[s + self.k]

    def delta(self, s: int) -> int:
        return self.deltas[s + self.k]


def gaps_and_deltas(poly: AlexanderPoly) -> StaircaseData:
    """Exponents and gradings of the staircase of an L-space knot.

    Even offsets from the top: delta_{k-2l} = -2 sum_{j<2l} (-1)^j n_{k-j};
    odd offsets: delta_{k-2l-1} = delta_{k-2l-2} + 1.
    """
    items = sorted(poly.coeffs.items())
    ex = [e for e, _ in items]
    co = [a for _, a in items]
    if len(ex) % 2 == 0:
        raise PreconditionError("L-space knot polynomials have an odd number of terms")
    if any(abs(a) != 1 for a in co):
        raise PreconditionError("L-space knot polynomials have coefficients +-1")
    if co[-1] != 1 or any(a == b for a, b in zip(co, co[1:])):
        raise PreconditionError("coefficients must alternate in sign, starting from +1 at the top")
    k = len(ex) // 2

    def n(s):
        return ex[s + k]

    deltas: Dict[int, int] = {}
    for l in range(k + 1):
        deltas[k - 2 * l] = -2 * sum((-1) ** j * n(k - j) for j in range(2 * l))
    for l in range(k):
        deltas[k - 2 * l - 1] = deltas[k - 2 * l - 2] + 1
    return StaircaseData(tuple(ex), tuple(deltas[s] for s in range(-k, k + 1)))


def staircase_complex(sd: StaircaseData, name: str = "staircase") -> BifilteredComplex:
    """The staircase complex: x_s at (0, n_s), grading delta_s.

    Generators at odd offset from the top have two outgoing arrows, to their
    neighbours; the U-powers are forced by the grading law.
    """
    k = sd.k
    basis = [BasisElement(f"x{s}", sd.delta(s), (0, sd.n(s))) for s in range(-k, k + 1)]
    diff = []
    for s in range(-k, k + 1):
        if (k - s) % 2 == 0:
            continue
        for nb in (s + 1, s - 1):
            twice = sd.delta(nb) - sd.delta(s) + 1
            if twice % 2 or twice < 0:
                raise PreconditionError(
                    f"inconsistent deltas: arrow x{s} -> x{nb} would need U^{twice}/2"
                )
            diff.append(DifferentialEntry(f"x{s}", f"x{nb}", twice // 2))
    return BifilteredComplex.from_elements(
        name, basis, diff, genus=sd.n(k), generator=[2 * k]
    )


def torus_staircase(p: int) -> BifilteredComplex:
    """Staircase complex of T(p-1, p)."""
    return staircase_complex(gaps_and_deltas(torus_alexander(p)), f"T({p - 1},{p})")


# ---- doubled trefoil --------------------------------------------------------------

def _box(prefix: str, filt: Tuple[int, int], gr: int):
    i1, j1 = filt
    basis = [
        BasisElement(f"{prefix}1", gr, (i1, j1)),
        BasisElement(f"{prefix}2", gr - 1, (i1 - 1, j1)),
        BasisElement(f"{prefix}3", gr - 1, (i1, j1 - 1)),
        BasisElement(f"{prefix}4", gr - 2, (i1 - 1, j1 - 1)),
    ]
    diff = [
        DifferentialEntry(f"{prefix}1", f"{prefix}2", 0),
        DifferentialEntry(f"{prefix}1", f"{prefix}3", 0),
        DifferentialEntry(f"{prefix}2", f"{prefix}4", 0),
        DifferentialEntry(f"{prefix}3", f"{prefix}4", 0),
    ]
    return basis, diff


def doubled_trefoil_model() -> BifilteredComplex:
    """15-generator model of the doubled trefoil: a trefoil staircase plus three boxes."""
    basis = [
        BasisElement("t+", 0, (0, 1)),
        BasisElement("t0", -1, (0, 0)),
        BasisElement("t-", -2, (0, -1)),
    ]
    diff = [DifferentialEntry("t0", "t+", 1), DifferentialEntry("t0", "t-", 0)]
    for prefix, gr in (("A", -1), ("B", -2), ("C", -2)):
        b, d = _box(prefix, (0, 0), gr)
        basis += b
        diff += d
    return BifilteredComplex.from_elements("D(T(2,3))", basis, diff, genus=1, generator=[0])


# ---- structural checks ------------------------------------------------------------

def generator_cycle_at(c: BifilteredComplex, grading: int, filt: Tuple[int, int]) -> Optional[List[int]]:
    """A cycle supported at one filtration level that generates homology.

    Searches the kernel of d restricted to the translates sitting exactly at
    ``filt`` in ``grading``; returns basis indices or None.
    """
    cand = c.chain_at(grading, filt)
    if not cand:
        return None
    cols = [gf2.bits(c.boundary([k])) for k in cand]
    _, ker = gf2.kernel(cols)
    for z in ker:
        chain = [cand[k] for k in gf2.support(z)]
        if not c.is_boundary(chain):
            return chain
    return None


@dataclass
class ConstraintReport:
    name: str
    bullets: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.bullets.values())

    @property
    def failure(self) -> Optional[str]:
        return next((k for k, v in self.bullets.items() if not v), None)

    def __str__(self) -> str:
        lines = [f"{self.name}: {'pass' if self.ok else 'FAIL'}"]
        for k, v in self.bullets.items():
            lines.append(f"  {k}: {'pass' if v else 'FAIL'} {self.details.get(k, '')}".rstrip())
        return "\n".join(lines)


def _bounds_report(c, name, bound0, bound1, cycles) -> ConstraintReport:
    rep = ConstraintReport(name)
    m0 = c.min_filtration_sum(0)
    m1 = c.min_filtration_sum(1)
    rep.bullets["grading0_bound"] = m0 is None or m0 >= bound0
    rep.details["grading0_bound"] = f"min i+j = {m0}, need >= {bound0}"
    rep.bullets["grading1_bound"] = m1 is None or m1 >= bound1
    rep.details["grading1_bound"] = f"min i+j = {m1}, need >= {bound1}"
    for filt in cycles:
        key = f"cycle_at_{filt[0]}_{filt[1]}"
        chain = generator_cycle_at(c, 0, filt)
        rep.bullets[key] = chain is not None
        rep.details[key] = "" if chain is None else "[" + ", ".join(c.ids[k] for k in chain) + "]"
    return rep


def check_double_constraints(c: BifilteredComplex) -> ConstraintReport:
    """Doubled-trefoil properties: grading-0 chains have i+j >= 1, grading-1
    chains i+j >= 2, and generating cycles exist at (0,1) and (1,0)."""
    return _bounds_report(c, c.name, 1, 2, [(0, 1), (1, 0)])


def torus_bounds(p: int) -> Tuple[int, int, Tuple[int, int]]:
    """Grading-0 bound, grading-1 bound and special cycle filtration for T(p-1,p)."""
    return (
        (p * p - 2 * p + 1) // 4,
        (p * p - 1) // 4,
        ((p * p - 4 * p + 3) // 8, (p * p - 1) // 8),
    )


def check_torus_constraints(c: BifilteredComplex, p: int) -> ConstraintReport:
    b0, b1, cyc = torus_bounds(p)
    return _bounds_report(c, c.name, b0, b1, [cyc])


# ---- L_p ----------------------------------------------------------------------------

def lp_generator_count(p: int) -> int:
    return (2 * p - 3) * 15 ** ((3 * p - 1) // 2)


def lp_complex(p: int, allow_large: bool = False) -> BifilteredComplex:
    """T(p-1,p) # (3p-1)/2 copies of the doubled trefoil, as a tensor product."""
    if not is_prime(p) or p % 4 != 3:
        raise PreconditionError(f"L_p needs a prime p = 3 mod 4, got {p}")
    count = lp_generator_count(p)
    if not allow_large and (p > 3 or count > max_generators()):
        raise SizeGuardError(count, max_generators(), f"L_{p}")
    out = torus_staircase(p)
    dt = doubled_trefoil_model()
    copies = (3 * p - 1) // 2
    for _ in range(copies):
        out = tensor(out, dt)
    out.name = f"L_{p}"
    out.genus = (p * p + 1) // 2
    if out.alexander_top() != out.genus:
        raise ArithmeticError("genus metadata disagrees with the top Alexander grading")
    return out


def lp_special_cycle(c: BifilteredComplex, p: int) -> List[int]:
    """Basis indices of the product cycle in grading 0 of a materialized L_p.

    Tensor of the torus cycle, (p-1)/2 copies of the doubled-trefoil cycle at
    (1,0) and p copies of the one at (0,1); it sits at
    ((p^2-1)/8, (p^2+8p-1)/8).
    """
    t = torus_staircase(p)
    dt = doubled_trefoil_model()
    _, _, cyc = torus_bounds(p)
    right = generator_cycle_at(dt, 0, (1, 0))
    up = generator_cycle_at(dt, 0, (0, 1))
    chains = [[t.ids[k] for k in generator_cycle_at(t, 0, cyc)]]
    chains += [[dt.ids[k] for k in right]] * ((p - 1) // 2)
    chains += [[dt.ids[k] for k in up]] * p
    index = c.index
    return sorted(index["|".join(parts)] for parts in itertools.product(*chains))
