"""Correction terms of large surgeries and the normalized invariant d-bar.

For q >= 2g - 1 and |m| <= (q-1)/2 the Floer complex of q-surgery in label m
is the quotient C{max(i, j-m) >= 0} with gradings shifted by

    s(q, m) = (q - (2m - q)^2) / (4q),

and d is the grading of the bottom of its tower *minus* that shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .complex import BifilteredComplex, validate
from .errors import PreconditionError, WindowTooSmallError
from .knots import is_prime, torus_bounds
from .quotient import TruncatedQuotientComplex, default_window, tower_bottom


def grading_shift(q: int, m: int) -> Fraction:
    if q <= 0:
        raise PreconditionError("surgery coefficient must be positive")
    return Fraction(q - (2 * m - q) ** 2, 4 * q)


@dataclass(frozen=True, eq=False)
class SurgeryProblem:
    complex: BifilteredComplex
    q: int
    m: int
    genus: Optional[int] = None

    def __post_init__(self):
        if self.genus is None:
            g = self.complex.genus
            object.__setattr__(self, "genus", self.complex.alexander_top() if g is None else g)
        if self.q <= 0:
            raise PreconditionError("surgery coefficient must be positive")
        if self.q < 2 * self.genus - 1:
            raise PreconditionError(
                f"large-surgery formula needs q >= 2g-1 = {2 * self.genus - 1}, got q={self.q}"
            )
        if 2 * abs(self.m) > self.q - 1:
            raise PreconditionError(f"label m={self.m} outside |m| <= (q-1)/2 for q={self.q}")


@dataclass
class DResult:
    q: int
    m: int
    d: Fraction
    tower_bottom: int
    shift: Fraction
    window: int
    stable: bool


def compute_d(sp: SurgeryProblem, window: Optional[int] = None, check: bool = True) -> DResult:
    """d(S^3_q(K), s_m) with the window-stability re-check at N+1."""
    c = sp.complex
    if check:
        rep = c._cache.get("validation")
        if rep is None:
            rep = c._cache["validation"] = validate(c)
        rep.raise_if_failed()
    n = default_window(c, sp.m) if window is None else window
    bottom = tower_bottom(TruncatedQuotientComplex(c, sp.m, n))
    again = tower_bottom(TruncatedQuotientComplex(c, sp.m, n + 1))
    if again != bottom:
        raise WindowTooSmallError(
            f"tower bottom moved from {bottom} to {again} when the window grew to {n + 1}"
        )
    shift = grading_shift(sp.q, sp.m)
    return DResult(sp.q, sp.m, bottom - shift, bottom, shift, n, True)


def d_invariant(sp: SurgeryProblem, window: Optional[int] = None) -> Fraction:
    return compute_d(sp, window).d


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


@dataclass
class DBarTable:
    """d and d-bar of S^3_{p^2}(K) by Spin^c label m; d-bar(s_0) = 0."""

    p: int
    q: int
    d: Dict[int, Fraction]
    windows: Dict[int, int] = field(default_factory=dict)

    @property
    def d0(self) -> Fraction:
        return self.d[0]

    @property
    def dbar(self) -> Dict[int, Fraction]:
        return {m: v - self.d0 for m, v in sorted(self.d.items())}

    def indexed(self) -> Dict[int, Fraction]:
        """d-bar at labels p*k keyed by k = 1..(p-1)/2."""
        db = self.dbar
        return {k: db[self.p * k] for k in range(1, (self.p - 1) // 2 + 1) if self.p * k in db}

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "d": {str(m): fmt_rational(v) for m, v in sorted(self.d.items())},
            "dbar": {str(m): fmt_rational(v) for m, v in self.dbar.items()},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "DBarTable":
        p = int(obj["p"])
        q = int(obj.get("q", p * p))
        if "d" in obj:
            d = {int(m): Fraction(v) for m, v in obj["d"].items()}
        else:
            # a bare d-bar table: anchor d(s_0) at 0
            d = {int(m): Fraction(v) for m, v in obj["dbar"].items()}
            d.setdefault(0, Fraction(0))
        return cls(p, q, d)


def dbar_labels(p: int, all_m: bool = False) -> List[int]:
    if all_m:
        return list(range(0, (p * p - 1) // 2 + 1))
    return [0] + [p * k for k in range(1, (p - 1) // 2 + 1)]


def dbar_table(c: BifilteredComplex, p: int, all_m: bool = False,
               window: Optional[int] = None) -> DBarTable:
    q = p * p
    d, windows = {}, {}
    for m in dbar_labels(p, all_m):
        res = compute_d(SurgeryProblem(c, q, m), window)
        d[m] = res.d
        windows[m] = res.window
    return DBarTable(p, q, d, windows)


# ---- symbolic bounds ----------------------------------------------------------------

def dp_min_filtration(factors: Sequence[Dict[int, int]]) -> int:
    """Minimum total i+j over grading-0 tensor chains.

    ``factors[k]`` maps a grading in {-1, 0, 1} to the least i+j of a chain of
    that grading in the k-th factor; gradings must sum to 0.
    """
    best: Dict[int, int] = {0: 0}
    for f in factors:
        nxt: Dict[int, int] = {}
        for total, val in best.items():
            for g, mn in f.items():
                key = total + g
                cand = val + mn
                if cand < nxt.get(key, cand + 1):
                    nxt[key] = cand
        best = nxt
    return best[0]


def torus_factor_minima(p: int) -> Dict[int, int]:
    b0, b1, _ = torus_bounds(p)
    return {-1: (p * p - 9) // 4, 0: b0, 1: b1}


DOUBLE_FACTOR_MINIMA = {-1: 0, 0: 1, 1: 2}


@dataclass
class TheoremBounds:
    p: int
    dp_min: int
    u_power: int
    special_cycle: Tuple[int, int]
    d0_upper: Fraction
    dp_value: Fraction

    @property
    def dbar_lower(self) -> Fraction:
        return self.dp_value - self.d0_upper

    def as_pair(self) -> Tuple[Fraction, Fraction]:
        return self.d0_upper, self.dp_value

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "min_filtration_grading0": self.dp_min,
            "special_cycle": list(self.special_cycle),
            "d0_upper": fmt_rational(self.d0_upper),
            "dp": fmt_rational(self.dp_value),
            "dbar_lower": fmt_rational(self.dbar_lower),
        }


def theorem_bounds(p: int, factor_minima: Optional[Sequence[Dict[int, int]]] = None) -> TheoremBounds:
    """Upper bound on d(s_0) and the value of d(s_p) for p^2-surgery on L_p.

    Works from per-factor filtration minima only; the tensor complex is never
    built.  ``factor_minima`` overrides the closed-form minima (torus factor
    first, then one entry per doubled trefoil).
    """
    if not is_prime(p) or p % 4 != 3:
        raise PreconditionError(f"bounds need a prime p = 3 mod 4, got {p}")
    copies = (3 * p - 1) // 2
    if factor_minima is None:
        factor_minima = [torus_factor_minima(p)] + [DOUBLE_FACTOR_MINIMA] * copies
    dp_min = dp_min_filtration(factor_minima)
    q = p * p

    # U^k theta keeps every term in max(i, j) >= 0 as long as i + j >= -1
    k = (dp_min + 1) // 2
    d0_upper = -2 * k - grading_shift(q, 0)

    _, _, (ti, tj) = torus_bounds(p)
    a = ti + (p - 1) // 2   # (p-1)/2 copies of the (1,0) cycle
    b = tj + p              # p copies of the (0,1) cycle
    # rho = U^a (special cycle) sits at (0, b - a) in grading -2a
    if b - a != p:
        raise ArithmeticError("special cycle does not land at (0, p)")
    dp_value = -2 * a - grading_shift(q, p)
    return TheoremBounds(p, dp_min, k, (a, b), d0_upper, dp_value)
