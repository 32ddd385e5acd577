"""
Large surgery on T(4,5)
=======================

Build the staircase complex of T(4,5) from its Alexander polynomial, look at
the quotient complexes C{max(i, j - m) >= 0} and read off d of 25-surgery.
The manifold bounds a rational ball, so all three labels divisible by 5 give
d = 0.
"""

# %%
# The Alexander polynomial determines the staircase
# -------------------------------------------------

from floerd import gaps_and_deltas, torus_alexander, torus_staircase, validate

poly = torus_alexander(5)
print("Delta(t) =", poly)

sd = gaps_and_deltas(poly)
print("exponents:", sd.exponents)
print("gradings: ", sd.deltas)

t45 = torus_staircase(5)
print(validate(t45))

# %%
# Arrows and U-powers come straight from the grading law.

for s, d, u in zip(t45.src, t45.dst, t45.upow):
    print(f"{t45.ids[s]:>4} -> U^{u} {t45.ids[d]}")

# the top generator's translate in grading -6 sits at (-3, 3)
print(t45.translate(t45.index["x3"], -6))

# %%
# Quotient complexes and their towers
# -----------------------------------
#
# Each label m cuts out a quotient; the bottom of its U-tower, shifted by
# s(q, m), is the correction term.

from floerd import SurgeryProblem, compute_d, truncated_homology, truncated_quotient

for m in (0, 5, 10):
    tq = truncated_quotient(t45, m)
    h = truncated_homology(tq)
    r = compute_d(SurgeryProblem(t45, 25, m))
    print(f"m={m:>2}: tower bottom {h.tower_bottom:>3}, shift {r.shift}, d = {r.d}")

# %%
# Every label, and the conjugation symmetry d(s_m) = d(s_-m)
# ----------------------------------------------------------

ds = {m: compute_d(SurgeryProblem(t45, 25, m)).d for m in range(-12, 13)}
assert all(ds[m] == ds[-m] for m in ds)
print(" ".join(str(ds[m]) for m in range(13)))
