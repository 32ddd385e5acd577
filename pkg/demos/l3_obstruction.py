"""
An obstructed knot: L_3
=======================

L_3 = T(2,3) # 4 copies of the doubled trefoil.  Its tensor complex has
151875 generators, which is still small enough to compute d of 9-surgery
directly.  The d-bar value at s_3 is nonzero, so no metabolizer of Z/9 is
compatible with the table and the knot is obstructed.

Runtime is around a minute.
"""

# %%
# Symbolic bounds first
# ---------------------
#
# Only per-factor filtration minima are needed for these.

from floerd import theorem_bounds

tb = theorem_bounds(3)
print("min i+j in grading 0:", tb.dp_min)
print("special cycle at", tb.special_cycle)
print("d(s_0) <=", tb.d0_upper, "  d(s_3) =", tb.dp_value)

# %%
# Now the real complex
# --------------------

from floerd import lp_complex
from floerd.knots import lp_special_cycle

l3 = lp_complex(3)
print(l3)

chain = lp_special_cycle(l3, 3)
print([l3.ids[k] for k in chain], "generates homology:", l3.represents_generator(chain))

# %%
# d and d-bar, with the window re-checked at N+1
# -----------------------------------------------

from floerd import emit, obstruct_complex

report = obstruct_complex(l3, 3, knot="L_3")
print(emit(report, "text"))

# %%
# For p >= 7 the complex has 11 * 15^10 generators; only the bounds remain.

from floerd import obstruct

print(emit(obstruct(7), "text"))
