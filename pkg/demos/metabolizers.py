"""
Metabolizers of (Z/p^2)^n and forced vanishing of d-bar
=======================================================

If d-bar vanishes on a metabolizer M, the p-torsion of M imposes linear
relations among d-bar_1, ..., d-bar_q (q = (p-1)/2).  Those relations always
have full rank, which is what makes a single nonzero d-bar decisive.
"""

# %%
# Enumerating metabolizers
# ------------------------

from floerd import LinkingForm, enumerate_metabolizers

for form in ("+", "++", "+-"):
    ms = enumerate_metabolizers(3, len(form), LinkingForm.parse(3, form))
    print(form, [m.gens for m in ms])

# %%
# Special vectors: all entries divisible by p, at least half equal to p
# ---------------------------------------------------------------------

from floerd import Metabolizer, special_vector

for gens in ([(1, 3)], [(3, 0), (0, 3)], [(1, 2, 17), (0, 7, 28)]):
    p = 7 if len(gens[0]) == 3 else 3
    sv = special_vector(Metabolizer.from_generators(p, gens))
    print(gens, "->", sv.z, "pivots", sv.pivots)

# %%
# The cyclic action rho
# ---------------------
#
# Multiplication by a generator a of Z_p^* permutes {1..q} up to sign.

from floerd import rho_permutation

print(rho_permutation(23, 5).cycle)
print(rho_permutation(31, 3).cycle)

# %%
# Relations as elements of Q[t]/(t^q - 1)
# ---------------------------------------
#
# The orbit of psi(z) spans Q^q exactly when f_z is coprime to t^q - 1.

from floerd.linkalg import group_ring_coprime

f = [4, 0, 0, 1] + [0] * 7 + [2] + [0] * 3   # 4 + t^3 + 2 t^11
print(group_ring_coprime(f, 15))

from floerd import relation_span_is_full

for M in enumerate_metabolizers(7, 3):
    cert = relation_span_is_full(M, 7)
    print(M.gens, cert.psi_z, cert.gcd, cert.full)
