"""
Constructing a weakly sufficient statistic, or proving none exists
==================================================================

For a family with an entrywise-real Gram matrix a weakly sufficient
statistic can always be built; with genuinely complex overlaps the
attempt can run into an inconsistent phase cycle, and that cycle is
the proof that no statistic will ever work.
"""

import math

import numpy as np

from wsq import check_weak_sufficiency, exists_weakly_sufficient
from wsq.phases import cycle_defect
from wsq.spectral import StateFamily
from wsq.sufficiency import ConstructedStatistic, NonExistence

# ---------------------------------------------------------------- build
# Three random real unit vectors in R^4.  Real Gram matrix, so the
# construction is guaranteed to succeed.
rng = np.random.default_rng(42)
vectors = rng.normal(size=(3, 4))
vectors /= np.linalg.norm(vectors, axis=1)[:, None]
family = StateFamily(labels=("a", "b", "c"), vectors=vectors.astype(complex))

result = exists_weakly_sufficient(family)
assert isinstance(result, ConstructedStatistic)
t = result.statistic
print("constructed a statistic with", len(t), "atoms")
print("eigenvalues:", t.eigenvalues)

# The constructed statistic really is sufficient for the family.
verdict = check_weak_sufficiency(t, family)
print("passes the checker?", verdict.sufficient)

# ---------------------------------------------------------------- refuse
# Now a family that cannot be fixed: psi1 = e1, psi2 = (e1 + e2)/sqrt2,
# psi3 = (e1 + i e2)/sqrt2.  Going around the triangle of overlaps
# accumulates a phase defect of pi/4, and no choice of versions can
# make all three overlaps real at once.
s = 1.0 / math.sqrt(2.0)
obstructed = StateFamily(
    labels=("psi1", "psi2", "psi3"),
    vectors=np.array([[1.0, 0.0], [s, s], [s, 1j * s]], dtype=complex),
)
refusal = exists_weakly_sufficient(obstructed)
assert isinstance(refusal, NonExistence)
print("\nno statistic exists; the refusal carries a cycle of",
      len(refusal.cycle), "overlap constraints:")
for c in refusal.cycle:
    print(f"  <{c.left}, {c.right}> relates with value {c.value:.4f}")
defect = cycle_defect(refusal.cycle)
print(f"cycle defect {defect:.6f} rad = pi/{math.pi / defect:.1f}"
      "  (anything beyond tolerance is fatal)")
