"""
Petz sufficiency as a semidefinite feasibility problem
======================================================

A statistic is sufficient in the stronger, channel-based sense when
there are density matrices rho_k, one per atom, reproducing every
state's projector as a weighted sum.  The solver alternates between
the affine constraint set and the PSD cone (with Dykstra's
correction); infeasibility shows up either immediately (two states
overlap non-orthogonally) or as a residual plateau.
"""

import numpy as np

from wsq import load_bundled_instance
from wsq.harness import GeneratorSpec, generate
from wsq.petz import (
    Feasible,
    InfeasibleOrthogonality,
    NumericallyInfeasible,
    PetzInstance,
    petz_feasibility,
    petz_implies_weak_check,
    structural_check,
)
from wsq.spectral import StateFamily, statistic_from_matrix

# ---------------------------------------------------------------- feasible
# A planted instance: each state lives inside its own atom, so the
# solution loads each atom with the corresponding rank-one projector.
statistic, family = generate(
    GeneratorSpec(dim=5, n_states=3, flavor="atom_planted", seed=1)
)
instance = PetzInstance.from_parts(statistic, family)
cert = petz_feasibility(instance)
assert isinstance(cert, Feasible)
print("feasible after", cert.iterations, "iterations;",
      "max constraint residual", f"{cert.max_constraint_residual:.2e}")

report = structural_check(instance, cert)
print("loaded atoms carry rank-one projectors?", report.ok)
print("feasibility implies the weak factorization too?",
      petz_implies_weak_check(instance, cert))

# ---------------------------------------------------------------- orthogonality
# Distinct states must be orthogonal for feasibility.  The bundled
# two-state instance overlaps at 1/sqrt(2), so the verdict is
# immediate -- no iteration happens at all.
bundled_statistic, bundled_family = load_bundled_instance()
verdict = petz_feasibility(PetzInstance.from_parts(bundled_statistic, bundled_family))
assert isinstance(verdict, InfeasibleOrthogonality)
print("\nbundled instance: infeasible,",
      f"states {verdict.pair[0]} and {verdict.pair[1]}",
      f"overlap at {abs(verdict.overlap):.6f}")

# ---------------------------------------------------------------- plateau
# Orthogonal states can still be jointly unreachable.  Two basis
# states against a statistic with a single atom covering both force
# contradictory loads on one rho; the residual stalls at 0.5.
contradictory = statistic_from_matrix(3.0 * np.eye(2, dtype=complex))
basis_pair = StateFamily(labels=("e1", "e2"), vectors=np.eye(2, dtype=complex))
stuck = petz_feasibility(PetzInstance.from_parts(contradictory, basis_pair))
assert isinstance(stuck, NumericallyInfeasible)
print("\ncontradictory shared atom: plateau at residual",
      f"{stuck.residual_floor:.6f} after {stuck.iterations} iterations")
