"""Weak sufficiency of a discrete statistic for a family of pure states.

A statistic T is weakly sufficient for a labelled family of unit vectors
when, after replacing each state by a unit-modulus multiple, every state
can be written as a real function of T applied to one common vector chi.
For discrete T this reduces to two checkable conditions:

  1. each atom projects the family onto a subspace of dimension <= 1;
  2. the per-atom overlaps can all be made real by one choice of
     unit-modulus multipliers (a phase-alignment problem modulo pi).

check_weak_sufficiency decides the pair (T, F) and returns either an
explicit witness factorization or structured violations.  The existence
question -- is there any weakly sufficient statistic for F? -- depends
only on the Gram matrix of F and is decided (and made constructive) by
exists_weakly_sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    gram_matrix,
    gram_schmidt,
    hermitian_part,
    inner,
    norm,
    numerical_rank,
)
from .phases import (
    ANGLE_TOL,
    Infeasible,
    PhaseConstraint,
    VersionAssignment,
    align_phases,
)
from .spectral import DiscreteStatistic, StateFamily, project_states

RANK_TOL = 1e-8
ZERO_TOL = 1e-10          # overlaps below this (times the norms) impose nothing
REPRESENTATIVE_FLOOR = 1e-6   # relative norm floor when picking a direction

# Fault-injection point for the self-test harness; never disable otherwise.
_RANK_CHECK_ENABLED = True


@dataclass
class RankViolation:
    """Atom whose projected family spans more than one dimension."""

    atom: int
    dim: int


@dataclass
class PhaseObstruction:
    """Inconsistent cycle of reality constraints."""

    cycle: list[PhaseConstraint]


@dataclass
class WitnessFactorization:
    """Explicit factorization: versions[theta] * phi_theta = f_theta(T) chi."""

    chi: np.ndarray
    functions: dict[str, dict[float, float]]
    versions: VersionAssignment

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=complex).reshape(-1)
        if norm(chi) == 0.0:
            raise ValueError("witness vector chi must be nonzero")
        funcs = {}
        for label, f in self.functions.items():
            funcs[str(label)] = {float(k): float(v) for k, v in f.items()}
        self.chi = chi
        self.functions = funcs


@dataclass
class SufficiencyVerdict:
    sufficient: bool
    witness: WitnessFactorization | None
    violations: list = field(default_factory=list)

    def __post_init__(self):
        if self.sufficient != (self.witness is not None):
            raise ValueError("sufficient verdicts carry a witness, negative ones do not")
        if self.sufficient and self.violations:
            raise ValueError("sufficient verdicts carry no violations")
        if not self.sufficient and not self.violations:
            raise ValueError("negative verdicts must name at least one violation")


@dataclass
class WitnessCheck:
    ok: bool
    residuals: dict[str, float]
    max_residual: float


@dataclass
class GammaTable:
    """Per-atom directions and coefficients: e_k phi_theta = gamma[k, theta] xi_k.

    xi maps each active atom index to its unit direction; gamma rows of
    inactive atoms are zero.  active[k] mirrors membership in xi.
    """

    gamma: np.ndarray                # (n_atoms, n_states) complex
    xi: dict[int, np.ndarray]
    active: tuple[bool, ...]


def build_gamma_table(t: DiscreteStatistic, family: StateFamily,
                      tol: float = RANK_TOL) -> GammaTable:
    """Factor each atom's projected family through a single unit direction.

    Requires every atom to project the family onto dimension <= 1; raises
    ValueError otherwise.  The direction xi_k is the first projected state
    above a relative norm floor, normalized and rotated so its
    largest-magnitude entry is positive real.
    """
    table = project_states(t, family)
    n_atoms, n_states = len(t), len(family)
    gamma = np.zeros((n_atoms, n_states), dtype=complex)
    xi: dict[int, np.ndarray] = {}
    active = []
    for k in range(n_atoms):
        vectors = table.components[k]
        rank = numerical_rank(vectors, tol)
        if rank > 1 and _RANK_CHECK_ENABLED:
            raise ValueError(
                f"atom {k} projects the family onto dimension {rank}"
            )
        active.append(rank >= 1)
        if rank == 0:
            continue
        norms = np.array([norm(v) for v in vectors])
        pick = int(np.argmax(norms >= REPRESENTATIVE_FLOOR * norms.max()))
        direction = vectors[pick] / norms[pick]
        anchor = int(np.argmax(np.abs(direction)))
        direction = direction * (np.conj(direction[anchor]) / abs(direction[anchor]))
        xi[k] = direction
        for i in range(n_states):
            gamma[k, i] = inner(vectors[i], direction)
    return GammaTable(gamma=gamma, xi=xi, active=tuple(active))


def instance_constraints(t: DiscreteStatistic, family: StateFamily) -> list[PhaseConstraint]:
    """Reality constraints from nonzero cross-state overlaps within each atom."""
    table = project_states(t, family)
    constraints = []
    for k in range(len(t)):
        comps = table.components[k]
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                value = inner(comps[i], comps[j])
                cutoff = ZERO_TOL * norm(family.vectors[i]) * norm(family.vectors[j])
                if abs(value) > cutoff:
                    constraints.append(
                        PhaseConstraint(family.labels[i], family.labels[j], value, atom=k)
                    )
    return constraints


def check_weak_sufficiency(t: DiscreteStatistic, family: StateFamily,
                           tol: float = RANK_TOL,
                           angle_tol: float = ANGLE_TOL) -> SufficiencyVerdict:
    """Decide whether t is weakly sufficient for the family.

    Returns a verdict carrying either a witness factorization (chi, one
    real function per label, unit-modulus versions) or the structured
    violations: atoms of projected dimension >= 2 and/or an inconsistent
    phase cycle.
    """
    if t.dim != family.dim:
        raise ValueError(
            f"statistic dimension {t.dim} does not match states of dimension {family.dim}"
        )
    if _RANK_CHECK_ENABLED:
        table = project_states(t, family)
        violations: list = []
        for k in range(len(t)):
            rank = numerical_rank(table.components[k], tol)
            if rank > 1:
                violations.append(RankViolation(atom=k, dim=rank))
        if violations:
            return SufficiencyVerdict(False, None, violations)
    constraints = instance_constraints(t, family)
    aligned = align_phases(constraints, family.labels, angle_tol)
    if isinstance(aligned, Infeasible):
        return SufficiencyVerdict(False, None, [PhaseObstruction(aligned.cycle)])
    witness = _assemble_witness(t, family, aligned, tol)
    return SufficiencyVerdict(True, witness, [])


def _assemble_witness(t: DiscreteStatistic, family: StateFamily,
                      versions: VersionAssignment, tol: float) -> WitnessFactorization:
    gamma_table = build_gamma_table(t, family, tol)
    phases = np.array([versions.phase(lab) for lab in family.labels])
    dressed = gamma_table.gamma * phases[np.newaxis, :]
    active = sorted(gamma_table.xi)
    coef = 1.0 / np.sqrt(len(active))
    chi = np.zeros(t.dim, dtype=complex)
    values = np.zeros((len(t), len(family)))
    for k in active:
        row = dressed[k]
        lead = int(np.argmax(np.abs(row)))
        u = row[lead] / abs(row[lead])
        values[k] = (row * np.conj(u)).real
        chi += coef * (u * gamma_table.xi[k])
    functions = {
        lab: {
            float(lam): (values[k, i] / coef if gamma_table.active[k] else 0.0)
            for k, lam in enumerate(t.eigenvalues)
        }
        for i, lab in enumerate(family.labels)
    }
    return WitnessFactorization(chi=chi, functions=functions, versions=versions)


def verify_witness(t: DiscreteStatistic, family: StateFamily,
                   witness: WitnessFactorization, tol: float = 1e-7) -> WitnessCheck:
    """Independently re-check a witness: ||f_theta(T) chi - c_theta phi_theta||.

    Uses only function evaluation on the statistic; nothing from the
    decision path is reused.
    """
    from .spectral import evaluate_function_on_statistic

    residuals = {}
    for i, lab in enumerate(family.labels):
        if lab not in witness.functions:
            raise ValueError(f"witness has no function for state '{lab}'")
        if lab not in witness.versions.phases:
            raise ValueError(f"witness has no version phase for state '{lab}'")
        reached = evaluate_function_on_statistic(t, witness.functions[lab], witness.chi)
        target = witness.versions.phase(lab) * family.vectors[i]
        residuals[lab] = norm(reached - target)
    worst = max(residuals.values())
    return WitnessCheck(ok=worst <= tol, residuals=residuals, max_residual=worst)


@dataclass
class ConstructedStatistic:
    statistic: DiscreteStatistic
    witness: WitnessFactorization


@dataclass
class NonExistence:
    """No weakly sufficient statistic exists; the cycle certifies it."""

    cycle: list[PhaseConstraint]


def family_constraints(family: StateFamily) -> list[PhaseConstraint]:
    """Reality constraints from nonzero entries of the full Gram matrix."""
    g = gram_matrix(family.vectors)
    constraints = []
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            if abs(g[i, j]) > ZERO_TOL:
                constraints.append(
                    PhaseConstraint(family.labels[i], family.labels[j], g[i, j])
                )
    return constraints


def exists_weakly_sufficient(family: StateFamily, tol: float = RANK_TOL,
                             angle_tol: float = ANGLE_TOL):
    """Decide whether any weakly sufficient statistic exists for the family.

    Existence depends only on whether the full Gram matrix can be made
    entrywise real by dressing the states.  On success the statistic is
    built explicitly: orthonormalize a maximal independent subfamily of
    the dressed states, give the n-th direction eigenvalue n, and park
    the orthogonal complement (if any) on eigenvalue 0.  The returned
    witness is produced by running the pair through
    check_weak_sufficiency, not copied from the construction.
    """
    labels = family.labels
    constraints = family_constraints(family)
    aligned = align_phases(constraints, labels, angle_tol)
    if isinstance(aligned, Infeasible):
        return NonExistence(cycle=aligned.cycle)
    dressed = [aligned.phase(lab) * vec for lab, vec in zip(labels, family.vectors)]
    selected: list[np.ndarray] = []
    for vec in dressed:
        if numerical_rank(selected + [vec], tol) == len(selected) + 1:
            selected.append(vec)
    ortho, _ = gram_schmidt(selected, tol)
    d = family.dim
    eigenvalues = [float(n) for n in range(1, len(ortho) + 1)]
    projections = [hermitian_part(np.outer(xi, xi.conj())) for xi in ortho]
    if len(ortho) < d:
        complement = hermitian_part(np.eye(d) - sum(projections))
        eigenvalues = [0.0] + eigenvalues
        projections = [complement] + projections
    statistic = DiscreteStatistic(np.array(eigenvalues), tuple(projections))
    verdict = check_weak_sufficiency(statistic, family, tol, angle_tol)
    if not verdict.sufficient:   # pragma: no cover - internal consistency
        raise RuntimeError("constructed statistic failed its own sufficiency check")
    return ConstructedStatistic(statistic=statistic, witness=verdict.witness)
