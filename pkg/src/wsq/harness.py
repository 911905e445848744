"""Seeded instance generators, brute-force oracles, and the property suite.

The generators plant known structure (real Gram matrices, orthogonal
families, states confined to disjoint atoms, an inconsistent phase
cycle) so that every theorem-level claim in the library has a corpus on
which it must hold.  The brute-force decision procedure re-decides weak
sufficiency by exhaustive means — rank tests through numpy and a phase
grid search — sharing none of the production checker's union-find path.
run_property_suite executes the whole catalog and reports pass/fail per
property, serializing and shrinking a counterexample for any failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import petz as petz_mod
from . import phases as phases_mod
from . import sufficiency as sufficiency_mod
from .fileio import load_bundled_instance, serialize_instance
from .linalg import gram_schmidt, hermitian_eig, hermitian_part, inner, norm
from .minimality import (
    NoMinimalExists,
    check_coarse_sufficient,
    dead_atom_counterexamples,
    enumerate_coarse_grainings,
    is_function_of,
    minimal_statistic,
)
from .petz import (
    Feasible,
    PetzInstance,
    petz_feasibility,
    petz_implies_weak_check,
    structural_check,
)
from .phases import (
    ANGLE_TOL,
    Infeasible,
    PhaseConstraint,
    align_phases,
    cycle_defect,
    oracle_align,
    worst_residual,
)
from .spectral import (
    CoarseMap,
    DiscreteStatistic,
    StateFamily,
    apply_coarse,
    project_states,
    statistic_from_matrix,
)
from .sufficiency import (
    NonExistence,
    check_weak_sufficiency,
    exists_weakly_sufficient,
    verify_witness,
)

FLAVORS = (
    "real_vectors",
    "complex_vectors",
    "orthogonal_planted",
    "atom_planted",
    "phase_obstructed",
)

MAX_DIM = 32
MAX_STATES = 8
BRUTE_FORCE_MAX_STATES = 4
BRUTE_FORCE_MAX_ATOMS = 6


@dataclass(frozen=True)
class GeneratorSpec:
    dim: int
    n_states: int
    flavor: str
    seed: int

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor '{self.flavor}'")
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dimension {self.dim} outside [1, {MAX_DIM}]")
        if not 1 <= self.n_states <= MAX_STATES:
            raise ValueError(f"family size {self.n_states} outside [1, {MAX_STATES}]")
        if self.flavor == "orthogonal_planted" and self.n_states > self.dim:
            raise ValueError(
                f"cannot plant {self.n_states} orthogonal states in dimension {self.dim}"
            )
        if self.flavor == "atom_planted" and self.n_states > self.dim:
            raise ValueError(
                f"cannot give {self.n_states} states disjoint atoms in dimension {self.dim}"
            )
        if self.flavor == "phase_obstructed":
            if self.n_states < 3:
                raise ValueError("the planted cycle needs at least 3 states")
            if self.dim < 2 + max(0, self.n_states - 3):
                raise ValueError(
                    f"dimension {self.dim} too small for {self.n_states} states "
                    "around a planted cycle"
                )


def _random_basis(rng, dim: int, real: bool = False) -> np.ndarray:
    raw = rng.normal(size=(dim, dim))
    if not real:
        raw = raw + 1j * rng.normal(size=(dim, dim))
    basis, _ = gram_schmidt(raw.astype(complex))
    return np.array(basis)


def _random_composition(rng, total: int, parts: int) -> list[int]:
    sizes = [1] * parts
    for _ in range(total - parts):
        sizes[int(rng.integers(parts))] += 1
    return sizes


def _blocked_statistic(basis: np.ndarray, sizes: list[int],
                       eigenvalues=None) -> DiscreteStatistic:
    if eigenvalues is None:
        eigenvalues = [float(k + 1) for k in range(len(sizes))]
    projections = []
    start = 0
    for size in sizes:
        block = basis[start : start + size]
        projections.append(hermitian_part(block.T @ block.conj()))
        start += size
    return DiscreteStatistic(np.array(eigenvalues, dtype=float), tuple(projections))


def _random_statistic(rng, dim: int, real: bool = False,
                      max_atoms: int = BRUTE_FORCE_MAX_ATOMS) -> DiscreteStatistic:
    n_atoms = 1 if dim == 1 else int(rng.integers(2, min(dim, max_atoms) + 1))
    sizes = _random_composition(rng, dim, n_atoms)
    return _blocked_statistic(_random_basis(rng, dim, real=real), sizes)


def _labels(n: int) -> tuple[str, ...]:
    return tuple(f"phi{i + 1}" for i in range(n))


def generate(spec: GeneratorSpec) -> tuple[DiscreteStatistic, StateFamily]:
    """Deterministically produce (statistic, family) with planted structure."""
    rng = np.random.default_rng(spec.seed)
    d, m = spec.dim, spec.n_states

    if spec.flavor == "real_vectors":
        vectors = rng.normal(size=(m, d))
        vectors = vectors / np.linalg.norm(vectors, axis=1)[:, np.newaxis]
        family = StateFamily(labels=_labels(m), vectors=vectors.astype(complex))
        return _random_statistic(rng, d, real=True), family

    if spec.flavor == "complex_vectors":
        vectors = rng.normal(size=(m, d)) + 1j * rng.normal(size=(m, d))
        vectors = vectors / np.linalg.norm(vectors, axis=1)[:, np.newaxis]
        family = StateFamily(labels=_labels(m), vectors=vectors)
        return _random_statistic(rng, d), family

    if spec.flavor == "orthogonal_planted":
        basis = _random_basis(rng, d)
        family = StateFamily(labels=_labels(m), vectors=basis[:m].copy())
        projections = [
            hermitian_part(np.outer(basis[i], basis[i].conj())) for i in range(m)
        ]
        eigenvalues = [float(i + 1) for i in range(m)]
        if m < d:
            block = basis[m:]
            projections.insert(0, hermitian_part(block.T @ block.conj()))
            eigenvalues.insert(0, 0.0)
        statistic = DiscreteStatistic(np.array(eigenvalues), tuple(projections))
        return statistic, family

    if spec.flavor == "atom_planted":
        extra = 1 if d > m and rng.integers(2) else 0
        n_blocks = m + extra
        sizes = _random_composition(rng, d, n_blocks)
        basis = _random_basis(rng, d)
        statistic = _blocked_statistic(basis, sizes)
        vectors = []
        start = 0
        for k in range(m):
            block = basis[start : start + sizes[k]]
            coeff = rng.normal(size=sizes[k]) + 1j * rng.normal(size=sizes[k])
            vec = coeff @ block
            vectors.append(vec / norm(vec))
            start += sizes[k]
        family = StateFamily(labels=_labels(m), vectors=np.array(vectors))
        return statistic, family

    # phase_obstructed: three states in a planted plane whose overlap
    # arguments sum to pi/4 around a cycle; extras are orthogonal padding
    basis = _random_basis(rng, d)
    b1, b2 = basis[0], basis[1]
    s = 1.0 / math.sqrt(2.0)
    vectors = [b1, s * (b1 + b2), s * (b1 + 1j * b2)]
    for i in range(m - 3):
        vectors.append(basis[2 + i])
    family = StateFamily(labels=_labels(m), vectors=np.array(vectors))
    return _random_statistic(rng, d), family


def brute_force_weak_sufficiency(statistic: DiscreteStatistic, family: StateFamily,
                                 phase_steps: int = 24,
                                 angle_tol: float = ANGLE_TOL) -> bool:
    """Exhaustively re-decide weak sufficiency on a small instance.

    Rank tests go through numpy's SVD-based matrix_rank; phase
    feasibility goes through the grid-search oracle.  Nothing here
    shares code with the production checker's union-find alignment.
    """
    if len(family) > BRUTE_FORCE_MAX_STATES:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_STATES} states, "
            f"got {len(family)}"
        )
    if len(statistic) > BRUTE_FORCE_MAX_ATOMS:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_ATOMS} atoms, "
            f"got {len(statistic)}"
        )
    components = [
        [proj @ vec for vec in family.vectors] for proj in statistic.projections
    ]
    for comps in components:
        stack = np.array(comps)
        scale = np.abs(stack).max()
        if scale == 0.0:
            continue
        # the yardstick is the unit norm of the states, so an atom seeing
        # only roundoff-sized components counts as empty, not as rank 2
        if np.linalg.matrix_rank(stack, tol=1e-8 * max(1.0, scale)) > 1:
            return False
    constraints = []
    for k, comps in enumerate(components):
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                value = np.sum(comps[i] * np.conj(comps[j]))
                cutoff = 1e-10 * norm(family.vectors[i]) * norm(family.vectors[j])
                if abs(value) > cutoff:
                    constraints.append(
                        PhaseConstraint(family.labels[i], family.labels[j],
                                        complex(value), atom=k)
                    )
    _, best = oracle_align(constraints, family.labels, steps=phase_steps)
    return best <= 10.0 * angle_tol


def bundled_example_checks() -> list[str]:
    """Worked-example checks on the shipped instance; returns failure strings."""
    failures: list[str] = []
    statistic, family = load_bundled_instance()

    verdict = check_weak_sufficiency(statistic, family)
    if not verdict.sufficient:
        failures.append("shipped instance was not judged weakly sufficient")
    else:
        check = verify_witness(statistic, family, verdict.witness, tol=1e-12)
        if not check.ok:
            failures.append(
                f"emitted witness residual {check.max_residual:.3e} exceeds 1e-12"
            )

    closed_form = sufficiency_mod.WitnessFactorization(
        chi=family.vector("phi2"),
        functions={
            "phi1": {1.0: math.sqrt(2.0), -1.0: 0.0},
            "phi2": {1.0: 1.0, -1.0: 1.0},
        },
        versions=phases_mod.VersionAssignment(phases={"phi1": 1.0, "phi2": 1.0}),
    )
    check = verify_witness(statistic, family, closed_form, tol=1e-12)
    if not check.ok:
        failures.append(
            f"closed-form witness residual {check.max_residual:.3e} exceeds 1e-12"
        )

    cert = petz_feasibility(PetzInstance.from_parts(statistic, family))
    if not isinstance(cert, petz_mod.InfeasibleOrthogonality):
        failures.append(
            f"channel feasibility returned {type(cert).__name__}, "
            "expected an orthogonality obstruction"
        )
    elif abs(abs(cert.overlap) - 1.0 / math.sqrt(2.0)) > 1e-12:
        failures.append(f"overlap {abs(cert.overlap):.12f} is not 1/sqrt(2)")

    minimal = minimal_statistic(statistic, family)
    if isinstance(minimal, NoMinimalExists):
        failures.append("shipped instance reported a dead atom")
    elif [list(b) for b in minimal.partition] != [[0], [1]]:
        failures.append(f"minimal partition {minimal.partition} is not [[0], [1]]")
    return failures


# ---------------------------------------------------------------------------
# Property suite


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str
    counterexample: str | None = None


@dataclass
class PropertyReport:
    seed: int
    count: int
    mutation: str | None
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[PropertyResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "mutation": self.mutation,
            "ok": self.ok,
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                    "counterexample": r.counterexample,
                }
                for r in self.results
            ],
        }

    def render(self) -> str:
        header = f"property suite: seed={self.seed} count={self.count}"
        if self.mutation:
            header += f" mutation={self.mutation}"
        lines = [header]
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"{mark} {r.name}: {r.detail}")
            if r.counterexample is not None:
                lines.append("  counterexample instance:")
                for cx_line in r.counterexample.splitlines():
                    lines.append("    " + cx_line)
        verdict = "all properties passed" if self.ok else (
            f"{len(self.failures())} of {len(self.results)} properties FAILED"
        )
        lines.append(verdict)
        return "\n".join(lines)


def _drop_state(family: StateFamily, index: int) -> StateFamily:
    keep = [i for i in range(len(family)) if i != index]
    return StateFamily(
        labels=tuple(family.labels[i] for i in keep),
        vectors=tuple(family.vectors[i].copy() for i in keep),
    )


def _merge_last_atoms(statistic: DiscreteStatistic) -> DiscreteStatistic:
    projections = list(statistic.projections)
    merged = hermitian_part(projections[-2] + projections[-1])
    return DiscreteStatistic(
        eigenvalues=statistic.eigenvalues[:-1].copy(),
        projections=tuple(projections[:-2]) + (merged,),
    )


def _round_instance(statistic, family):
    vectors = np.round(family.vectors, 3)
    norms = np.linalg.norm(vectors, axis=1)
    if norms.min() < 0.5:
        raise ValueError("rounding collapsed a state")
    rounded_family = StateFamily(
        labels=family.labels, vectors=vectors / norms[:, np.newaxis]
    )
    rounded_statistic = None
    if statistic is not None:
        rounded_statistic = statistic_from_matrix(
            np.round(statistic.matrix(), 3), group_tol=1e-6
        )
    return rounded_statistic, rounded_family


def shrink_instance(statistic, family, still_failing):
    """Greedy counterexample reduction: drop states, merge atoms, round.

    still_failing(statistic, family) must return True while the reduced
    instance keeps exhibiting the failure.  Every candidate reduction is
    validated by the domain constructors; invalid reductions are skipped.
    """
    changed = True
    while changed and len(family) > 1:
        changed = False
        for i in range(len(family)):
            candidate = _drop_state(family, i)
            try:
                if still_failing(statistic, candidate):
                    family = candidate
                    changed = True
                    break
            except Exception:
                continue
    while statistic is not None and len(statistic) > 1:
        try:
            candidate = _merge_last_atoms(statistic)
            if not still_failing(candidate, family):
                break
            statistic = candidate
        except Exception:
            break
    try:
        rounded_statistic, rounded_family = _round_instance(statistic, family)
        if still_failing(rounded_statistic, rounded_family):
            statistic, family = rounded_statistic, rounded_family
    except Exception:
        pass
    return statistic, family


def _planted_class_instance(rng, dim: int, n_atoms: int, n_states: int,
                            dead_atom: bool = False):
    """Weakly sufficient instance whose atoms fall into planted classes.

    Each atom carries one unit direction; states are real combinations
    of those directions.  Atoms sharing a (scaled) coefficient column
    merge in the minimal statistic; a dead atom gets the zero column.
    """
    basis = _random_basis(rng, dim)
    sizes = _random_composition(rng, dim, n_atoms)
    statistic = _blocked_statistic(basis, sizes)
    directions = []
    start = 0
    for size in sizes:
        block = basis[start : start + size]
        coeff = rng.normal(size=size)
        vec = coeff @ block
        directions.append(vec / norm(vec))
        start += size
    n_classes = n_atoms if n_atoms <= 2 else max(2, n_atoms // 2)
    assignment = [k % n_classes for k in range(n_atoms)]
    columns = rng.uniform(0.4, 1.2, size=(n_states, n_classes))
    columns *= rng.choice([-1.0, 1.0], size=(n_states, n_classes))
    coeff = np.zeros((n_states, n_atoms))
    for k in range(n_atoms):
        coeff[:, k] = columns[:, assignment[k]] * rng.uniform(0.5, 1.5)
    if dead_atom:
        coeff[:, n_atoms - 1] = 0.0
    vectors = coeff @ np.array(directions)
    vectors = vectors / np.linalg.norm(vectors, axis=1)[:, np.newaxis]
    family = StateFamily(labels=_labels(n_states), vectors=vectors)
    return statistic, family


def _random_phase_instance(rng, n_labels: int, n_constraints: int,
                           steps: int = 24, defect: float = 0.0):
    """Constraint set satisfiable by grid phases, plus an optional cycle defect."""
    labels = tuple(f"c{i}" for i in range(n_labels))
    # offsets live on the grid the search oracle actually visits, which
    # folds an even step count onto steps/2 points modulo pi
    fold = steps // 2 if steps % 2 == 0 else steps
    offsets = math.pi * rng.integers(0, fold, size=n_labels) / fold
    constraints = []
    for i in range(1, n_labels):
        j = int(rng.integers(0, i))
        value = np.exp(1j * (offsets[j] - offsets[i])) * float(rng.uniform(0.5, 2.0))
        if rng.integers(2):
            value = -value
        constraints.append(PhaseConstraint(labels[i], labels[j], complex(value)))
    for _ in range(max(0, n_constraints - (n_labels - 1))):
        i, j = rng.choice(n_labels, size=2, replace=False)
        value = np.exp(1j * (offsets[j] - offsets[i])) * float(rng.uniform(0.5, 2.0))
        constraints.append(PhaseConstraint(labels[i], labels[j], complex(value)))
    if defect:
        # the defective edge must close a cycle, so add it on top of the
        # spanning tree rather than twisting a possibly tree-only edge
        i, j = rng.choice(n_labels, size=2, replace=False)
        value = np.exp(1j * (offsets[j] - offsets[i] + defect))
        constraints.append(PhaseConstraint(labels[i], labels[j], complex(value)))
    return labels, constraints


def _rephase(rng, family: StateFamily) -> StateFamily:
    factors = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=len(family)))
    return StateFamily(labels=family.labels,
                       vectors=family.vectors * factors[:, np.newaxis])


# --- individual properties -------------------------------------------------


def _prop_eig_reconstruction(rng, count):
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(2, 13))
        raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = hermitian_part(raw)
        evals, evecs = hermitian_eig(h)
        rebuilt = (evecs * evals[np.newaxis, :]) @ evecs.conj().T
        scale = max(1.0, float(np.abs(h).max()))
        worst = max(worst, float(np.abs(rebuilt - h).max()) / scale)
    return worst <= 1e-9, f"worst relative reconstruction residual {worst:.3e}", None


def _prop_statistic_roundtrip(rng, count):
    for trial in range(count):
        d = int(rng.integers(2, 9))
        statistic = _random_statistic(rng, d)
        rebuilt = statistic_from_matrix(statistic.matrix())
        if len(rebuilt) != len(statistic):
            return False, f"atom count changed on trial {trial}", None
        drift = float(np.abs(rebuilt.eigenvalues - statistic.eigenvalues).max())
        gap = float(
            max(np.abs(p - q).max() for p, q in
                zip(rebuilt.projections, statistic.projections))
        )
        if drift > 1e-8 or gap > 1e-8:
            return False, f"roundtrip drift {max(drift, gap):.3e} on trial {trial}", None
    return True, f"{count} statistics rebuilt from their matrices", None


def _prop_phase_soundness(rng, count):
    worst = 0.0
    for trial in range(count):
        labels, constraints = _random_phase_instance(
            rng, int(rng.integers(2, 7)), int(rng.integers(1, 10))
        )
        result = align_phases(constraints, labels)
        if isinstance(result, Infeasible):
            return False, f"consistent instance judged infeasible on trial {trial}", None
        worst = max(worst, worst_residual(constraints, result))
    return worst <= 1e-6, f"worst alignment residual {worst:.3e}", None


def _prop_phase_obstruction(rng, count):
    for trial in range(count):
        labels, constraints = _random_phase_instance(
            rng, int(rng.integers(3, 7)), int(rng.integers(3, 10)),
            defect=float(rng.uniform(0.3, math.pi / 2.0)),
        )
        result = align_phases(constraints, labels)
        if not isinstance(result, Infeasible):
            return False, f"planted defect went undetected on trial {trial}", None
        defect = cycle_defect(result.cycle)
        if defect <= ANGLE_TOL:
            return False, f"cycle with defect {defect:.3e} on trial {trial}", None
    return True, f"{count} planted defects produced valid cycles", None


def _prop_oracle_agreement(rng, count):
    for trial in range(count):
        defect = 0.0 if rng.integers(2) else float(rng.uniform(0.3, math.pi / 2.0))
        labels, constraints = _random_phase_instance(
            rng, int(rng.integers(2, 5)), int(rng.integers(1, 7)), defect=defect
        )
        produced = align_phases(constraints, labels)
        _, best = oracle_align(constraints, labels, steps=24)
        oracle_feasible = best <= 1e-5
        if isinstance(produced, Infeasible) == oracle_feasible:
            return (
                False,
                f"checker and grid oracle disagree on trial {trial} "
                f"(grid residual {best:.3e})",
                None,
            )
    return True, f"{count} instances agree with the grid oracle", None


def _agreement_corpus(seed, count):
    specs = []
    flavors = ("real_vectors", "orthogonal_planted", "atom_planted", "phase_obstructed")
    rng = np.random.default_rng(seed)
    for trial in range(count):
        flavor = flavors[trial % len(flavors)]
        if flavor == "phase_obstructed":
            dim = int(rng.integers(2, 6))
            m = 3
        else:
            dim = int(rng.integers(2, 7))
            m = int(rng.integers(2, min(dim, BRUTE_FORCE_MAX_STATES) + 1))
        specs.append(GeneratorSpec(dim=dim, n_states=m, flavor=flavor,
                                   seed=int(rng.integers(2**63))))
    return specs


def _prop_checker_vs_brute_force(rng, count):
    specs = _agreement_corpus(int(rng.integers(2**63)), count)
    for spec in specs:
        statistic, family = generate(spec)
        produced = check_weak_sufficiency(statistic, family).sufficient
        brute = brute_force_weak_sufficiency(statistic, family)
        if produced != brute:
            def still_failing(t, f):
                return (
                    t is not None
                    and check_weak_sufficiency(t, f).sufficient
                    != brute_force_weak_sufficiency(t, f)
                )

            small_t, small_f = shrink_instance(statistic, family, still_failing)
            return (
                False,
                f"checker={produced} but brute force={not produced} ({spec.flavor})",
                serialize_instance(small_t, small_f),
            )
    return True, f"{len(specs)} instances agree with brute force", None


def _prop_witness_soundness(rng, count):
    specs = _agreement_corpus(int(rng.integers(2**63)), count)
    worst = 0.0
    checked = 0
    for spec in specs:
        statistic, family = generate(spec)
        verdict = check_weak_sufficiency(statistic, family)
        if not verdict.sufficient:
            continue
        checked += 1
        check = verify_witness(statistic, family, verdict.witness, tol=1e-7)
        worst = max(worst, check.max_residual)
        if not check.ok:
            def still_failing(t, f):
                if t is None:
                    return False
                v = check_weak_sufficiency(t, f)
                return v.sufficient and not verify_witness(t, f, v.witness, tol=1e-7).ok

            small_t, small_f = shrink_instance(statistic, family, still_failing)
            return (
                False,
                f"witness residual {check.max_residual:.3e} exceeds 1e-07 "
                f"({spec.flavor})",
                serialize_instance(small_t, small_f),
            )
    return True, f"{checked} witnesses verified, worst residual {worst:.3e}", None


def _prop_construction_roundtrip(rng, count):
    worst = 0.0
    for trial in range(count):
        dim = int(rng.integers(2, 9))
        m = int(rng.integers(2, 6))
        spec = GeneratorSpec(dim=dim, n_states=m, flavor="real_vectors",
                             seed=int(rng.integers(2**63)))
        _, family = generate(spec)
        result = exists_weakly_sufficient(family)
        if not isinstance(result, sufficiency_mod.ConstructedStatistic):
            return False, f"construction failed on a real family (trial {trial})", \
                serialize_instance(None, family)
        check = verify_witness(result.statistic, family, result.witness, tol=1e-7)
        worst = max(worst, check.max_residual)
        if not check.ok:
            return False, f"constructed witness residual {check.max_residual:.3e}", \
                serialize_instance(result.statistic, family)
    return True, f"{count} constructions verified, worst residual {worst:.3e}", None


def _prop_nonexistence_on_obstructed(rng, count):
    for trial in range(count):
        dim = int(rng.integers(2, 9))
        m = int(rng.integers(3, min(4, dim + 1) + 1))
        m = min(m, 3 + (dim - 2))
        spec = GeneratorSpec(dim=dim, n_states=m, flavor="phase_obstructed",
                             seed=int(rng.integers(2**63)))
        _, family = generate(spec)
        result = exists_weakly_sufficient(family)
        if not isinstance(result, NonExistence):
            return False, f"obstructed family passed existence (trial {trial})", \
                serialize_instance(None, family)
        defect = cycle_defect(result.cycle)
        if defect <= ANGLE_TOL:
            return False, f"cycle defect {defect:.3e} too small (trial {trial})", \
                serialize_instance(None, family)
    return True, f"{count} obstructed families refused with certified cycles", None


def _prop_version_invariance(rng, count):
    for trial in range(count):
        flavor = "atom_planted" if rng.integers(2) else "complex_vectors"
        dim = int(rng.integers(2, 7))
        m = int(rng.integers(2, min(dim, 5) + 1))
        spec = GeneratorSpec(dim=dim, n_states=m, flavor=flavor,
                             seed=int(rng.integers(2**63)))
        statistic, family = generate(spec)
        base = check_weak_sufficiency(statistic, family).sufficient
        for _ in range(3):
            redressed = check_weak_sufficiency(statistic, _rephase(rng, family))
            if redressed.sufficient != base:
                return False, f"verdict changed under rephasing (trial {trial})", \
                    serialize_instance(statistic, family)
    return True, f"{count} instances invariant under version changes", None


def _prop_coarse_cross_validation(rng, count):
    trials = max(2, count // 8)
    checked = 0
    for trial in range(trials):
        dim = int(rng.integers(3, 7))
        n_atoms = int(rng.integers(2, min(dim, 5) + 1))
        n_states = int(rng.integers(2, 5))
        statistic, family = _planted_class_instance(rng, dim, n_atoms, n_states)
        for mapping in enumerate_coarse_grainings(statistic):
            checked += 1
            fast = check_coarse_sufficient(statistic, family, mapping)
            coarse, _ = apply_coarse(statistic, mapping)
            direct = check_weak_sufficiency(coarse, family).sufficient
            if fast != direct:
                def still_failing(t, f):
                    if t is None or not check_weak_sufficiency(t, f).sufficient:
                        return False
                    for cmap in enumerate_coarse_grainings(t):
                        c, _ = apply_coarse(t, cmap)
                        if (check_coarse_sufficient(t, f, cmap)
                                != check_weak_sufficiency(c, f).sufficient):
                            return True
                    return False

                small_t, small_f = shrink_instance(statistic, family, still_failing)
                return (
                    False,
                    "fast coarse-graining check disagrees with the direct checker",
                    serialize_instance(small_t, small_f),
                )
    return True, f"{checked} coarse-grainings cross-validated", None


def _prop_minimal_function_property(rng, count):
    trials = max(2, count // 8)
    for trial in range(trials):
        dim = int(rng.integers(3, 7))
        n_atoms = int(rng.integers(2, min(dim, 5) + 1))
        n_states = int(rng.integers(2, 5))
        statistic, family = _planted_class_instance(rng, dim, n_atoms, n_states)
        minimal = minimal_statistic(statistic, family)
        if isinstance(minimal, NoMinimalExists):
            return False, "planted live instance reported a dead atom", \
                serialize_instance(statistic, family)
        for mapping in enumerate_coarse_grainings(statistic):
            if not check_coarse_sufficient(statistic, family, mapping):
                continue
            coarse, _ = apply_coarse(statistic, mapping)
            if is_function_of(minimal.statistic, coarse) is None:
                return (
                    False,
                    "minimal statistic is not a function of a sufficient coarse-graining",
                    serialize_instance(statistic, family),
                )
    return True, f"{trials} minimal statistics verified against all coarse-grainings", None


def _prop_dead_atom_family(rng, count):
    trials = max(2, count // 8)
    for trial in range(trials):
        dim = int(rng.integers(3, 7))
        n_atoms = int(rng.integers(3, min(dim, 5) + 1))
        n_states = int(rng.integers(2, 5))
        statistic, family = _planted_class_instance(rng, dim, n_atoms, n_states,
                                                    dead_atom=True)
        missing = minimal_statistic(statistic, family)
        if not isinstance(missing, NoMinimalExists):
            return False, "dead atom went unnoticed", \
                serialize_instance(statistic, family)
        counterexamples = dead_atom_counterexamples(statistic, missing.dead_atom)
        for merged in counterexamples.values():
            if not check_weak_sufficiency(merged, family).sufficient:
                return False, "a merged counterexample lost sufficiency", \
                    serialize_instance(statistic, family)
    return True, f"{trials} dead-atom families produced verified counterexamples", None


def _petz_corpus(rng, count):
    specs = []
    for _ in range(count):
        dim = int(rng.integers(2, 8))
        m = int(rng.integers(1, min(dim, 4) + 1))
        specs.append(GeneratorSpec(dim=dim, n_states=m, flavor="atom_planted",
                                   seed=int(rng.integers(2**63))))
    return specs


def _uneven_spread_instance(rng):
    """One state split roughly 0.9/0.1 across two atoms.

    Still feasible (the projector onto the state solves both blocks) but
    the unconstrained least-squares point is not positive, so the cone
    projection must engage; these instances are the ones that notice a
    missing trace constraint.
    """
    basis = _random_basis(rng, 2)
    statistic = _blocked_statistic(basis, [1, 1])
    alpha = math.sqrt(rng.uniform(0.85, 0.95))
    beta = math.sqrt(1.0 - alpha * alpha)
    vec = alpha * basis[0] + beta * basis[1]
    family = StateFamily(labels=("phi1",), vectors=(vec,))
    return statistic, family


def _prop_petz_soundness(rng, count):
    worst = 0.0
    pairs = [generate(spec) for spec in _petz_corpus(rng, count)]
    for _ in range(max(1, min(3, count // 16))):
        pairs.append(_uneven_spread_instance(rng))
    for statistic, family in pairs:
        instance = PetzInstance.from_parts(statistic, family)
        cert = petz_feasibility(instance, max_iters=20000)
        if not isinstance(cert, Feasible):
            return False, f"planted-feasible instance judged {type(cert).__name__}", \
                serialize_instance(statistic, family)
        for n in range(len(family)):
            mix = sum(
                instance.weights[n, k] * cert.rhos[k] for k in range(len(statistic))
            )
            target = np.outer(family.vectors[n], family.vectors[n].conj())
            worst = max(worst, float(np.abs(mix - target).max()))
        for k, rho in enumerate(cert.rhos):
            low = float(np.linalg.eigvalsh(rho).min())
            if low < -1e-8:
                return False, f"rho[{k}] has eigenvalue {low:.3e}", \
                    serialize_instance(statistic, family)
            trace_gap = abs(float(np.trace(rho).real) - 1.0)
            if trace_gap > 1e-6:
                def still_failing(t, f):
                    if t is None:
                        return False
                    c = petz_feasibility(PetzInstance.from_parts(t, f))
                    return isinstance(c, Feasible) and any(
                        abs(float(np.trace(r).real) - 1.0) > 1e-6 for r in c.rhos
                    )

                small_t, small_f = shrink_instance(statistic, family, still_failing)
                return (
                    False,
                    f"unital solution has trace 1{trace_gap:+.3e} on an atom",
                    serialize_instance(small_t, small_f),
                )
        if worst > 1e-6:
            return False, f"state reconstruction residual {worst:.3e}", \
                serialize_instance(statistic, family)
    return True, (
        f"{len(pairs)} feasible instances verified, worst residual {worst:.3e}"
    ), None


def _prop_petz_structural(rng, count):
    for spec in _petz_corpus(rng, count):
        statistic, family = generate(spec)
        instance = PetzInstance.from_parts(statistic, family)
        cert = petz_feasibility(instance)
        if not isinstance(cert, Feasible):
            return False, f"planted-feasible instance judged {type(cert).__name__}", \
                serialize_instance(statistic, family)
        report = structural_check(instance, cert)
        if not report.ok:
            return False, "; ".join(report.violations), \
                serialize_instance(statistic, family)
        if not petz_implies_weak_check(instance, cert):
            return False, "feasible instance failed the weak-sufficiency implication", \
                serialize_instance(statistic, family)
    return True, "structure and weak-sufficiency implication hold on the corpus", None


def _prop_petz_orthogonality(rng, count):
    for trial in range(count):
        dim = int(rng.integers(2, 7))
        m = int(rng.integers(2, 5))
        spec = GeneratorSpec(dim=dim, n_states=m, flavor="complex_vectors",
                             seed=int(rng.integers(2**63)))
        statistic, family = generate(spec)
        gram_off = [
            abs(inner(family.vectors[i], family.vectors[j]))
            for i in range(m) for j in range(i + 1, m)
        ]
        if max(gram_off) <= 1e-6:
            continue  # astronomically unlikely, but then the theorem is silent
        cert = petz_feasibility(PetzInstance.from_parts(statistic, family))
        if isinstance(cert, Feasible):
            return False, "overlapping family judged feasible", \
                serialize_instance(statistic, family)
    return True, f"{count} overlapping families all refused", None


def _prop_petz_determinism(rng, count):
    spec = _petz_corpus(rng, 1)[0]
    statistic, family = generate(spec)
    instance = PetzInstance.from_parts(statistic, family)
    first = petz_feasibility(instance)
    second = petz_feasibility(instance)
    if type(first) is not type(second):
        return False, "certificate type changed between runs", None
    if isinstance(first, Feasible):
        same = first.iterations == second.iterations and all(
            np.array_equal(a, b) for a, b in zip(first.rhos, second.rhos)
        )
        if not same:
            return False, "feasible certificate not bitwise reproducible", None
    return True, "repeated runs are bitwise identical", None


def _prop_generator_determinism(rng, count):
    for flavor in FLAVORS:
        dim = 4 if flavor != "phase_obstructed" else 3
        m = 3
        spec = GeneratorSpec(dim=dim, n_states=m, flavor=flavor,
                             seed=int(rng.integers(2**63)))
        first = serialize_instance(*generate(spec))
        second = serialize_instance(*generate(spec))
        if first != second:
            return False, f"flavor {flavor} is not reproducible", None
    return True, "all flavors serialize byte-identically per seed", None


_PROPERTIES = [
    ("eigensolver_reconstruction", _prop_eig_reconstruction),
    ("statistic_matrix_roundtrip", _prop_statistic_roundtrip),
    ("phase_alignment_soundness", _prop_phase_soundness),
    ("phase_obstruction_certificates", _prop_phase_obstruction),
    ("phase_oracle_agreement", _prop_oracle_agreement),
    ("checker_matches_brute_force", _prop_checker_vs_brute_force),
    ("witness_soundness", _prop_witness_soundness),
    ("construction_roundtrip", _prop_construction_roundtrip),
    ("nonexistence_on_obstructed_families", _prop_nonexistence_on_obstructed),
    ("version_invariance", _prop_version_invariance),
    ("coarse_graining_cross_validation", _prop_coarse_cross_validation),
    ("minimal_function_property", _prop_minimal_function_property),
    ("dead_atom_counterexamples", _prop_dead_atom_family),
    ("petz_feasible_soundness", _prop_petz_soundness),
    ("petz_structural_theorem", _prop_petz_structural),
    ("petz_orthogonality_necessity", _prop_petz_orthogonality),
    ("petz_determinism", _prop_petz_determinism),
    ("generator_determinism", _prop_generator_determinism),
]

MUTATIONS = {
    "mod_2pi_phases": (phases_mod, "_CONSTRAINT_MODULUS", 2.0 * math.pi),
    "skip_rank_check": (sufficiency_mod, "_RANK_CHECK_ENABLED", False),
    "drop_trace_rows": (petz_mod, "_KEEP_TRACE_ROWS", False),
}


def run_property_suite(seed: int = 0, count: int = 100,
                       mutation: str | None = None) -> PropertyReport:
    """Execute the property catalog; optionally under an injected bug.

    The three documented mutations flip private module flags for the
    duration of the run (weakening the phase modulus to 2*pi, skipping
    the per-atom rank test, dropping the trace rows of the channel
    solver); the originals are always restored.
    """
    report = PropertyReport(seed=seed, count=count, mutation=mutation)
    if count <= 0:
        return report
    if mutation is not None:
        if mutation not in MUTATIONS:
            raise ValueError(
                f"unknown mutation '{mutation}'; expected one of "
                f"{', '.join(sorted(MUTATIONS))}"
            )
        module, attr, injected = MUTATIONS[mutation]
        original = getattr(module, attr)
        setattr(module, attr, injected)
        try:
            return _run_all(report)
        finally:
            setattr(module, attr, original)
    return _run_all(report)


def _run_all(report: PropertyReport) -> PropertyReport:
    master = np.random.default_rng(report.seed)
    for name, prop in _PROPERTIES:
        rng = np.random.default_rng(master.integers(2**63))
        try:
            passed, detail, counterexample = prop(rng, report.count)
        except Exception as exc:
            passed, detail, counterexample = False, f"raised {exc!r}", None
        report.results.append(
            PropertyResult(name=name, passed=passed, detail=detail,
                           counterexample=counterexample)
        )
    return report
