"""Channel-sufficiency (Petz-style) feasibility for discrete statistics.

The coarse-graining channel of a discrete statistic replaces a state by
a mixture over atoms: alpha(x) = sum_k tr(rho_k x) e_k for some family
of positive operators rho_k.  The family of pure states is invariant
under some such channel exactly when the affine system

    sum_k w[theta, k] * rho_k = |phi_theta><phi_theta|   for every theta
    (and tr rho_k = 1 for every k, in the unital case)

admits a positive semidefinite solution, where w[theta, k] is the weight
of state theta on atom k.  Invariant families of pure states are
necessarily pairwise orthogonal, so a cheap overlap precheck settles
most negative instances before any iteration.

The solver runs Dykstra-style alternating projections between the affine
set (one precomputed least-squares operator on stacked real coordinates
of the Hermitian blocks) and the product of PSD cones (spectral clipping
per block).  It never returns a silent failure: the outcome is Feasible,
NumericallyInfeasible (residual plateau well above tolerance), or an
UndecidedError when the iteration budget runs out while still improving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import hermitian_part, inner, psd_project
from .spectral import DiscreteStatistic, StateFamily, project_states
from .sufficiency import check_weak_sufficiency

ORTHOGONALITY_TOL = 1e-8
FEASIBILITY_TOL = 1e-7
STRUCTURAL_TOL = 1e-6
PLATEAU_WINDOW = 100
PLATEAU_IMPROVEMENT = 1e-12
DEFAULT_MAX_ITERS = 5000

# Fault-injection point for the self-test harness: drops the trace-one
# rows while the instance still claims to be unital.
_KEEP_TRACE_ROWS = True


class UndecidedError(RuntimeError):
    """Iteration budget exhausted while the residual was still improving."""


@dataclass
class PetzInstance:
    statistic: DiscreteStatistic
    family: StateFamily
    weights: np.ndarray          # (n_states, n_atoms), rows sum to 1
    unital: bool = True

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        expected = (len(self.family), len(self.statistic))
        if w.shape != expected:
            raise ValueError(f"weights shape {w.shape}, expected {expected}")
        if np.any(w < -1e-12):
            raise ValueError("weights must be nonnegative")
        worst = float(np.abs(w.sum(axis=1) - 1.0).max())
        if worst > 1e-8:
            raise ValueError(f"weight rows must sum to 1 (defect {worst:.3e})")
        self.weights = w

    @classmethod
    def from_parts(cls, statistic: DiscreteStatistic, family: StateFamily,
                   unital: bool = True) -> "PetzInstance":
        weights = project_states(statistic, family).weights
        return cls(statistic=statistic, family=family, weights=weights, unital=unital)


@dataclass
class Feasible:
    rhos: list[np.ndarray]
    max_constraint_residual: float
    iterations: int


@dataclass
class InfeasibleOrthogonality:
    """Two states overlap, so no invariant channel can exist."""

    pair: tuple[str, str]
    overlap: complex


@dataclass
class NumericallyInfeasible:
    residual_floor: float
    iterations: int


@dataclass
class StructuralReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


def orthogonality_precheck(family: StateFamily, tol: float = ORTHOGONALITY_TOL):
    """First overlapping pair of states, or None if pairwise orthogonal."""
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            overlap = inner(family.vectors[i], family.vectors[j])
            if abs(overlap) > tol:
                return (family.labels[i], family.labels[j]), overlap
    return None


def _herm_to_coords(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate(
        [np.diag(h).real, np.sqrt(2.0) * h[iu].real, np.sqrt(2.0) * h[iu].imag]
    )


def _coords_to_herm(x: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d, 1)
    n_off = iu[0].size
    m = np.zeros((d, d), dtype=complex)
    m[iu] = (x[d : d + n_off] + 1j * x[d + n_off :]) / np.sqrt(2.0)
    m = m + m.conj().T
    m[np.diag_indices(d)] = x[:d]
    return m


def petz_feasibility(instance: PetzInstance, max_iters: int = DEFAULT_MAX_ITERS,
                     tol: float = FEASIBILITY_TOL):
    """Decide channel-invariance feasibility for the instance.

    Returns one of the three certificate types.  The affine projection is
    a single least-squares operator built once; the cone projection clips
    spectra block by block.  Starting point: rho_k = I/d for every atom.
    """
    bad = orthogonality_precheck(instance.family)
    if bad is not None:
        return InfeasibleOrthogonality(pair=bad[0], overlap=bad[1])
    t, fam, w = instance.statistic, instance.family, instance.weights
    d, m, s = t.dim, len(t), len(fam)
    ncoord = d * d

    a = np.kron(w, np.eye(ncoord))
    b = np.concatenate(
        [_herm_to_coords(np.outer(phi, phi.conj())) for phi in fam.vectors]
    )
    if instance.unital and _KEEP_TRACE_ROWS:
        trace_row = np.zeros(ncoord)
        trace_row[:d] = 1.0
        a = np.vstack([a, np.kron(np.eye(m), trace_row[np.newaxis, :])])
        b = np.concatenate([b, np.ones(m)])
    pinv = np.linalg.pinv(a)

    x = np.concatenate([_herm_to_coords(np.eye(d) / d)] * m)
    correction = np.zeros_like(x)
    history: list[float] = []
    for it in range(1, max_iters + 1):
        y = x - pinv @ (a @ x - b)
        z = y + correction
        blocks = [
            psd_project(_coords_to_herm(z[k * ncoord : (k + 1) * ncoord], d))
            for k in range(m)
        ]
        x = np.concatenate([_herm_to_coords(blk) for blk in blocks])
        correction = z - x
        residual = float(np.abs(a @ x - b).max())
        history.append(residual)
        if residual <= tol:
            return Feasible(
                rhos=[hermitian_part(blk) for blk in blocks],
                max_constraint_residual=residual,
                iterations=it,
            )
        if it > PLATEAU_WINDOW:
            before = history[-PLATEAU_WINDOW - 1]
            improvement = (before - residual) / max(before, 1e-300)
            if improvement < PLATEAU_IMPROVEMENT and residual > 10.0 * tol:
                return NumericallyInfeasible(residual_floor=residual, iterations=it)
    raise UndecidedError(
        f"residual {history[-1]:.3e} still improving after {max_iters} iterations"
    )


def structural_check(instance: PetzInstance, cert: Feasible,
                     tol: float = STRUCTURAL_TOL) -> StructuralReport:
    """Verify the representation structure of a feasible certificate.

    Every atom carrying weight of some state must be loaded by exactly
    one state, and its rho must be the projector onto that state.  Atoms
    carrying no weight are unconstrained.  Only meaningful for unital
    instances; scaling is allowed otherwise.
    """
    if not isinstance(cert, Feasible):
        raise ValueError("structural check needs a Feasible certificate")
    w = instance.weights
    fam = instance.family
    violations: list[str] = []
    for k in range(len(instance.statistic)):
        loaded = [n for n in range(len(fam)) if w[n, k] > tol]
        if len(loaded) > 1:
            names = ", ".join(fam.labels[n] for n in loaded)
            violations.append(f"atom {k} is loaded by several states: {names}")
            continue
        if not loaded:
            continue
        n = loaded[0]
        target = np.outer(fam.vectors[n], fam.vectors[n].conj())
        deviation = float(np.abs(cert.rhos[k] - target).max())
        if deviation > 10.0 * tol:
            violations.append(
                f"rho[{k}] deviates from the projector onto "
                f"'{fam.labels[n]}' by {deviation:.3e}"
            )
    return StructuralReport(ok=not violations, violations=violations)


def petz_implies_weak_check(instance: PetzInstance, cert: Feasible) -> bool:
    """Channel sufficiency must imply weak sufficiency; re-check the pair."""
    if not isinstance(cert, Feasible):
        raise ValueError("implication check needs a Feasible certificate")
    return check_weak_sufficiency(instance.statistic, instance.family).sufficient
