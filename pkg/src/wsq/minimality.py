"""Coarse-grainings of a sufficient statistic and the minimal one.

Two atoms of a weakly sufficient statistic are interchangeable when
their coefficient rows in the gamma table are proportional: merging such
atoms preserves weak sufficiency, and merging any other pair destroys
it.  The minimal statistic merges exactly the proportionality classes --
it exists precisely when every atom carries some weight of the family.
When an atom is dead, no minimal statistic exists, and merging the dead
atom into each live atom in turn yields a family of incomparable
sufficient coarse-grainings that witnesses the failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .linalg import hermitian_eig, inner, numerical_rank
from .spectral import CoarseMap, DiscreteStatistic, StateFamily, apply_coarse, project_states
from .sufficiency import GammaTable, build_gamma_table, check_weak_sufficiency

RANK_TOL = 1e-8
TRANSITIVITY_SLACK = 100.0   # relative loosening for the post-hoc class check
MAX_ENUMERATED_ATOMS = 9     # Bell(10) = 115975 is past the exhaustive budget


@dataclass
class AtomClasses:
    """Proportionality classes of active atoms, with pairwise factors.

    classes are ordered by smallest member; witnesses maps each same-class
    pair (j, m) with j < m to the factor beta such that
    gamma_row[j] ~= beta * gamma_row[m].
    """

    classes: list[tuple[int, ...]]
    witnesses: dict[tuple[int, int], complex]

    def class_index(self, atom: int) -> int | None:
        for i, cls in enumerate(self.classes):
            if atom in cls:
                return i
        return None


@dataclass
class MinimalStatistic:
    statistic: DiscreteStatistic
    classes: AtomClasses
    partition: list[list[int]]


@dataclass
class NoMinimalExists:
    """The statistic has an atom carrying no weight of any state."""

    dead_atom: int


def _rows_proportional(gj: np.ndarray, gm: np.ndarray, tol: float) -> bool:
    # The 2x2 Gram of the two rows has the same nonzero spectrum as the
    # Gram of the merged atom's projected vectors, so thresholding its
    # eigenvalues exactly like numerical_rank keeps this decision
    # bit-compatible with a direct rank check on the merged statistic.
    h = np.array(
        [[inner(gj, gj), inner(gj, gm)], [inner(gm, gj), inner(gm, gm)]],
        dtype=complex,
    )
    w, _ = hermitian_eig(0.5 * (h + h.conj().T))
    lo = max(float(w[0]), 0.0)
    hi = max(float(w[1]), 0.0)
    return lo <= tol * max(1.0, hi)


def equivalence_classes(table: GammaTable, tol: float = RANK_TOL,
                        strict_real: bool = False) -> AtomClasses:
    """Group active atoms whose gamma rows are proportional.

    The factor beta is complex in general; strict_real additionally
    requires beta to be real within tol, splitting classes accordingly.
    Transitivity of the pairwise relation is re-verified on the computed
    classes at a composed tolerance and gross failures raise ValueError.
    """
    active = [k for k, flag in enumerate(table.active) if flag]
    parent = {k: k for k in active}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def beta_for(j, m):
        gm = table.gamma[m]
        return inner(table.gamma[j], gm) / inner(gm, gm).real

    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            j, m = active[a], active[b]
            if not _rows_proportional(table.gamma[j], table.gamma[m], tol):
                continue
            if strict_real:
                beta = beta_for(j, m)
                if abs(beta.imag) > tol * abs(beta):
                    continue
            ra, rb = find(j), find(m)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    grouped: dict[int, list[int]] = {}
    for k in active:
        grouped.setdefault(find(k), []).append(k)
    classes = [tuple(sorted(v)) for v in grouped.values()]
    classes.sort(key=lambda cls: cls[0])

    witnesses: dict[tuple[int, int], complex] = {}
    for cls in classes:
        for a in range(len(cls)):
            for b in range(a + 1, len(cls)):
                j, m = cls[a], cls[b]
                if not _rows_proportional(
                    table.gamma[j], table.gamma[m], tol * TRANSITIVITY_SLACK
                ):
                    raise ValueError(
                        f"atoms {j} and {m} land in one class but are not "
                        "proportional at the composed tolerance"
                    )
                witnesses[(j, m)] = beta_for(j, m)
    return AtomClasses(classes=classes, witnesses=witnesses)


def check_coarse_sufficient(t: DiscreteStatistic, family: StateFamily,
                            cmap: CoarseMap, tol: float = RANK_TOL) -> bool:
    """Is f(T) still weakly sufficient?  Decided from the classes alone.

    Requires (t, family) itself to be weakly sufficient.  A block of the
    coarse-graining is harmless iff all its active atoms lie in one
    proportionality class; no projection or phase work is redone.
    """
    verdict = check_weak_sufficiency(t, family, tol)
    if not verdict.sufficient:
        raise ValueError("the statistic is not weakly sufficient for the family")
    table = build_gamma_table(t, family, tol)
    classes = equivalence_classes(table, tol)
    _, partition = apply_coarse(t, cmap)
    for block in partition:
        active_in_block = [k for k in block if table.active[k]]
        if len(active_in_block) < 2:
            continue
        first = classes.class_index(active_in_block[0])
        if any(classes.class_index(k) != first for k in active_in_block[1:]):
            return False
    return True


def minimal_statistic(t: DiscreteStatistic, family: StateFamily,
                      tol: float = RANK_TOL):
    """Coarsest weakly sufficient relabelling of t, if one exists.

    Returns MinimalStatistic (atoms = proportionality classes, values
    1..m in order of smallest member) or NoMinimalExists naming a dead
    atom.  Families spanning less than two dimensions are rejected: every
    statistic is sufficient for them, so minimality is vacuous.
    """
    verdict = check_weak_sufficiency(t, family, tol)
    if not verdict.sufficient:
        raise ValueError("the statistic is not weakly sufficient for the family")
    if numerical_rank(family.vectors, tol) < 2:
        raise ValueError("family spans less than two dimensions; minimality is vacuous")
    weights = project_states(t, family).weights
    for k in range(len(t)):
        if float(weights[:, k].max()) <= tol:
            return NoMinimalExists(dead_atom=k)
    table = build_gamma_table(t, family, tol)
    classes = equivalence_classes(table, tol)
    values: dict[float, float] = {}
    for i, cls in enumerate(classes.classes):
        for k in cls:
            values[float(t.eigenvalues[k])] = float(i + 1)
    coarse, partition = apply_coarse(t, CoarseMap(values))
    confirm = check_weak_sufficiency(coarse, family, tol)
    if not confirm.sufficient:   # pragma: no cover - internal consistency
        raise RuntimeError("class-merged statistic failed its own sufficiency check")
    return MinimalStatistic(statistic=coarse, classes=classes, partition=partition)


def is_function_of(s: DiscreteStatistic, u: DiscreteStatistic,
                   tol: float = RANK_TOL):
    """Relabelling psi with s = psi(u), or None.

    Each atom of u must sit inside exactly one atom of s; the returned
    dict maps u-eigenvalues to s-eigenvalues.
    """
    if s.dim != u.dim:
        raise ValueError("statistics act on different dimensions")
    psi: dict[float, float] = {}
    for i, f in enumerate(u.projections):
        hosts = [
            j
            for j, q in enumerate(s.projections)
            if np.abs(q @ f - f).max() <= tol
        ]
        if len(hosts) != 1:
            return None
        psi[float(u.eigenvalues[i])] = float(s.eigenvalues[hosts[0]])
    return psi


def enumerate_coarse_grainings(t: DiscreteStatistic,
                               max_atoms: int = MAX_ENUMERATED_ATOMS) -> Iterator[CoarseMap]:
    """All set partitions of the atoms, as coarse maps, in restricted-growth order.

    Yields Bell(#atoms) maps, the all-in-one-block partition first and the
    identity partition last.  Guarded against Bell-number explosion.
    """
    n = len(t)
    if n > max_atoms:
        raise ValueError(
            f"{n} atoms would enumerate too many partitions (limit {max_atoms})"
        )
    evs = [float(x) for x in t.eigenvalues]
    rgs = [0] * n
    while True:
        yield CoarseMap({evs[i]: float(rgs[i] + 1) for i in range(n)})
        for i in range(n - 1, 0, -1):
            if rgs[i] <= max(rgs[:i]):
                rgs[i] += 1
                for j in range(i + 1, n):
                    rgs[j] = 0
                break
        else:
            return


def dead_atom_counterexamples(t: DiscreteStatistic, dead_atom: int):
    """Merge the dead atom into each other atom in turn.

    Returns {n: statistic with atoms dead_atom and n merged under
    eigenvalue lambda_n}.  Each result is weakly sufficient whenever t
    is (the dead atom contributes nothing), yet only a scalar could be a
    function of them all -- which is why no minimal statistic exists.
    """
    if not 0 <= dead_atom < len(t):
        raise ValueError(f"no atom {dead_atom}")
    if len(t) < 2:
        raise ValueError("need at least two atoms to merge")
    out: dict[int, DiscreteStatistic] = {}
    for n in range(len(t)):
        if n == dead_atom:
            continue
        values = {
            float(lam): float(t.eigenvalues[n]) if k == dead_atom else float(lam)
            for k, lam in enumerate(t.eigenvalues)
        }
        merged, _ = apply_coarse(t, CoarseMap(values))
        out[n] = merged
    return out
