import numpy as np
import pytest

from wsq.spectral import (
    CoarseMap,
    DiscreteStatistic,
    StateFamily,
    apply_coarse,
    evaluate_function_on_statistic,
    project_states,
    statistic_from_matrix,
)


def random_statistic(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return statistic_from_matrix(0.5 * (a + a.conj().T))


def random_family(rng, d, n):
    vecs = []
    for _ in range(n):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        vecs.append(v / np.linalg.norm(v))
    return StateFamily(tuple(f"s{i}" for i in range(n)), tuple(vecs))


# --------------------------------------------------- statistic_from_matrix


def test_diagonal_matrix_splits_into_basis_atoms():
    t = statistic_from_matrix(np.diag([1.0, -1.0]))
    assert np.array_equal(t.eigenvalues, [-1.0, 1.0])
    assert np.array_equal(t.projections[0], np.diag([0.0, 1.0 + 0j]))
    assert np.array_equal(t.projections[1], np.diag([1.0 + 0j, 0.0]))


def test_degenerate_eigenvalues_share_an_atom():
    t = statistic_from_matrix(np.diag([1.0, 1.0, 2.0]))
    assert len(t) == 2
    assert np.trace(t.projections[0]).real == pytest.approx(2.0, abs=1e-12)


def test_grouping_uses_relative_gap():
    t = statistic_from_matrix(np.diag([0.0, 1e-12, 1.0]))
    assert len(t) == 2  # 0 and 1e-12 merge below the relative cutoff
    t2 = statistic_from_matrix(np.diag([0.0, 1e-6, 1.0]))
    assert len(t2) == 3


def test_reconstruction_from_atoms():
    rng = np.random.default_rng(5)
    for _ in range(10):
        d = int(rng.integers(2, 9))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        m = 0.5 * (a + a.conj().T)
        t = statistic_from_matrix(m)
        assert np.abs(t.matrix() - m).max() <= 1e-8 * np.abs(m).max()


def test_partition_of_identity_invariants():
    rng = np.random.default_rng(6)
    t = random_statistic(rng, 6)
    total = sum(t.projections)
    assert np.abs(total - np.eye(6)).max() <= 1e-8
    for j, p in enumerate(t.projections):
        assert np.abs(p @ p - p).max() <= 1e-8
        for q in t.projections[j + 1 :]:
            assert np.abs(p @ q).max() <= 1e-8


# ------------------------------------------------------- DiscreteStatistic


def test_statistic_rejects_incomplete_partition():
    p = np.diag([1.0 + 0j, 0.0])
    with pytest.raises(ValueError, match="sum to the identity"):
        DiscreteStatistic(np.array([1.0]), (p,))


def test_statistic_rejects_non_idempotent():
    with pytest.raises(ValueError, match="idempotent"):
        DiscreteStatistic(np.array([1.0]), (0.5 * np.eye(2, dtype=complex),))


def test_statistic_rejects_overlapping_projections():
    p = np.diag([1.0 + 0j, 0.0])
    with pytest.raises(ValueError, match="not orthogonal"):
        DiscreteStatistic(np.array([0.0, 1.0]), (p, p))


def test_statistic_rejects_coincident_eigenvalues():
    p1 = np.diag([1.0 + 0j, 0.0])
    p2 = np.diag([0.0, 1.0 + 0j])
    with pytest.raises(ValueError, match="ascending"):
        DiscreteStatistic(np.array([1.0, 1.0]), (p1, p2))


# ------------------------------------------------------------- StateFamily


def test_family_rejects_non_unit_state():
    with pytest.raises(ValueError, match="'phi1' not unit norm"):
        StateFamily(("phi1",), (np.array([1.0, 1.0]),))


def test_family_rejects_duplicate_labels():
    v = np.array([1.0, 0.0])
    with pytest.raises(ValueError, match="unique"):
        StateFamily(("a", "a"), (v, v))


def test_family_lookup_by_label():
    v1, v2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    fam = StateFamily(("x", "y"), (v1, v2))
    assert np.array_equal(fam.vector("y"), v2)
    with pytest.raises(ValueError, match="no state labelled"):
        fam.vector("z")


# ------------------------------------------------------------ apply_coarse


def test_apply_coarse_merges_and_orders_atoms():
    t = statistic_from_matrix(np.diag([1.0, 2.0, 3.0]))
    coarse, partition = apply_coarse(
        t, CoarseMap({1.0: 5.0, 2.0: 5.0, 3.0: 1.0})
    )
    assert np.array_equal(coarse.eigenvalues, [1.0, 5.0])
    assert partition == [[2], [0, 1]]
    assert np.abs(coarse.projections[1] - np.diag([1.0, 1.0, 0.0])).max() == 0.0


def test_apply_coarse_requires_total_map():
    t = statistic_from_matrix(np.diag([1.0, 2.0]))
    with pytest.raises(ValueError, match="no value for eigenvalue"):
        apply_coarse(t, CoarseMap({1.0: 0.0}))


def test_coarse_composition_matches_composed_map():
    rng = np.random.default_rng(9)
    t = random_statistic(rng, 5)
    first = CoarseMap({lam: float(i // 2) for i, lam in enumerate(t.eigenvalues)})
    u, _ = apply_coarse(t, first)
    second = CoarseMap({lam: float(-lam) for lam in u.eigenvalues})
    left, _ = apply_coarse(u, second)
    composed = CoarseMap(
        {lam: second.value_for(first.value_for(lam)) for lam in t.eigenvalues}
    )
    right, _ = apply_coarse(t, composed)
    assert np.array_equal(left.eigenvalues, right.eigenvalues)
    for p, q in zip(left.projections, right.projections):
        assert np.abs(p - q).max() <= 1e-12


# ---------------------------------------------------------- project_states


def test_projection_weights_are_stochastic():
    rng = np.random.default_rng(13)
    for _ in range(10):
        d = int(rng.integers(2, 8))
        t = random_statistic(rng, d)
        fam = random_family(rng, d, int(rng.integers(1, 5)))
        table = project_states(t, fam)
        assert np.abs(table.weights.sum(axis=1) - 1.0).max() <= 1e-9
        assert table.weights.min() >= -1e-12
        # components of each state add back up to the state
        for i, phi in enumerate(fam.vectors):
            assert np.abs(table.components[:, i].sum(axis=0) - phi).max() <= 1e-9


def test_project_states_rejects_dimension_mismatch():
    t = statistic_from_matrix(np.diag([1.0, 2.0]))
    fam = StateFamily(("a",), (np.array([1.0, 0.0, 0.0]),))
    with pytest.raises(ValueError, match="dimension"):
        project_states(t, fam)


# --------------------------------------- evaluate_function_on_statistic


def test_evaluate_known_function_values():
    t = statistic_from_matrix(np.diag([1.0, -1.0]))
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    out = evaluate_function_on_statistic(t, {1.0: np.sqrt(2), -1.0: 0.0}, v)
    assert out == pytest.approx([1.0, 0.0], abs=1e-12)


def test_evaluate_requires_value_for_every_atom():
    t = statistic_from_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError, match="no value for eigenvalue"):
        evaluate_function_on_statistic(t, {1.0: 1.0}, np.array([1.0, 0.0]))


def test_evaluate_rejects_complex_values():
    t = statistic_from_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError, match="must be real"):
        evaluate_function_on_statistic(
            t, {1.0: 1.0j, -1.0: 0.0}, np.array([1.0, 0.0])
        )
