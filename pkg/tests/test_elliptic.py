import numpy as np
import pytest

from illushape import (
    CgConvergenceError,
    CgParams,
    GridField,
    GridGeometry,
    LinearizedData,
    apply_operator,
    cg_solve,
    dense_matrix,
    dense_solve_oracle,
    linearize,
)

from helpers import flat_model, random_instance


def zero_rim_field(geom, rng, lo=-1.0, hi=1.0):
    v = rng.uniform(lo, hi, size=geom.shape)
    v[0, :] = v[-1, :] = 0.0
    v[:, 0] = v[:, -1] = 0.0
    return GridField(geom, v)


def test_linearize_at_zero():
    rng = np.random.default_rng(0)
    geom = GridGeometry(10, 10)
    from helpers import random_model

    p = random_model(geom, rng)
    data = linearize(GridField.zeros(geom), p)
    chi = p.mask.indicator()
    assert np.allclose(data.g_n.values, p.canyon.values + p.lam * chi, rtol=0, atol=0)
    assert np.all(data.f_n.values == 0.0)
    assert np.all(data.gamma_n.values == 0.0)


def test_linearize_at_one():
    rng = np.random.default_rng(1)
    geom = GridGeometry(10, 10)
    from helpers import random_model

    p = random_model(geom, rng)
    data = linearize(GridField.full(geom, 1.0), p)
    chi = p.mask.indicator()
    assert np.allclose(data.g_n.values, 3.0 * p.canyon.values + p.lam * chi, rtol=1e-15)
    assert np.allclose(data.f_n.values, 3.0 * p.canyon.values, rtol=1e-15)
    assert np.all(data.gamma_n.values == 1.0)


def test_linearize_consistency_identity():
    # f equals g * gamma minus the confinement part, cell by cell
    rng = np.random.default_rng(2)
    geom = GridGeometry(8, 8)
    data, p = random_instance(geom, rng)
    chi = p.mask.indicator()
    for i in range(geom.height):
        for j in range(geom.width):
            lhs = data.f_n.values[i, j]
            rhs = (
                data.g_n.values[i, j] * data.gamma_n.values[i, j]
                - p.lam * chi[i, j] * data.gamma_n.values[i, j]
            )
            assert lhs == pytest.approx(rhs, abs=1e-12)
    assert np.all(data.g_n.values >= p.canyon.alpha)
    assert np.all(data.f_n.values >= 0.0)


def test_operator_on_zero_field():
    rng = np.random.default_rng(3)
    geom = GridGeometry(9, 9)
    data, p = random_instance(geom, rng)
    out = apply_operator(GridField.zeros(geom), data, p)
    assert np.all(out.values == 0.0)


def test_operator_symmetry():
    rng = np.random.default_rng(5)
    geom = GridGeometry(12, 9)
    for _ in range(10):
        data, p = random_instance(geom, rng)
        z = zero_rim_field(geom, rng)
        w = zero_rim_field(geom, rng)
        az_w = float(np.sum(apply_operator(z, data, p).values * w.values))
        aw_z = float(np.sum(apply_operator(w, data, p).values * z.values))
        assert az_w == pytest.approx(aw_z, rel=1e-12)


def test_operator_matches_dirichlet_laplacian_eigenpair():
    # with a flat unit canyon and constant reaction c the operator reduces to
    # -eps^2 Lap + c; sine modes pinned at the rim are exact eigenvectors with
    # Lap eigenvalue (4/h^2)(sin^2(pi k / (2(H-1))) + sin^2(pi l / (2(W-1))))
    geom = GridGeometry(18, 14)
    h = geom.h
    p = flat_model(geom, g_value=1.0, epsilon=2 * h)
    c = 0.7
    data = LinearizedData(
        GridField.full(geom, c), GridField.zeros(geom), GridField.zeros(geom)
    )
    k, l = 3, 2
    rows = np.sin(np.pi * k * np.arange(geom.height) / (geom.height - 1))
    cols = np.sin(np.pi * l * np.arange(geom.width) / (geom.width - 1))
    v = np.outer(rows, cols)
    v[0, :] = v[-1, :] = 0.0
    v[:, 0] = v[:, -1] = 0.0
    lam = (4.0 / h**2) * (
        np.sin(np.pi * k / (2 * (geom.height - 1))) ** 2
        + np.sin(np.pi * l / (2 * (geom.width - 1))) ** 2
    )
    expected = (p.epsilon**2 * lam + c) * v
    got = apply_operator(GridField(geom, v), data, p).values
    assert np.allclose(got, expected, rtol=1e-10, atol=1e-10 * np.abs(expected).max())


def test_operator_positive_definite():
    rng = np.random.default_rng(7)
    geom = GridGeometry(10, 10)
    for _ in range(10):
        data, p = random_instance(geom, rng)
        z = zero_rim_field(geom, rng)
        quad = float(np.sum(apply_operator(z, data, p).values * z.values))
        floor = float(data.g_n.values[1:-1, 1:-1].min()) * float(np.sum(z.values**2))
        assert quad >= floor - 1e-12


def test_cg_zero_rhs_short_circuits():
    rng = np.random.default_rng(11)
    geom = GridGeometry(12, 12)
    data, p = random_instance(geom, rng)
    zero_data = LinearizedData(data.g_n, GridField.zeros(geom), data.gamma_n)
    solution, stats = cg_solve(zero_data, p)
    assert np.all(solution.values == 0.0)
    assert stats.iterations == 0
    assert stats.residual == 0.0


def test_cg_matches_dense_oracle():
    rng = np.random.default_rng(13)
    geom = GridGeometry(8, 8)
    for _ in range(10):
        data, p = random_instance(geom, rng)
        solution, _ = cg_solve(data, p, CgParams())
        reference = dense_solve_oracle(data, p)
        assert np.abs(solution.values - reference.values).max() <= 1e-8


def test_cg_warm_start_at_solution_takes_no_iterations():
    rng = np.random.default_rng(17)
    geom = GridGeometry(10, 10)
    data, p = random_instance(geom, rng)
    exact = dense_solve_oracle(data, p)
    solution, stats = cg_solve(data, p, CgParams(rel_tol=1e-7), warm_start=exact)
    assert stats.iterations == 0
    assert np.array_equal(solution.values, exact.values)


def test_cg_residual_contract_on_random_instances():
    rng = np.random.default_rng(19)
    geom = GridGeometry(16, 16)
    cg = CgParams()
    for _ in range(100):
        data, p = random_instance(geom, rng)
        solution, stats = cg_solve(data, p, cg)
        r = data.f_n.values.copy()
        r[0, :] = r[-1, :] = 0.0
        r[:, 0] = r[:, -1] = 0.0
        r -= apply_operator(solution, data, p).values
        rel = np.linalg.norm(r.ravel()) / np.linalg.norm(
            np.where(
                np.pad(np.ones((14, 14), dtype=bool), 1), data.f_n.values, 0.0
            ).ravel()
        )
        assert rel <= cg.rel_tol
        assert stats.residual <= cg.rel_tol


def test_cg_budget_exhaustion_raises_with_best_iterate():
    rng = np.random.default_rng(23)
    geom = GridGeometry(16, 16)
    data, p = random_instance(geom, rng)
    with pytest.raises(CgConvergenceError) as err:
        cg_solve(data, p, CgParams(rel_tol=1e-12, max_iters=2))
    assert err.value.iterations == 2
    assert err.value.residual > 0.0
    assert err.value.best.values.shape == geom.shape


def test_cg_params_validation():
    with pytest.raises(ValueError):
        CgParams(rel_tol=0.0)
    with pytest.raises(ValueError):
        CgParams(rel_tol=1e-3)
    with pytest.raises(ValueError):
        CgParams(max_iters=0)


def test_dense_oracle_single_unknown_closed_form():
    # 3x3 grid has one interior cell; the solve reduces to
    # z = f / (eps^2/h^2 * sum of face means + g)
    geom = GridGeometry(3, 3)
    h = geom.h
    p = flat_model(geom, g_value=1.0, epsilon=h)
    rng = np.random.default_rng(29)
    G = rng.uniform(0.5, 1.5, size=geom.shape)
    from illushape import CanyonField, ModelParams

    p = ModelParams(
        epsilon=h,
        lam=1.0,
        canyon=CanyonField(geom, G, alpha=0.5, beta=1.0),
        mask=p.mask,
    )
    g = rng.uniform(1.0, 2.0, size=geom.shape)
    f = rng.uniform(0.0, 1.0, size=geom.shape)
    data = LinearizedData(GridField(geom, g), GridField(geom, f), GridField.zeros(geom))
    faces = (
        0.5 * (G[1, 1] + G[1, 0])
        + 0.5 * (G[1, 1] + G[1, 2])
        + 0.5 * (G[1, 1] + G[0, 1])
        + 0.5 * (G[1, 1] + G[2, 1])
    )
    expected = f[1, 1] / ((p.epsilon / h) ** 2 * faces + g[1, 1])
    got = dense_solve_oracle(data, p)
    assert got.values[1, 1] == pytest.approx(expected, rel=1e-14)
    assert np.all(got.values[0, :] == 0.0)


def test_dense_solution_satisfies_equation():
    rng = np.random.default_rng(31)
    geom = GridGeometry(9, 9)
    data, p = random_instance(geom, rng)
    sol = dense_solve_oracle(data, p)
    back = apply_operator(sol, data, p)
    residual = np.abs(back.values - data.f_n.values)[1:-1, 1:-1].max()
    assert residual <= 1e-10


def test_dense_matrix_matches_operator_columns():
    rng = np.random.default_rng(37)
    geom = GridGeometry(6, 5)
    data, p = random_instance(geom, rng)
    K = dense_matrix(data, p)
    rows, cols = geom.height - 2, geom.width - 2
    for k in range(rows * cols):
        unit = np.zeros(geom.shape)
        unit[1 + k // cols, 1 + k % cols] = 1.0
        column = apply_operator(GridField(geom, unit), data, p).values[1:-1, 1:-1].ravel()
        assert np.array_equal(K[:, k], column)


def test_dense_oracle_size_limit():
    geom = GridGeometry(80, 80)
    data = LinearizedData(
        GridField.full(geom, 1.0), GridField.zeros(geom), GridField.zeros(geom)
    )
    p = flat_model(geom)
    with pytest.raises(ValueError):
        dense_solve_oracle(data, p)


def test_dense_solution_nonnegative_for_nonnegative_rhs():
    # discrete maximum principle of the M-matrix stencil
    rng = np.random.default_rng(41)
    geom = GridGeometry(10, 10)
    for _ in range(10):
        data, p = random_instance(geom, rng)
        f = rng.uniform(0.0, 1.0, size=geom.shape)
        nonneg = LinearizedData(data.g_n, GridField(geom, f), data.gamma_n)
        sol = dense_solve_oracle(nonneg, p)
        assert sol.values.min() >= -1e-12
