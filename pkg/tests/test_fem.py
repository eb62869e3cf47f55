"""P1 assembly, boundary conditions, and the preconditioned CG solver."""
import numpy as np
import pytest
import scipy.sparse as sp

from induction2d.fem import (
    apply_dirichlet, assemble_mass, assemble_robin, assemble_stiffness,
    gradient_per_triangle, l2_norm, load_from_cell_field, solve_spd,
)
from induction2d.mesh import DomainSpec, Mesh, OUTER, WORKPIECE, build_domain


def single_right_triangle():
    """Unit right triangle (legs 1, 1) as a standalone mesh."""
    return Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        triangles=np.array([[0, 1, 2]], dtype=np.int32),
        region=np.array([WORKPIECE], dtype=np.int8),
        boundary_edges=np.array([[0, 1], [1, 2], [2, 0]], dtype=np.int32),
        boundary_tags=np.array([OUTER, OUTER, OUTER], dtype=np.int8),
    )


@pytest.fixture(scope="module")
def square_mesh():
    wp = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return build_domain(DomainSpec(box=(0, 0, 1, 1), workpiece=wp, h=0.2))


def test_mass_element_matrix_exact():
    # exact integration of P1 products: (area/12) [[2,1,1],[1,2,1],[1,1,2]]
    m = assemble_mass(single_right_triangle(), 1.0).toarray()
    area = 0.5
    expect = area / 12.0 * np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
    assert np.allclose(m, expect, atol=1e-15)


def test_mass_zero_coefficient_gives_zero_matrix(square_mesh):
    m = assemble_mass(square_mesh, 0.0)
    assert m.nnz == 0 or np.all(m.data == 0.0)


def test_mass_total_equals_weighted_area(square_mesh):
    c = 3.7
    m = assemble_mass(square_mesh, c)
    assert abs(m.sum() - c * 1.0) < 1e-12


def test_mass_lumping_preserves_row_sums(square_mesh):
    m = assemble_mass(square_mesh, 2.0)
    ml = assemble_mass(square_mesh, 2.0, lumped=True)
    assert np.array_equal(np.asarray(m.sum(axis=1)).ravel(), ml.diagonal())


def test_stiffness_element_matrix_exact():
    k = assemble_stiffness(single_right_triangle(), 1.0).toarray()
    expect = 0.5 * np.array([[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    assert np.allclose(k, expect, atol=1e-15)


def test_stiffness_constants_in_kernel(square_mesh):
    k = assemble_stiffness(square_mesh, 1.3)
    ones = np.ones(square_mesh.num_vertices)
    assert np.max(np.abs(k @ ones)) < 1e-12


def test_stiffness_scaling_linearity(square_mesh):
    k1 = assemble_stiffness(square_mesh, 1.0)
    k2 = assemble_stiffness(square_mesh, 2.0)
    assert np.allclose((2.0 * k1 - k2).toarray(), 0.0, atol=1e-15)


def test_stiffness_rejects_nonpositive_coefficient(square_mesh):
    with pytest.raises(ValueError, match="positive"):
        assemble_stiffness(square_mesh, 0.0)


def test_galerkin_consistency_linear_fields(square_mesh):
    # v^T K u equals the exact integral of c grad(u).grad(v) for P1
    # interpolants of linear polynomials
    c = 2.5
    k = assemble_stiffness(square_mesh, c)
    x, y = square_mesh.vertices[:, 0], square_mesh.vertices[:, 1]
    u = 2.0 * x - 0.7 * y + 0.3
    v = -1.1 * x + 0.4 * y + 2.0
    exact = c * 1.0 * (2.0 * -1.1 + (-0.7) * 0.4)  # area * grad(u).grad(v)
    assert abs(v @ (k @ u) - exact) < 1e-12


def test_robin_single_edge_block():
    mesh = single_right_triangle()
    r, load = assemble_robin(mesh, OUTER, 1.0, 0.0)
    # the bottom edge (0, 1) of length 1 contributes (L/6)[[2,1],[1,2]]
    sub = r.toarray()[np.ix_([0, 1], [0, 1])]
    # all three edges are tagged; isolate by building a single-edge mesh tag
    mesh_one = Mesh(
        vertices=mesh.vertices, triangles=mesh.triangles, region=mesh.region,
        boundary_edges=np.array([[0, 1]], dtype=np.int32),
        boundary_tags=np.array([OUTER], dtype=np.int8),
    )
    r1, _ = assemble_robin(mesh_one, OUTER, 1.0, 0.0)
    expect = np.zeros((3, 3))
    expect[np.ix_([0, 1], [0, 1])] = 1.0 / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(r1.toarray(), expect, atol=1e-15)
    assert np.allclose(load, 0.0)


def test_robin_zero_g_zero_load(square_mesh):
    _, load = assemble_robin(square_mesh, OUTER, 2.0, 0.0)
    assert np.allclose(load, 0.0)


def test_robin_constant_g_load_sums_to_boundary_integral(square_mesh):
    g = 4.2
    _, load = assemble_robin(square_mesh, OUTER, 1.0, g)
    assert abs(load.sum() - g * 4.0) < 1e-12  # unit square perimeter 4


def test_robin_negative_eta_rejected(square_mesh):
    with pytest.raises(ValueError, match=">= 0"):
        assemble_robin(square_mesh, OUTER, -1.0, 0.0)


def test_dirichlet_all_nodes_zero(square_mesh):
    k = assemble_stiffness(square_mesh, 1.0)
    n = square_mesh.num_vertices
    mat, rhs = apply_dirichlet(k, np.zeros(n), np.arange(n), 0.0)
    x, info = solve_spd(mat, rhs)
    assert info.converged
    assert np.allclose(x, 0.0)


def test_dirichlet_three_node_chain_interpolates():
    # 1D-like chain: ends pinned to 0 and 1, Laplacian gives middle 0.5
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.5, 1.0], [1.5, 1.0]])
    tris = np.array([[0, 1, 3], [1, 4, 3], [1, 2, 4]], dtype=np.int32)
    mesh = Mesh(vertices=verts, triangles=tris,
                region=np.full(3, WORKPIECE, dtype=np.int8),
                boundary_edges=np.array([[0, 1], [1, 2], [2, 4], [4, 3], [3, 0]],
                                        dtype=np.int32),
                boundary_tags=np.zeros(5, dtype=np.int8))
    k = assemble_stiffness(mesh, 1.0)
    # pin left edge nodes to 0 and right edge nodes to 1; solve for the rest
    mat, rhs = apply_dirichlet(k, np.zeros(5), np.array([0, 2]), np.array([0.0, 1.0]))
    x, info = solve_spd(mat, rhs, tol=1e-13)
    assert info.converged
    assert abs(x[1] - 0.5) < 1e-10  # direct elimination oracle: symmetric chain


def test_dirichlet_preserves_symmetry(square_mesh):
    k = assemble_stiffness(square_mesh, 1.0)
    nodes = square_mesh.boundary_vertices(OUTER)
    mat, _ = apply_dirichlet(k, np.zeros(square_mesh.num_vertices), nodes, 1.5)
    asym = np.abs((mat - mat.T).toarray()).max()
    assert asym <= 1e-14


def test_dirichlet_conflicting_values_rejected(square_mesh):
    k = assemble_stiffness(square_mesh, 1.0)
    with pytest.raises(ValueError, match="conflicting"):
        apply_dirichlet(k, np.zeros(square_mesh.num_vertices),
                        np.array([0, 0]), np.array([0.0, 1.0]))


def test_solve_identity_converges_immediately():
    n = 7
    eye = sp.identity(n, format="csr")
    b = np.arange(1.0, n + 1.0)
    x, info = solve_spd(eye, b)
    assert info.converged and info.iterations <= 1
    assert np.allclose(x, b)


def test_solve_matches_dense_lu_oracle():
    rng = np.random.default_rng(42)
    a = rng.standard_normal((8, 8))
    spd = a @ a.T + 8.0 * np.eye(8)
    b = rng.standard_normal(8)
    x, info = solve_spd(sp.csr_matrix(spd), b, tol=1e-13)
    assert info.converged
    x_oracle = np.linalg.solve(spd, b)  # dense LU oracle
    assert np.allclose(x, x_oracle, atol=1e-10)


def test_solve_zero_rhs_returns_zero():
    a = sp.identity(5, format="csr")
    x, info = solve_spd(a, np.zeros(5))
    assert info.converged and info.iterations == 0
    assert np.all(x == 0.0)


def test_solve_maxit_flags_not_converged():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((30, 30))
    spd = sp.csr_matrix(a @ a.T + 0.01 * np.eye(30))
    b = rng.standard_normal(30)
    x, info = solve_spd(spd, b, tol=1e-14, maxit=2)
    assert not info.converged
    assert np.all(np.isfinite(x))


def test_solve_rejects_nonfinite():
    a = sp.identity(3, format="csr")
    with pytest.raises(ValueError, match="non-finite"):
        solve_spd(a, np.array([1.0, np.nan, 0.0]))


def test_assembly_deterministic(square_mesh):
    m1 = assemble_mass(square_mesh, 1.7)
    m2 = assemble_mass(square_mesh, 1.7)
    assert np.array_equal(m1.data, m2.data)
    assert np.array_equal(m1.indices, m2.indices)
    assert np.array_equal(m1.indptr, m2.indptr)


def test_cell_load_partition_of_unity(square_mesh):
    q = 2.0
    load = load_from_cell_field(square_mesh, q)
    assert abs(load.sum() - q * 1.0) < 1e-12


def test_gradient_of_linear_field_exact(square_mesh):
    x, y = square_mesh.vertices[:, 0], square_mesh.vertices[:, 1]
    g = gradient_per_triangle(square_mesh, 3.0 * x - 2.0 * y)
    assert np.allclose(g[:, 0], 3.0, atol=1e-12)
    assert np.allclose(g[:, 1], -2.0, atol=1e-12)


def test_l2_norm_of_constant(square_mesh):
    mass = assemble_mass(square_mesh, 1.0)
    assert abs(l2_norm(mass, np.full(square_mesh.num_vertices, 2.0)) - 2.0) < 1e-12
