"""P1 finite-element assembly and a diagonally preconditioned CG solver.

All bilinear forms use exact quadrature for P1 x P1 products with piecewise
constant coefficients, so the element matrices carry no quadrature error.
Matrices are scipy CSR with sorted, unique column indices; assembly order is
fixed, so identical inputs produce bit-identical matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh


def _coef_per_triangle(mesh: Mesh, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.ndim == 0:
        c = np.full(mesh.num_triangles, float(c))
    if c.shape != (mesh.num_triangles,):
        raise ValueError("coefficient must be scalar or one value per triangle")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coefficient")
    return c


def _gradients(mesh: Mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-triangle P1 shape gradients: returns (bx, by, area).

    bx[t, i], by[t, i] are the components of grad(phi_i) on triangle t.
    """
    p = mesh.vertices[mesh.triangles]
    x = p[:, :, 0]
    y = p[:, :, 1]
    area = mesh.triangle_areas
    # grad phi_i = (y_j - y_k, x_k - x_j) / (2A) with (i, j, k) cyclic
    bx = (y[:, [1, 2, 0]] - y[:, [2, 0, 1]]) / (2.0 * area[:, None])
    by = (x[:, [2, 0, 1]] - x[:, [1, 2, 0]]) / (2.0 * area[:, None])
    return bx, by, area


def _scatter(mesh: Mesh, elem: np.ndarray) -> sp.csr_matrix:
    """Scatter (nt, 3, 3) element matrices into a global CSR matrix."""
    n = mesh.num_vertices
    tris = mesh.triangles
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    mat = sp.coo_matrix((elem.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def assemble_mass(mesh: Mesh, c=1.0, lumped: bool = False) -> sp.csr_matrix:
    """Assemble M_ij = sum_T c_T int_T phi_i phi_j.

    Symmetric; positive semidefinite for c >= 0.  With `lumped` the rows are
    summed onto the diagonal (row sums are preserved exactly).
    """
    c = _coef_per_triangle(mesh, c)
    base = (np.ones((3, 3)) + np.eye(3)) / 12.0
    elem = (c * mesh.triangle_areas)[:, None, None] * base[None, :, :]
    mat = _scatter(mesh, elem)
    if lumped:
        return sp.diags(np.asarray(mat.sum(axis=1)).ravel(), format="csr")
    return mat


def assemble_stiffness(mesh: Mesh, c=1.0) -> sp.csr_matrix:
    """Assemble K_ij = sum_T c_T int_T grad(phi_i) . grad(phi_j); requires c > 0."""
    c = _coef_per_triangle(mesh, c)
    if np.any(c <= 0.0):
        raise ValueError("stiffness coefficient must be positive")
    bx, by, area = _gradients(mesh)
    elem = (c * area)[:, None, None] * (bx[:, :, None] * bx[:, None, :]
                                        + by[:, :, None] * by[:, None, :])
    return _scatter(mesh, elem)


def assemble_robin(mesh: Mesh, tag: int, eta: float, g=0.0) -> tuple[sp.csr_matrix, np.ndarray]:
    """Boundary mass matrix and load from the Robin condition on tagged edges.

    Adds eta * int_edge phi_i phi_j to the matrix (an edge of length L
    contributes (eta*L/6) * [[2,1],[1,2]]) and int_edge g phi_i to the load.
    `g` may be a scalar, a per-edge array (constant per edge), a (k, 2) array
    of per-edge endpoint values, or a callable g(x, y) evaluated at the edge
    endpoints; the value is P1-interpolated along each edge.
    """
    if eta < 0.0:
        raise ValueError("eta must be >= 0")
    edges = mesh.edges_with_tag(tag)
    n = mesh.num_vertices
    load = np.zeros(n)
    if edges.shape[0] == 0:
        return sp.csr_matrix((n, n)), load
    a = mesh.vertices[edges[:, 0]]
    b = mesh.vertices[edges[:, 1]]
    lengths = np.hypot(*(b - a).T)

    if callable(g):
        ga = np.array([g(x, y) for x, y in a], dtype=float)
        gb = np.array([g(x, y) for x, y in b], dtype=float)
    else:
        gv = np.asarray(g, dtype=float)
        if gv.ndim == 0:
            ga = gb = np.full(edges.shape[0], float(gv))
        elif gv.shape == (edges.shape[0],):
            ga = gb = gv
        elif gv.shape == (edges.shape[0], 2):
            ga, gb = gv[:, 0], gv[:, 1]
        else:
            raise ValueError("g must be scalar, per-edge, endpoint pairs, or callable")
    np.add.at(load, edges[:, 0], lengths / 6.0 * (2.0 * ga + gb))
    np.add.at(load, edges[:, 1], lengths / 6.0 * (ga + 2.0 * gb))

    w = eta * lengths / 6.0
    rows = np.concatenate([edges[:, 0], edges[:, 0], edges[:, 1], edges[:, 1]])
    cols = np.concatenate([edges[:, 0], edges[:, 1], edges[:, 0], edges[:, 1]])
    vals = np.concatenate([2.0 * w, w, w, 2.0 * w])
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat, load


def apply_dirichlet(mat: sp.csr_matrix, rhs: np.ndarray, nodes: np.ndarray,
                    values=0.0) -> tuple[sp.csr_matrix, np.ndarray]:
    """Eliminate Dirichlet rows/columns symmetrically.

    The returned system's solution takes the prescribed values exactly at the
    constrained nodes and the matrix stays symmetric.
    """
    nodes = np.asarray(nodes, dtype=np.int64).ravel()
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 0:
        vals = np.full(nodes.size, float(vals))
    if vals.shape != nodes.shape:
        raise ValueError("values must be scalar or match nodes")
    uniq, first = np.unique(nodes, return_index=True)
    if uniq.size != nodes.size:
        for u in uniq:
            where = nodes == u
            if np.ptp(vals[where]) > 0.0:
                raise ValueError(f"conflicting Dirichlet values at node {u}")
        nodes, vals = uniq, vals[first]

    n = mat.shape[0]
    full = np.zeros(n)
    full[nodes] = vals
    rhs = rhs - mat @ full
    keep = np.ones(n)
    keep[nodes] = 0.0
    d = sp.diags(keep)
    fixed = np.zeros(n)
    fixed[nodes] = 1.0
    out = (d @ mat @ d + sp.diags(fixed)).tocsr()
    out.eliminate_zeros()
    out.sum_duplicates()
    out.sort_indices()
    rhs[nodes] = vals
    return out, rhs


def constrain_matrix(mat: sp.csr_matrix, nodes: np.ndarray) -> sp.csr_matrix:
    """Symmetric elimination of `nodes` (homogeneous case, matrix only)."""
    n = mat.shape[0]
    keep = np.ones(n)
    keep[np.asarray(nodes, dtype=np.int64)] = 0.0
    d = sp.diags(keep)
    fixed = np.zeros(n)
    fixed[np.asarray(nodes, dtype=np.int64)] = 1.0
    out = (d @ mat @ d + sp.diags(fixed)).tocsr()
    out.eliminate_zeros()
    out.sum_duplicates()
    out.sort_indices()
    return out


@dataclass
class SolveInfo:
    iterations: int
    converged: bool
    relative_residual: float


def solve_spd(mat: sp.csr_matrix, rhs: np.ndarray, tol: float = 1e-10,
              maxit: int | None = None, x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveInfo]:
    """Conjugate gradients with diagonal (Jacobi) preconditioning.

    Stops when ||A x - b|| <= tol * ||b||.  If maxit is exceeded the best
    iterate is returned with converged=False; non-finite inputs raise.
    """
    rhs = np.asarray(rhs, dtype=float)
    if not np.all(np.isfinite(rhs)) or not np.all(np.isfinite(mat.data)):
        raise ValueError("non-finite entries in system")
    n = rhs.size
    if maxit is None:
        maxit = max(200, 20 * int(np.sqrt(n)) + n // 2)
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros(n), SolveInfo(0, True, 0.0)

    diag = mat.diagonal().copy()
    diag[diag <= 0.0] = 1.0
    inv_diag = 1.0 / diag

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    r = rhs - mat @ x
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    best_x = x.copy()
    best_res = float(np.linalg.norm(r))
    if best_res <= tol * bnorm:
        return x, SolveInfo(0, True, best_res / bnorm)
    for it in range(1, maxit + 1):
        ap = mat @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            break  # matrix not SPD on this subspace; return best so far
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        res = float(np.linalg.norm(r))
        if res < best_res:
            best_res = res
            best_x = x.copy()
        if res <= tol * bnorm:
            return x, SolveInfo(it, True, res / bnorm)
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return best_x, SolveInfo(maxit, False, best_res / bnorm)


def load_from_cell_field(mesh: Mesh, q) -> np.ndarray:
    """Load vector of a piecewise-constant source: int_T q phi_i = q_T A_T / 3."""
    q = _coef_per_triangle(mesh, q)
    contrib = q * mesh.triangle_areas / 3.0
    load = np.zeros(mesh.num_vertices)
    for i in range(3):
        np.add.at(load, mesh.triangles[:, i], contrib)
    return load


def cell_to_nodes(mesh: Mesh, q) -> np.ndarray:
    """Area-weighted average of a per-triangle field onto the vertices."""
    q = _coef_per_triangle(mesh, q)
    num = np.zeros(mesh.num_vertices)
    den = np.zeros(mesh.num_vertices)
    w = mesh.triangle_areas / 3.0
    for i in range(3):
        np.add.at(num, mesh.triangles[:, i], q * w)
        np.add.at(den, mesh.triangles[:, i], w)
    return num / den


def gradient_per_triangle(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    """Constant per-triangle gradient (nt, 2) of a P1 nodal field."""
    bx, by, _ = _gradients(mesh)
    v = np.asarray(values, dtype=float)[mesh.triangles]
    return np.stack([(bx * v).sum(axis=1), (by * v).sum(axis=1)], axis=1)


def l2_norm(mass: sp.csr_matrix, values: np.ndarray) -> float:
    """L2(domain) norm of a nodal field via the (consistent) mass matrix."""
    v = np.asarray(values, dtype=float)
    return float(np.sqrt(max(v @ (mass @ v), 0.0)))
