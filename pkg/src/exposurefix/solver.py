"""Sparse weighted-least-squares system on the pixel grid.

The smoothing objective

    sum_p (L_p - L0_p)^2 + lam * (wx_p (dx L)_p^2 + wy_p (dy L)_p^2)

with forward differences (zero at the last column / row) has the normal
equations ``(I + lam * (Dx' Wx Dx + Dy' Wy Dy)) L = L0``. The matrix is a
symmetric, diagonally dominant M-matrix with a 5-point stencil; unknowns are
ordered row-major.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_ORACLE_LIMIT = 4096

PRECONDITIONERS = ('factor', 'jacobi')


class ConvergenceError(RuntimeError):
    """CG stopped at the iteration limit before reaching the tolerance."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolverSettings:
    """Stopping rule and preconditioner for :func:`solve_cg`.

    ``preconditioner='factor'`` uses a single-precision sparse LU of the
    system (nested-dissection ordering) and typically converges in a handful
    of iterations even when the smoothness weights span eight decades.
    ``'jacobi'`` is the plain diagonal preconditioner; it is only practical
    for small or mildly weighted systems.
    """

    tol: float = 1e-5
    max_iter: int = 5000
    preconditioner: str = 'factor'

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f'tol must be positive, got {self.tol}')
        if self.max_iter < 1:
            raise ValueError(f'max_iter must be >= 1, got {self.max_iter}')
        if self.preconditioner not in PRECONDITIONERS:
            raise ValueError(f'preconditioner must be one of {PRECONDITIONERS}, '
                             f'got {self.preconditioner!r}')


@dataclass(frozen=True)
class SolveInfo:
    iterations: int
    residual: float


@dataclass(frozen=True)
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    shape: tuple

    @property
    def size(self):
        return self.rhs.size


def assemble(initial, wx, wy, lam):
    """Build the normal equations of the weighted smoothing objective.

    ``wx[i, j]`` weights the difference between pixel ``(i, j)`` and its right
    neighbour, ``wy[i, j]`` the one with the pixel below. Weights in the last
    column (for `wx`) and last row (for `wy`) have no difference to act on and
    are ignored.
    """
    initial = np.asarray(initial, dtype=np.float64)
    wx = np.asarray(wx, dtype=np.float64)
    wy = np.asarray(wy, dtype=np.float64)
    if initial.ndim != 2:
        raise ValueError(f'initial field must be 2-D, got shape {initial.shape}')
    if wx.shape != initial.shape or wy.shape != initial.shape:
        raise ValueError(f'weight shapes {wx.shape}, {wy.shape} do not match '
                         f'field shape {initial.shape}')
    if lam < 0:
        raise ValueError(f'lambda must be non-negative, got {lam}')
    if (wx < 0).any() or (wy < 0).any():
        raise ValueError('smoothness weights must be non-negative')

    h, w = initial.shape
    n = h * w
    index = np.arange(n).reshape(h, w)
    # one (p, q, coupling) triple per horizontal and vertical neighbour pair
    p = np.concatenate([index[:, :-1].ravel(), index[:-1, :].ravel()])
    q = np.concatenate([index[:, 1:].ravel(), index[1:, :].ravel()])
    c = lam * np.concatenate([wx[:, :-1].ravel(), wy[:-1, :].ravel()])

    diag = 1.0 + np.bincount(p, c, minlength=n) + np.bincount(q, c, minlength=n)
    rows = np.concatenate([np.arange(n), p, q])
    cols = np.concatenate([np.arange(n), q, p])
    vals = np.concatenate([diag, -c, -c])
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return SparseSystem(matrix=matrix, rhs=initial.ravel().copy(), shape=(h, w))


def nested_dissection(h, w, leaf=64):
    """Fill-reducing elimination order for an ``h`` x ``w`` 5-point grid.

    Recursively splits the longer side by a one-pixel separator; the two
    halves are numbered first and the separator last.
    """
    index = np.arange(h * w).reshape(h, w)
    order = []

    def split(block):
        bh, bw = block.shape
        if bh * bw <= leaf or min(bh, bw) < 3:
            order.append(block.ravel())
            return
        if bw >= bh:
            m = bw // 2
            split(block[:, :m])
            split(block[:, m + 1:])
            order.append(block[:, m])
        else:
            m = bh // 2
            split(block[:m])
            split(block[m + 1:])
            order.append(block[m])

    split(index)
    return np.concatenate(order)


# CG iterations allowed with the single-precision factor before refactoring
# in double precision
FACTOR_PATIENCE = 25


def _factor_preconditioner(system, dtype):
    """Apply-function of an LU factor of the system, or None if unusable."""
    h, w = system.shape
    perm = nested_dissection(h, w)
    permuted = system.matrix[perm][:, perm].tocsc().astype(dtype)
    # The matrix is SPD and diagonally dominant, so no pivoting is needed.
    # Every Schur complement keeps a row-sum excess of 1, hence exact pivots
    # are >= 1; anything smaller means the factor is numerically broken.
    try:
        lu = spla.splu(permuted, permc_spec='NATURAL', diag_pivot_thresh=0.0,
                       options=dict(SymmetricMode=True))
    except RuntimeError:
        return None
    pivots = lu.U.diagonal()
    if not (np.isfinite(pivots).all() and pivots.min() >= 0.5):
        return None

    def apply(r):
        out = np.empty_like(r)
        out[perm] = lu.solve(r[perm].astype(dtype))
        return out

    return apply


def _jacobi(A):
    inv_diag = 1.0 / A.diagonal()
    return lambda r: r * inv_diag


def _pcg(A, b, x, precond, target, max_iter):
    """Run PCG in place on `x`; returns the number of iterations taken."""
    r = b - A @ x
    if np.linalg.norm(r) <= target:
        return 0
    z = precond(r)
    p = z.copy()
    rz = r @ z
    k = 0
    while k < max_iter:
        Ap = A @ p
        pAp = p @ Ap
        if not (rz > 0 and pAp > 0 and np.isfinite(pAp)):
            break  # exact solution, breakdown at roundoff level, or overflow
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        k += 1
        if np.linalg.norm(r) <= target:
            # guard against drift of the recursive residual
            r = b - A @ x
            if np.linalg.norm(r) <= target:
                break
        z = precond(r)
        rz_new = r @ z
        p *= rz_new / rz
        p += z
        rz = rz_new
    return k


def _run_stage(A, b, x, precond, target, max_iter):
    """PCG from the current `x`, rolled back if it made the residual worse.

    A poor single-precision factor on an extremely stiff system can make CG
    blow up; the rollback keeps the best iterate for the next stage.
    """
    start = x.copy()
    before = np.linalg.norm(b - A @ x)
    with np.errstate(over='ignore', invalid='ignore'):
        k = _pcg(A, b, x, precond, target, max_iter)
        after = np.linalg.norm(b - A @ x)
    if not after <= before:
        x[:] = start
    return k


def solve_cg(system, settings=None, return_info=False):
    """Preconditioned conjugate gradients, started from the right-hand side.

    Iterates until ``||A x - b|| <= tol * ||b||`` (true residual). With the
    default ``'factor'`` preconditioner a single-precision factor is tried
    first; if CG has not converged after ``FACTOR_PATIENCE`` iterations the
    system is refactored in double precision and CG restarts from the
    current iterate.

    Raises
    ------
    ConvergenceError
        After `settings.max_iter` iterations without reaching the tolerance.
    """
    settings = settings or SolverSettings()
    A = system.matrix
    b = system.rhs
    shape = system.shape

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        x = np.zeros_like(b).reshape(shape)
        return (x, SolveInfo(0, 0.0)) if return_info else x
    target = settings.tol * bnorm

    x = b.copy()
    iterations = 0
    if np.linalg.norm(b - A @ x) > target:
        if settings.preconditioner == 'jacobi':
            stages = [(np.float64, 'jacobi', settings.max_iter)]
        else:
            stages = [(np.float32, 'factor', FACTOR_PATIENCE),
                      (np.float64, 'factor', settings.max_iter)]
        factored = False
        for dtype, kind, budget in stages:
            left = settings.max_iter - iterations
            if left <= 0:
                break
            if kind == 'factor':
                precond = _factor_preconditioner(system, dtype)
                if precond is None:
                    continue
                factored = True
            else:
                precond = _jacobi(A)
            iterations += _run_stage(A, b, x, precond, target, min(budget, left))
            if np.linalg.norm(b - A @ x) <= target:
                break
        if settings.preconditioner == 'factor' and not factored:
            iterations += _run_stage(A, b, x, _jacobi(A), target,
                                     settings.max_iter - iterations)

    rnorm = np.linalg.norm(b - A @ x)
    residual = rnorm / bnorm
    if rnorm > target:
        raise ConvergenceError(
            f'CG did not reach tol={settings.tol:g} in {iterations} iterations '
            f'(relative residual {residual:.3e})', residual, iterations)

    x = x.reshape(shape)
    if return_info:
        return x, SolveInfo(iterations, float(residual))
    return x


def solve_dense_oracle(system):
    """Exact solve through a dense Cholesky factorization (small systems only)."""
    if system.size > DENSE_ORACLE_LIMIT:
        raise ValueError(f'dense oracle limited to {DENSE_ORACLE_LIMIT} unknowns, '
                         f'got {system.size}')
    dense = system.matrix.toarray()
    x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(dense), system.rhs)
    return x.reshape(system.shape)
