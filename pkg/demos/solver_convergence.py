"""
Solving the smoothing system
============================

Texture-aware weights span eight decades on real photos, which makes the
normal equations very stiff. Plain diagonal scaling needs thousands of CG
iterations; a sparse LU of the same matrix used as a preconditioner needs a
handful. Small systems are checked against a dense Cholesky solve.
"""
import time

import numpy as np

from _common import sample
from exposurefix import illumination as il
from exposurefix import solver

# %% tiny system against the dense oracle
rng = np.random.default_rng(0)
L0 = rng.random((12, 12))
system = solver.assemble(L0, rng.uniform(0, 10, L0.shape), rng.uniform(0, 10, L0.shape), 0.15)
err = np.abs(solver.solve_cg(system) - solver.solve_dense_oracle(system)).max()
print(f'12x12 random system: max |CG - dense| = {err:.1e}')

# %% iteration counts on real illumination maps
for height in (32, 64, 128, 256):
    img = sample('astronaut', height) * 0.25
    L0 = il.initial_illumination(img)
    wx, wy = il.smoothness_weights(L0)
    system = solver.assemble(L0, wx, wy, 0.15)
    for precond in ('factor', 'jacobi'):
        t0 = time.perf_counter()
        try:
            _, info = solver.solve_cg(system, solver.SolverSettings(preconditioner=precond),
                                      return_info=True)
            note = f'{info.iterations:5d} iterations'
        except solver.ConvergenceError as exc:
            note = f'no convergence ({exc.iterations} iterations, residual {exc.residual:.1e})'
        print(f'{height:4d}px {precond:7s} {note}  {time.perf_counter() - t0:.2f}s')
