"""The four-variable extension G(x, xi) of the dose-rate field.

Checks the trace G(x, 0) = f(x), the a-priori bound M sum(w) / delta^2,
and harmonicity through the second-order finite-difference Laplacian.

    python demos/04_harmonic_extension.py
"""
import numpy as np

from doseline import (
    HalfBall,
    build_grid,
    distance_to_domain,
    eval_extension,
    eval_field,
    laplacian_residual,
    paper_source,
)

grid = build_grid(HalfBall(1.0), [[-1, -1, -1], [1, 1, 0]], (40, 40, 20))
mu = paper_source(grid, bound=1.5)
x = np.array([0.3, -0.2, 0.4])
delta = distance_to_domain(x, grid)

print(f"f(x)        = {eval_field(mu, x):.12f}")
print(f"G(x, 0)     = {eval_extension(mu, x, 0.0):.12f}")
print(f"bound       = {1.5 * grid.weights.sum() / delta**2:.4f}  (dist to grid {delta:.3f})")
for xi in (0.25, 1.0, 4.0):
    print(f"G(x, {xi:4.2f})  = {eval_extension(mu, x, xi):.6f}")

print("\n    h        residual      ratio")
prev = None
for h in (4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3):
    r = laplacian_residual(mu, x, 0.25, h)
    print(f"{h:8.4f}  {r:12.4e}  " + (f"{prev / r:6.3f}" if prev else ""))
    prev = r
