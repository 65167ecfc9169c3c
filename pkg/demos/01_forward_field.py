"""Dose rate above a buried half-ball source.

Builds the 40 x 40 x 20 masked grid, evaluates the 1/r^2 field along the
vertical axis, and compares it with a grid twice as fine and with the
exact on-axis value (a 1-D integral, since the source is radial).

    python demos/01_forward_field.py
"""
import numpy as np
from scipy.integrate import quad

from doseline import HalfBall, build_grid, eval_field, paper_source

box = [[-1.0, -1.0, -1.0], [1.0, 1.0, 0.0]]
coarse = build_grid(HalfBall(1.0), box, (40, 40, 20))
fine = build_grid(HalfBall(1.0), box, (80, 80, 40))
print(f"coarse grid: {coarse.size} nodes, volume {coarse.weights.sum():.4f} "
      f"(half-ball {2 * np.pi / 3:.4f})")
print(f"fine grid:   {fine.size} nodes, volume {fine.weights.sum():.4f}")

mu_c, mu_f = paper_source(coarse), paper_source(fine)


def exact(z):
    mu = lambda r: (1 + 0.5 * np.sin(2 * np.pi * r)) * np.exp(-r * r)
    val, _ = quad(lambda r: mu(r) * r * np.log((r + z) ** 2 / (r * r + z * z)), 0, 1,
                  epsabs=1e-14, epsrel=1e-13)
    return np.pi / z * val


print("\n   x3     f(40^3)     f(80^3)     exact    rel(40 vs exact)")
for z in (0.1, 0.2, 0.3, 0.5, 0.8, 1.0):
    x = [0.0, 0.0, z]
    fc, ff, fe = eval_field(mu_c, x), eval_field(mu_f, x), exact(z)
    print(f"{z:5.2f}  {fc:10.6f}  {ff:10.6f}  {fe:10.6f}   {abs(fc - fe) / fe:.2e}")

# the midpoint rule converges like h^2 in the near field
print("\nnear the ground the coarse-grid error is dominated by the cells "
      "closest to the evaluation point and shrinks ~4x per refinement.")
