"""Continue the dose rate from a high segment down to low altitude.

Readings on x3 in [0.8, 1.0] (20 collocation points) are inverted for a
source by weighted Tikhonov regularization; the field of that source is
then evaluated down to x3 = 0.1.

    python demos/02_reconstruction.py
"""
import numpy as np

from doseline import (
    HalfBall,
    Segment,
    add_noise,
    assemble_kernel,
    build_grid,
    choose_alpha,
    eval_field,
    measure,
    paper_source,
    reconstruct_field,
    sample_segment,
    solve_least_norm,
    solve_tikhonov,
)

grid = build_grid(HalfBall(1.0), [[-1, -1, -1], [1, 1, 0]], (40, 40, 20))
source = paper_source(grid)
gamma = sample_segment(Segment((0, 0, 0.8), (0, 0, 1.0)), 20)
kernel = assemble_kernel(grid, gamma)
clean = measure(source, gamma)

heights = np.array([0.1, 0.2, 0.4, 0.6, 0.8, 1.0])
pts = np.column_stack([np.zeros_like(heights), np.zeros_like(heights), heights])
f_true = eval_field(source, pts)


def show(label, recon):
    f = reconstruct_field(recon, grid, pts)
    rel = np.abs(f - f_true) / f_true
    print(f"{label:28s} alpha={recon.alpha:8.1e}  "
          + "  ".join(f"{e:6.3f}" for e in rel)
          + f"   stationarity={recon.stationarity:.1e}")


print("relative error at x3 =     " + "  ".join(f"{h:6.2f}" for h in heights))
show("least-norm, noise-free", solve_least_norm(kernel, clean))
show("tikhonov floor, noise-free", solve_tikhonov(kernel, clean, choose_alpha(0.0)))
for level in (0.01, 0.03):
    for seed in range(3):
        noisy = add_noise(clean, level, seed)
        show(f"{level:.0%} noise, seed {seed}", solve_tikhonov(kernel, noisy, choose_alpha(level)))

# the same noisy data across a ladder of alphas: bias vs noise amplification
print("\n1% noise, seed 0, alpha ladder (error at x3 = 0.1):")
noisy = add_noise(clean, 0.01, 0)
for alpha in np.logspace(-8, -2, 7):
    r = solve_tikhonov(kernel, noisy, alpha)
    err = abs(reconstruct_field(r, grid, [0, 0, 0.1]) - f_true[0]) / f_true[0]
    print(f"  alpha={alpha:7.0e}  rel err {err:.3f}  residual {r.residual_norm:.2e}  "
          f"penalty {r.penalty_norm:.3f}")
