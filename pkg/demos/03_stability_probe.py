"""Empirical Hoelder envelope between two segments of the axis.

Draws bounded sources, records (sup on the high segment, sup on the low
segment) for each, and fits the tightest envelope v <= C u^theta.

    python demos/03_stability_probe.py
"""
from doseline import HalfBall, Segment, build_grid, generate_ensemble, run_probe, sample_segment

grid = build_grid(HalfBall(1.0), [[-1, -1, -1], [1, 1, 0]], (40, 40, 20))
high = sample_segment(Segment((0, 0, 0.8), (0, 0, 1.0)), 200)

print("low segment        seed   theta      C      valid")
for lo, hi in ((0.1, 0.3), (0.3, 0.5), (0.5, 0.7)):
    low = sample_segment(Segment((0, 0, lo), (0, 0, hi)), 200)
    for seed in (42, 7):
        ens = generate_ensemble(grid, 1.5, 200, seed)
        r = run_probe(ens, high, low, distance_delta=0.05, M=1.5)
        print(f"[{lo:.1f}, {hi:.1f}]     {seed:6d}   {r.fitted_theta:.3f}  {r.fitted_C:7.3f}   "
              f"{r.envelope_valid}")

# theta is a summary of this particular cloud, not the constant of the
# stability theorem; compare across seeds before reading anything into it.
