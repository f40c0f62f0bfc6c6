#!/usr/bin/env python3
"""Check the partial-CSI design rule against fresh channels.

The rate cost is chosen so the eavesdroppers' capacity bound exceeds it with
probability exactly eta. 100k Monte-Carlo draws per grid point should land
within a few tenths of a percent.
"""
from secsched import calibrate_outage, rate_cost_colluding, rate_cost_noncolluding

ETA = 0.1
GRID = tuple(i / 10 for i in range(11))

print("designed rate costs at eta =", ETA)
print(f"{'fraction':>8s} {'non-colluding':>14s} {'colluding':>10s}")
for eps in (0.2, 0.4, 0.6, 0.8):
    print(f"{eps:8.1f} {rate_cost_noncolluding(eps, ETA, 6, 3):14.4f} "
          f"{rate_cost_colluding(eps, ETA, 6, 3):10.4f}")
print()

for colluding in (False, True):
    label = "colluding" if colluding else "non-colluding"
    rows = calibrate_outage(6, 3, ETA, colluding, GRID, samples=100_000, seed=1)
    print(f"{label}: target {ETA}, 3 s.e. window +/-{3 * rows[0].stderr:.4f}")
    for r in rows:
        flag = "ok" if r.passed else "MISS"
        print(f"  fraction {r.epsilon:.1f}: estimated {r.eta_estimate:.4f}  {flag}")
    print()
