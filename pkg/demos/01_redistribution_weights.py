"""
Redistributing censored mass to the right
=========================================

Ten subjects ordered by observed time, with the 3rd, 6th and 8th censored.
Each censored subject's unit of mass splits equally over everything to its
right; mass parked on a later censored subject is forwarded again.  The
result is a subjects-by-event-times weight matrix whose column totals
reproduce the Kaplan-Meier jump sizes.
"""

import numpy as np

from survent import Dataset, build_weight_matrix, km_estimate

delta = np.ones(10, dtype=int)
delta[[2, 5, 7]] = 0
ds = Dataset(y=np.arange(1.0, 11.0), delta=delta)

W = build_weight_matrix(ds)
print("columns (event times):", W.col_times)
print("\nweight matrix (rows ordered by time, censored rows marked *):")
for i in range(10):
    mark = "*" if W.row_delta[i] == 0 else " "
    row = "  ".join(f"{w:6.4f}" if w else "   .  " for w in W.weights[i])
    print(f"  t={W.row_y[i]:4.1f}{mark}  {row}")

# the censored subject at t=3 ends with 1/7, 1/7, 5/28, 15/56, 15/56 on the
# event times to its right -- the cascade through t=6 and t=8 produced the
# 5/28 and 15/56 aggregates
print("\nrow sums:", W.weights.sum(axis=1))

km = km_estimate(ds)
print("\nKaplan-Meier jumps vs column masses / n:")
for t, jump in zip(km.jump_times, km.jump_sizes):
    col = W.weights[:, list(W.col_times).index(t)].sum() / ds.n
    print(f"  t={t:4.1f}  jump={jump:.4f}  column mass/n={col:.4f}")
