# # Norms move the threshold
#
# An agent's reputation gains from the gap between what acting and abstaining
# reveal, weighted by the social norms S_va and S_vv. The threshold that
# solves t = c - VIS*(S_va*gap_va(t) + S_vv*gap_vv(t)) is self-consistent:
# observers' beliefs match the behaviour they produce.

import numpy as np

from prosocial import ModelParams, calibrate_norm, reputational_cost_curve, solve_threshold

# ## Threshold against the norm on extrinsic motivation

for S in np.linspace(-1, 1, 5):
    rational = solve_threshold(ModelParams(c=0.5, R=1, S_vv=S))
    naive = solve_threshold(ModelParams(c=0.5, R=1, S_vv=S), "naive")
    print(f"S_vv={S:+.1f}: t*={rational.t_star:.4f} (rate {rational.participation_rate:.3f}), "
          f"naive t={naive.t_star:.4f}")

# A favourable view of extrinsic motives lowers the bar; a hostile one raises it.

# ## Without an incentive the answer is closed form

res = solve_threshold(ModelParams(c=0.5, R=0, S_va=0.4))
print("R=0 threshold", res.t_star, "vs c - 0.5*S_va =", 0.5 - 0.5 * 0.4)

# ## The reputational price of an incentive
#
# At the reputation-free threshold t=c, adding an incentive shrinks the v_a
# gap (intrinsic cost) and opens a v_v gap (extrinsic cost).

for pt in reputational_cost_curve([0.1, 0.3, 0.5, 0.7, 0.9]):
    print(f"c={pt.c:.1f}: intrinsic {pt.intrinsic_cost:.4f}  extrinsic {pt.extrinsic_cost:.4f}")

# ## Backing out a norm from a participation rate

base = ModelParams(c=0.5, R=1)
for rate in (0.80, 0.875, 0.95):
    S = calibrate_norm(rate, base)
    print(f"rate {rate}: S_vv = {S:+.6f}")
