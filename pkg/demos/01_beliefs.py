# # What observers infer from an act
#
# Agents carry an intrinsic motivation v_a and an extrinsic motivation v_v,
# both uniform on the unit square. Without an incentive (R=0) an agent acts
# when v_a clears a threshold t; with one (R=1) the sum v_a + v_v must clear it.
# Observers only see who acted, so their beliefs are conditional means over
# the acting and abstaining regions.

import numpy as np

from prosocial import ParticipationRule, belief_profile, mc_oracle

# ## Closed-form beliefs

for R in (0, 1):
    for t in (0.2, 0.5, 0.8):
        p = belief_profile(ParticipationRule(R, t))
        print(f"R={R} t={t}: act share {p.mass_act:.3f}  "
              f"E(v_a) {p.E_va_act:.3f} vs {p.E_va_abstain:.3f}  "
              f"E(v_v) {p.E_vv_act:.3f} vs {p.E_vv_abstain:.3f}")

# Without an incentive the rule says nothing about v_v, so both v_v means stay
# at 0.5. The v_a gap is exactly one half for every interior threshold.

gaps = [belief_profile(ParticipationRule(0, t)).gap("va") for t in np.linspace(0.01, 0.99, 99)]
print("distinct R=0 gaps:", set(gaps))

# ## A Monte Carlo cross-check

rule = ParticipationRule(1, 0.5)
exact = belief_profile(rule)
est = mc_oracle(rule, 1_000_000, seed=7)
for field in ("mass_act", "E_va_act", "E_vv_abstain"):
    z = (getattr(est, field) - getattr(exact, field)) / est.stderr[field]
    print(f"{field:>14}: exact {getattr(exact, field):.5f}  MC {getattr(est, field):.5f}  z {z:+.2f}")

# ## Empty regions
#
# At t=0 under R=1 everyone acts. The default convention reports the prior
# mean for the empty side and flags it; "limit" uses the continuity limit.

for conv in ("prior", "limit"):
    p = belief_profile(ParticipationRule(1, 0.0), off_path=conv)
    print(conv, "abstain side empty:", p.abstain_empty, "E(v_a|abstain) =", p.E_va_abstain)
