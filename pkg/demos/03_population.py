# # Simulated populations
#
# Decisions for many agents at once, against beliefs from the solved threshold.

from prosocial import ModelParams, SweepSpec, sample_population, simulate_grid, sweep
from prosocial.popsim import fitted_boundary, lattice_population

# ## One panel per norm value

pop = lattice_population(200, seed=1)
for S in (-1.0, 0.0, 1.0):
    sim = simulate_grid(ModelParams(c=0.6, R=1, S_vv=S), pop)
    fit = fitted_boundary(sim)
    print(f"S_vv={S:+.0f}: acting {sim.acting_fraction:.4f} "
          f"(analytic {sim.equilibrium.participation_rate:.4f}), boundary v_a+v_v={fit.intercept:.3f}")

# The dividing line moves left as the norm turns favourable.

# ## Incentive on and off across costs

cells = sweep(SweepSpec(axes={"c": [0.2, 0.4, 0.6, 0.8], "R": [0, 1]}, n=50_000, seed=3))
for cell in cells:
    print(cell.point, f"empirical {cell.participation_rate_empirical:.4f} "
          f"analytic {cell.participation_rate_analytic:.4f} +/- {cell.stderr:.4f}")

# ## Looking at individual agents

small = sample_population(3, seed=5)
for agent, decision in simulate_grid(ModelParams(c=0.4, R=1), small).pairs():
    print(f"v_a={agent.v_a:.2f} v_v={agent.v_v:.2f} -> B={decision.B}")
