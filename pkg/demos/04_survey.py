# # A synthetic cross-country survey
#
# Countries get a norm level and an incentive regime. Respondents are drawn
# from the model, and a pooled logistic regression looks for the
# norm-by-incentive interaction that reputation concerns predict.

from prosocial.experiment import INTERACTION, run_experiment
from prosocial.synthsurvey import LinkSettings, columns, country_participation_rate

result = run_experiment(n_countries=28, n_per_country=1000, seed=0)
cols = columns(result.rows)

# ## Countries

for c in result.countries[:5]:
    observed = cols["donated"][cols["country_id"] == c.country_id].mean()
    print(f"{c.country_id}: norm {c.S_vv_time:.2f}, incentive {c.incentive_time}, "
          f"rate {observed:.3f} (model {country_participation_rate(c, LinkSettings()):.3f})")

# ## The fit

for row in result.fit.table():
    print(f"{row['term']:>22} {row['estimate']:+.3f} ({row['std_error']:.3f})")

b, se = result.interaction
print(f"\n{INTERACTION}: {b:.3f}, z = {b / se:.1f}")

# ## Switching reputation off
#
# With zero visibility nobody is watched, norms cannot matter and the
# interaction should vanish.

b0, se0 = run_experiment(seed=0, link=LinkSettings(VIS=0.0)).interaction
print(f"VIS=0: {b0:.3f}, z = {b0 / se0:.2f}")
