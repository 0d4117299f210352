"""
Running a comparison
====================

Run the four pipelines on a Model D instance near the satisfiability
threshold and compare them with the Mann-Whitney U test and the
Vargha-Delaney A measure.
"""

from coevo_csp.bench import ExperimentConfig, records_to_csv, run_experiment, summarize
from coevo_csp.stats import mann_whitney_u, vargha_delaney_a

source = {"model": "d", "n": 30, "d": 8, "e": 140, "tightness": 0.35, "seed": 2}
configs = [
    ExperimentConfig(source, "coevo+mac", {"generations": 10}, runs=10),
    ExperimentConfig(source, "rndi+mac", {"restarts": 25}, runs=10),
    ExperimentConfig(source, "hc+mac", {"iterations_total": 50}, runs=10),
    ExperimentConfig(source, "plain-mac", heuristic="lex", runs=10),
]

# %%
results = {cfg.name: run_experiment(cfg) for cfg in configs}
print(records_to_csv(results["coevo+mac"])[:300])

# %%
# A below 0.5 on t or n means the first method needed less.
print(summarize(results).text())

# %%
# The statistics can also be used directly.
print(mann_whitney_u([1, 2, 3], [4, 5, 6]))
print(vargha_delaney_a([1, 3], [2, 4]))
