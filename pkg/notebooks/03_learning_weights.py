"""
Learning constraint weights
===========================

Compare the weights found by the coevolutionary GA, by RNDI restarts and by
hill climbing on an instance with one impossible constraint hidden among
loose ones, then feed each weight vector to a wdeg-ordered MAC search.
"""

import numpy as np

from coevo_csp import (CoevoParams, Constraint, CspInstance, HcParams, ModelDParams,
                       Relation, RndiParams, gen_model_d, hc_learn, learn_weights,
                       mac_search, rndi_learn)

# %%
# Take a loose random instance and make one of its relations empty.
base = gen_model_d(ModelDParams(n=12, d=4, e=30, tightness=0.06, seed=3))
culprit = 17
cons = [c if c.id != culprit else Constraint(c.id, c.scope, Relation("supports", frozenset()))
        for c in base.constraints]
inst = CspInstance("bottleneck", base.domains, tuple(cons))

# %%
trace = []
coevo = learn_weights(inst, CoevoParams(generations=15, seed=0), trace=trace)
print("coevolution:", coevo)
print("  heaviest:", int(np.argmax(coevo)), "(expected", culprit, ")")
print("  constraint fitness after the last generation:", trace[-1][2])

# %%
print("RNDI:       ", rndi_learn(inst, RndiParams(restarts=5, seed=0)))
print("hill climb: ", hc_learn(inst, HcParams(iterations_total=50, cutoff=50, seed=0)))

# %%
# An empty relation is refuted by root propagation whatever the weights, so
# compare weight vectors on a threshold Model D instance instead.
hard = gen_model_d(ModelDParams(n=30, d=8, e=140, tightness=0.35, seed=2))
for name, w in [("unit", [1] * hard.m),
                ("coevo", learn_weights(hard, CoevoParams(generations=15, seed=0))),
                ("rndi", rndi_learn(hard, RndiParams(restarts=25, seed=0)))]:
    s = mac_search(hard, "wdeg", list(w))
    print(f"{name:>5} weights: {s.outcome.value} after {s.nodes} nodes")
