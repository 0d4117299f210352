"""
Random instances and file formats
=================================

Generate Model D, forced Model RB and geometric instances, then write and
read them back in the native format.
"""

import math

from coevo_csp import (GeoParams, ModelDParams, ModelRbParams, gen_geo, gen_model_d,
                       gen_model_rb, is_solution, parse_native, serialize_native)

# %%
# Model D: e distinct variable pairs, each forbidding round(t * d^2) value pairs.
rand = gen_model_d(ModelDParams(n=40, d=8, e=753, tightness=0.1, seed=0))
print(rand.name, "constraints:", rand.m,
      "forbidden per relation:", len(rand.constraints[0].relation.tuples))

# %%
# Forced Model RB plants a solution that every relation is built to respect.
frb, planted = gen_model_rb(ModelRbParams(n=56, alpha=math.log(25) / math.log(56), r=0.5,
                                          p=0.25, forced=True, seed=1))
print(frb.name, "d =", len(frb.domains[0]), "e =", frb.m,
      "planted solution holds:", is_solution(frb, planted))

# %%
# Geometric: points in the unit square, constraints between close points.
geo = gen_geo(GeoParams(n=30, d=6, distance=0.35, tightness=0.3, seed=2))
print(geo.name, "constraints:", geo.m)

# %%
# The native format is canonical JSON and round-trips exactly.
text = serialize_native(geo)
assert parse_native(text) == geo
print(len(text), "bytes;", text[:80], "...")
