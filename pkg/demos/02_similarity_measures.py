#!/usr/bin/env python3
"""
How the choice of binary similarity measure shapes the network
===============================================================

All six measures score positive co-occurrence of characteristic tags,
but they differ in how quickly similarity accumulates as two risks
share more tags. This script prints the sensitivity curves, then runs
the cross-measure robustness suite on one synthetic register.
"""

import numpy as np

from risknet import (
    Measure,
    SyntheticSpec,
    robustness_suite,
    sensitivity_curve,
    similarity,
    synthesize_register,
)
from risknet.pipeline import RunConfig

# hand-sized example first: two risks sharing one of two tags each
u = np.array([1, 1, 0, 0])
v = np.array([1, 0, 1, 0])
print("u = [1,1,0,0], v = [1,0,1,0]:")
for measure in Measure:
    print(f"  {measure.value:<14} {similarity(u, v, measure):.4f}")

# sensitivity: similarity to an all-ones target as tags accumulate
k = 12
print(f"\nsimilarity to an all-ones target of length {k}:")
steps = [0, 3, 6, 9, 12]
header = "tags set  " + "  ".join(f"{m.value:>13}" for m in Measure)
print(header)
curves = {m: dict(sensitivity_curve(k, m, seed=0)) for m in Measure}
for t in steps:
    row = "  ".join(f"{curves[m][t]:13.4f}" for m in Measure)
    print(f"{t:>8}  {row}")
print("Cosine rises as sqrt(t/K); Sorgenfrei as t/K; the minimal-test")
print("control barely moves until the vectors nearly coincide.")

# does the downstream analysis care which measure we pick?
register = synthesize_register(
    SyntheticSpec(
        num_modules=5,
        risks_per_module=10,
        tags_per_module=4,
        noise_rate=0.05,
        total_tags=40,
        seed=0,
    )
)
config = RunConfig(ensemble_size=100, cascade_runs=50, restarts=10, base_seed=0)
report = robustness_suite(register, list(Measure), config)

print("\nmodule agreement with the Cosine reference:")
for outcome in report.outcomes:
    ge, lt = outcome.mismatch.as_tuple()
    print(f"  {outcome.measure.value:<14} match = {outcome.match_fraction:.2f}  "
          f"systemic >= independent for {ge}/{ge + lt} risks")
print("Dice and Lance&Williams are the same formula, so their rows agree")
print("exactly; the minimal-test control degrades the module structure.")
