"""The four ranking objectives over sequence log-likelihoods.

A comparison sample has one positive label and a few negatives; each
objective turns their log-likelihoods into a loss. This demo evaluates
the analytic reference points and shows the gradients that drive scorer
training.
"""

import math

import numpy as np

from quadscorer import combined_objective, ranking_loss, ranking_loss_grad

# four equally likely candidates: listwise loss is exactly ln 4
equal = ranking_loss("listwise", -1.0, [-1.0, -1.0, -1.0])
print(f"listwise, 4 equal candidates : {equal:.6f} (ln 4 = {math.log(4):.6f})")

# positive twice as likely as each of two negatives: ln 2
half = ranking_loss("listwise", math.log(0.5), [math.log(0.25), math.log(0.25)])
print(f"listwise, p=1/2 vs two 1/4   : {half:.6f} (ln 2 = {math.log(2):.6f})")

print("\nloss and gradient for one sample (logp_pos=-1.5, negatives -2.0, -3.0):")
for kind in ("listwise", "pointwise", "pairwise1", "pairwise2"):
    loss = ranking_loss(kind, -1.5, [-2.0, -3.0])
    g_pos, g_negs = ranking_loss_grad(kind, -1.5, [-2.0, -3.0])
    print(f"  {kind:<9} loss {loss:7.4f}   d/dpos {g_pos:+.4f}   "
          f"d/dnegs {np.round(g_negs, 4)}")

# the combined objective adds an auxiliary likelihood term over positives
comp = [(-1.0, [-1.0, -1.0, -1.0]), (math.log(0.5), [math.log(0.25)] * 2)]
for alpha in (0.0, 1.0):
    value = combined_objective(comp, extra_pos_logps=[math.log(0.9)], alpha=alpha)
    print(f"\ncombined loss, alpha={alpha}: {value:.6f}")
