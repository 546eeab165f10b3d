"""Walk through one fairgroup run on a toy table small enough to print."""

import numpy as np

from fairgroup import (
    BalanceRatio,
    build_fairgroups,
    build_importance,
    fair_classify,
    kmedians,
    predict,
    train,
)
from fairgroup.dataset import BINARY, PROTECTED, TARGET, Dataset, FeatureSpec
from fairgroup.metrics import evaluate

# At 40 points only a handful of groups form, and many seeds of this toy show
# no movement at all; seed 3 shows the mechanism. demos/02 has the real benchmark.
rng = np.random.default_rng(3)
n = 40

# %% a toy table whose labels favour the unprotected points
flag = (rng.random(n) < 0.8).astype(float)
need = rng.normal(size=n) + 0.8 * flag
wealth = rng.normal(size=n) - 2.0 * flag
label = (wealth + 0.3 * need + 0.3 * rng.normal(size=n) > -0.5).astype(float)

d = Dataset(
    (
        FeatureSpec("need"),
        FeatureSpec("wealth"),
        FeatureSpec("low_income", PROTECTED, BINARY),
        FeatureSpec("benefit", TARGET, BINARY),
    ),
    {"need": need, "wealth": wealth, "low_income": flag, "benefit": label},
)
print(f"{d.n} points, {int(d.protected.sum())} protected, {int(d.target.sum())} positive")

# %% the classifier never sees the protected flag
model = train(d)
print("weights:", {k: round(float(w), 3) for k, w in zip(model.feature_names, model.weights)})

# %% importance: rank each feature along its correlation with the label, weight by |corr| rank
imp = build_importance(d)
for name, c, w in zip(imp.feature_names, imp.correlations, imp.weights):
    print(f"  {name:7s} corr {c:+.3f}  weight {w}")

# %% cluster the importance vectors, then match 4 protected with 1 unprotected inside each cluster
cl = kmedians(imp, k=3, seed=0)
plan = build_fairgroups(cl, d.protected, BalanceRatio(4, 1))
for g, grp in enumerate(plan.groups):
    print(f"  group {g} (cluster {grp.cluster_id}): members {list(grp.members)}")
print(f"unmatched: {plan.unmatched.tolist()}")

# %% classify through one random representative per group, against the plain classifier
base = evaluate(predict(model, d), d.target, d.protected)
print(f"baseline : protected share of positives {base.protected_share_positive:5.1f}%, accuracy {base.accuracy:5.1f}%")
for mode in ("one-sided", "two-sided"):
    pred = fair_classify(model, d, plan, mode, seed=1)
    r = evaluate(pred.labels, d.target, d.protected)
    print(f"{mode:9s}: protected share of positives {r.protected_share_positive:5.1f}%, accuracy {r.accuracy:5.1f}%")

