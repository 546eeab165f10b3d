"""How the target ratio and the number of clusters trade fairness against accuracy."""

from fairgroup.cli import resolve_config
from fairgroup.config import load_config, parse_ratio
from fairgroup.pipeline import load_dataset, run_experiment

cfg = load_config(resolve_config("medicaid_income.cfg"))
data = load_dataset(cfg)

# %% the ratio sets the composition of every matched group
print("ratio  groups  unmatched  % of Poverty  Accuracy")
for text in ("1:1", "2:1", "3:1", "4:1", "6:1", "9:1"):
    r = run_experiment(data, cfg.with_updates(ratio=parse_ratio(text)))
    print(f"{text:>5}  {r.groups:6d}  {r.unmatched:9d}  {r.fairgroup.protected_share_positive:12.1f}  {r.fairgroup.accuracy:8.1f}")
print(f"(baseline: {r.baseline.protected_share_positive:.1f} / {r.baseline.accuracy:.1f})")

# %% more clusters means tighter groups but more leftovers at cluster boundaries
print("\n  k  groups  unmatched  % of Poverty  Accuracy")
for k in (1, 2, 5, 10, 20, 40):
    r = run_experiment(data, cfg.with_updates(k=k))
    print(f"{k:3d}  {r.groups:6d}  {r.unmatched:9d}  {r.fairgroup.protected_share_positive:12.1f}  {r.fairgroup.accuracy:8.1f}")
