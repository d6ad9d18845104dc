#!/usr/bin/env python3
"""Compare the five from-scratch model families on one prediction task.

Trains random forest, extra-trees, bagging, gradient boosting, and KNN on
noisy synthetic depth data with small table-style hyperparameters, then
prints a train/test scoreboard.
"""

from meltmap import EnsembleConfig, FeatureSpec, evaluate_model, fit_ensemble
from meltmap import model_zoo, synth_generate, train_test_split
from meltmap.dataset import build_design

truth = model_zoo.get_entry("depth_pv").equation
data = synth_generate(truth, 281, (50, 500), (100, 2000), noise_sigma=8.0, seed=3)
train, test = train_test_split(data, 0.2, seed=3)

spec = FeatureSpec.of("power", "velocity")
x_train, _ = build_design(train, spec)
x_test, _ = build_design(test, spec)
y_train = train.column("depth")
y_test = test.column("depth")

configs = [
    EnsembleConfig(family="random_forest", n_estimators=8, max_depth=6, seed=1),
    EnsembleConfig(family="extra_trees", n_estimators=5, max_depth=7, seed=1),
    EnsembleConfig(family="bagging", n_estimators=3, max_depth=7, seed=1),
    EnsembleConfig(family="knn", n_neighbors=4, seed=1),
    EnsembleConfig(family="gradient_boost", n_estimators=80, max_depth=5, learning_rate=0.1, seed=1),
]

print(f"{'family':<16}{'R2 train':>10}{'R2 test':>10}{'MAE train':>12}{'MAE test':>12}")
for config in configs:
    model = fit_ensemble(x_train, y_train, config)
    report = evaluate_model(model, (x_train, y_train), (x_test, y_test))
    print(
        f"{config.family:<16}{report.r2_train:>10.4f}{report.r2_test:>10.4f}"
        f"{report.mae_train:>12.3f}{report.mae_test:>12.3f}"
    )

print("\nGradient boosting drives the training error down stage by stage:")
gb = fit_ensemble(
    x_train, y_train,
    EnsembleConfig(family="gradient_boost", n_estimators=40, max_depth=3, learning_rate=0.1),
)
for stage in (0, 1, 5, 10, 20, 40):
    print(f"  after stage {stage:>2}: train MSE = {gb.staged_train_mse[stage]:10.3f}")
