"""
Gradient boosting on a 1-D curve
================================

Squared-error boosting: fit a tree to the residuals, pick the step by line
search, shrink, repeat. The training loss never goes up.
"""

import numpy as np

from brgbdt import gbdt

rng = np.random.default_rng(0)
X = np.sort(rng.uniform(-3, 3, 200))[:, None]
y = np.sin(2 * X[:, 0]) + 0.1 * rng.normal(size=200)

model = gbdt.train(X, y, gbdt.TrainConfig(iterations=60, max_depth=2, shrinkage=0.3))
print("f0 =", round(model.f0, 4))
for m in (0, 1, 5, 20, 60):
    print(f"after {m:2d} trees  SSE {model.loss_history[m]:.4f}")

# the first tree and its step
tree, beta = model.stages[0]
print("root split: x <=", tree.threshold[0], " beta =", round(beta, 4))

# one residual fit done by hand
r = gbdt.negative_gradient(y, np.full_like(y, model.f0))
h = gbdt.fit_tree(X, r, gbdt.TrainConfig(max_depth=2)).predict(X)
print("line search on the first tree:", gbdt.line_search(y, np.full_like(y, model.f0), h))

# held-out curve
grid = np.linspace(-3, 3, 7)[:, None]
print(np.c_[grid[:, 0], np.sin(2 * grid[:, 0]), model.predict(grid)].round(3))
