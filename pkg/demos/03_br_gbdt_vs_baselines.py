"""
Binary relevance: boosted trees against linear and lazy baselines
=================================================================

One label is an XOR of two features. A linear scorer cannot draw it, a
depth-3 boosted tree can, and ML-KNN sits in between.
"""

from brgbdt import datasets, gbdt
from brgbdt.evaluation import SplitSpec, score, split
from brgbdt.mlknn import predict_many as mlknn_predict, train_mlknn
from brgbdt.multilabel import feature_matrix, predict_many, train_br_gbdt, train_br_lr

T = datasets.make_xor(n=400, seed=0)
train, test = split(T, SplitSpec(0.8, seed=0))
X = feature_matrix(test)
truth = [t.labels for t in test]

models = {
    "BR-GBDT": train_br_gbdt(train, gbdt.TrainConfig(iterations=100, max_depth=3)),
    "BR+LR": train_br_lr(train),
}
for name, model in models.items():
    pred, _ = predict_many(model, X)
    report = score(truth, pred, model.universe)
    print(f"{name:8s} micro-F1 {report.f1:.3f}")
    print(report.render())

knn = train_mlknn(train, k=10)
pred, _ = mlknn_predict(knn, X)
print(f"ML-KNN   micro-F1 {score(truth, pred, knn.universe).f1:.3f}")
