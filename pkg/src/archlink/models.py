"""Classifiers built from first principles: logistic regression, naive
Bayes, decision tree.

All three are deterministic functions of their training data and
hyperparameters; there is no randomness anywhere in training, so repeated
runs reproduce parameters bit for bit.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import LearnConfig
from .errors import DegenerateDataError, ParameterError, ShapeError
from .features import FeatureSpec, LabeledDataset

MODEL_KINDS = ("lr", "nb", "dt")


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float  # probability of class 1


# -- logistic regression -----------------------------------------------------


@dataclass(frozen=True)
class LogisticModel:
    kind = "lr"
    spec: FeatureSpec
    weights: np.ndarray
    intercept: float

    def scores(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(X @ self.weights + self.intercept)


def train_lr(data: LabeledDataset, config: LearnConfig = LearnConfig()) -> LogisticModel:
    """L2-regularized logistic regression by full-batch gradient descent.

    The objective is mean log-loss plus l2/(2n)·||w||²; the intercept is
    not regularized. Weights start at zero and descend with a fixed step
    of 1/L (L bounding the Hessian) until the gradient norm drops under
    the tolerance or the iteration cap is hit.
    """
    _require_both_classes(data)
    X, y = data.X, data.y.astype(float)
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    # Hessian bound: (1/4n)·X̃ᵀX̃ + (l2/n)·I on the weight block
    gram = Xa.T @ Xa / n
    L = 0.25 * float(np.linalg.eigvalsh(gram).max()) + config.l2 / n
    step = 1.0 / L
    theta = np.zeros(d + 1)
    for _ in range(config.max_iter):
        p = _sigmoid(Xa @ theta)
        grad = Xa.T @ (p - y) / n
        grad[:d] += (config.l2 / n) * theta[:d]
        if float(np.linalg.norm(grad)) <= config.tol:
            break
        theta = theta - step * grad
    if not np.all(np.isfinite(theta)):
        raise DegenerateDataError("logistic regression diverged to non-finite weights")
    return LogisticModel(spec=data.spec, weights=theta[:d], intercept=float(theta[d]))


def lr_objective(data: LabeledDataset, weights: np.ndarray, intercept: float, l2: float) -> float:
    """Training objective value, exposed for gradient checking."""
    X, y = data.X, data.y.astype(float)
    n = len(y)
    z = X @ weights + intercept
    # log(1 + exp(z)) - y·z, computed stably
    loss = np.logaddexp(0.0, z) - y * z
    return float(loss.mean() + (l2 / (2 * n)) * float(weights @ weights))


def lr_gradient(data: LabeledDataset, weights: np.ndarray, intercept: float, l2: float):
    """Analytic gradient of lr_objective, for the finite-difference check."""
    X, y = data.X, data.y.astype(float)
    n = len(y)
    p = _sigmoid(X @ weights + intercept)
    gw = X.T @ (p - y) / n + (l2 / n) * weights
    gb = float((p - y).mean())
    return gw, gb


# -- naive Bayes --------------------------------------------------------------


@dataclass(frozen=True)
class NaiveBayesModel:
    kind = "nb"
    spec: FeatureSpec
    log_priors: np.ndarray  # shape (2,)
    bernoulli_p: dict  # feature index -> (p given class 0, p given class 1)
    gaussian: dict  # feature index -> ((mu0, var0), (mu1, var1))

    def scores(self, X: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        log_post = np.tile(self.log_priors, (n, 1))
        for j, probs in self.bernoulli_p.items():
            x = X[:, j]
            for c in (0, 1):
                p = probs[c]
                log_post[:, c] += x * math.log(p) + (1 - x) * math.log(1 - p)
        for j, params in self.gaussian.items():
            x = X[:, j]
            for c in (0, 1):
                mu, var = params[c]
                log_post[:, c] += -0.5 * (math.log(2 * math.pi * var) + (x - mu) ** 2 / var)
        log_post -= log_post.max(axis=1, keepdims=True)
        post = np.exp(log_post)
        post /= post.sum(axis=1, keepdims=True)
        return post[:, 1]


def train_nb(data: LabeledDataset, config: LearnConfig = LearnConfig()) -> NaiveBayesModel:
    """Mixed naive Bayes: add-one Bernoulli for binary features, Gaussian
    (per-class mean/variance, floored) for counts; Laplace class priors."""
    _require_both_classes(data)
    X, y = data.X, data.y
    n = len(y)
    counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=float)
    log_priors = np.log((counts + 1.0) / (n + 2.0))
    bernoulli_p = {}
    gaussian = {}
    for j, ftype in enumerate(data.spec.feature_types()):
        if ftype == "binary":
            probs = []
            for c in (0, 1):
                xc = X[y == c, j]
                probs.append((xc.sum() + 1.0) / (len(xc) + 2.0))
            bernoulli_p[j] = tuple(probs)
        else:
            params = []
            for c in (0, 1):
                xc = X[y == c, j]
                params.append((float(xc.mean()), max(float(xc.var()), config.var_floor)))
            gaussian[j] = tuple(params)
    return NaiveBayesModel(
        spec=data.spec,
        log_priors=log_priors,
        bernoulli_p=bernoulli_p,
        gaussian=gaussian,
    )


# -- decision tree -------------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    # leaf: class_counts set; internal: feature/threshold/children set
    class_counts: tuple[int, int] | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.class_counts is not None


@dataclass(frozen=True)
class DecisionTreeModel:
    kind = "dt"
    spec: FeatureSpec
    root: TreeNode = field(default_factory=TreeNode)

    def scores(self, X: np.ndarray) -> np.ndarray:
        return np.array([self._leaf(x).class_counts[1] / sum(self._leaf(x).class_counts) for x in X])

    def labels(self, X: np.ndarray) -> np.ndarray:
        # majority class per leaf; an exact tie predicts class 0
        return np.array(
            [int(self._leaf(x).class_counts[1] > self._leaf(x).class_counts[0]) for x in X]
        )

    def _leaf(self, x: np.ndarray) -> TreeNode:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def depth(self) -> int:
        def walk(node):
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)


def train_dt(data: LabeledDataset, config: LearnConfig = LearnConfig()) -> DecisionTreeModel:
    """Greedy Gini tree on threshold splits.

    Thresholds sit at midpoints between consecutive distinct feature values.
    Growth stops on pure nodes, non-positive impurity gain, or nodes smaller
    than two rows. Gain ties break toward the lowest feature index, then the
    lowest threshold; leaf ties predict class 0.
    """
    if len(data) == 0:
        raise DegenerateDataError("cannot grow a tree on empty data")
    return DecisionTreeModel(spec=data.spec, root=_grow(data.X, data.y))


def _grow(X: np.ndarray, y: np.ndarray) -> TreeNode:
    counts = (int((y == 0).sum()), int((y == 1).sum()))
    if counts[0] == 0 or counts[1] == 0 or len(y) < 2:
        return TreeNode(class_counts=counts)
    parent_gini = _gini(counts)
    best = None  # (gain, feature, threshold)
    n = len(y)
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2.0
            mask = X[:, j] <= threshold
            nl = int(mask.sum())
            left_counts = (int((y[mask] == 0).sum()), int((y[mask] == 1).sum()))
            right_counts = (counts[0] - left_counts[0], counts[1] - left_counts[1])
            gain = parent_gini - (
                nl / n * _gini(left_counts) + (n - nl) / n * _gini(right_counts)
            )
            if best is None or gain > best[0] + 1e-12:
                best = (gain, j, threshold)
    if best is None or best[0] <= 0:
        return TreeNode(class_counts=counts)
    _, j, threshold = best
    mask = X[:, j] <= threshold
    return TreeNode(
        feature=j,
        threshold=threshold,
        left=_grow(X[mask], y[mask]),
        right=_grow(X[~mask], y[~mask]),
    )


def _gini(counts) -> float:
    total = counts[0] + counts[1]
    if total == 0:
        return 0.0
    p = counts[1] / total
    return 2.0 * p * (1.0 - p)


# -- shared ---------------------------------------------------------------------


def train(kind: str, data: LabeledDataset, config: LearnConfig = LearnConfig()):
    if kind == "lr":
        return train_lr(data, config)
    if kind == "nb":
        return train_nb(data, config)
    if kind == "dt":
        return train_dt(data, config)
    raise ParameterError(f"unknown model kind {kind!r}")


def predict(model, x) -> Prediction:
    """Score one feature vector; label is score >= 0.5."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(model.spec.features),):
        raise ShapeError(
            f"expected {len(model.spec.features)} features for spec {model.spec.name!r}, "
            f"got shape {x.shape}"
        )
    X = x.reshape(1, -1)
    score = float(model.scores(X)[0])
    if hasattr(model, "labels"):
        label = int(model.labels(X)[0])
    else:
        label = int(score >= 0.5)
    return Prediction(label=label, score=score)


def predict_batch(model, X: np.ndarray):
    if X.ndim != 2 or X.shape[1] != len(model.spec.features):
        raise ShapeError(f"bad feature matrix shape {X.shape} for spec {model.spec.name!r}")
    scores = model.scores(X)
    if hasattr(model, "labels"):
        return model.labels(X), scores
    return (scores >= 0.5).astype(int), scores


def model_to_json(model) -> dict:
    """Serialize a trained model to a plain JSON document."""
    doc = {"kind": model.kind, "spec": model.spec.name}
    if model.kind == "lr":
        doc["weights"] = [float(w) for w in model.weights]
        doc["intercept"] = model.intercept
    elif model.kind == "nb":
        doc["log_priors"] = [float(v) for v in model.log_priors]
        doc["bernoulli"] = {str(j): list(p) for j, p in model.bernoulli_p.items()}
        doc["gaussian"] = {
            str(j): [list(params[0]), list(params[1])] for j, params in model.gaussian.items()
        }
    else:
        def node_doc(node):
            if node.is_leaf:
                return {"counts": list(node.class_counts)}
            return {
                "feature": node.feature,
                "threshold": node.threshold,
                "left": node_doc(node.left),
                "right": node_doc(node.right),
            }

        doc["tree"] = node_doc(model.root)
    return doc


def model_from_json(doc: dict):
    """Rebuild a trained model from model_to_json output."""
    spec = FeatureSpec.by_name(doc["spec"])
    kind = doc["kind"]
    if kind == "lr":
        return LogisticModel(
            spec=spec, weights=np.asarray(doc["weights"], dtype=float),
            intercept=float(doc["intercept"]),
        )
    if kind == "nb":
        return NaiveBayesModel(
            spec=spec,
            log_priors=np.asarray(doc["log_priors"], dtype=float),
            bernoulli_p={int(j): tuple(p) for j, p in doc["bernoulli"].items()},
            gaussian={
                int(j): (tuple(params[0]), tuple(params[1]))
                for j, params in doc["gaussian"].items()
            },
        )
    if kind == "dt":
        def node_from(nd):
            if "counts" in nd:
                return TreeNode(class_counts=tuple(nd["counts"]))
            return TreeNode(
                feature=nd["feature"],
                threshold=nd["threshold"],
                left=node_from(nd["left"]),
                right=node_from(nd["right"]),
            )

        return DecisionTreeModel(spec=spec, root=node_from(doc["tree"]))
    raise ParameterError(f"unknown model kind {kind!r}")


def _require_both_classes(data: LabeledDataset) -> None:
    if len(data) == 0 or len(np.unique(data.y)) < 2:
        raise DegenerateDataError(
            "training data must contain at least one example of each class"
        )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
