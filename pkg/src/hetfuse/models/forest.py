"""
Regression forest built from weighted variance-reduction CART trees.

Trees are stored as flat node arrays. A split sends ``x[feature] < threshold`` to the
left child; leaves carry ``feature == -1`` and predict their weighted mean target, so
every prediction is a convex combination of training targets.
"""

from dataclasses import dataclass

import numpy as np

from hetfuse.models.base import FittedModel
from hetfuse.models.spec import ForestParams
from hetfuse.seeding import child_rng

LEAF = -1
# Relative gains below this are treated as "no improvement".
_MIN_GAIN = 1e-12


@dataclass(frozen=True, eq=False)
class RegressionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            at = node[rows]
            go_left = X[rows, self.feature[at]] < self.threshold[at]
            node[rows] = np.where(go_left, self.left[at], self.right[at])
            active = self.feature[node] != LEAF
        return self.value[node]


@dataclass(frozen=True, eq=False)
class ForestModel(FittedModel):
    trees: tuple[RegressionTree, ...]
    p: int
    kind: str = "forest"

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)


class _TreeBuilder:
    """Depth-first CART growth on one (re)weighted sample."""

    def __init__(
        self,
        X: np.ndarray,
        y: np.ndarray,
        weights: np.ndarray,
        counts: np.ndarray,
        params: ForestParams,
        mtry: int,
        rng: np.random.Generator,
    ):
        self.X = X
        self.y = y
        self.weights = weights
        self.counts = counts
        self.params = params
        self.mtry = mtry
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def build(self) -> RegressionTree:
        rows = np.flatnonzero(self.weights > 0)
        self._grow(rows, depth=0)
        return RegressionTree(
            feature=np.array(self.feature, dtype=np.intp),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.intp),
            right=np.array(self.right, dtype=np.intp),
            value=np.array(self.value, dtype=float),
        )

    def _new_node(self, rows: np.ndarray) -> int:
        w = self.weights[rows]
        self.feature.append(LEAF)
        self.threshold.append(np.nan)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(float(w @ self.y[rows] / w.sum()))
        return len(self.feature) - 1

    def _grow(self, rows: np.ndarray, depth: int) -> int:
        node = self._new_node(rows)
        if depth >= self.params.max_depth:
            return node
        if self.counts[rows].sum() < 2 * self.params.min_leaf:
            return node
        split = self._best_split(rows)
        if split is None:
            return node
        feature, threshold = split
        goes_left = self.X[rows, feature] < threshold
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = self._grow(rows[goes_left], depth + 1)
        self.right[node] = self._grow(rows[~goes_left], depth + 1)
        return node

    def _best_split(self, rows: np.ndarray) -> tuple[int, float] | None:
        p = self.X.shape[1]
        candidates = self.rng.choice(p, size=min(self.mtry, p), replace=False)
        w_node = self.weights[rows]
        y_node = self.y[rows]
        best_gain = _MIN_GAIN * max(1.0, float(w_node @ (y_node * y_node)))
        best = None
        min_leaf = self.params.min_leaf
        for feature in np.sort(candidates):
            x = self.X[rows, feature]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            ws = self.weights[rows][order]
            ys = self.y[rows][order]
            cs = self.counts[rows][order]

            w_left = np.cumsum(ws)[:-1]
            s_left = np.cumsum(ws * ys)[:-1]
            q_left = np.cumsum(ws * ys * ys)[:-1]
            c_left = np.cumsum(cs)[:-1]
            w_all, s_all, q_all = ws.sum(), (ws * ys).sum(), (ws * ys * ys).sum()
            c_all = cs.sum()
            w_right, s_right, q_right = w_all - w_left, s_all - s_left, q_all - q_left

            valid = (xs[:-1] < xs[1:]) & (w_left > 0) & (w_right > 0)
            valid &= (c_left >= min_leaf) & (c_all - c_left >= min_leaf)
            if not valid.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                sse = (q_left - s_left**2 / w_left) + (q_right - s_right**2 / w_right)
            gain = np.where(valid, (q_all - s_all**2 / w_all) - sse, -np.inf)
            k = int(np.argmax(gain))
            if gain[k] > best_gain:
                best_gain = float(gain[k])
                threshold = (xs[k] + xs[k + 1]) / 2.0
                if threshold <= xs[k]:
                    threshold = xs[k + 1]
                best = (int(feature), float(threshold))
        return best


def fit_forest(
    params: ForestParams,
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    seed: int,
) -> ForestModel:
    """
    Bag ``n_trees`` CART trees. Tree ``k`` draws its bootstrap counts and split
    features from its own stream derived from ``(seed, k)``, so the forest is fully
    determined by ``seed``. Bootstrap multiplicities act as integer weights on top of
    the sample weights.
    """
    n, p = X.shape
    mtry = min(params.resolve_mtry(p), p)
    trees = []
    for k in range(params.n_trees):
        rng = child_rng(seed, "tree", k)
        if params.bootstrap:
            counts = rng.multinomial(n, np.full(n, 1.0 / n)).astype(float)
        else:
            counts = np.ones(n)
        builder = _TreeBuilder(X, y, weights * counts, counts, params, mtry, rng)
        trees.append(builder.build())
    return ForestModel(trees=tuple(trees), p=p)
