"""Enumerate, featurize and rank candidate visualizations for a result table.

Three ranking approaches are available: a pairwise learned linear scorer,
a partial-order dominance graph scored by topological layer, and diversified
top-k selection (greedy max-marginal trade-off between relevance and distance
to what was already picked). Diversified ranking over partial-order relevance
is the default presentation order; the partial orders and the toy training
pairs live in editable JSON config files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import CycleDetected, DegenerateInput, NoCandidates
from .executor import ResultTable
from .onboarding import DATETIME, NUMERIC

CHART_TYPES = ("bar", "line", "pie", "scatter")  # also the tie-break order
AGGREGATES = ("none", "sum", "avg", "count")

CATEGORICAL = "categorical"
NUMERIC_KIND = "numeric"
TEMPORAL = "temporal"

COUNT_Y = "*"


@dataclass(frozen=True)
class FeatureVector:
    """Encoded as [x_kind one-hot (cat, num, temp), y_kind one-hot,
    distinct_ratio_x, correlation (0 when undefined), group_count, null_ratio]."""

    x_kind: str
    y_kind: str
    distinct_ratio_x: float
    correlation_xy: Optional[float]
    group_count: int
    null_ratio: float

    def to_array(self) -> np.ndarray:
        kinds = (CATEGORICAL, NUMERIC_KIND, TEMPORAL)
        parts = [1.0 if self.x_kind == k else 0.0 for k in kinds]
        parts += [1.0 if self.y_kind == k else 0.0 for k in kinds]
        parts += [
            self.distinct_ratio_x,
            0.0 if self.correlation_xy is None else self.correlation_xy,
            float(self.group_count),
            self.null_ratio,
        ]
        return np.array(parts, dtype=float)

    @classmethod
    def from_json(cls, data: dict) -> "FeatureVector":
        return cls(
            x_kind=data["x_kind"],
            y_kind=data["y_kind"],
            distinct_ratio_x=float(data["distinct_ratio_x"]),
            correlation_xy=None if data.get("correlation_xy") is None else float(data["correlation_xy"]),
            group_count=int(data["group_count"]),
            null_ratio=float(data["null_ratio"]),
        )


@dataclass(frozen=True)
class VisualizationNode:
    chart_type: str
    x: str
    y: str  # "*" means row count
    aggregate: str
    features: FeatureVector
    score: float = 0.0

    def sort_key(self) -> tuple:
        return (CHART_TYPES.index(self.chart_type), self.x, self.y, self.aggregate)

    def attribute_set(self) -> frozenset:
        return frozenset(
            (("type", self.chart_type), ("x", self.x), ("y", self.y), ("agg", self.aggregate))
        )

    def spec(self) -> dict:
        return {
            "type": self.chart_type,
            "x": self.x,
            "y": self.y,
            "aggregate": self.aggregate,
            "score": round(self.score, 6),
        }


def column_kind(data_type: str) -> str:
    if data_type == NUMERIC:
        return NUMERIC_KIND
    if data_type == DATETIME:
        return TEMPORAL
    return CATEGORICAL


def _pearson(xs: list[float], ys: list[float]) -> float:
    if len(xs) < 2:
        return 0.0
    ax, ay = np.array(xs, dtype=float), np.array(ys, dtype=float)
    if ax.std() == 0.0 or ay.std() == 0.0:
        return 0.0
    return float(np.corrcoef(ax, ay)[0, 1])


def _aggregated_values(x_vals: list, y_vals: Optional[list], aggregate: str) -> list[float]:
    groups: dict = {}
    for i, xv in enumerate(x_vals):
        if xv is None:
            continue
        groups.setdefault(xv, []).append(None if y_vals is None else y_vals[i])
    out = []
    for members in groups.values():
        if aggregate == "count":
            out.append(float(len(members)))
            continue
        usable = [v for v in members if v is not None]
        if not usable:
            out.append(0.0)
        elif aggregate == "sum":
            out.append(float(sum(usable)))
        else:  # avg
            out.append(float(sum(usable)) / len(usable))
    return out


def enumerate_candidates(result: ResultTable) -> list[VisualizationNode]:
    """Every valid (chart type, x, y, aggregate) combination, deduplicated.

    Validity: pie needs categorical x with 2-10 distinct values and
    non-negative aggregated y; line needs temporal or numeric x; scatter needs
    two numeric axes and at least 10 rows; bar needs categorical x with at
    most 50 distinct values. A lone numeric column yields a histogram-style
    counted bar.
    """
    if not result.columns or not result.rows:
        raise NoCandidates("result table has no columns or no rows")
    names = [n for n, _ in result.columns]
    kinds = {n: column_kind(t) for n, t in result.columns}
    row_count = len(result.rows)
    values = {n: [row[i] for row in result.rows] for i, n in enumerate(names)}
    distinct = {n: len({v for v in values[n] if v is not None}) for n in names}

    nodes: dict[tuple, VisualizationNode] = {}

    def features_for(x: str, y: str, aggregate: str) -> FeatureVector:
        y_vals = None if y == COUNT_Y else values[y]
        nulls = sum(
            1 for i in range(row_count)
            if values[x][i] is None or (y_vals is not None and y_vals[i] is None)
        )
        corr = None
        if y != COUNT_Y and kinds[x] == NUMERIC_KIND and kinds[y] == NUMERIC_KIND:
            pairs = [
                (values[x][i], y_vals[i])
                for i in range(row_count)
                if values[x][i] is not None and y_vals[i] is not None
            ]
            corr = _pearson([p[0] for p in pairs], [p[1] for p in pairs])
        y_kind = NUMERIC_KIND if (y == COUNT_Y or aggregate != "none") else kinds[y]
        return FeatureVector(
            x_kind=kinds[x],
            y_kind=y_kind,
            distinct_ratio_x=distinct[x] / row_count,
            correlation_xy=corr,
            group_count=distinct[x] if aggregate != "none" else row_count,
            null_ratio=nulls / row_count,
        )

    def add(chart: str, x: str, y: str, aggregate: str) -> None:
        key = (chart, x, y, aggregate)
        if key in nodes:
            return
        nodes[key] = VisualizationNode(chart, x, y, aggregate, features_for(x, y, aggregate))

    def pie_ok(x: str, y: str, aggregate: str) -> bool:
        if kinds[x] != CATEGORICAL or not (2 <= distinct[x] <= 10):
            return False
        aggregated = _aggregated_values(values[x], None if y == COUNT_Y else values[y], aggregate)
        return bool(aggregated) and all(v >= 0 for v in aggregated)

    numeric_cols = [n for n in names if kinds[n] == NUMERIC_KIND]

    for x in names:
        for y in numeric_cols:
            if y == x:
                continue
            for aggregate in ("none", "sum", "avg"):
                grouped = aggregate != "none"
                if grouped and not distinct[x] < row_count:
                    continue
                if kinds[x] == CATEGORICAL and distinct[x] <= 50:
                    add("bar", x, y, aggregate)
                if kinds[x] in (TEMPORAL, NUMERIC_KIND):
                    add("line", x, y, aggregate)
                if not grouped and kinds[x] == NUMERIC_KIND and kinds[y] == NUMERIC_KIND and row_count >= 10:
                    add("scatter", x, y, aggregate)
                if grouped and pie_ok(x, y, aggregate):
                    add("pie", x, y, aggregate)
        if kinds[x] in (CATEGORICAL, TEMPORAL) and distinct[x] < row_count:
            if kinds[x] == CATEGORICAL and distinct[x] <= 50:
                add("bar", x, COUNT_Y, "count")
            if kinds[x] == TEMPORAL:
                add("line", x, COUNT_Y, "count")
            if pie_ok(x, COUNT_Y, "count"):
                add("pie", x, COUNT_Y, "count")

    if len(names) == 1 and kinds[names[0]] == NUMERIC_KIND:
        add("bar", names[0], COUNT_Y, "count")  # histogram over binned values

    if not nodes:
        raise NoCandidates("no chart type fits this result table")
    return sorted(nodes.values(), key=VisualizationNode.sort_key)


# ---------------------------------------------------------------------------
# Partial-order ranking
# ---------------------------------------------------------------------------

_OPS: dict[str, Callable[[float, float], bool]] = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}

_NODE_ATTRS = ("chart_type", "x", "y", "aggregate")


@dataclass(frozen=True)
class PartialOrderRule:
    name: str
    better: dict = field(default_factory=dict)
    worse: dict = field(default_factory=dict)
    same: tuple[str, ...] = ()
    when: tuple[dict, ...] = ()

    @classmethod
    def from_json(cls, data: dict) -> "PartialOrderRule":
        return cls(
            name=data["name"],
            better=dict(data.get("better", {})),
            worse=dict(data.get("worse", {})),
            same=tuple(data.get("same", ())),
            when=tuple(data.get("when", ())),
        )


def _field_value(node: VisualizationNode, name: str):
    if name in _NODE_ATTRS:
        return getattr(node, name)
    return getattr(node.features, name)


def _constraints_hold(node: VisualizationNode, constraints: dict) -> bool:
    for attr, expected in constraints.items():
        actual = _field_value(node, attr)
        if expected == "not_none":
            if actual == "none":
                return False
        elif actual != expected:
            return False
    return True


def _rule_applies(rule: PartialOrderRule, better: VisualizationNode, worse: VisualizationNode) -> bool:
    if not _constraints_hold(better, rule.better) or not _constraints_hold(worse, rule.worse):
        return False
    for attr in rule.same:
        if _field_value(better, attr) != _field_value(worse, attr):
            return False
    sides = {"better": better, "worse": worse}
    for cond in rule.when:
        side, _, fname = cond["left"].partition(".")
        left = _field_value(sides[side], fname)
        if "right" in cond:
            rside, _, rname = cond["right"].partition(".")
            right = _field_value(sides[rside], rname)
            if right is not None:
                right = right * cond.get("scale", 1.0)
        else:
            right = cond["value"]
        if left is None or right is None or not _OPS[cond["op"]](left, right):
            return False
    return True


def load_partial_order_rules(path: Optional[Path] = None) -> list[PartialOrderRule]:
    if path is not None:
        raw = Path(path).read_text(encoding="utf-8")
    else:
        raw = resources.files("nlsql.data").joinpath("partial_order_rules.json").read_text(encoding="utf-8")
    return [PartialOrderRule.from_json(r) for r in json.loads(raw)["rules"]]


def dominance_edges(
    nodes: list[VisualizationNode], rules: Iterable[PartialOrderRule]
) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    for i, u in enumerate(nodes):
        for j, v in enumerate(nodes):
            if i == j:
                continue
            if any(_rule_applies(rule, u, v) for rule in rules):
                edges.add((i, j))
    return edges


def rank_partial_order(
    nodes: list[VisualizationNode],
    rules: Optional[list[PartialOrderRule]] = None,
    edges: Optional[set[tuple[int, int]]] = None,
) -> list[VisualizationNode]:
    """Score nodes by topological layer of the dominance graph: earlier layers
    score higher, same-layer nodes tie, scores normalized to [0, 1]."""
    if not nodes:
        return []
    if edges is None:
        edges = dominance_edges(nodes, rules if rules is not None else load_partial_order_rules())

    n = len(nodes)
    out_adj: dict[int, list[int]] = {i: [] for i in range(n)}
    indegree = [0] * n
    for u, v in edges:
        out_adj[u].append(v)
        indegree[v] += 1
    layer = [0] * n
    frontier = [i for i in range(n) if indegree[i] == 0]
    processed = 0
    while frontier:
        nxt: list[int] = []
        for u in frontier:
            processed += 1
            for v in out_adj[u]:
                layer[v] = max(layer[v], layer[u] + 1)
                indegree[v] -= 1
                if indegree[v] == 0:
                    nxt.append(v)
        frontier = nxt
    if processed < n:
        raise CycleDetected("partial-order rules produced a cyclic preference graph")
    max_layer = max(layer)
    scored = [
        replace(node, score=1.0 if max_layer == 0 else (max_layer - layer[i]) / max_layer)
        for i, node in enumerate(nodes)
    ]
    return sorted(scored, key=lambda nd: (-nd.score,) + nd.sort_key())


# ---------------------------------------------------------------------------
# Diversified top-k
# ---------------------------------------------------------------------------


def jaccard_distance(a: VisualizationNode, b: VisualizationNode) -> float:
    sa, sb = a.attribute_set(), b.attribute_set()
    union = len(sa | sb)
    return 0.0 if union == 0 else 1.0 - len(sa & sb) / union


@dataclass
class DiversifiedConfig:
    k: int = 3
    lambda_: float = 0.5
    distance: Callable[[VisualizationNode, VisualizationNode], float] = jaccard_distance

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.lambda_ <= 1.0:
            raise ValueError("lambda must be in [0, 1]")


def rank_diversified(
    nodes: list[VisualizationNode], config: Optional[DiversifiedConfig] = None
) -> list[VisualizationNode]:
    """Greedy max-marginal pick: argmax relevance first, then maximize
    lambda*relevance + (1-lambda)*min distance to the already selected.
    Returns exactly min(k, |nodes|) nodes in pick order."""
    config = config or DiversifiedConfig()
    if not nodes:
        return []
    remaining = list(nodes)
    selected: list[VisualizationNode] = []
    while remaining and len(selected) < config.k:
        def objective(node: VisualizationNode) -> float:
            if not selected:
                return node.score
            spread = min(config.distance(node, s) for s in selected)
            return config.lambda_ * node.score + (1.0 - config.lambda_) * spread

        best = min(remaining, key=lambda nd: (-objective(nd), -nd.score) + nd.sort_key())
        selected.append(best)
        remaining.remove(best)
    return selected


# ---------------------------------------------------------------------------
# Pairwise learning-to-rank
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankingModel:
    """Linear scorer over the FeatureVector encoding; better(a, b) means
    score(a) > score(b)."""

    weights: tuple[float, ...]
    pairs_consumed: int

    def score(self, features: FeatureVector) -> float:
        return float(np.dot(np.array(self.weights), features.to_array()))

    def better(self, a: FeatureVector, b: FeatureVector) -> bool:
        return self.score(a) > self.score(b)


def train_pairwise(
    pairs: list[tuple[FeatureVector, FeatureVector]],
    learning_rate: float = 1.0,
    max_epochs: int = 500,
) -> RankingModel:
    """Perceptron-style margin updates on (better - worse) feature differences;
    converges to ordering every pair correctly when they are separable."""
    if not pairs:
        raise DegenerateInput("at least one training pair is required")
    diffs = []
    for better, worse in pairs:
        if better == worse:
            raise DegenerateInput("a pair claims a strict order between identical feature vectors")
        diffs.append(better.to_array() - worse.to_array())
    weights = np.zeros_like(diffs[0])
    for _ in range(max_epochs):
        updates = 0
        for diff in diffs:
            if float(np.dot(weights, diff)) <= 0.0:
                weights = weights + learning_rate * diff
                updates += 1
        if updates == 0:
            break
    return RankingModel(weights=tuple(float(w) for w in weights), pairs_consumed=len(pairs))


def load_training_pairs(path: Optional[Path] = None) -> list[tuple[FeatureVector, FeatureVector]]:
    if path is not None:
        raw = Path(path).read_text(encoding="utf-8")
    else:
        raw = resources.files("nlsql.data").joinpath("training_pairs.json").read_text(encoding="utf-8")
    return [
        (FeatureVector.from_json(p["better"]), FeatureVector.from_json(p["worse"]))
        for p in json.loads(raw)["pairs"]
    ]


def normalize_scores(raw: list[float]) -> list[float]:
    """Min-max to [0, 1]; a constant vector maps to all ones. Invariant under
    positive affine rescaling of the input."""
    if not raw:
        return []
    low, high = min(raw), max(raw)
    if high == low:
        return [1.0] * len(raw)
    return [(v - low) / (high - low) for v in raw]


def rank_learned(nodes: list[VisualizationNode], model: RankingModel) -> list[VisualizationNode]:
    scores = normalize_scores([model.score(node.features) for node in nodes])
    scored = [replace(node, score=s) for node, s in zip(nodes, scores)]
    return sorted(scored, key=lambda nd: (-nd.score,) + nd.sort_key())


def rank(
    nodes: list[VisualizationNode],
    approach: str = "partial_order",
    config: Optional[DiversifiedConfig] = None,
    rules: Optional[list[PartialOrderRule]] = None,
    model: Optional[RankingModel] = None,
) -> list[VisualizationNode]:
    """Default presentation order: relevance (partial-order, or the learned
    model behind the config switch) followed by diversified top-k."""
    if approach == "learned":
        model = model or train_pairwise(load_training_pairs())
        scored = rank_learned(nodes, model)
    elif approach == "partial_order":
        scored = rank_partial_order(nodes, rules=rules)
    else:
        raise ValueError(f"unknown ranking approach {approach!r}")
    return rank_diversified(scored, config)
