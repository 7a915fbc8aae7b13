"""Enumerate chart candidates for a result table and rank them three ways.

Candidates are (chart type, x, y, aggregate) combinations that pass basic
validity rules. Relevance comes from either a partial-order dominance graph
(topological layers, editable JSON rules) or a pairwise-trained linear
scorer; the presentation order is a diversified top-k that trades relevance
against distance to the charts already picked, so the suggestions do not all
look alike.
"""

from nlsql.executor import ResultTable
from nlsql.viz import (
    DiversifiedConfig,
    enumerate_candidates,
    load_training_pairs,
    rank,
    rank_diversified,
    rank_learned,
    rank_partial_order,
    train_pairwise,
)

table = ResultTable(
    columns=[("region", "textual"), ("revenue", "numeric"), ("orders", "numeric")],
    rows=[
        ("north", 120.5, 42), ("south", 80.0, 31), ("east", 132.0, 57),
        ("west", 20.75, 9), ("north", 95.25, 38), ("south", 61.0, 24),
    ],
    row_count=6,
)

nodes = enumerate_candidates(table)
print(f"{len(nodes)} candidates, e.g.:")
for node in nodes[:4]:
    print("  ", node.spec())

# 1. Partial-order ranking: earlier topological layers score higher.
scored = rank_partial_order(nodes)
print("\npartial-order top 3:")
for node in scored[:3]:
    print("  ", node.spec())

# 2. Learning-to-rank: a linear comparator trained on (better, worse) pairs.
model = train_pairwise(load_training_pairs())
print("\nlearned top 3:")
for node in rank_learned(nodes, model)[:3]:
    print("  ", node.spec())

# 3. Diversified top-k over the relevance scores (the default presentation).
picked = rank_diversified(scored, DiversifiedConfig(k=3, lambda_=0.5))
print("\ndiversified top 3 (default):")
for node in picked:
    print("  ", node.spec())

# The one-call entry point wires relevance + diversity together.
assert rank(nodes) == picked
