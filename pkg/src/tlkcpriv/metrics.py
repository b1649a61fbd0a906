"""Utility metrics between an original and an anonymized log.

Data utility is one minus the earth mover's distance between the two variant
distributions, with normalized edit distance between variants as the ground
cost; the transportation problem is solved exactly.  Result utility compares
directly-follows graphs (activities) and handover networks (resources) via
fitness, precision and their harmonic mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .log import (
    EventLog,
    LogError,
    Perspective,
    TimestampAccuracy,
    directly_follows,
    variants,
)

__all__ = [
    "UtilityReport",
    "GraphComparison",
    "normalized_levenshtein",
    "emd_data_utility",
    "dfg_compare",
    "handover_compare",
    "TRANSPORT_SIZE_CAP",
]

# largest cost-matrix (variants x variants) solved exactly; larger inputs
# should be sampled down by the caller
TRANSPORT_SIZE_CAP = 250_000


def normalized_levenshtein(s1: Sequence, s2: Sequence) -> float:
    """Edit distance with unit costs, divided by the longer length; 0 iff equal."""
    n, m = len(s1), len(s2)
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        return 1.0
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        a = s1[i - 1]
        for j in range(1, m + 1):
            cost = 0 if a == s2[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[m] / max(n, m)


@dataclass(frozen=True)
class UtilityReport:
    du: float
    transport_cost: float
    plan: tuple  # of ((variant index orig, variant index anon), mass, cost)
    original_variants: tuple
    anonymized_variants: tuple

    def summary(self) -> str:
        return (
            f"data utility {self.du:.6f} "
            f"(transport cost {self.transport_cost:.6f}, "
            f"{len(self.original_variants)}x{len(self.anonymized_variants)} variants)"
        )


def emd_data_utility(
    original: EventLog,
    anonymized: EventLog,
    ps: Perspective,
    accuracy: TimestampAccuracy = TimestampAccuracy.SECONDS,
) -> UtilityReport:
    """Data utility: 1 - minimal transport cost between variant distributions."""
    if not len(original) or not len(anonymized):
        raise LogError("data utility needs two non-empty logs")
    mult_a, _ = variants(original, ps, accuracy)
    mult_b, _ = variants(anonymized, ps, accuracy)
    va = sorted(mult_a, key=lambda v: tuple(e.sort_key() for e in v))
    vb = sorted(mult_b, key=lambda v: tuple(e.sort_key() for e in v))
    wa = np.array([mult_a[v] for v in va], dtype=float)
    wb = np.array([mult_b[v] for v in vb], dtype=float)
    wa /= wa.sum()
    wb /= wb.sum()

    if va == vb and np.allclose(wa, wb):
        # moving nothing is optimal: the ground cost vanishes on the diagonal
        plan = tuple(((i, i), float(wa[i]), 0.0) for i in range(len(va)))
        return UtilityReport(1.0, 0.0, plan, tuple(va), tuple(vb))

    n, m = len(va), len(vb)
    if n * m > TRANSPORT_SIZE_CAP:
        raise LogError(
            f"variant cost matrix {n}x{m} exceeds the exact-transport cap "
            f"({TRANSPORT_SIZE_CAP}); sample the logs before comparing"
        )
    cost = np.empty((n, m))
    for i, x in enumerate(va):
        for j, y in enumerate(vb):
            cost[i, j] = normalized_levenshtein(x, y)

    # transportation LP: row sums = wa, column sums = wb (sparse constraints)
    rows, cols = [], []
    for i in range(n):
        for j in range(m):
            rows.append(i)
            cols.append(i * m + j)
    for j in range(m):
        for i in range(n):
            rows.append(n + j)
            cols.append(i * m + j)
    a_eq = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n + m, n * m)
    )
    b_eq = np.concatenate([wa, wb])
    res = linprog(
        cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    if not res.success:
        raise LogError(f"transportation solve failed: {res.message}")
    flow = res.x.reshape(n, m)
    total = float(np.sum(flow * cost))
    plan = tuple(
        ((i, j), float(flow[i, j]), float(cost[i, j]))
        for i in range(n)
        for j in range(m)
        if flow[i, j] > 1e-12
    )
    du = 1.0 - total
    return UtilityReport(du, total, plan, tuple(va), tuple(vb))


@dataclass(frozen=True)
class GraphComparison:
    fitness: float
    precision: float
    f1: float
    missing_edges: tuple  # in original only
    extra_edges: tuple  # in anonymized only

    def summary(self) -> str:
        return (
            f"fitness {self.fitness:.6f}  precision {self.precision:.6f}  "
            f"f1 {self.f1:.6f}"
        )


def _graph_compare(
    df_orig: Dict[Tuple, int], df_anon: Dict[Tuple, int], vertices: set
) -> GraphComparison:
    if not df_orig:
        raise LogError("the original log has no directly-follows edges; fitness is undefined")
    edges_o = set(df_orig)
    edges_a = {e for e in df_anon if e[0] in vertices and e[1] in vertices}
    shared = edges_o & edges_a
    fitness = sum(df_anon[e] for e in shared) / sum(df_orig.values())
    universe = {(x, y) for x in vertices for y in vertices}
    comp_o = universe - edges_o
    comp_a = universe - edges_a
    precision = len(comp_o & comp_a) / len(comp_o) if comp_o else 1.0
    if fitness == 0 or precision == 0:
        f1 = 0.0
    else:
        f1 = 2 * fitness * precision / (fitness + precision)
    return GraphComparison(
        fitness=fitness,
        precision=precision,
        f1=f1,
        missing_edges=tuple(sorted(edges_o - edges_a)),
        extra_edges=tuple(sorted(edges_a - edges_o)),
    )


def dfg_compare(original: EventLog, anonymized: EventLog) -> GraphComparison:
    """Compare the directly-follows graphs of two logs (activity perspective).

    Fitness weighs shared edges by their counts in the anonymized log against
    the original totals; precision compares edge complements over the
    original log's activity universe.
    """
    df_o = directly_follows(original, Perspective.A)
    df_a = directly_follows(anonymized, Perspective.A)
    return _graph_compare(df_o, df_a, original.activities())


def handover_compare(original: EventLog, anonymized: EventLog) -> GraphComparison:
    """Compare handover-of-work networks (resource perspective)."""
    if not original.has_resources() or not anonymized.has_resources():
        raise LogError("handover networks need resources on every event")
    df_o = directly_follows(original, Perspective.R)
    df_a = directly_follows(anonymized, Perspective.R)
    return _graph_compare(df_o, df_a, original.resources())
