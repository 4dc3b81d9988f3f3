"""Independent brute-force oracles for the test suite.

Everything here is written from the defining formulas with plain loops, on
purpose: these functions are the reference the library implementations are
checked against, so they never share code with the package.
"""

from __future__ import annotations

from typing import Optional


def reachability_pairs(edges: list[tuple]) -> set[tuple]:
    """Transitive closure by per-source breadth-first search."""
    adjacency: dict = {}
    for a, b in edges:
        adjacency.setdefault(a, set()).add(b)
    closure = set()
    for start in adjacency:
        frontier = list(adjacency[start])
        seen = set()
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            closure.add((start, node))
            frontier.extend(adjacency.get(node, ()))
    return closure


def connected_components(edges: list[tuple]) -> list[set]:
    """Undirected components over the endpoints of ``edges``."""
    neighbors: dict = {}
    for a, b in edges:
        neighbors.setdefault(a, set()).add(b)
        neighbors.setdefault(b, set()).add(a)
    remaining = set(neighbors)
    components = []
    while remaining:
        start = remaining.pop()
        component = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for other in neighbors[node]:
                if other not in component:
                    component.add(other)
                    remaining.discard(other)
                    frontier.append(other)
        components.append(component)
    return components


# ---------------------------------------------------------------------------
# Agreement statistics, straight from the definitions
# ---------------------------------------------------------------------------

# Ratings are given to these oracles as a dense table:
#   table[item][rater] = score or None


def percent_agreement_oracle(table: list[list[Optional[int]]]) -> Optional[float]:
    equal = 0
    total = 0
    for row in table:
        for i in range(len(row)):
            for j in range(i + 1, len(row)):
                if row[i] is None or row[j] is None:
                    continue
                total += 1
                if row[i] == row[j]:
                    equal += 1
    if total == 0:
        return None
    return equal / total


def kappa_oracle(table: list[list[Optional[int]]], rater_a: int, rater_b: int,
                 categories=(1, 2, 3, 4, 5)) -> Optional[float]:
    """Unweighted Cohen's kappa from the full confusion matrix."""
    confusion = {(c, k): 0 for c in categories for k in categories}
    n = 0
    for row in table:
        a, b = row[rater_a], row[rater_b]
        if a is None or b is None:
            continue
        confusion[(a, b)] += 1
        n += 1
    if n == 0:
        return None
    p_o = sum(confusion[(c, c)] for c in categories) / n
    p_e = 0.0
    for c in categories:
        row_marginal = sum(confusion[(c, k)] for k in categories) / n
        col_marginal = sum(confusion[(k, c)] for k in categories) / n
        p_e += row_marginal * col_marginal
    if p_e == 1.0:
        return None
    return (p_o - p_e) / (1.0 - p_e)


def krippendorff_oracle(table: list[list[Optional[int]]],
                        metric: str = "ordinal") -> Optional[float]:
    """Alpha by direct enumeration of value pairs within and across units."""
    units = []
    for row in table:
        values = [v for v in row if v is not None]
        if len(values) >= 2:
            units.append(values)
    n = sum(len(u) for u in units)
    if n < 2:
        return None

    counts: dict[int, int] = {}
    for unit in units:
        for v in unit:
            counts[v] = counts.get(v, 0) + 1

    def delta2(c: int, k: int) -> float:
        if c == k:
            return 0.0
        if metric == "nominal":
            return 1.0
        lo, hi = min(c, k), max(c, k)
        between = sum(counts.get(g, 0) for g in range(lo, hi + 1))
        return (between - (counts[lo] + counts[hi]) / 2.0) ** 2

    observed_num = 0.0
    for unit in units:
        m = len(unit)
        pair_sum = 0.0
        for i in range(m):
            for j in range(m):
                if i != j:
                    pair_sum += delta2(unit[i], unit[j])
        observed_num += pair_sum / (m - 1)
    observed = observed_num / n

    values = [v for unit in units for v in unit]
    expected_num = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                expected_num += delta2(values[i], values[j])
    expected = expected_num / (n * (n - 1))
    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected
