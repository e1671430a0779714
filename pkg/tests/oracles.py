"""Independent reference implementations used to check the real ones.

Everything here is deliberately written the slow, obvious way (full joint
tables, pairwise counting, direct summation) and must stay decoupled from
the code under test.
"""
from __future__ import annotations

import itertools
import math
from functools import cmp_to_key


def enumerate_full_joint(variables, parents, cpts):
    """Yield (assignment dict, joint probability) over the whole state space.

    variables: list of (name, states tuple), in network order.
    parents:   name -> tuple of parent names.
    cpts:      name -> {parent state tuple: {state: prob}}.
    """
    names = [n for n, _ in variables]
    for combo in itertools.product(*(states for _, states in variables)):
        world = dict(zip(names, combo))
        p = 1.0
        for name, _ in variables:
            key = tuple(world[q] for q in parents[name])
            p *= cpts[name][key][world[name]]
        yield world, p


def posterior_by_enumeration(variables, parents, cpts, target, target_state, evidence):
    """P(target=target_state | evidence) by filtering the full joint table."""
    num = 0.0
    den = 0.0
    for world, p in enumerate_full_joint(variables, parents, cpts):
        if any(world[k] != v for k, v in evidence.items()):
            continue
        den += p
        if world[target] == target_state:
            num += p
    if den == 0.0:
        raise ZeroDivisionError("evidence has zero probability")
    return num / den


def smoothed_cpt_by_counting(rows, variable, states, parent_names, parent_domains, alpha):
    """Tally a CPT straight from the rows: (count + alpha) / (total + alpha * |states|)."""
    table = {}
    for key in itertools.product(*parent_domains):
        counts = {s: 0 for s in states}
        for row in rows:
            if tuple(row[p] for p in parent_names) == key:
                counts[row[variable]] += 1
        total = sum(counts.values())
        table[key] = {
            s: (counts[s] + alpha) / (total + alpha * len(states)) for s in states
        }
    return table


def rmse_by_direct_summation(predicted, actual):
    total = 0.0
    for p, a in zip(predicted, actual):
        total += (p - a) ** 2
    return math.sqrt(total / len(predicted))


def mae_by_direct_summation(predicted, actual):
    total = 0.0
    for p, a in zip(predicted, actual):
        total += abs(a - p)
    return total / len(predicted)


def auc_by_pair_counting(predicted, labels):
    """Mann-Whitney statistic: concordant pairs count 1, ties count 1/2."""
    positives = [p for p, y in zip(predicted, labels) if y == 1]
    negatives = [p for p, y in zip(predicted, labels) if y == 0]
    if not positives or not negatives:
        raise ValueError("both classes required")
    score = 0.0
    for pp in positives:
        for pn in negatives:
            if pp > pn:
                score += 1.0
            elif pp == pn:
                score += 0.5
    return score / (len(positives) * len(negatives))


def nearest_rank_percentile(values, fraction):
    """1-based nearest-rank percentile: the ceil(fraction * n)-th smallest value."""
    ordered = sorted(values)
    index = math.ceil(fraction * len(ordered))
    return ordered[index - 1]


_TYPE_RANK = {"TroubleReport": 0, "Feature": 1, "Refactoring": 2}


def _compare_items(a, b):
    """Full lexicographic comparison over the prioritization tuple, one key at a time."""
    if a.merge_conflict != b.merge_conflict:
        return -1 if a.merge_conflict == "No" else 1
    if a.change_type != b.change_type:
        return -1 if _TYPE_RANK[a.change_type] < _TYPE_RANK[b.change_type] else 1
    if a.merge_probability != b.merge_probability:
        return -1 if a.merge_probability > b.merge_probability else 1
    if a.age_minutes != b.age_minutes:
        return -1 if a.age_minutes > b.age_minutes else 1
    if a.change_id != b.change_id:
        return -1 if a.change_id < b.change_id else 1
    return 0


def order_by_comparator(items):
    return sorted(items, key=cmp_to_key(_compare_items))
