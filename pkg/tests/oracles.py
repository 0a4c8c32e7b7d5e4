"""Independent brute-force references used by the tests.

Nothing here imports the hull machinery: gluings are enumerated directly as
choice functions over generators, and distances to sets are minimized over
the enumerated members.
"""
import itertools

import numpy as np


def all_atomwise_gluings(sections):
    """Every section obtained by picking, atom by atom, one of the given sections."""
    sections = [tuple(s) for s in sections]
    n = len(sections[0])
    out = set()
    for choice in itertools.product(range(len(sections)), repeat=n):
        out.add(tuple(sections[c][i] for i, c in enumerate(choice)))
    return out


def closed_under_gluing(rows):
    rows = {tuple(r) for r in rows}
    return all_atomwise_gluings(list(rows)) <= rows


def euclid(p, q):
    return float(np.sqrt(sum((a - b) ** 2 for a, b in zip(p, q))))


def random_distance(x, y, base=euclid):
    return np.array([base(p, q) for p, q in zip(x, y)])


def dist_to_members(x, members, base=euclid):
    return np.min([random_distance(x, m, base) for m in members], axis=0)


def hausdorff_members(m1, m2, base=euclid):
    a = np.max([dist_to_members(x, m2, base) for x in m1], axis=0)
    b = np.max([dist_to_members(y, m1, base) for y in m2], axis=0)
    return np.maximum(a, b)


def affine_fixed_point(a, b):
    """Per-atom scalar affine map x -> a x + b."""
    return [bi / (1.0 - ai) for ai, bi in zip(a, b)]
