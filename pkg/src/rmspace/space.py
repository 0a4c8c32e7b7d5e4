"""Random metric spaces over a finite probability space.

The workhorse is :class:`L0Space`, the space of random elements of a base
metric space: a point is a *section* assigning a base point to every atom and
the random distance is computed atom by atom.  Gluing along a partition is
just splicing sections, so the whole carrier is closed under gluing.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptySetError,
    HullCapError,
    NotInSetError,
    NotSigmaStableError,
    SpaceMismatchError,
)
from .prob import (
    TOL_ZERO,
    Event,
    ExtRandomScalar,
    Partition,
    ProbSpace,
    RandomScalar,
    as_scalar,
    glue_scalars,
)

DEFAULT_HULL_CAP = 100_000


# --------------------------------------------------------------------------
# base metric spaces


class BaseMetricSpace:
    """An ordinary metric space (M, d) whose points populate the sections."""

    def normalize(self, p):
        return p

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def pairwise(self, ps: Sequence, qs: Sequence) -> np.ndarray:
        return np.array([[self.distance(p, q) for q in qs] for p in ps], dtype=float).reshape(len(ps), len(qs))


class FinitePoints(BaseMetricSpace):
    """Finitely many labelled points with an explicit distance matrix."""

    def __init__(self, labels: Sequence, dist_matrix, validate: bool = True):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("FinitePoints labels must be distinct")
        D = np.array(dist_matrix, dtype=float)
        if D.shape != (len(self.labels), len(self.labels)):
            raise ValueError(f"distance matrix shape {D.shape} does not match {len(self.labels)} labels")
        D.setflags(write=False)
        self.dist_matrix = D
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if validate:
            bad = self.violations()
            if bad:
                axiom, witness = bad[0]
                raise ValueError(f"distance matrix violates {axiom} at {witness} ({len(bad)} violations)")

    def violations(self) -> list[tuple[str, tuple]]:
        """Exhaustive metric-axiom scan; returns (axiom, label witness) pairs."""
        D, labs, n = self.dist_matrix, self.labels, len(self.labels)
        out = []
        for i in range(n):
            if D[i, i] != 0.0:
                out.append(("identity", (labs[i],)))
            for j in range(n):
                if D[i, j] < 0 or not math.isfinite(D[i, j]):
                    out.append(("nonnegativity", (labs[i], labs[j])))
                if i < j and D[i, j] != D[j, i]:
                    out.append(("symmetry", (labs[i], labs[j])))
                if i != j and D[i, j] == 0.0:
                    out.append(("separation", (labs[i], labs[j])))
        viol = D[:, None, :] > D[:, :, None] + D[None, :, :] + 1e-12 * (1 + D[:, None, :])
        for i, j, k in zip(*np.nonzero(viol)):
            out.append(("triangle", (labs[i], labs[j], labs[k])))
        return out

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise NotInSetError(f"{p!r} is not a point of this finite base space") from None

    def normalize(self, p):
        self.index(p)
        return p

    def distance(self, p, q) -> float:
        return float(self.dist_matrix[self.index(p), self.index(q)])

    def pairwise(self, ps, qs) -> np.ndarray:
        i = [self.index(p) for p in ps]
        j = [self.index(q) for q in qs]
        return self.dist_matrix[np.ix_(i, j)]

    def __eq__(self, other):
        return (
            isinstance(other, FinitePoints)
            and self.labels == other.labels
            and np.array_equal(self.dist_matrix, other.dist_matrix)
        )

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"FinitePoints({list(self.labels)!r})"


@dataclass(frozen=True)
class EuclideanRd(BaseMetricSpace):
    """R^dim with the Euclidean metric; base points are float tuples."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def normalize(self, p):
        arr = np.asarray(p, dtype=float).reshape(-1)
        if arr.shape != (self.dim,):
            raise ValueError(f"expected a point of R^{self.dim}, got {p!r}")
        if not np.isfinite(arr).all():
            raise ValueError(f"non-finite coordinates in {p!r}")
        return tuple(float(v) for v in arr)

    def distance(self, p, q) -> float:
        return math.dist(p, q)

    def pairwise(self, ps, qs) -> np.ndarray:
        P = np.asarray(ps, dtype=float).reshape(len(ps), self.dim)
        Q = np.asarray(qs, dtype=float).reshape(len(qs), self.dim)
        return np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).sum(axis=2))


# --------------------------------------------------------------------------
# points and spaces


@dataclass(frozen=True)
class RandomPoint:
    """A random element: one base point per atom."""

    section: tuple

    def __post_init__(self):
        object.__setattr__(self, "section", tuple(self.section))

    def __getitem__(self, atom):
        return self.section[atom]

    def __len__(self):
        return len(self.section)

    def __iter__(self):
        return iter(self.section)


class RMSpace:
    """A random metric space: a carrier plus d: E x E -> L0_+."""

    prob: ProbSpace

    def distance(self, x, y) -> RandomScalar:
        raise NotImplementedError

    def glue(self, partition: Partition, xs: Sequence):
        raise NotImplementedError(f"{type(self).__name__} has no native gluing")

    def points(self) -> list | None:
        """All points of a finite carrier, or None when the carrier is not enumerable."""
        return None

    def same(self, x, y, tol: float = TOL_ZERO) -> bool:
        return bool((self.distance(x, y).values <= tol).all())


class L0Space(RMSpace):
    """L0(F, M): random elements of a base metric space M."""

    def __init__(self, prob: ProbSpace, base: BaseMetricSpace):
        self.prob = prob
        self.base = base

    def __repr__(self):
        return f"L0Space(atoms={self.prob.atom_count}, base={self.base!r})"

    def __eq__(self, other):
        return isinstance(other, L0Space) and self.prob == other.prob and self.base == other.base

    def __hash__(self):
        return hash((self.prob, type(self.base)))

    def point(self, section) -> RandomPoint:
        if isinstance(section, RandomPoint):
            section = section.section
        if isinstance(self.base, EuclideanRd):
            arr = np.asarray(section, dtype=float)
            if self.base.dim == 1 and arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            section = list(arr)
        section = tuple(self.base.normalize(p) for p in section)
        if len(section) != self.prob.atom_count:
            raise SpaceMismatchError(
                f"a section needs {self.prob.atom_count} entries, got {len(section)}"
            )
        return RandomPoint(section)

    def constant(self, p) -> RandomPoint:
        return self.point([p] * self.prob.atom_count)

    def check_point(self, x: RandomPoint) -> None:
        if not isinstance(x, RandomPoint) or len(x) != self.prob.atom_count:
            raise SpaceMismatchError(f"{x!r} is not a point of {self!r}")

    def distance(self, x: RandomPoint, y: RandomPoint) -> RandomScalar:
        if len(x) != len(y) or len(x) != self.prob.atom_count:
            raise SpaceMismatchError("points have sections of different lengths")
        base = self.base
        if isinstance(base, EuclideanRd):
            a = np.asarray(x.section, dtype=float)
            b = np.asarray(y.section, dtype=float)
            return RandomScalar(np.sqrt(((a - b) ** 2).sum(axis=1)))
        return RandomScalar([base.distance(p, q) for p, q in zip(x.section, y.section)])

    def glue(self, partition: Partition, xs: Sequence[RandomPoint]) -> RandomPoint:
        return _splice(partition, xs)

    def points(self) -> list[RandomPoint] | None:
        if not isinstance(self.base, FinitePoints):
            return None
        size = len(self.base.labels) ** self.prob.atom_count
        if size > DEFAULT_HULL_CAP:
            raise HullCapError(size, DEFAULT_HULL_CAP)
        return [RandomPoint(s) for s in itertools.product(self.base.labels, repeat=self.prob.atom_count)]

    def as_array(self, x: RandomPoint) -> np.ndarray:
        """Euclidean sections as an (atoms, dim) array."""
        return np.asarray(x.section, dtype=float)


class RNModuleSpace(L0Space):
    """L0(F, R^d) as a random normed module; d(x, y) = ||x - y||."""

    def __init__(self, prob: ProbSpace, dim: int):
        super().__init__(prob, EuclideanRd(dim))

    def _wrap(self, arr) -> RandomPoint:
        return RandomPoint(tuple(tuple(float(v) for v in row) for row in np.asarray(arr, dtype=float)))

    def zero(self) -> RandomPoint:
        return self._wrap(np.zeros((self.prob.atom_count, self.base.dim)))

    def add(self, x: RandomPoint, y: RandomPoint) -> RandomPoint:
        return self._wrap(self.as_array(x) + self.as_array(y))

    def sub(self, x: RandomPoint, y: RandomPoint) -> RandomPoint:
        return self._wrap(self.as_array(x) - self.as_array(y))

    def scale(self, xi, x: RandomPoint) -> RandomPoint:
        """Module action of a random (or constant) scalar."""
        if isinstance(xi, ExtRandomScalar):
            factor = xi.values[:, None]
        else:
            factor = float(xi)
        return self._wrap(factor * self.as_array(x))

    def norm(self, x: RandomPoint) -> RandomScalar:
        return RandomScalar(np.sqrt((self.as_array(x) ** 2).sum(axis=1)))

    def distance(self, x, y) -> RandomScalar:
        return self.norm(self.sub(x, y))


class ProductSpace(RMSpace):
    """E1 x E2 with d = d1 + d2; points are pairs."""

    def __init__(self, first: RMSpace, second: RMSpace):
        if first.prob != second.prob:
            raise SpaceMismatchError("product factors must share the same probability space")
        self.prob = first.prob
        self.first = first
        self.second = second

    def __repr__(self):
        return f"ProductSpace({self.first!r}, {self.second!r})"

    def distance(self, x, y) -> RandomScalar:
        return self.first.distance(x[0], y[0]) + self.second.distance(x[1], y[1])

    def glue(self, partition, xs):
        return (
            self.first.glue(partition, [x[0] for x in xs]),
            self.second.glue(partition, [x[1] for x in xs]),
        )

    def points(self):
        a, b = self.first.points(), self.second.points()
        if a is None or b is None:
            return None
        return [(p, q) for p in a for q in b]


class CallbackSpace(RMSpace):
    """A user-supplied finite point set with a distance callback.

    The metric is trusted; run :func:`check_rm_axioms` to audit it.  Gluing
    searches the point set for an element meeting the gluing conditions.
    """

    def __init__(self, prob: ProbSpace, points: Sequence, metric: Callable[[Any, Any], Any]):
        self.prob = prob
        self._points = list(points)
        if not self._points:
            raise EmptySetError("an RM space needs a nonempty carrier")
        self._metric = metric

    def distance(self, x, y) -> RandomScalar:
        d = as_scalar(self._metric(x, y))
        if len(d) != self.prob.atom_count:
            raise SpaceMismatchError("metric callback returned the wrong number of atoms")
        return d

    def points(self):
        return list(self._points)

    def glue(self, partition, xs):
        for cand in self._points:
            if _satisfies_gluing(self, cand, partition, xs):
                return cand
        raise NotSigmaStableError("no carrier point realizes the requested gluing")


def l0_space(space: ProbSpace, base: BaseMetricSpace) -> L0Space:
    return L0Space(space, base)


def product_space(e1: RMSpace, e2: RMSpace) -> ProductSpace:
    return ProductSpace(e1, e2)


# --------------------------------------------------------------------------
# gluing


def _splice(partition: Partition, xs: Sequence):
    if len(xs) != len(partition.blocks):
        raise ValueError(f"{len(xs)} points for a partition with {len(partition.blocks)} blocks")
    first = xs[0]
    if isinstance(first, RandomPoint):
        for x in xs:
            if len(x) != partition.atom_count:
                raise SpaceMismatchError("section length does not match the partition's atom count")
        owner = partition.block_of
        return RandomPoint(tuple(xs[owner[i]][i] for i in range(partition.atom_count)))
    if isinstance(first, ExtRandomScalar):
        return glue_scalars(partition, xs)
    if isinstance(first, tuple):
        return tuple(_splice(partition, [x[k] for x in xs]) for k in range(len(first)))
    raise TypeError(f"cannot glue {type(first).__name__} points without a space")


def _satisfies_gluing(space: RMSpace, x, partition: Partition, xs, tol: float = TOL_ZERO) -> bool:
    for n, xn in enumerate(xs):
        if not partition.blocks[n].members:
            continue
        d = space.distance(x, xn).values
        if any(d[i] > tol for i in partition.blocks[n].members):
            return False
    return True


def glue_points(partition: Partition, xs: Sequence, space: RMSpace | None = None, verify: bool = False):
    """The point agreeing with ``xs[n]`` on block ``n`` (d = 0 there) for every n.

    With ``verify=True`` the gluing conditions are re-checked through the
    metric and, on enumerable carriers, every other candidate is confirmed to
    be at distance zero from the result.
    """
    if not xs:
        raise ValueError("nothing to glue")
    if len(xs) != len(partition.blocks):
        raise ValueError(f"{len(xs)} points for a partition with {len(partition.blocks)} blocks")
    result = space.glue(partition, xs) if space is not None else _splice(partition, xs)
    if verify:
        if space is None:
            raise ValueError("verification needs the space's metric")
        if not _satisfies_gluing(space, result, partition, xs):
            raise NotSigmaStableError("glued point violates the gluing conditions")
        carrier = space.points()
        if carrier is not None and len(carrier) <= 10_000:
            for cand in carrier:
                if _satisfies_gluing(space, cand, partition, xs) and not space.same(cand, result):
                    raise AssertionError("gluing is not unique; the metric is not separating")
    return result


def glue_two(A: Event, x1, x2, space: RMSpace | None = None):
    """I_A x1 + I_{A^c} x2."""
    n = _atom_count_of(x1, space)
    return glue_points(Partition.two_block(A, n), [x1, x2], space)


def glue_by_two_block_steps(partition: Partition, xs: Sequence, space: RMSpace | None = None):
    """Finite-partition gluing assembled from repeated two-block gluings.

    Mirrors the induction that reduces an n-block gluing to two-block ones:
    glue the first k blocks into one point, then splice in block k+1.
    """
    if len(xs) != len(partition.blocks):
        raise ValueError("length mismatch between points and partition blocks")
    n = partition.atom_count
    acc = xs[0]
    covered = Event(partition.blocks[0].members)
    for k in range(1, len(xs)):
        acc = glue_points(Partition((covered, covered.complement(n)), n), [acc, xs[k]], space)
        covered = covered | partition.blocks[k]
    return acc


def _atom_count_of(x, space) -> int:
    if space is not None:
        return space.prob.atom_count
    while isinstance(x, tuple) and not isinstance(x, RandomPoint):
        x = x[0]
    return len(x)


# --------------------------------------------------------------------------
# sigma-stable hulls


def _distinct(base: BaseMetricSpace, values: Iterable, tol: float) -> list:
    out: list = []
    for v in values:
        if isinstance(base, FinitePoints):
            if v not in out:
                out.append(v)
        elif all(base.distance(v, w) > tol for w in out):
            out.append(v)
    return out


class SigmaStableSet:
    """A finite generator set together with all of its atomwise gluings.

    Members are ordered lexicographically by per-atom choice, so member 0 is
    the first generator.  The hull is materialized on first access.
    """

    def __init__(self, space: RMSpace, generators: Sequence, cap: int = DEFAULT_HULL_CAP):
        self.space = space
        self.generators = tuple(generators)
        if not self.generators:
            raise EmptySetError("a sigma-stable set needs at least one generator")
        self.cap = cap
        self._lock = threading.Lock()
        self._members: list | None = None
        self._values: list[list] | None = None
        if isinstance(space, L0Space):
            for g in self.generators:
                space.check_point(g)
            self._values = [
                _distinct(space.base, (g[i] for g in self.generators), TOL_ZERO)
                for i in range(space.prob.atom_count)
            ]
        if self.bound > cap:
            raise HullCapError(self.bound, cap)

    @property
    def atom_count(self) -> int:
        return self.space.prob.atom_count

    @property
    def bound(self) -> int:
        """Upper bound on the hull size (exact for L0 spaces)."""
        if self._values is not None:
            return math.prod(len(v) for v in self._values)
        return len(self.generators) ** self.atom_count

    def section_values(self) -> list[list]:
        """Per-atom distinct base points (L0 spaces only)."""
        if self._values is None:
            raise TypeError("section values exist only for hulls in L0 spaces")
        return [list(v) for v in self._values]

    @property
    def members(self) -> list:
        if self._members is None:
            with self._lock:
                if self._members is None:
                    self._members = self._materialize()
        return self._members

    def _materialize(self) -> list:
        if self._values is not None:
            return [RandomPoint(s) for s in itertools.product(*self._values)]
        n = self.atom_count
        atomic = Partition.atomic(n)
        out: list = []
        for choice in itertools.product(range(len(self.generators)), repeat=n):
            g = self.space.glue(atomic, [self.generators[c] for c in choice])
            if not any(self.space.same(g, h) for h in out):
                out.append(g)
        return out

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __repr__(self):
        return f"SigmaStableSet({len(self.generators)} generators, bound={self.bound})"


def sigma_hull(space: RMSpace, generators: Sequence, cap: int = DEFAULT_HULL_CAP) -> SigmaStableSet:
    return SigmaStableSet(space, generators, cap)


def selection_set(space: L0Space, per_atom_sets: Sequence[Sequence], cap: int = DEFAULT_HULL_CAP) -> SigmaStableSet:
    """The set of all selections of a per-atom family of (finite) closed sets."""
    if len(per_atom_sets) != space.prob.atom_count:
        raise SpaceMismatchError("need one set per atom")
    if any(len(s) == 0 for s in per_atom_sets):
        raise EmptySetError("every per-atom set must be nonempty")
    width = max(len(s) for s in per_atom_sets)
    gens = [
        space.point([s[min(k, len(s) - 1)] for s in per_atom_sets])
        for k in range(width)
    ]
    return SigmaStableSet(space, gens, cap)


def _as_set(space: RMSpace, G) -> SigmaStableSet:
    if isinstance(G, SigmaStableSet):
        return G
    return SigmaStableSet(space, list(G))


def dist_to_set(x, G: SigmaStableSet, return_witness: bool = False):
    """d(x, G): the pointwise infimum of d(x, g) over the hull.

    The infimum is attained on each atom; the witness is the hull member
    gluing those per-atom minimizers (lowest index on ties).
    """
    space = G.space
    if G._values is not None:
        space.check_point(x)
        vals, picks = [], []
        for i, V in enumerate(G._values):
            row = space.base.pairwise([x[i]], V)[0]
            j = int(np.argmin(row))
            vals.append(row[j])
            picks.append(V[j])
        d = RandomScalar(vals)
        return (d, RandomPoint(tuple(picks))) if return_witness else d
    members = G.members
    M = np.stack([space.distance(x, g).values for g in members])
    idx = np.argmin(M, axis=0)
    d = RandomScalar(M[idx, np.arange(M.shape[1])])
    if not return_witness:
        return d
    w = space.glue(Partition.atomic(G.atom_count), [members[j] for j in idx])
    w = next((h for h in members if space.same(h, w)), w)
    return d, w


def in_closure(x, G: SigmaStableSet, tol: float = TOL_ZERO) -> bool:
    """x lies in the closure of G iff d(x, G) vanishes on every atom."""
    return bool((dist_to_set(x, G).values <= tol).all())


def random_diameter(G: SigmaStableSet) -> RandomScalar:
    """Pointwise maximum of pairwise distances inside the hull."""
    if G._values is not None:
        base = G.space.base
        return RandomScalar([float(base.pairwise(V, V).max()) for V in G._values])
    members = G.members
    best = np.zeros(G.atom_count)
    for x, y in itertools.combinations(members, 2):
        best = np.maximum(best, G.space.distance(x, y).values)
    return RandomScalar(best)


def distance_lattice_witness(G: SigmaStableSet, p1: tuple, p2: tuple):
    """Pairs in G x G realizing d(p1) ^ d(p2) and d(p1) v d(p2).

    Both are glued on A = {d(p1) <= d(p2)}.
    """
    space = G.space
    for p in (*p1, *p2):
        if not in_closure(p, G):
            raise NotInSetError(f"{p!r} is not a member of the hull")
    d1 = space.distance(*p1).values
    d2 = space.distance(*p2).values
    n = G.atom_count
    A = Event(np.flatnonzero(d1 <= d2).tolist())
    part = Partition.two_block(A, n)
    low = (space.glue(part, [p1[0], p2[0]]), space.glue(part, [p1[1], p2[1]]))
    high = (space.glue(part, [p2[0], p1[0]]), space.glue(part, [p2[1], p1[1]]))
    return low, high


# --------------------------------------------------------------------------
# convergence in the two uniformities


def converges_eps_lambda(space: RMSpace, seq: Sequence, x, eps: float, lam: float) -> int | None:
    """First index n with P{d(seq[m], x) < eps} > 1 - lam for every m >= n."""
    if not (0.0 < lam < 1.0):
        raise ValueError("lam must lie in (0, 1)")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not seq:
        raise ValueError("empty sequence")
    probs = np.asarray(space.prob.probs)
    inside = [math.fsum(probs[space.distance(s, x).values < eps]) > 1.0 - lam for s in seq]
    return _entry_index(inside)


def converges_L0(space: RMSpace, seq: Sequence, x, eps) -> int | None:
    """First index n with d(seq[m], x) <= eps on every atom for every m >= n."""
    eps = as_scalar(eps) if isinstance(eps, ExtRandomScalar) else RandomScalar(
        np.full(space.prob.atom_count, float(eps))
    )
    if not (eps.values > 0).all():
        raise ValueError("eps must be strictly positive on every atom")
    if not seq:
        raise ValueError("empty sequence")
    inside = [space.distance(s, x) <= eps for s in seq]
    return _entry_index(inside)


def _entry_index(inside: list[bool]) -> int | None:
    n = len(inside)
    while n > 0 and inside[n - 1]:
        n -= 1
    return n if n < len(inside) else None


# --------------------------------------------------------------------------
# stability predicates


def _distance_tensor(space: RMSpace, G: Sequence) -> np.ndarray:
    n = len(G)
    D = np.zeros((n, n, space.prob.atom_count))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = space.distance(G[i], G[j]).values
    return D


def is_d_sigma_stable(space: RMSpace, G: Sequence, tol: float = TOL_ZERO) -> bool:
    """Closed under every atomwise gluing, agreement measured by the metric."""
    G = list(G)
    if not G:
        return False
    D = _distance_tensor(space, G) <= tol
    n, A = len(G), space.prob.atom_count
    choices = np.array(list(itertools.product(range(n), repeat=A)), dtype=int).reshape(-1, A)
    ok = np.ones((n, len(choices)), dtype=bool)
    for w in range(A):
        ok &= D[:, choices[:, w], w]
    return bool(ok.any(axis=0).all())


def is_d_stable(space: RMSpace, G: Sequence, tol: float = TOL_ZERO) -> bool:
    """Closed under two-block gluings I_A x1 + I_{A^c} x2."""
    G = list(G)
    if not G:
        return False
    D = _distance_tensor(space, G) <= tol
    A_count = space.prob.atom_count
    for mask in itertools.product((True, False), repeat=A_count):
        inA = np.array(mask)
        # ok[g, i, j]: g agrees with i on A and with j off A
        on = D[:, :, inA].all(axis=2)
        off = D[:, :, ~inA].all(axis=2)
        ok = on[:, :, None] & off[:, None, :]
        if not ok.any(axis=0).all():
            return False
    return True


# --------------------------------------------------------------------------
# axiom checkers


@dataclass(frozen=True)
class Violation:
    axiom: str
    atom: int | None
    witness: tuple
    detail: str = ""


@dataclass
class AxiomReport:
    violations: list[Violation] = field(default_factory=list)
    checked: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def axioms_violated(self) -> set[str]:
        return {v.axiom for v in self.violations}


def _rel_slack(*vals) -> float:
    return 1e-12 * (1.0 + max(abs(v) for v in vals))


def check_rm_axioms(space: RMSpace, samples: Sequence, max_triples: int = 20_000, seed: int = 0) -> AxiomReport:
    """Check RM-1..RM-4 pointwise over sampled pairs and triples.

    Every pair is checked; triples are exhaustive up to ``max_triples`` and
    sampled (deterministically, from ``seed``) beyond that.
    """
    if not samples:
        raise ValueError("need at least one sample point")
    pts = []
    for s in samples:
        if s not in pts:
            pts.append(s)
    n = len(pts)
    D = np.stack([np.stack([space.distance(p, q).values for q in pts]) for p in pts])
    rep = AxiomReport()
    atoms = range(space.prob.atom_count)
    for i in range(n):
        for w in atoms:
            if D[i, i, w] != 0.0:
                rep.violations.append(Violation("RM-1", w, (pts[i],), f"d(p,p)={D[i, i, w]}"))
    for i, j in itertools.product(range(n), repeat=2):
        for w in atoms:
            if D[i, j, w] < 0:
                rep.violations.append(Violation("nonnegativity", w, (pts[i], pts[j]), f"d={D[i, j, w]}"))
        if i < j:
            for w in atoms:
                a, b = D[i, j, w], D[j, i, w]
                if abs(a - b) > _rel_slack(a, b):
                    rep.violations.append(Violation("RM-2", w, (pts[i], pts[j]), f"{a} != {b}"))
            if (D[i, j] == 0.0).all():
                rep.violations.append(Violation("RM-3", None, (pts[i], pts[j]), "zero distance between distinct points"))
    rep.checked["pairs"] = n * n
    if n ** 3 <= max_triples:
        triples = itertools.product(range(n), repeat=3)
    else:
        rng = np.random.default_rng(seed)
        triples = (tuple(t) for t in rng.integers(0, n, size=(max_triples, 3)))
    count = 0
    for i, j, k in triples:
        count += 1
        lhs, rhs = D[i, k], D[i, j] + D[j, k]
        for w in np.flatnonzero(lhs > rhs + 1e-12 * (1.0 + rhs)):
            rep.violations.append(
                Violation("RM-4", int(w), (pts[i], pts[j], pts[k]), f"{lhs[w]} > {rhs[w]}")
            )
    rep.checked["triples"] = count
    return rep


def check_rn_axioms(
    space: RNModuleSpace,
    samples: Sequence[RandomPoint],
    scalars: Sequence | None = None,
    seed: int = 0,
    rtol: float = 1e-12,
) -> AxiomReport:
    """Check RN-1..RN-3, RNM-1 and d(x, y) = ||x - y|| on samples."""
    if not samples:
        raise ValueError("need at least one sample point")
    rng = np.random.default_rng(seed)
    n_atoms = space.prob.atom_count
    if scalars is None:
        scalars = [RandomScalar(rng.normal(size=n_atoms) * 3) for _ in range(4)]
        scalars.append(RandomScalar((rng.random(n_atoms) < 0.5).astype(float)))
    reals = [0.0, -1.0, 2.5]
    rep = AxiomReport()

    def close(a: RandomScalar, b: RandomScalar, axiom, witness):
        diff = np.abs(a.values - b.values)
        scale = rtol * (1.0 + np.maximum(np.abs(a.values), np.abs(b.values)))
        for w in np.flatnonzero(diff > scale):
            rep.violations.append(Violation(axiom, int(w), witness, f"{a[w]} != {b[w]}"))

    zero = space.zero()
    if not (space.norm(zero).values == 0).all():
        rep.violations.append(Violation("RN-2", None, (zero,), "norm of zero is nonzero"))
    for x in samples:
        nx = space.norm(x)
        for a in reals:
            close(space.norm(space.scale(a, x)), abs(a) * nx, "RN-1", (a, x))
        if (nx.values == 0).all() and not space.same(x, zero, 0.0):
            rep.violations.append(Violation("RN-2", None, (x,), "zero norm on a nonzero point"))
        for xi in scalars:
            close(space.norm(space.scale(xi, x)), abs(xi) * nx, "RNM-1", (xi, x))
        for y in samples:
            lhs, rhs = space.norm(space.add(x, y)).values, (nx + space.norm(y)).values
            for w in np.flatnonzero(lhs > rhs + rtol * (1.0 + rhs)):
                rep.violations.append(Violation("RN-3", int(w), (x, y), f"{lhs[w]} > {rhs[w]}"))
            close(space.distance(x, y), space.norm(space.sub(x, y)), "metric", (x, y))
    rep.checked["points"] = len(samples)
    rep.checked["scalars"] = len(scalars)
    return rep
