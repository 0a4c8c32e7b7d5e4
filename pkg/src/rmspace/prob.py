"""Finite atomic probability spaces and the lattice of random scalars.

Every atom carries positive mass, so an equivalence class of random variables
is nothing more than its vector of per-atom values, and "almost surely"
becomes "on every atom".
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySetError,
    ExtendedArithmeticError,
    InvalidEventError,
    NotSigmaStableError,
    PartitionError,
    SpaceMismatchError,
    UnboundedError,
)

TOL_ZERO = 1e-9
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ProbSpace:
    """A probability space on atoms ``0 .. atom_count-1``."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("a probability space needs at least one atom")
        if any(not (p > 0.0) or not math.isfinite(p) for p in probs):
            raise ValueError("every atom must have strictly positive probability")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probs must sum to 1 (got {total!r})")

    @classmethod
    def uniform(cls, atom_count: int) -> "ProbSpace":
        if atom_count < 1:
            raise ValueError("atom_count must be at least 1")
        return cls((1.0 / atom_count,) * atom_count)

    @property
    def atom_count(self) -> int:
        return len(self.probs)

    @property
    def atoms(self) -> range:
        return range(len(self.probs))

    @property
    def min_prob(self) -> float:
        return min(self.probs)

    @property
    def omega(self) -> "Event":
        return Event(self.atoms)

    def event(self, members: Iterable[int]) -> "Event":
        A = Event(members)
        A.validate(self.atom_count)
        return A

    def prob(self, A: "Event") -> float:
        A.validate(self.atom_count)
        return math.fsum(self.probs[i] for i in A.members)


@dataclass(frozen=True)
class Event:
    """A set of atom indices."""

    members: frozenset[int]

    def __post_init__(self):
        try:
            members = frozenset(int(i) for i in self.members)
        except (TypeError, ValueError) as exc:
            raise InvalidEventError(f"event members must be integers: {self.members!r}") from exc
        if any(i < 0 for i in members):
            raise InvalidEventError(f"negative atom index in event {sorted(members)}")
        object.__setattr__(self, "members", members)

    def validate(self, atom_count: int) -> None:
        bad = [i for i in self.members if i >= atom_count]
        if bad:
            raise InvalidEventError(
                f"atom indices {sorted(bad)} out of range for {atom_count} atoms"
            )

    def complement(self, atom_count: int) -> "Event":
        self.validate(atom_count)
        return Event(frozenset(range(atom_count)) - self.members)

    def __contains__(self, atom) -> bool:
        return atom in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __or__(self, other: "Event") -> "Event":
        return Event(self.members | other.members)

    def __and__(self, other: "Event") -> "Event":
        return Event(self.members & other.members)


@dataclass(frozen=True)
class Partition:
    """A finite partition of the atoms; empty blocks are allowed.

    Empty blocks stand in for the null tail of a countable partition.
    """

    blocks: tuple[Event, ...]
    atom_count: int

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Event) else Event(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise PartitionError("a partition needs at least one block")
        seen: set[int] = set()
        for b in blocks:
            try:
                b.validate(self.atom_count)
            except InvalidEventError as exc:
                raise PartitionError(str(exc)) from exc
            overlap = seen & b.members
            if overlap:
                raise PartitionError(f"blocks overlap on atoms {sorted(overlap)}")
            seen |= b.members
        missing = set(range(self.atom_count)) - seen
        if missing:
            raise PartitionError(f"blocks do not cover atoms {sorted(missing)}")

    @classmethod
    def atomic(cls, atom_count: int) -> "Partition":
        return cls(tuple(Event((i,)) for i in range(atom_count)), atom_count)

    @classmethod
    def two_block(cls, A: Event, atom_count: int) -> "Partition":
        return cls((A, A.complement(atom_count)), atom_count)

    @classmethod
    def from_labels(cls, labels: Sequence[int], n_blocks: int | None = None) -> "Partition":
        """Block ``labels[i]`` receives atom ``i``."""
        labels = [int(k) for k in labels]
        if n_blocks is None:
            n_blocks = max(labels) + 1 if labels else 1
        if any(k < 0 or k >= n_blocks for k in labels):
            raise PartitionError(f"block labels must lie in [0, {n_blocks})")
        members: list[list[int]] = [[] for _ in range(n_blocks)]
        for atom, k in enumerate(labels):
            members[k].append(atom)
        return cls(tuple(Event(m) for m in members), len(labels))

    @cached_property
    def block_of(self) -> tuple[int, ...]:
        owner = [0] * self.atom_count
        for k, b in enumerate(self.blocks):
            for i in b.members:
                owner[i] = k
        return tuple(owner)

    def __len__(self) -> int:
        return len(self.blocks)


def _as_values(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"random scalar values must be one-dimensional, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError("NaN is not a valid random scalar value")
    arr.setflags(write=False)
    return arr


def as_scalar(values) -> "ExtRandomScalar":
    """Wrap per-atom values, returning a RandomScalar whenever all are finite."""
    if isinstance(values, ExtRandomScalar):
        return values
    arr = _as_values(values)
    cls = RandomScalar if np.isfinite(arr).all() else ExtRandomScalar
    out = object.__new__(cls)
    out._values = arr
    return out


class ExtRandomScalar:
    """Element of the extended lattice: one value in [-inf, +inf] per atom.

    ``&`` and ``|`` are the lattice meet and join; ``<=`` is the pointwise
    partial order (true iff it holds on every atom).
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        self._values = _as_values(values)

    @classmethod
    def constant(cls, c: float, atom_count: int) -> "ExtRandomScalar":
        return as_scalar(np.full(atom_count, float(c)))

    @property
    def values(self) -> np.ndarray:
        return self._values

    def tolist(self) -> list[float]:
        return [float(v) for v in self._values]

    def is_finite(self) -> bool:
        return bool(np.isfinite(self._values).all())

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self):
        return iter(self.tolist())

    def __getitem__(self, atom: int) -> float:
        return float(self._values[atom])

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtRandomScalar):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self._values, other._values))

    def __hash__(self) -> int:
        return hash(tuple(self.tolist()))

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, ExtRandomScalar):
            if len(other) != len(self):
                raise SpaceMismatchError(
                    f"random scalars on {len(self)} and {len(other)} atoms cannot be combined"
                )
            return other._values
        if isinstance(other, (int, float, np.floating, np.integer)):
            if math.isnan(float(other)):
                raise ValueError("NaN operand")
            return np.full(len(self), float(other))
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        a = self._values
        clash = (np.isinf(a) & np.isinf(b)) & (np.sign(a) != np.sign(b))
        if clash.any():
            atoms = np.flatnonzero(clash).tolist()
            raise ExtendedArithmeticError(f"(+inf) + (-inf) is undefined (atoms {atoms})")
        return as_scalar(a + b)

    __radd__ = __add__

    def __neg__(self):
        return as_scalar(-self._values)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self + as_scalar(-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        a = self._values
        with np.errstate(invalid="ignore"):
            out = a * b
        # measure-theoretic convention: 0 * (+-inf) = 0
        out[(a == 0.0) | (b == 0.0)] = 0.0
        return as_scalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        if (b == 0.0).any():
            raise ZeroDivisionError("division by a random scalar that vanishes on some atom")
        return as_scalar(self._values / b)

    def __pow__(self, n):
        with np.errstate(over="ignore"):
            return as_scalar(np.power(self._values, n))

    def __abs__(self):
        return as_scalar(np.abs(self._values))

    def __and__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return as_scalar(np.minimum(self._values, b))

    def __or__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return as_scalar(np.maximum(self._values, b))

    __rand__ = __and__
    __ror__ = __or__

    def __le__(self, other) -> bool:
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return bool((self._values <= b).all())

    def __ge__(self, other) -> bool:
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return bool((self._values >= b).all())


class RandomScalar(ExtRandomScalar):
    """A finite random scalar (an element of L0)."""

    __slots__ = ()

    def __init__(self, values):
        arr = _as_values(values)
        if not np.isfinite(arr).all():
            raise ValueError("RandomScalar values must be finite; use ExtRandomScalar")
        self._values = arr


@dataclass(frozen=True)
class RandomInteger:
    """Positive-integer-valued random variable, e.g. a random iteration count."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if any(v != w for v, w in zip(vals, self.values)):
            raise ValueError(f"RandomInteger values must be integers: {self.values!r}")
        if not vals:
            raise ValueError("RandomInteger needs at least one atom")
        if any(v < 1 for v in vals):
            raise ValueError("RandomInteger values must be >= 1")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, atom: int) -> int:
        return self.values[atom]

    def levels(self) -> dict[int, Event]:
        """Map each attained value k to the event (L = k)."""
        out: dict[int, set[int]] = {}
        for atom, k in enumerate(self.values):
            out.setdefault(k, set()).add(atom)
        return {k: Event(v) for k, v in sorted(out.items())}

    def level_partition(self) -> tuple[list[int], Partition]:
        levels = self.levels()
        return list(levels), Partition(tuple(levels.values()), len(self.values))


@dataclass(frozen=True)
class ContractionFactor:
    """Random Lipschitz factor with 0 <= alpha < 1 on every atom."""

    alpha: RandomScalar

    def __post_init__(self):
        a = self.alpha
        if not isinstance(a, RandomScalar):
            a = RandomScalar(a.values if isinstance(a, ExtRandomScalar) else a)
            object.__setattr__(self, "alpha", a)
        v = a.values
        if (v < 0).any() or (v >= 1).any():
            raise ValueError(f"contraction factor must satisfy 0 <= alpha < 1 on every atom, got {a.tolist()}")

    @property
    def max(self) -> float:
        return float(self.alpha.values.max())

    def lifted(self) -> RandomScalar:
        """Replace alpha by 1/2 on atoms where it vanishes (strictly positive slack)."""
        v = np.where(self.alpha.values == 0.0, 0.5, self.alpha.values)
        return RandomScalar(v)

    def __len__(self) -> int:
        return len(self.alpha)


def indicator(space: ProbSpace, A: Event) -> RandomScalar:
    A.validate(space.atom_count)
    v = np.zeros(space.atom_count)
    v[sorted(A.members)] = 1.0
    return RandomScalar(v)


def _check_lengths(xs: Sequence[ExtRandomScalar], n: int) -> None:
    for x in xs:
        if len(x) != n:
            raise SpaceMismatchError(f"expected random scalars on {n} atoms, got {len(x)}")


def glue_scalars(partition: Partition, xs: Sequence[ExtRandomScalar]) -> ExtRandomScalar:
    """The unique scalar that agrees with ``xs[n]`` on block ``n`` of the partition."""
    if len(xs) != len(partition.blocks):
        raise ValueError(f"{len(xs)} scalars for a partition with {len(partition.blocks)} blocks")
    xs = [as_scalar(x) for x in xs]
    _check_lengths(xs, partition.atom_count)
    owner = partition.block_of
    return as_scalar([xs[owner[i]].values[i] for i in range(partition.atom_count)])


def _stack(xs) -> np.ndarray:
    xs = [as_scalar(x) for x in xs]
    if not xs:
        raise EmptySetError("the essential supremum/infimum of an empty set is not defined here")
    _check_lengths(xs, len(xs[0]))
    return np.stack([x.values for x in xs])


def ess_sup(xs: Iterable[ExtRandomScalar], return_witness: bool = False):
    """Pointwise maximum; the witness gives, per atom, the lowest index attaining it."""
    M = _stack(list(xs))
    idx = np.argmax(M, axis=0)
    sup = as_scalar(M[idx, np.arange(M.shape[1])])
    if return_witness:
        return sup, tuple(int(i) for i in idx)
    return sup


def ess_inf(xs: Iterable[ExtRandomScalar], return_witness: bool = False):
    M = _stack(list(xs))
    idx = np.argmin(M, axis=0)
    inf = as_scalar(M[idx, np.arange(M.shape[1])])
    if return_witness:
        return inf, tuple(int(i) for i in idx)
    return inf


def leq(x: ExtRandomScalar, y: ExtRandomScalar) -> bool:
    return as_scalar(x) <= as_scalar(y)


def lt_on(x: ExtRandomScalar, y: ExtRandomScalar, A: Event) -> bool:
    """True iff x < y strictly on every atom of A (vacuously true for empty A)."""
    x, y = as_scalar(x), as_scalar(y)
    if len(x) != len(y):
        raise SpaceMismatchError("random scalars on different numbers of atoms")
    A.validate(len(x))
    atoms = sorted(A.members)
    return bool((x.values[atoms] < y.values[atoms]).all())


def is_sigma_stable_scalars(G: Iterable[ExtRandomScalar]) -> bool:
    """Whether a finite set of scalars is closed under atomwise gluing.

    On finitely many atoms every gluing is an element of the product of the
    per-atom value sets, so closure holds iff the set *is* that product.
    """
    rows = {tuple(as_scalar(g).tolist()) for g in G}
    if not rows:
        return False
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise SpaceMismatchError("random scalars on different numbers of atoms")
    n = lengths.pop()
    size = 1
    for i in range(n):
        size *= len({r[i] for r in rows})
    return size == len(rows)


def _near_extremum(G, eps, verify, upper):
    G = [as_scalar(g) for g in G]
    if not G:
        raise EmptySetError("G must be nonempty")
    eps = as_scalar(eps)
    _check_lengths(G, len(eps))
    if not (eps.values > 0).all():
        raise ValueError("eps must be strictly positive on every atom")
    if any(not g.is_finite() for g in G):
        side = "above" if upper else "below"
        raise UnboundedError(f"G must be a bounded-{side} subset of L0 (found an infinite value)")
    if verify and not is_sigma_stable_scalars(G):
        raise NotSigmaStableError("G is not closed under atomwise gluing")
    extremum, picks = (ess_sup if upper else ess_inf)(G, return_witness=True)
    n = len(eps)
    g = glue_scalars(Partition.atomic(n), [G[i] for i in picks])
    if g not in set(G):
        raise NotSigmaStableError(
            f"the glued per-atom extremizer {g.tolist()} is not a member of G; G is not sigma-stable"
        )
    Omega = Event(range(n))
    ok = lt_on(extremum - eps, g, Omega) if upper else lt_on(g, extremum + eps, Omega)
    assert ok, "near-extremum certificate failed"
    return g


def near_supremum_witness(G: Iterable[RandomScalar], eps, verify: bool = False) -> RandomScalar:
    """Some g in G with g > sup(G) - eps on every atom."""
    return _near_extremum(G, eps, verify, upper=True)


def near_infimum_witness(G: Iterable[RandomScalar], eps, verify: bool = False) -> RandomScalar:
    """Some g in G with g < inf(G) + eps on every atom."""
    return _near_extremum(G, eps, verify, upper=False)
