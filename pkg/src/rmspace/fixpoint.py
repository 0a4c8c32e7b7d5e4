"""Contraction-type fixed-point solvers on random metric spaces.

Single-valued Banach iteration with an a-posteriori stopping rule, the
random-power variant that contracts only through T^L, Nadler iteration for
set-valued contractions measured in the random Hausdorff metric, and the
pointwise solvers for random operators.

Contraction hypotheses cannot be verified globally; every solver spot-checks
them on consecutive iterates and raises :class:`ContractionViolation` on the
first failure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    ContractionViolation,
    ConvergenceError,
    HypothesisError,
    NotSigmaStableError,
    RMSpaceError,
    SpaceMismatchError,
)
from .prob import TOL_ZERO, ContractionFactor, ExtRandomScalar, RandomInteger, RandomScalar, as_scalar
from .space import (
    EuclideanRd,
    L0Space,
    RandomPoint,
    RMSpace,
    SigmaStableSet,
    dist_to_set,
    glue_points,
    in_closure,
    selection_set,
)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000

# slack for floating round-off in contraction spot checks
_ABS_SLACK = 1e-12
_REL_SLACK = 1e-9


@dataclass(frozen=True)
class PointMap:
    """A single-valued map T: E -> E.

    ``sigma_stable`` records the claim T(glue(xs)) = glue(T(xs)); check it
    with :meth:`commutes_with_gluing`.
    """

    apply: Callable[[Any], Any]
    sigma_stable: bool = False

    def __call__(self, x):
        return self.apply(x)

    def commutes_with_gluing(self, space: RMSpace, partition, xs: Sequence, tol: float = TOL_ZERO) -> bool:
        lhs = self(glue_points(partition, xs, space))
        rhs = glue_points(partition, [self(x) for x in xs], space)
        return space.same(lhs, rhs, tol)


@dataclass(frozen=True)
class MultiMap:
    """A set-valued map T: E -> CB_sigma(E); images are sigma-stable hulls."""

    apply: Callable[[Any], SigmaStableSet]

    def __call__(self, x) -> SigmaStableSet:
        return self.apply(x)


@dataclass
class SolveReport:
    solution: Any
    residual: RandomScalar
    iterations: int
    trace: list | None = None
    info: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# map builders


def _euclid(space: L0Space) -> int:
    if not isinstance(space, L0Space) or not isinstance(space.base, EuclideanRd):
        raise SpaceMismatchError("affine maps need an L0 space over R^d")
    return space.base.dim


def affine_map(space: L0Space, A, b) -> PointMap:
    """Per-atom affine map x(w) -> A(w) x(w) + b(w) on Euclidean sections.

    ``A[w]`` may be a scalar or a dim x dim matrix, ``b[w]`` a scalar or a
    dim-vector.
    """
    dim = _euclid(space)
    n = space.prob.atom_count
    if len(A) != n or len(b) != n:
        raise SpaceMismatchError(f"affine map needs {n} per-atom coefficients")
    mats = np.stack([np.asarray(a, dtype=float) * np.eye(dim) if np.ndim(a) == 0 else np.asarray(a, dtype=float) for a in A])
    if mats.shape != (n, dim, dim):
        raise ValueError(f"per-atom matrices must be {dim}x{dim}")
    vecs = np.stack([np.broadcast_to(np.asarray(v, dtype=float), (dim,)) for v in b])

    def apply(x: RandomPoint) -> RandomPoint:
        arr = np.asarray(x.section, dtype=float)
        out = np.einsum("wij,wj->wi", mats, arr) + vecs
        return RandomPoint(tuple(tuple(float(v) for v in row) for row in out))

    return PointMap(apply, sigma_stable=True)


def pointwise_map(space: L0Space, per_atom: Sequence[Callable]) -> PointMap:
    """The map induced by a random operator: (T x)(w) = T(w, x(w))."""
    if len(per_atom) != space.prob.atom_count:
        raise SpaceMismatchError("need one operator per atom")
    base = space.base

    def apply(x: RandomPoint) -> RandomPoint:
        return RandomPoint(tuple(base.normalize(f(p)) for f, p in zip(per_atom, x.section)))

    return PointMap(apply, sigma_stable=True)


def lookup_map(space: L0Space, tables: Sequence[dict]) -> PointMap:
    """Per-atom lookup tables on a finite base space."""
    return pointwise_map(space, [t.__getitem__ for t in tables])


def branch_map(space: RMSpace, branches: Sequence[PointMap]) -> MultiMap:
    """x -> sigma-hull of {b(x) : b in branches}."""
    if not branches:
        raise ValueError("a branch map needs at least one branch")
    return MultiMap(lambda x: SigmaStableSet(space, [b(x) for b in branches]))


def singleton_map(space: RMSpace, T: PointMap) -> MultiMap:
    return MultiMap(lambda x: SigmaStableSet(space, [T(x)]))


def pointwise_multimap(space: L0Space, per_atom: Sequence[Callable]) -> MultiMap:
    """Induced set-valued map: the selections of w -> T(w, x(w))."""
    if len(per_atom) != space.prob.atom_count:
        raise SpaceMismatchError("need one set-valued operator per atom")
    return MultiMap(lambda x: selection_set(space, [list(f(p)) for f, p in zip(per_atom, x.section)]))


# --------------------------------------------------------------------------
# helpers


def _factor(alpha, atom_count: int) -> ContractionFactor:
    if not isinstance(alpha, ContractionFactor):
        if isinstance(alpha, (int, float, np.floating, np.integer)):
            alpha = np.full(atom_count, float(alpha))
        alpha = ContractionFactor(as_scalar(alpha))
    if len(alpha) != atom_count:
        raise SpaceMismatchError(f"contraction factor has {len(alpha)} atoms, the space has {atom_count}")
    return alpha


def _check_contraction(lhs: RandomScalar, alpha: np.ndarray, d: RandomScalar, what: str) -> None:
    bound = alpha * d.values
    bad = np.flatnonzero(lhs.values > bound + _ABS_SLACK + _REL_SLACK * bound)
    if bad.size:
        w = int(bad[0])
        raise ContractionViolation(
            f"{what}: {lhs[w]!r} > alpha*d = {bound[w]!r} on atom {w}",
            atom=w,
            lhs=lhs[w],
            rhs=float(bound[w]),
        )


# --------------------------------------------------------------------------
# single-valued solvers


def banach_solve(
    space: RMSpace,
    T: PointMap,
    x0,
    alpha,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: bool = False,
    check_pairs: Sequence[tuple] = (),
) -> SolveReport:
    """Picard iteration x_{n+1} = T(x_n) for a random contraction.

    Stops once alpha/(1-alpha) * d(x_n, x_{n+1}) <= tol on every atom, which
    bounds the distance from x_{n+1} to the fixed point by tol, and returns
    x_{n+1}.  Its residual d(x, T x) is then at most (1 - alpha) * tol.
    """
    fac = _factor(alpha, space.prob.atom_count)
    a = fac.alpha.values
    ratio = a / (1.0 - a)
    for x, y in check_pairs:
        _check_contraction(space.distance(T(x), T(y)), a, space.distance(x, y), "sampled pair")
    x, tx = x0, T(x0)
    step = space.distance(x, tx)
    steps = [] if trace else None
    for n in range(max_iter):
        ttx = T(tx)
        nxt = space.distance(tx, ttx)
        _check_contraction(nxt, a, step, f"iterate {n}")
        if steps is not None:
            steps.append(step.tolist())
        if (ratio * step.values <= tol).all() and (nxt.values <= tol).all():
            return SolveReport(tx, nxt, n + 1, steps, {"alpha": fac.alpha.tolist()})
        x, tx, step = tx, ttx, nxt
    raise ConvergenceError(f"no convergence within {max_iter} iterations", last=tx, iterations=max_iter)


def iterate_power(T: PointMap, L: RandomInteger, x, space: RMSpace | None = None, check: bool = False):
    """T^L(x): T applied L(w) times on atom w, glued over the events (L = k)."""
    ks, part = L.level_partition()
    powers = {}
    y = x
    for k in range(1, max(ks) + 1):
        y = T(y)
        if k in L.levels():
            powers[k] = y
    xs = [powers[k] for k in ks]
    out = glue_points(part, xs, space)
    if check:
        if space is None:
            raise ValueError("checking sigma-stability needs the space")
        if not T.commutes_with_gluing(space, part, xs):
            raise NotSigmaStableError("T does not commute with gluing over the level sets of L")
    return out


def power_commutes(T: PointMap, L: RandomInteger, x, space: RMSpace, tol: float = TOL_ZERO) -> bool:
    """Whether T^L(T(x)) = T(T^L(x))."""
    return space.same(iterate_power(T, L, T(x), space), T(iterate_power(T, L, x, space)), tol)


def random_power_solve(
    space: RMSpace,
    T: PointMap,
    L: RandomInteger,
    alpha,
    x0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: bool = False,
) -> SolveReport:
    """Fixed point of a sigma-stable T whose random power T^L contracts.

    Solves T^L by Banach iteration, then keeps iterating T^L until the point
    is also fixed under T itself (d(x, T x) <= tol); since T commutes with
    T^L the two fixed points coincide.
    """
    if len(L) != space.prob.atom_count:
        raise SpaceMismatchError("L must have one value per atom")
    iterate_power(T, L, x0, space, check=True)
    TL = PointMap(lambda x: iterate_power(T, L, x, space), sigma_stable=T.sigma_stable)
    rep = banach_solve(space, TL, x0, alpha, tol, max_iter, trace)
    x = rep.solution
    res = space.distance(x, T(x))
    extra = 0
    while not (res.values <= tol).all():
        if rep.iterations + extra >= max_iter:
            raise ConvergenceError(
                "fixed point of T^L is not fixed under T; T may not commute with T^L "
                f"(residual {res.tolist()})",
                last=x,
                iterations=rep.iterations + extra,
            )
        nxt = TL(x)
        if space.same(nxt, x, 0.0):
            raise NotSigmaStableError(
                f"T^L has stalled at a point with d(x, T x) = {res.tolist()}; "
                "T and T^L do not commute, so T is not sigma-stable"
            )
        x, extra = nxt, extra + 1
        res = space.distance(x, T(x))
    info = {"L": list(L.values), "alpha": _factor(alpha, space.prob.atom_count).alpha.tolist(), "residual_TL": space.distance(x, TL(x)).tolist()}
    return SolveReport(x, res, rep.iterations + extra, rep.trace, info)


def hans_construct(certificates: Sequence[Sequence[tuple[int, int]]]) -> tuple[RandomInteger, ContractionFactor]:
    """Random exponent L and factor alpha from per-atom contraction certificates.

    A certificate (n, m) at atom w asserts that T(w, .)^n is Lipschitz with
    constant 1 - 1/m.  Each atom is assigned the smallest certified m, and L(w)
    is the smallest n certified at that m.
    """
    Ls, alphas = [], []
    for atom, certs in enumerate(certificates):
        certs = [(int(n), int(m)) for n, m in certs]
        if not certs:
            raise HypothesisError(f"atom {atom} carries no contraction certificate")
        if any(n < 1 or m < 1 for n, m in certs):
            raise ValueError(f"certificates need n >= 1 and m >= 1 (atom {atom})")
        m_star = min(m for _, m in certs)
        Ls.append(min(n for n, m in certs if m == m_star))
        alphas.append(1.0 - 1.0 / m_star)
    return RandomInteger(tuple(Ls)), ContractionFactor(RandomScalar(alphas))


def _classical_banach(base, f: Callable, p0, a: float, tol: float, max_iter: int):
    ratio = a / (1.0 - a)
    p, q = p0, base.normalize(f(p0))
    step = base.distance(p, q)
    for k in range(max_iter):
        r = base.normalize(f(q))
        nxt = base.distance(q, r)
        if nxt > a * step + _ABS_SLACK + _REL_SLACK * a * step:
            raise ContractionViolation(f"per-atom iteration {k}: {nxt} > {a}*{step}", lhs=nxt, rhs=a * step)
        if ratio * step <= tol and nxt <= tol:
            return q, k + 1
        p, q, step = q, r, nxt
    raise ConvergenceError(f"per-atom iteration did not converge within {max_iter} steps", last=q)


def pointwise_operator_solve(
    space: L0Space,
    T_per_atom: Sequence[Callable],
    alpha,
    x0: RandomPoint,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SolveReport:
    """Random fixed point of a random contraction operator T(w, .).

    Solved twice: through the induced map on L0(F, M) and by classical
    iteration atom by atom.  The two answers must agree within tol.
    """
    fac = _factor(alpha, space.prob.atom_count)
    T = pointwise_map(space, T_per_atom)
    rep = banach_solve(space, T, x0, fac, tol, max_iter)
    per_atom = [
        _classical_banach(space.base, f, x0[w], fac.alpha[w], tol, max_iter)[0]
        for w, f in enumerate(T_per_atom)
    ]
    classical = RandomPoint(tuple(per_atom))
    gap = space.distance(rep.solution, classical)
    if not (gap.values <= tol).all():
        raise RMSpaceError(f"induced-map and per-atom solutions disagree by {gap.tolist()}")
    rep.info.update(per_atom_solution=list(classical.section), path_gap=gap.tolist())
    return rep


# --------------------------------------------------------------------------
# set-valued maps


def hausdorff(G1: SigmaStableSet, G2: SigmaStableSet) -> RandomScalar:
    """Random Hausdorff distance max{sup_{x in G1} d(x, G2), sup_{y in G2} d(y, G1)}.

    Both distance sets are sigma-stable, so the suprema are attained atom by
    atom and can be read off the per-atom section values.
    """
    if G1.space != G2.space and G1.space is not G2.space:
        raise SpaceMismatchError("Hausdorff distance between sets in different spaces")
    if G1._values is not None and G2._values is not None:
        base = G1.space.base
        out = []
        for V1, V2 in zip(G1._values, G2._values):
            D = base.pairwise(V1, V2)
            out.append(max(D.min(axis=1).max(), D.min(axis=0).max()))
        return RandomScalar(out)
    a = np.max([dist_to_set(x, G2).values for x in G1.members], axis=0)
    b = np.max([dist_to_set(y, G1).values for y in G2.members], axis=0)
    return RandomScalar(np.maximum(a, b))


def approx_selection(g1, G2: SigmaStableSet, eps) -> Any:
    """Some g2 in G2 with d(g1, g2) <= d(g1, G2) + eps on every atom."""
    n = G2.space.prob.atom_count
    eps = as_scalar(eps) if isinstance(eps, ExtRandomScalar) else RandomScalar(np.full(n, float(eps)))
    if not (eps.values > 0).all():
        raise ValueError("eps must be strictly positive on every atom")
    d, g2 = dist_to_set(g1, G2, return_witness=True)
    assert G2.space.distance(g1, g2) <= d + eps
    return g2


def nadler_solve(
    space: RMSpace,
    T: MultiMap,
    x0,
    alpha,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: bool = False,
) -> SolveReport:
    """Find x with x in T(x) for a random Hausdorff contraction T.

    Iterates x_{n+1} = approx_selection(x_n, T(x_n), a^n), where a is alpha
    with its zeros replaced by 1/2, until d(x_n, T(x_n)) <= (1 - alpha) * tol
    on every atom; for single-valued T that puts x_n within tol of the fixed
    point, matching banach_solve.  Which fixed point is reached depends on the
    selection path.
    """
    fac = _factor(alpha, space.prob.atom_count)
    a = fac.alpha.values
    stop = (1.0 - a) * tol
    slack_base = fac.lifted()
    x, img = x0, T(x0)
    steps = [] if trace else None
    for n in range(max_iter + 1):
        res = dist_to_set(x, img)
        if steps is not None:
            steps.append(res.tolist())
        if (res.values <= stop).all():
            member = is_member(x, img, tol)
            info = {"alpha": fac.alpha.tolist(), "membership": bool(member)}
            return SolveReport(x, res, n, steps, info)
        if n == max_iter:
            break
        x_next = approx_selection(x, img, slack_base**n)
        img_next = T(x_next)
        _check_contraction(hausdorff(img, img_next), a, space.distance(x, x_next), f"Hausdorff step {n}")
        x, img = x_next, img_next
    raise ConvergenceError(f"no convergence within {max_iter} iterations", last=x, iterations=max_iter)


def is_member(x, G: SigmaStableSet, tol: float = TOL_ZERO) -> bool:
    """Membership by enumerating the hull (d(x, g) <= tol on every atom for some g)."""
    return any(G.space.same(x, g, tol) for g in G.members)


__all__ = [
    "PointMap",
    "MultiMap",
    "SolveReport",
    "affine_map",
    "pointwise_map",
    "lookup_map",
    "branch_map",
    "singleton_map",
    "pointwise_multimap",
    "banach_solve",
    "iterate_power",
    "power_commutes",
    "random_power_solve",
    "hans_construct",
    "pointwise_operator_solve",
    "hausdorff",
    "approx_selection",
    "nadler_solve",
    "is_member",
    "in_closure",
]
