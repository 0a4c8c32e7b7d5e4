"""Random-valued objectives on finite carriers: Ekeland and Caristi.

Objectives map points to extended random scalars.  On a finite carrier every
function is evaluated into an (n_points, n_atoms) value matrix; near-minimizers
come from per-atom argmins glued into one point, which stays in the carrier
because carriers are sigma-stable hulls.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    EmptySetError,
    HypothesisError,
    NotSigmaStableError,
    OracleFailure,
    UnboundedError,
)
from .fixpoint import PointMap
from .prob import TOL_ZERO, Event, ExtRandomScalar, Partition, RandomScalar, as_scalar
from .space import (
    EuclideanRd,
    L0Space,
    RMSpace,
    SigmaStableSet,
    _as_set,
    converges_eps_lambda,
    converges_L0,
    l0_space,
    product_space,
)

_MAX_CHOICES = 20_000


@dataclass(frozen=True)
class RandomFunction:
    """f: E -> extended random scalars."""

    eval: Callable[[Any], Any]
    sigma_stable: bool = False

    def __call__(self, x) -> ExtRandomScalar:
        return as_scalar(self.eval(x))

    def dom(self, points: Sequence) -> list:
        """Points where f is finite on every atom."""
        return [x for x in points if self(x).is_finite()]

    def in_epigraph(self, x, r, tol: float = 0.0) -> bool:
        return bool((self(x).values <= as_scalar(r).values + tol).all())


def _points(space: RMSpace | None, points) -> tuple[RMSpace, list]:
    if isinstance(points, SigmaStableSet):
        return points.space, points.members
    if space is None:
        raise ValueError("a plain point list needs its space")
    return space, list(points)


def _values(f: RandomFunction, pts: Sequence) -> np.ndarray:
    return np.stack([f(x).values for x in pts])


def _same_scalar(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    inf = ~np.isfinite(a) | ~np.isfinite(b)
    if (a[inf] != b[inf]).any():
        return False
    return bool((np.abs(a[~inf] - b[~inf]) <= tol).all())


def is_proper(f: RandomFunction, points) -> bool:
    """Never -inf, and finite everywhere at some point."""
    pts = points.members if isinstance(points, SigmaStableSet) else list(points)
    if not pts:
        return False
    F = _values(f, pts)
    return not (F == -np.inf).any() and bool(np.isfinite(F).all(axis=1).any())


def is_sigma_stable_fn(f: RandomFunction, points, space: RMSpace | None = None, tol: float = TOL_ZERO, seed: int = 0) -> bool:
    """f(glue(pi, xs)) = glue(pi, f(xs)) over atomwise gluings of the points.

    Exhaustive up to 20000 choice functions, sampled beyond that.
    """
    space, pts = _points(space, points)
    n = space.prob.atom_count
    atomic = Partition.atomic(n)
    F = _values(f, pts)
    total = len(pts) ** n
    if total <= _MAX_CHOICES:
        choices = itertools.product(range(len(pts)), repeat=n)
    else:
        rng = np.random.default_rng(seed)
        choices = (tuple(c) for c in rng.integers(0, len(pts), size=(_MAX_CHOICES, n)))
    for c in choices:
        glued = space.glue(atomic, [pts[i] for i in c])
        expected = F[list(c), np.arange(n)]
        if not _same_scalar(f(glued).values, expected, tol):
            return False
    return True


def is_stable_fn(f: RandomFunction, points, space: RMSpace | None = None, tol: float = TOL_ZERO) -> bool:
    """f(I_A x1 + I_Ac x2) = I_A f(x1) + I_Ac f(x2) for all events A and pairs."""
    space, pts = _points(space, points)
    n = space.prob.atom_count
    F = _values(f, pts)
    for mask in itertools.product((True, False), repeat=n):
        A = Event(i for i in range(n) if mask[i])
        part = Partition.two_block(A, n)
        m = np.array(mask)
        for i, j in itertools.product(range(len(pts)), repeat=2):
            glued = space.glue(part, [pts[i], pts[j]])
            if not _same_scalar(f(glued).values, np.where(m, F[i], F[j]), tol):
                return False
    return True


# --------------------------------------------------------------------------
# lower semicontinuity through the epigraph


def _default_sequences(space: RMSpace, pts: list, seed: int, length: int = 40) -> list[tuple[list, Any]]:
    rng = np.random.default_rng(seed)
    out = []
    for x in pts:
        if isinstance(space, L0Space) and isinstance(space.base, EuclideanRd):
            arr = space.as_array(x)
            u = rng.normal(size=arr.shape)
            seq = [space.point(arr + u * 2.0 ** (-k)) for k in range(length)]
        else:
            # discrete topology: convergent sequences are eventually constant
            head = [pts[int(i)] for i in rng.integers(0, len(pts), size=3)]
            seq = head + [x] * (length - len(head))
        out.append((seq, x))
    return out


def lsc_check(
    space: RMSpace,
    f: RandomFunction,
    carrier,
    sequences: Sequence[tuple[Sequence, Any]] | None = None,
    seed: int = 0,
    eps: float = 1e-6,
    return_verdicts: bool = False,
):
    """Sequential closedness of epi(f) in E x L0, in both uniformities.

    Each sequence x_n -> x is lifted to (x_n, f(x_n)) in the epigraph, with the
    scalar limit read from the tail.  A topology's verdict fails if some lifted
    sequence converges in it while its limit lies outside epi(f).  The two
    verdicts must agree; a disagreement raises AssertionError.
    """
    _, pts = _points(space, carrier)
    seqs = list(sequences) if sequences is not None else _default_sequences(space, pts, seed)
    scalars = l0_space(space.prob, EuclideanRd(1))
    prod = product_space(space, scalars)
    lam = space.prob.min_prob / 2.0
    verdicts = {"eps_lambda": True, "L0": True}
    tested = 0
    for seq, x in seqs:
        rs = [f(s) for s in seq]
        if not all(r.is_finite() for r in rs):
            continue
        r = rs[-1]
        lifted = [(s, scalars.point(ri.values)) for s, ri in zip(seq, rs)]
        limit = (x, scalars.point(r.values))
        in_epi = f.in_epigraph(x, r, TOL_ZERO)
        tested += 1
        if converges_eps_lambda(prod, lifted, limit, eps, lam) is not None and not in_epi:
            verdicts["eps_lambda"] = False
        if converges_L0(prod, lifted, limit, eps) is not None and not in_epi:
            verdicts["L0"] = False
    if verdicts["eps_lambda"] != verdicts["L0"]:
        raise AssertionError(f"topologies disagree on lower semicontinuity: {verdicts}")
    ok = verdicts["L0"]
    if return_verdicts:
        return ok, dict(verdicts, tested=tested)
    return ok


# --------------------------------------------------------------------------
# near-extremizers


def _locate(G: SigmaStableSet, x) -> int:
    if G._values is not None:
        key = tuple(x.section)
        index = getattr(G, "_index_cache", None)
        if index is None:
            index = {tuple(m.section): i for i, m in enumerate(G.members)}
            G._index_cache = index
        if key in index:
            return index[key]
    for i, m in enumerate(G.members):
        if G.space.same(m, x):
            return i
    raise NotSigmaStableError("glued point is not a member of the set")


def _glue_rows(G: SigmaStableSet, picks: Sequence[int]) -> int:
    n = G.atom_count
    glued = G.space.glue(Partition.atomic(n), [G.members[i] for i in picks])
    return _locate(G, glued)


def _near_extremum_index(f: RandomFunction, G: SigmaStableSet, F: np.ndarray, rows: Sequence[int], eps, upper: bool) -> int:
    if not rows:
        raise EmptySetError("dom(f) is empty on this set")
    eps = as_scalar(eps) if isinstance(eps, ExtRandomScalar) else RandomScalar(np.full(F.shape[1], float(eps)))
    if not (eps.values > 0).all():
        raise ValueError("eps must be strictly positive on every atom")
    rows = np.asarray(rows)
    sub = F[rows]
    pick = (np.argmax if upper else np.argmin)(sub, axis=0)
    ext = sub[pick, np.arange(F.shape[1])]
    k = _glue_rows(G, rows[pick].tolist())
    val = F[k]
    ok = (val > ext - eps.values).all() if upper else (val < ext + eps.values).all()
    if not ok:
        raise NotSigmaStableError(
            f"f at the glued extremizer is {val.tolist()}, not within eps of {ext.tolist()}; f is not sigma-stable"
        )
    return k


def near_infimum(f: RandomFunction, G, eps, space: RMSpace | None = None):
    """A member x of G with f(x) < inf f(G) + eps on every atom.

    Minimizes over dom(f) atom by atom and glues the minimizers.
    """
    G = G if isinstance(G, SigmaStableSet) else _as_set(space, G)
    F = _values(f, G.members)
    if (F == -np.inf).any():
        raise UnboundedError("f takes the value -inf; it is not bounded below")
    rows = np.flatnonzero(np.isfinite(F).all(axis=1)).tolist()
    return G.members[_near_extremum_index(f, G, F, rows, eps, upper=False)]


def near_supremum(f: RandomFunction, G, eps, space: RMSpace | None = None):
    """A member x of G with f(x) > sup f(G) - eps on every atom."""
    G = G if isinstance(G, SigmaStableSet) else _as_set(space, G)
    F = _values(f, G.members)
    if (F == np.inf).any():
        raise UnboundedError("f takes the value +inf; it is not bounded above")
    if (F == -np.inf).any():
        raise HypothesisError("f takes the value -inf; it is not proper")
    return G.members[_near_extremum_index(f, G, F, list(range(len(F))), eps, upper=True)]


# --------------------------------------------------------------------------
# Ekeland


@dataclass
class EkelandCertificate:
    z: Any
    cond1_ok: bool
    cond2_ok: bool
    cond3_ok: bool
    cond3_witness: Any = None
    iterations: int = 0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.cond1_ok and self.cond2_ok and self.cond3_ok


def _scalar(v, n: int) -> np.ndarray:
    if isinstance(v, ExtRandomScalar):
        arr = v.values
    else:
        arr = np.broadcast_to(np.asarray(v, dtype=float), (n,))
    if not (arr > 0).all() or not np.isfinite(arr).all():
        raise ValueError("eps and alpha must be finite and strictly positive on every atom")
    return np.asarray(arr, dtype=float)


def _carrier(space: RMSpace, carrier) -> SigmaStableSet:
    if carrier is None:
        pts = space.points()
        if pts is None:
            raise ValueError("a carrier is required when the space is not enumerable")
        return SigmaStableSet(space, pts)
    if isinstance(carrier, SigmaStableSet):
        return carrier
    return SigmaStableSet(space, list(carrier))


def _check_start(F: np.ndarray, fx0: np.ndarray, eps: np.ndarray, tol: float) -> None:
    if (F == -np.inf).any():
        raise HypothesisError("f takes the value -inf; it is not proper")
    if not np.isfinite(fx0).all():
        raise HypothesisError("f(x0) must be finite on every atom")
    inf = F.min(axis=0)
    if not (fx0 <= inf + eps + tol).all():
        raise HypothesisError(f"f(x0) = {fx0.tolist()} exceeds inf f + eps = {(inf + eps).tolist()}")


def verify_ekeland(space: RMSpace, f: RandomFunction, x0, eps, alpha, z, carrier, tol: float = TOL_ZERO) -> EkelandCertificate:
    """Check the three Ekeland conditions for z against every carrier point.

    (1) f(z) + alpha d(z, x0) <= f(x0); (2) alpha d(z, x0) <= eps;
    (3) f(x) + alpha d(x, z) >= f(z) on every atom, strictly on some atom,
    for every x distinct from z.  A failure of the pointwise inequality in (3)
    is reported with the glued witness I_A x + I_Ac z, A the failure event.
    """
    G = _carrier(space, carrier)
    n = space.prob.atom_count
    eps, alpha = _scalar(eps, n), _scalar(alpha, n)
    fz, fx0 = f(z).values, f(x0).values
    dz0 = space.distance(z, x0).values
    cond1 = bool((fz + alpha * dz0 <= fx0 + tol).all())
    cond2 = bool((alpha * dz0 <= eps + tol).all())
    cond3, witness = True, None
    for x in G.members:
        dxz = space.distance(x, z).values
        if (dxz <= tol).all():
            continue
        gap = f(x).values + alpha * dxz - fz
        below = gap < -tol
        if below.any():
            A = Event(np.flatnonzero(below).tolist())
            witness = space.glue(Partition.two_block(A, n), [x, z])
            cond3 = False
            break
        if not (gap > 0).any():
            witness, cond3 = x, False
            break
    return EkelandCertificate(z, cond1, cond2, cond3, witness)


def ekeland_point(
    space: RMSpace,
    f: RandomFunction,
    x0,
    eps,
    alpha,
    carrier=None,
    max_iter: int = 1000,
    tol: float = TOL_ZERO,
) -> EkelandCertificate:
    """Constructive Ekeland point on a finite sigma-stable carrier.

    Starting from z = x0, repeatedly replaces z by a 2^-k near-minimizer of f
    over S(z) = {y : f(y) + alpha d(z, y) <= f(z)} until S(z) = {z}.
    """
    G = _carrier(space, carrier)
    n = space.prob.atom_count
    eps_v, alpha_v = _scalar(eps, n), _scalar(alpha, n)
    members = G.members
    F = _values(f, members)
    _check_start(F, f(x0).values, eps_v, tol)
    z, fz = x0, f(x0).values
    for k in range(max_iter):
        D = np.stack([space.distance(z, y).values for y in members])
        in_S = (F + alpha_v * D <= fz).all(axis=1)
        rows = np.flatnonzero(in_S).tolist()
        others = [r for r in rows if not (D[r] <= 0.0).all()]
        if not others:
            cert = verify_ekeland(space, f, x0, eps_v, alpha_v, z, G, tol)
            cert.iterations = k
            return cert
        j = _near_extremum_index(f, G, F, rows, RandomScalar(np.full(n, 2.0 ** (-k))), upper=False)
        z, fz = members[j], F[j]
    raise ConvergenceError(f"Ekeland iteration did not stabilize within {max_iter} steps", last=z, iterations=max_iter)


def ekeland_bruteforce(
    space: RMSpace,
    f: RandomFunction,
    x0,
    eps,
    alpha,
    carrier=None,
    tol: float = TOL_ZERO,
) -> EkelandCertificate:
    """Exhaustive search over the carrier for a point meeting all three conditions.

    Among the valid points the one with the smallest expected objective is
    returned (lowest index on ties); every valid index is listed in details.
    """
    G = _carrier(space, carrier)
    n = space.prob.atom_count
    eps_v, alpha_v = _scalar(eps, n), _scalar(alpha, n)
    members = G.members
    k = len(members)
    F = _values(f, members)
    fx0 = f(x0).values
    _check_start(F, fx0, eps_v, tol)
    D = np.zeros((k, k, n))
    for i in range(k):
        for j in range(i + 1, k):
            D[i, j] = D[j, i] = space.distance(members[i], members[j]).values
    d0 = np.stack([space.distance(m, x0).values for m in members])
    with np.errstate(invalid="ignore"):
        c1 = (F + alpha_v * d0 <= fx0 + tol).all(axis=1)
        c2 = (alpha_v * d0 <= eps_v + tol).all(axis=1)
        # gap[z, x] = f(x) + alpha d(x, z) - f(z)
        gap = F[None, :, :] + alpha_v * D - F[:, None, :]
    distinct = ~(D <= tol).all(axis=2)
    good_pair = (gap >= -tol).all(axis=2) & (gap > 0).any(axis=2)
    c3 = (good_pair | ~distinct).all(axis=1)
    valid = np.flatnonzero(c1 & c2 & c3)
    if valid.size == 0:
        raise OracleFailure("no carrier point satisfies all three Ekeland conditions")
    expected = F[valid] @ np.asarray(space.prob.probs)
    z = int(valid[int(np.argmin(expected))])
    return EkelandCertificate(members[z], True, True, True, None, details={"index": z, "valid": valid.tolist()})


# --------------------------------------------------------------------------
# Caristi


def caristi_fixed_point(
    space: RMSpace,
    T: PointMap,
    f: RandomFunction,
    carrier,
    tol: float = TOL_ZERO,
    max_iter: int = 1000,
):
    """A fixed point of T, given f(T x) + d(T x, x) <= f(x) on the carrier.

    Runs Ekeland with alpha = 1 from a near-minimizer of f; the resulting z
    cannot move under T without breaking the Caristi inequality.
    """
    G = _carrier(space, carrier)
    n = space.prob.atom_count
    for x in G.members:
        tx = T(x)
        try:
            _locate(G, tx)
        except NotSigmaStableError:
            raise HypothesisError("T does not map the carrier into itself") from None
        lhs = f(tx) + space.distance(tx, x)
        fx = f(x)
        if not (lhs.values <= fx.values + tol).all():
            raise HypothesisError(f"Caristi inequality fails: f(Tx) + d(Tx, x) = {lhs.tolist()} > f(x) = {fx.tolist()}")
    ones = RandomScalar(np.ones(n))
    x0 = near_infimum(f, G, ones)
    cert = ekeland_point(space, f, x0, ones, ones, G, max_iter=max_iter, tol=tol)
    z = cert.z
    res = space.distance(z, T(z))
    if not cert.ok or not (res.values <= tol).all():
        raise ConvergenceError(f"Ekeland point is not fixed under T (d(z, Tz) = {res.tolist()})", last=z)
    return z


def orbit_carrier(space: L0Space, T: PointMap, x0, max_iter: int = 10_000, cap: int | None = None) -> SigmaStableSet:
    """Sigma-hull of the floating-point orbit of x0, closed under a pointwise T.

    Iterates until every atom's next value repeats an earlier one, so each
    atom's value set is invariant and so is the hull.
    """
    seen = [set() for _ in range(space.prob.atom_count)]
    orbit = []
    x = x0
    for _ in range(max_iter):
        new = [x[i] not in seen[i] for i in range(len(seen))]
        if not any(new):
            break
        for i in range(len(seen)):
            seen[i].add(x[i])
        orbit.append(x)
        x = T(x)
    else:
        raise ConvergenceError("orbit did not close", last=x, iterations=max_iter)
    kwargs = {} if cap is None else {"cap": cap}
    return SigmaStableSet(space, orbit, **kwargs)


__all__ = [
    "RandomFunction",
    "EkelandCertificate",
    "is_proper",
    "is_sigma_stable_fn",
    "is_stable_fn",
    "lsc_check",
    "near_infimum",
    "near_supremum",
    "verify_ekeland",
    "ekeland_point",
    "ekeland_bruteforce",
    "caristi_fixed_point",
    "orbit_carrier",
]
