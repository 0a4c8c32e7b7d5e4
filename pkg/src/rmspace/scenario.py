"""YAML scenarios: schema validation, task dispatch and reports.

A scenario document has four top-level keys::

    space:   {probs: [0.5, 0.5]}
    base:    {kind: euclidean, dim: 1}            # or kind: finite, labels, dist
    objects: {x0: {point: [0, 0]}, G: {set: [x0, [1, 2]]}, eps: {scalar: [1, 1]}}
    task:    {kind: solve-banach, operator: {affine: {A: [0.5, 0.5], b: [1, 1]}}, ...}

Operators are declarative (per-atom affine maps, lookup tables, constants,
branch lists for set-valued maps) so that scenarios stay reproducible.
"""
from __future__ import annotations

import copy
import itertools
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import yaml

from . import fixpoint as fp
from . import space as sp
from . import variational as va
from .errors import RMSpaceError
from .prob import (
    TOL_ZERO,
    ContractionFactor,
    Partition,
    ProbSpace,
    RandomInteger,
    RandomScalar,
    is_sigma_stable_scalars,
)

TASKS = ("solve-banach", "solve-power", "solve-nadler", "solve-pointwise", "ekeland", "caristi", "verify")
TOP_KEYS = ("space", "base", "objects", "task")


class ScenarioError(ValueError):
    """Schema or semantic problems, each prefixed with its document path."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


# --------------------------------------------------------------------------
# parsing


def _num(v, path: str, errors: list[str]):
    if isinstance(v, bool):
        errors.append(f"{path}: expected a number, got {v!r}")
        return None
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            pass
    errors.append(f"{path}: expected a number, got {v!r}")
    return None


def _numbers(v, path: str, errors: list[str]):
    """Recursively coerce a nested list of numbers to floats."""
    if isinstance(v, list):
        return [_numbers(x, f"{path}[{i}]", errors) for i, x in enumerate(v)]
    return _num(v, path, errors)


@dataclass(frozen=True)
class Scenario:
    space: dict
    base: dict
    objects: dict
    task: dict

    @property
    def kind(self) -> str:
        return self.task["kind"]

    def document(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in TOP_KEYS}

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.document(), sort_keys=True)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; raises ScenarioError."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ScenarioError([f"parse error: {where}{getattr(exc, 'problem', exc)}"]) from None
    if not isinstance(doc, dict):
        raise ScenarioError(["document: expected a mapping with keys " + ", ".join(TOP_KEYS)])
    errors: list[str] = []
    for key in TOP_KEYS:
        if key not in doc:
            errors.append(f"{key}: missing")
    for key in doc:
        if key not in TOP_KEYS:
            errors.append(f"{key}: unknown top-level key")
    if errors:
        raise ScenarioError(errors)

    space = doc["space"]
    probs = None
    if not isinstance(space, dict) or not isinstance(space.get("probs"), list):
        errors.append("space.probs: expected a list of probabilities")
    else:
        probs = [_num(p, f"space.probs[{i}]", errors) for i, p in enumerate(space["probs"])]
        if None not in probs:
            try:
                ProbSpace(tuple(probs))
            except ValueError as exc:
                errors.append(f"space.probs: {exc}")

    base = doc["base"]
    if not isinstance(base, dict) or base.get("kind") not in ("euclidean", "finite"):
        errors.append("base.kind: expected 'euclidean' or 'finite'")
        base = {}
    elif base["kind"] == "euclidean":
        dim = base.get("dim", 1)
        if not isinstance(dim, int) or dim < 1:
            errors.append("base.dim: expected a positive integer")
        base = {"kind": "euclidean", "dim": dim}
    else:
        labels, dist = base.get("labels"), base.get("dist")
        if not isinstance(labels, list) or not labels:
            errors.append("base.labels: expected a nonempty list")
        if not isinstance(dist, list):
            errors.append("base.dist: expected a square matrix")
        else:
            dist = _numbers(dist, "base.dist", errors)
        base = {"kind": "finite", "labels": labels, "dist": dist}

    objects = doc["objects"] or {}
    if not isinstance(objects, dict):
        errors.append("objects: expected a mapping of names")
        objects = {}
    norm_objects = {}
    for name, obj in objects.items():
        path = f"objects.{name}"
        if not isinstance(obj, dict) or len(obj) != 1 or next(iter(obj)) not in ("point", "set", "scalar"):
            errors.append(f"{path}: expected exactly one of point, set, scalar")
            continue
        kind, val = next(iter(obj.items()))
        if kind == "scalar":
            val = _numbers(val, f"{path}.scalar", errors)
        elif kind == "point" and base.get("kind") == "euclidean":
            val = _numbers(val, f"{path}.point", errors)
        elif kind == "set":
            if not isinstance(val, list) or not val:
                errors.append(f"{path}.set: expected a nonempty list of points or point names")
            elif base.get("kind") == "euclidean":
                val = [g if isinstance(g, str) else _numbers(g, f"{path}.set[{i}]", errors) for i, g in enumerate(val)]
        norm_objects[str(name)] = {kind: val}

    task = doc["task"]
    if not isinstance(task, dict) or "kind" not in task:
        errors.append("task.kind: missing")
        task = {}
    elif task["kind"] not in TASKS:
        errors.append(f"task.kind: unknown task {task['kind']!r}; valid tasks are {', '.join(TASKS)}")
    else:
        task = dict(task)
        for key in ("tol",):
            if key in task:
                task[key] = _num(task[key], f"task.{key}", errors)
        for key in ("alpha", "eps"):
            if key in task and not isinstance(task[key], str):
                task[key] = _numbers(task[key], f"task.{key}", errors)
        _check_refs(task, norm_objects, errors)

    if errors:
        raise ScenarioError(errors)
    scen = Scenario({"probs": probs}, base, norm_objects, task)
    try:
        _validate_task(build(scen), task)
    except ScenarioError:
        raise
    except (RMSpaceError, ValueError, TypeError, KeyError, IndexError) as exc:
        raise ScenarioError([f"semantic error: {exc}"]) from None
    return scen


def _validate_task(built: "Built", task: dict) -> None:
    kind = task["kind"]
    if "operator" in task:
        if kind == "solve-nadler":
            _multimap(built, task["operator"], "task.operator")
        elif kind == "solve-pointwise":
            _per_atom_ops(built, task["operator"], "task.operator")
        else:
            _operator(built, task["operator"], "task.operator")
    if "objective" in task:
        _objective(built, task["objective"], "task.objective")
    if "alpha" in task and kind != "ekeland":
        _alpha(built, task)
    if kind == "solve-power" and "certificates" not in task:
        if "L" not in task or "alpha" not in task:
            raise ScenarioError(["task.L: solve-power needs L and alpha, or certificates"])
        RandomInteger(tuple(task["L"]))
    if "carrier" in task or kind in ("ekeland", "caristi"):
        _resolve_set(built, task.get("carrier"), "task.carrier")


def _check_refs(task: dict, objects: dict, errors: list[str]) -> None:
    need = {
        "solve-banach": ("operator", "x0"),
        "solve-power": ("operator", "x0"),
        "solve-nadler": ("operator", "x0"),
        "solve-pointwise": ("operator", "x0"),
        "ekeland": ("objective", "x0", "eps", "alpha"),
        "caristi": ("operator", "objective"),
        "verify": (),
    }[task["kind"]]
    for key in need:
        if key not in task:
            errors.append(f"task.{key}: required for {task['kind']}")
    for key in ("x0", "carrier", "eps", "alpha"):
        ref = task.get(key)
        if isinstance(ref, str) and ref not in objects:
            errors.append(f"task.{key}: unknown object {ref!r}")
    for name in task.get("samples", []) or []:
        if name not in objects:
            errors.append(f"task.samples: unknown object {name!r}")


# --------------------------------------------------------------------------
# building runtime objects


@dataclass
class Built:
    prob: ProbSpace
    space: sp.L0Space
    objects: dict


def build(scen: Scenario) -> Built:
    prob = ProbSpace(tuple(scen.space["probs"]))
    b = scen.base
    if b["kind"] == "euclidean":
        space = sp.RNModuleSpace(prob, b["dim"])
    else:
        space = sp.L0Space(prob, sp.FinitePoints(b["labels"], b["dist"], validate=False))
    objs: dict[str, Any] = {}
    for name, obj in scen.objects.items():
        kind, val = next(iter(obj.items()))
        if kind == "point":
            objs[name] = _point(space, val, f"objects.{name}")
        elif kind == "scalar":
            objs[name] = _scalar(prob, val, f"objects.{name}")
    for name, obj in scen.objects.items():
        kind, val = next(iter(obj.items()))
        if kind == "set":
            gens = [objs[g] if isinstance(g, str) else _point(space, g, f"objects.{name}") for g in val]
            objs[name] = sp.SigmaStableSet(space, gens)
    return Built(prob, space, objs)


def _point(space: sp.L0Space, val, path: str) -> sp.RandomPoint:
    if not isinstance(val, list):
        raise ScenarioError([f"{path}: expected a list with one entry per atom"])
    if len(val) != space.prob.atom_count:
        raise ScenarioError([f"{path}: {len(val)} entries for {space.prob.atom_count} atoms"])
    try:
        return space.point(val)
    except (ValueError, RMSpaceError) as exc:
        raise ScenarioError([f"{path}: {exc}"]) from None


def _scalar(prob: ProbSpace, val, path: str) -> RandomScalar:
    if isinstance(val, (int, float)):
        val = [val] * prob.atom_count
    if not isinstance(val, list) or len(val) != prob.atom_count:
        raise ScenarioError([f"{path}: expected {prob.atom_count} per-atom values"])
    return RandomScalar(val)


def _resolve_point(built: Built, ref, path: str):
    if isinstance(ref, str):
        return built.objects[ref]
    return _point(built.space, ref, path)


def _resolve_scalar(built: Built, ref, path: str) -> RandomScalar:
    if isinstance(ref, str):
        return built.objects[ref]
    return _scalar(built.prob, ref, path)


def _resolve_set(built: Built, ref, path: str) -> sp.SigmaStableSet:
    if ref is None:
        pts = built.space.points()
        if pts is None:
            raise ScenarioError([f"{path}: a carrier set is required on a Euclidean base"])
        return sp.SigmaStableSet(built.space, pts)
    if isinstance(ref, str):
        obj = built.objects[ref]
        if not isinstance(obj, sp.SigmaStableSet):
            raise ScenarioError([f"{path}: {ref!r} is not a set"])
        return obj
    return sp.SigmaStableSet(built.space, [_point(built.space, g, path) for g in ref])


def _operator(built: Built, node, path: str) -> fp.PointMap:
    if not isinstance(node, dict) or len(node) != 1:
        raise ScenarioError([f"{path}: expected one of affine, lookup, constant"])
    kind, val = next(iter(node.items()))
    space = built.space
    if kind == "affine":
        if not isinstance(space.base, sp.EuclideanRd):
            raise ScenarioError([f"{path}: affine maps need a Euclidean base"])
        return fp.affine_map(space, val["A"], val["b"])
    if kind == "lookup":
        if len(val) != built.prob.atom_count:
            raise ScenarioError([f"{path}: need one lookup table per atom"])
        tables = [{_key(space, k): _key(space, v) for k, v in t.items()} for t in val]
        if isinstance(space.base, sp.EuclideanRd):
            return fp.pointwise_map(space, [lambda p, t=t: t[p] for t in tables])
        return fp.lookup_map(space, tables)
    if kind == "constant":
        c = _resolve_point(built, val, path)
        return fp.PointMap(lambda x: c, sigma_stable=True)
    raise ScenarioError([f"{path}: unknown operator kind {kind!r}"])


def _key(space, k):
    if isinstance(space.base, sp.EuclideanRd):
        return space.base.normalize(k)
    return k


def _multimap(built: Built, node, path: str) -> fp.MultiMap:
    if isinstance(node, dict) and "branches" in node:
        branches = [_operator(built, b, f"{path}.branches[{i}]") for i, b in enumerate(node["branches"])]
        return fp.branch_map(built.space, branches)
    return fp.singleton_map(built.space, _operator(built, node, path))


def _objective(built: Built, node, path: str) -> va.RandomFunction:
    if not isinstance(node, dict):
        raise ScenarioError([f"{path}: expected distance_to or table"])
    space = built.space
    if "distance_to" in node:
        p = _resolve_point(built, node["distance_to"], f"{path}.distance_to")
        scale = float(node.get("scale", 1.0))
        offset = _resolve_scalar(built, node.get("offset", 0.0), f"{path}.offset")
        return va.RandomFunction(lambda x: space.distance(x, p) * scale + offset, sigma_stable=True)
    if "table" in node:
        tables = node["table"]
        if len(tables) != built.prob.atom_count:
            raise ScenarioError([f"{path}.table: need one table per atom"])
        tables = [{_key(space, k): float(v) for k, v in t.items()} for t in tables]
        return va.RandomFunction(lambda x: [t[p] for t, p in zip(tables, x.section)], sigma_stable=True)
    raise ScenarioError([f"{path}: expected distance_to or table"])


# --------------------------------------------------------------------------
# reports


@dataclass
class Report:
    task: str
    status: str
    solution: list | None = None
    residual: list | None = None
    iterations: int | None = None
    certificate: dict | None = None
    checks: list = field(default_factory=list)
    message: str = ""
    timing: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["timing"] is None:
            del out["timing"]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(**d)

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "ok" else 1


def _jsonable(p):
    if isinstance(p, sp.RandomPoint):
        return [_jsonable(v) for v in p.section]
    if isinstance(p, tuple):
        return [_jsonable(v) for v in p]
    if isinstance(p, (np.floating, np.integer)):
        return p.item()
    return p


def emit_report(report: Report, fmt: str = "json", probs: tuple | None = None) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"task:    {report.task}", f"status:  {report.status}"]
    if report.iterations is not None:
        lines.append(f"iterations: {report.iterations}")
    if report.message:
        lines.append(f"message: {report.message}")
    if report.solution is not None:
        lines.append("")
        lines.append(f"{'atom':>4}  {'prob':>8}  {'solution':<32}  {'residual':>12}")
        for w, s in enumerate(report.solution):
            pr = f"{probs[w]:.6g}" if probs else ""
            res = f"{report.residual[w]:.3e}" if report.residual else ""
            lines.append(f"{w:>4}  {pr:>8}  {str(s):<32}  {res:>12}")
    if report.certificate:
        lines.append("")
        for k in sorted(report.certificate):
            lines.append(f"  {k}: {report.certificate[k]}")
    if report.checks:
        lines.append("")
        for c in report.checks:
            mark = "PASS" if c["ok"] else "FAIL"
            tail = f"  witness: {c['witness']}" if c.get("witness") is not None else ""
            lines.append(f"  [{mark}] {c['name']}{tail}")
    if report.timing is not None:
        lines.append(f"\nelapsed: {report.timing:.3f}s")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# running


def run(scen: Scenario, seed: int = 0, tol: float | None = None, max_iter: int | None = None, timing: bool = False) -> Report:
    """Execute the scenario's task.  Solver errors become status 'error'."""
    built = build(scen)
    t = scen.task
    tol = tol if tol is not None else t.get("tol", fp.DEFAULT_TOL)
    max_iter = max_iter if max_iter is not None else int(t.get("max_iter", fp.DEFAULT_MAX_ITER))
    start = time.perf_counter()
    try:
        report = _dispatch(scen.kind, built, t, seed, tol, max_iter)
    except ScenarioError:
        raise
    except RMSpaceError as exc:
        report = Report(scen.kind, "error", message=f"{type(exc).__name__}: {exc}")
    if timing:
        report.timing = time.perf_counter() - start
    return report


def _solve_report(kind: str, rep: fp.SolveReport, extra: dict | None = None) -> Report:
    return Report(
        kind,
        "ok",
        solution=_jsonable(rep.solution),
        residual=rep.residual.tolist(),
        iterations=rep.iterations,
        certificate=extra,
    )


def _alpha(built: Built, t: dict) -> ContractionFactor:
    return ContractionFactor(_resolve_scalar(built, t["alpha"], "task.alpha"))


def _dispatch(kind: str, built: Built, t: dict, seed: int, tol: float, max_iter: int) -> Report:
    space = built.space
    if kind == "verify":
        return _verify(built, t, seed)
    if kind in ("solve-banach", "solve-power", "solve-nadler", "solve-pointwise"):
        x0 = _resolve_point(built, t["x0"], "task.x0")
    if kind == "solve-banach":
        T = _operator(built, t["operator"], "task.operator")
        return _solve_report(kind, fp.banach_solve(space, T, x0, _alpha(built, t), tol, max_iter))
    if kind == "solve-power":
        T = _operator(built, t["operator"], "task.operator")
        if "certificates" in t:
            L, alpha = fp.hans_construct(t["certificates"])
        else:
            L, alpha = RandomInteger(tuple(t["L"])), _alpha(built, t)
        rep = fp.random_power_solve(space, T, L, alpha, x0, tol, max_iter)
        return _solve_report(kind, rep, {"L": list(L.values), "alpha": alpha.alpha.tolist()})
    if kind == "solve-nadler":
        T = _multimap(built, t["operator"], "task.operator")
        rep = fp.nadler_solve(space, T, x0, _alpha(built, t), tol, max_iter)
        report = _solve_report(kind, rep, {"membership": rep.info["membership"]})
        if not rep.info["membership"]:
            report.status = "violation"
        return report
    if kind == "solve-pointwise":
        per_atom = _per_atom_ops(built, t["operator"], "task.operator")
        rep = fp.pointwise_operator_solve(space, per_atom, _alpha(built, t), x0, tol, max_iter)
        return _solve_report(kind, rep, {"path_gap": rep.info["path_gap"]})
    if kind == "ekeland":
        f = _objective(built, t["objective"], "task.objective")
        G = _resolve_set(built, t.get("carrier"), "task.carrier")
        x0 = _resolve_point(built, t["x0"], "task.x0")
        eps = _resolve_scalar(built, t["eps"], "task.eps")
        alpha = _resolve_scalar(built, t["alpha"], "task.alpha")
        cert = va.ekeland_point(space, f, x0, eps, alpha, G)
        oracle = va.ekeland_bruteforce(space, f, x0, eps, alpha, G)
        details = {
            "cond1": cert.cond1_ok,
            "cond2": cert.cond2_ok,
            "cond3": cert.cond3_ok,
            "cond3_witness": _jsonable(cert.cond3_witness),
            "oracle_z": _jsonable(oracle.z),
        }
        return Report(kind, "ok" if cert.ok else "violation", solution=_jsonable(cert.z), iterations=cert.iterations, certificate=details)
    if kind == "caristi":
        T = _operator(built, t["operator"], "task.operator")
        f = _objective(built, t["objective"], "task.objective")
        G = _resolve_set(built, t.get("carrier"), "task.carrier")
        z = va.caristi_fixed_point(space, T, f, G, tol=max(tol, TOL_ZERO), max_iter=max_iter)
        return Report(kind, "ok", solution=_jsonable(z), residual=space.distance(z, T(z)).tolist())
    raise ScenarioError([f"task.kind: unknown task {kind!r}"])


def _per_atom_ops(built: Built, node, path: str) -> list:
    """Per-atom base-space operators for the pointwise solver."""
    space = built.space
    n = built.prob.atom_count
    kind, val = next(iter(node.items())) if isinstance(node, dict) and len(node) == 1 else (None, None)
    if kind == "affine" and isinstance(space.base, sp.EuclideanRd):
        dim = space.base.dim
        if len(val["A"]) != n or len(val["b"]) != n:
            raise ScenarioError([f"{path}: need {n} per-atom coefficients"])
        mats = [np.asarray(a, dtype=float) * np.eye(dim) if np.ndim(a) == 0 else np.asarray(a, dtype=float) for a in val["A"]]
        vecs = [np.broadcast_to(np.asarray(v, dtype=float), (dim,)) for v in val["b"]]
        return [lambda p, M=M, v=v: tuple(M @ np.asarray(p) + v) for M, v in zip(mats, vecs)]
    if kind == "lookup":
        if len(val) != n:
            raise ScenarioError([f"{path}: need one lookup table per atom"])
        tables = [{_key(space, k): _key(space, v) for k, v in t.items()} for t in val]
        return [t.__getitem__ for t in tables]
    raise ScenarioError([f"{path}: the pointwise solver takes affine or lookup operators"])


# --------------------------------------------------------------------------
# verification suite


def _check(name: str, ok: bool, witness=None) -> dict:
    return {"name": name, "ok": bool(ok), "witness": _jsonable(witness) if witness is not None else None}


def _verify(built: Built, t: dict, seed: int) -> Report:
    space = built.space
    rng = np.random.default_rng(seed)
    names = t.get("samples") or list(built.objects)
    points, sets = [], []
    for name in names:
        obj = built.objects[name]
        if isinstance(obj, sp.RandomPoint):
            points.append(obj)
        elif isinstance(obj, sp.SigmaStableSet):
            sets.append((name, obj))
    samples = list(points)
    for _, G in sets:
        members = G.members
        take = rng.choice(len(members), size=min(len(members), 50), replace=False)
        samples.extend(members[int(i)] for i in sorted(take))
    if not samples:
        pts = space.points() or []
        samples = pts[:50]
    checks = []

    if isinstance(space.base, sp.FinitePoints):
        bad = space.base.violations()
        checks.append(_check("base metric axioms", not bad, list(bad[0]) if bad else None))

    if samples:
        rep = sp.check_rm_axioms(space, samples, seed=seed)
        v = rep.violations[0] if rep.violations else None
        checks.append(_check("RM axioms (RM-1..RM-4)", rep.ok, [v.axiom, v.atom, v.detail] if v else None))
        if isinstance(space, sp.RNModuleSpace):
            rep = sp.check_rn_axioms(space, samples, seed=seed)
            v = rep.violations[0] if rep.violations else None
            checks.append(_check("RN module axioms (RN-1..RN-3, RNM-1)", rep.ok, [v.axiom, v.atom, v.detail] if v else None))

        n = built.prob.atom_count
        ok, witness = True, None
        for _ in range(20):
            k = int(rng.integers(1, n + 1))
            part = Partition.from_labels(rng.integers(0, k, size=n).tolist(), k)
            xs = [samples[int(i)] for i in rng.integers(0, len(samples), size=k)]
            try:
                g = sp.glue_points(part, xs, space, verify=True)
            except (AssertionError, RMSpaceError) as exc:
                ok, witness = False, str(exc)
                break
            if not space.same(g, sp.glue_by_two_block_steps(part, xs, space), 0.0):
                ok, witness = False, g
                break
        checks.append(_check("gluing exists, is unique and composes from two-block gluings", ok, witness))

    for name, G in sets:
        members = G.members
        if len(members) ** built.prob.atom_count <= 20_000:
            checks.append(_check(f"{name}: d-sigma-stable", sp.is_d_sigma_stable(space, members)))
            checks.append(_check(f"{name}: d-stable", sp.is_d_stable(space, members)))
        pairs = list(itertools.product(members, repeat=2))
        if len(pairs) > 400:
            pairs = [pairs[int(i)] for i in rng.choice(len(pairs), size=400, replace=False)]
        dists = {tuple(space.distance(a, b).tolist()) for a, b in pairs}
        full = len(members) ** 2 <= 400
        if full:
            checks.append(_check(f"{name}: distance set is sigma-stable", is_sigma_stable_scalars(RandomScalar(d) for d in dists)))
        ok, witness = True, None
        for _ in range(20):
            p1 = pairs[int(rng.integers(len(pairs)))]
            p2 = pairs[int(rng.integers(len(pairs)))]
            low, high = sp.distance_lattice_witness(G, p1, p2)
            d1, d2 = space.distance(*p1), space.distance(*p2)
            if space.distance(*low) != (d1 & d2) or space.distance(*high) != (d1 | d2):
                ok, witness = False, [p1, p2]
                break
        checks.append(_check(f"{name}: lattice witnesses for distance meets and joins", ok, witness))
        ok, witness = True, None
        for x in samples:
            inside = sp.in_closure(x, G)
            if inside != bool((sp.dist_to_set(x, G).values <= TOL_ZERO).all()):
                ok, witness = False, x
            if inside != any(space.same(x, m) for m in members):
                ok, witness = False, x
        checks.append(_check(f"{name}: closure is the zero set of the distance", ok, witness))

    status = "ok" if all(c["ok"] for c in checks) else "violation"
    return Report("verify", status, checks=checks)


def hull_members(scen: Scenario, name: str) -> list:
    built = build(scen)
    obj = built.objects.get(name)
    if not isinstance(obj, sp.SigmaStableSet):
        raise ScenarioError([f"objects.{name}: not a set"])
    return [_jsonable(m) for m in obj.members]
