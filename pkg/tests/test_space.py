import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_atomwise_gluings, dist_to_members
from rmspace import (
    CallbackSpace,
    EuclideanRd,
    Event,
    FinitePoints,
    Partition,
    ProbSpace,
    RandomPoint,
    RandomScalar,
    RNModuleSpace,
    SigmaStableSet,
    check_rm_axioms,
    check_rn_axioms,
    converges_eps_lambda,
    converges_L0,
    dist_to_set,
    distance_lattice_witness,
    glue_points,
    in_closure,
    is_d_sigma_stable,
    is_d_stable,
    is_sigma_stable_scalars,
    l0_space,
    product_space,
    random_diameter,
    selection_set,
    sigma_hull,
)
from rmspace.errors import HullCapError, NotInSetError, SpaceMismatchError
from rmspace.space import glue_by_two_block_steps, glue_two

AB = FinitePoints(["a", "b"], [[0, 1], [1, 0]])
P2 = ProbSpace((0.5, 0.5))


def line(n_atoms):
    return l0_space(ProbSpace.uniform(n_atoms), EuclideanRd(1))


def points_of(n_atoms, lo=-3, hi=3):
    return st.lists(st.integers(lo, hi), min_size=n_atoms, max_size=n_atoms).map(lambda v: line(n_atoms).point(v))


class TestBaseSpaces:
    def test_finite_points_validation(self):
        with pytest.raises(ValueError, match="symmetry"):
            FinitePoints(["a", "b"], [[0, 1], [2, 0]])
        with pytest.raises(ValueError, match="triangle"):
            FinitePoints(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])

    def test_violations_listed(self):
        bad = FinitePoints(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]], validate=False)
        assert ("triangle", ("a", "b", "c")) in bad.violations()

    def test_euclidean_normalize(self):
        assert EuclideanRd(2).normalize([1, 2]) == (1.0, 2.0)
        with pytest.raises(ValueError):
            EuclideanRd(2).normalize([1, 2, 3])


class TestL0Space:
    def test_examples(self):
        E = l0_space(P2, AB)
        assert E.distance(E.point(["a", "b"]), E.point(["b", "b"])).tolist() == [1, 0]
        x = E.point(["a", "b"])
        assert E.distance(x, x).tolist() == [0, 0]
        R = line(2)
        assert R.distance(R.point([0, 3]), R.point([4, 0])).tolist() == [4, 3]

    def test_section_length(self):
        with pytest.raises(SpaceMismatchError):
            line(2).point([1, 2, 3])

    def test_all_points_enumerated(self):
        assert len(l0_space(ProbSpace.uniform(3), AB).points()) == 8

    def test_rm_axioms_exhaustive_on_finite_base(self):
        base = FinitePoints(["p", "q", "r"], [[0, 1, 1.5], [1, 0, 2], [1.5, 2, 0]])
        E = l0_space(ProbSpace.uniform(2), base)
        rep = check_rm_axioms(E, E.points())
        assert rep.ok
        assert rep.checked["triples"] == 9**3


class TestProductSpace:
    def test_sum_metric(self):
        E = product_space(line(2), line(2))
        R = line(2)
        x = (R.point([0, 0]), R.point([0, 0]))
        y = (R.point([1, 0]), R.point([0, 2]))
        assert E.distance(x, y).tolist() == [1, 2]
        assert E.distance(x, x).tolist() == [0, 0]

    def test_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            product_space(line(2), line(3))

    @given(st.lists(st.tuples(points_of(2), points_of(2)), min_size=3, max_size=3))
    def test_triangle(self, pts):
        assert check_rm_axioms(product_space(line(2), line(2)), pts).ok

    def test_product_convergence_is_componentwise(self):
        R = line(2)
        E = product_space(R, R)
        x = (R.point([0, 0]), R.point([1, 1]))
        seq = [(R.point([2.0**-k, 0]), R.point([1, 1 + 3.0**-k])) for k in range(20)]
        joint = converges_L0(E, seq, x, 0.01)
        first = converges_L0(R, [s[0] for s in seq], x[0], 0.01)
        second = converges_L0(R, [s[1] for s in seq], x[1], 0.01)
        assert joint is not None and first is not None and second is not None
        assert joint >= max(first, second)


class TestAxiomCheckers:
    def test_doctored_symmetry(self):
        E = CallbackSpace(P2, ["u", "v"], lambda x, y: [1.0, 2.0] if (x, y) == ("u", "v") else ([0, 0] if x == y else [1.0, 1.0]))
        assert "RM-2" in check_rm_axioms(E, ["u", "v"]).axioms_violated()

    def test_doctored_triangle(self):
        base = FinitePoints(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]], validate=False)
        E = l0_space(ProbSpace((1.0,)), base)
        rep = check_rm_axioms(E, E.points())
        assert "RM-4" in rep.axioms_violated()
        witness = next(v for v in rep.violations if v.axiom == "RM-4").witness
        assert [w[0] for w in witness] == ["a", "b", "c"]

    def test_rn_module(self):
        M = RNModuleSpace(ProbSpace((0.2, 0.3, 0.5)), 2)
        rng = np.random.default_rng(1)
        samples = [M.point(rng.normal(size=(3, 2))) for _ in range(5)]
        assert check_rn_axioms(M, samples).ok
        assert M.norm(M.zero()).tolist() == [0, 0, 0]

    def test_rnm_indicator(self):
        M = RNModuleSpace(ProbSpace((0.5, 0.5)), 1)
        x = M.point([3.0, -4.0])
        IA = RandomScalar([1.0, 0.0])
        assert M.norm(M.scale(IA, x)) == IA * M.norm(x)


class TestGluing:
    def test_examples(self):
        E = l0_space(P2, AB)
        xs = [E.point(["a", "a"]), E.point(["b", "b"])]
        assert glue_points(Partition.atomic(2), xs, E, verify=True).section == ("a", "b")
        single = Partition((Event([0, 1]),), 2)
        assert glue_points(single, xs[:1], E) == xs[0]

    def test_refined_reglue_idempotent(self):
        E = l0_space(ProbSpace.uniform(3), AB)
        xs = [E.point(["a", "a", "b"]), E.point(["b", "b", "a"])]
        part = Partition((Event([0, 2]), Event([1])), 3)
        g = glue_points(part, xs, E)
        refined = glue_points(Partition.atomic(3), [g, g, g], E)
        assert refined == g

    def test_glue_two(self):
        R = line(2)
        assert glue_two(Event([1]), R.point([1, 2]), R.point([3, 4]), R).section == ((3.0,), (2.0,))

    @given(st.integers(2, 4).flatmap(lambda n: st.tuples(
        st.just(n),
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.lists(st.lists(st.sampled_from("ab"), min_size=n, max_size=n), min_size=4, max_size=4),
    )))
    def test_unique_and_two_block_composition(self, case):
        n, labels, sections = case
        E = l0_space(ProbSpace.uniform(n), AB)
        part = Partition.from_labels(labels, 4)
        xs = [E.point(s) for s in sections]
        g = glue_points(part, xs, E, verify=True)
        candidates = [p for p in E.points() if all((E.distance(p, x).values[list(b)] == 0).all() for b, x in zip(part.blocks, xs) if len(b))]
        assert all(E.distance(p, g).tolist() == [0.0] * n for p in candidates)
        assert glue_by_two_block_steps(part, xs, E) == g


class TestSigmaHull:
    def test_two_generators(self):
        E = l0_space(P2, AB)
        G = sigma_hull(E, [E.point(["a", "b"]), E.point(["b", "a"])])
        assert {m.section for m in G} == {("a", "b"), ("b", "a"), ("a", "a"), ("b", "b")}
        assert G[0] == E.point(["a", "b"])

    def test_single_generator(self):
        R = line(3)
        assert len(sigma_hull(R, [R.point([1, 2, 3])])) == 1

    def test_cap(self):
        R = line(6)
        gens = [R.point([k] * 6) for k in range(10)]
        with pytest.raises(HullCapError, match="combinatorial"):
            sigma_hull(R, gens)

    def test_euclidean_dedup(self):
        R = line(1)
        G = sigma_hull(R, [R.point([1.0]), R.point([1.0 + 1e-12])])
        assert len(G) == 1

    @given(st.integers(1, 3).flatmap(lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=1, max_size=4)))
    def test_hull_matches_enumeration(self, rows):
        n = len(rows[0])
        R = line(n)
        G = sigma_hull(R, [R.point(r) for r in rows])
        expected = all_atomwise_gluings([tuple((float(v),) for v in r) for r in rows])
        assert {m.section for m in G} == expected
        assert len(G) == np.prod([len({r[i] for r in rows}) for i in range(n)])
        assert is_d_sigma_stable(R, G.members)

    def test_concurrent_materialization(self):
        R = line(3)
        G = sigma_hull(R, [R.point([k, -k, 2 * k]) for k in range(6)])
        out = []
        threads = [threading.Thread(target=lambda: out.append(G.members)) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(o is out[0] for o in out)
        assert len(out[0]) == 216

    def test_callback_space_hull(self):
        E0 = l0_space(P2, AB)
        pts = E0.points()
        E = CallbackSpace(P2, pts, E0.distance)
        G = sigma_hull(E, [pts[0], pts[3]])
        assert len(G) == 4

    def test_selection_set(self):
        R = line(2)
        G = selection_set(R, [[(0,), (1,)], [(5,)]])
        assert {m.section for m in G} == {((0.0,), (5.0,)), ((1.0,), (5.0,))}


class TestDistances:
    def setup_method(self):
        self.R = line(2)
        self.G = sigma_hull(self.R, [self.R.point([0, 0]), self.R.point([1, 1])])

    def test_examples(self):
        R, G = self.R, self.G
        assert dist_to_set(R.point([3, 0.4]), G).tolist() == pytest.approx([2, 0.4])
        assert dist_to_set(G[2], G).tolist() == [0, 0]
        assert in_closure(R.point([1, 0]), G)
        assert not in_closure(R.point([1, 0.5]), G)

    def test_witness_is_member(self):
        d, w = dist_to_set(self.R.point([3, 0.4]), self.G, return_witness=True)
        assert w.section == ((1.0,), (0.0,))
        assert in_closure(w, self.G)

    @given(points_of(2), st.lists(points_of(2), min_size=1, max_size=3))
    def test_matches_member_minimum(self, x, gens):
        G = sigma_hull(line(2), gens)
        d = dist_to_set(x, G)
        ref = dist_to_members(x.section, [m.section for m in G])
        assert np.allclose(d.values, ref, rtol=0, atol=1e-12)
        for g in G:
            assert d <= line(2).distance(x, g)
        dists = [line(2).distance(x, g) for g in G]
        assert is_sigma_stable_scalars(dists)

    def test_random_diameter(self):
        R = self.R
        G = sigma_hull(R, [R.point([0, 0]), R.point([1, 2])])
        assert random_diameter(G).tolist() == [1, 2]
        assert random_diameter(sigma_hull(R, [R.point([4, 4])])).tolist() == [0, 0]

    def test_random_diameter_generic_space(self):
        E0 = l0_space(P2, AB)
        pts = E0.points()
        E = CallbackSpace(P2, pts, E0.distance)
        assert random_diameter(sigma_hull(E, [pts[0], pts[3]])).tolist() == [1, 1]

    def test_lattice_witness_example(self):
        R = self.R
        G = sigma_hull(R, [R.point([0, 0]), R.point([1, 4]), R.point([3, 2])])
        o = G[0]
        p1 = (o, R.point([1, 4]))
        p2 = (o, R.point([3, 2]))
        low, high = distance_lattice_witness(G, p1, p2)
        assert R.distance(*low).tolist() == [1, 2]
        assert R.distance(*high).tolist() == [3, 4]
        same_low, same_high = distance_lattice_witness(G, p1, p1)
        assert R.distance(*same_low) == R.distance(*p1) == R.distance(*same_high)

    def test_lattice_witness_outside(self):
        with pytest.raises(NotInSetError):
            distance_lattice_witness(self.G, (self.R.point([9, 9]), self.G[0]), (self.G[0], self.G[0]))

    @given(st.lists(points_of(2, 0, 2), min_size=2, max_size=3), st.data())
    def test_lattice_witness_exhaustive(self, gens, data):
        R = line(2)
        G = sigma_hull(R, gens)
        pick = st.sampled_from(G.members)
        p1 = (data.draw(pick), data.draw(pick))
        p2 = (data.draw(pick), data.draw(pick))
        low, high = distance_lattice_witness(G, p1, p2)
        d1, d2 = R.distance(*p1), R.distance(*p2)
        assert R.distance(*low) == (d1 & d2)
        assert R.distance(*high) == (d1 | d2)
        assert all(in_closure(p, G) for p in (*low, *high))


class TestConvergence:
    def test_constant(self):
        R = line(2)
        x = R.point([1, 1])
        assert converges_eps_lambda(R, [x] * 5, x, 0.1, 0.2) == 0
        assert converges_L0(R, [x] * 5, x, 0.1) == 0

    def test_geometric(self):
        R = line(2)
        x = R.point([0, 0])
        seq = [R.point([2.0**-n, 2.0**-n]) for n in range(10)]
        assert converges_eps_lambda(R, seq, x, 0.1, 0.3) == 4
        assert converges_L0(R, seq, x, 0.1) == 4

    def test_invalid_lambda(self):
        R = line(1)
        with pytest.raises(ValueError):
            converges_eps_lambda(R, [R.point([0])], R.point([0]), 0.1, 1.0)

    def test_never_enters(self):
        R = line(1)
        assert converges_L0(R, [R.point([5])] * 3, R.point([0]), 0.1) is None

    @given(
        st.lists(st.floats(0.01, 0.99), min_size=2, max_size=4),
        st.lists(st.lists(st.floats(0, 1), min_size=4, max_size=4), min_size=1, max_size=8),
        st.floats(0.05, 0.9),
    )
    def test_topologies_agree_below_min_prob(self, weights, dists, eps):
        probs = np.asarray(weights) / np.sum(weights)
        probs[-1] = 1.0 - probs[:-1].sum()
        n = len(probs)
        P = ProbSpace(tuple(probs))
        R = l0_space(P, EuclideanRd(1))
        x = R.point([0.0] * n)
        seq = [R.point(d[:n]) for d in dists]
        lam = P.min_prob / 2
        a = converges_eps_lambda(R, seq, x, eps, lam)
        # L0 entry with the closed ball {d <= eps'} for eps' just below eps
        b = converges_L0(R, seq, x, np.nextafter(eps, 0))
        assert a == b


class TestStability:
    def test_full_hull_and_generators(self):
        E = l0_space(P2, AB)
        gens = [E.point(["a", "b"]), E.point(["b", "a"])]
        G = sigma_hull(E, gens).members
        assert is_d_sigma_stable(E, G) and is_d_stable(E, G)
        assert not is_d_sigma_stable(E, gens) and not is_d_stable(E, gens)

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, 2**n - 1), min_size=1))))
    def test_predicates_equivalent(self, case):
        n, idx = case
        E = l0_space(ProbSpace.uniform(n), AB)
        pts = E.points()
        subset = [pts[i] for i in sorted(idx)]
        assert is_d_sigma_stable(E, subset) == is_d_stable(E, subset)


def test_random_point_is_hashable():
    assert len({RandomPoint(("a", "b")), RandomPoint(("a", "b"))}) == 1
