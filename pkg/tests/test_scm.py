from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from interference_dags import (
    CounterfactualQuery,
    Dag,
    NodeKind,
    Noise,
    Scm,
    TableMechanism,
    binary_scm,
    build_figure,
    conditionally_independent,
    counterfactual_expectation,
    d_separated,
    intervene,
    joint_distribution,
    nested_counterfactual_expectation,
    random_scm,
    sample,
    validate_scm,
)
from interference_dags.errors import DomainViolation, OverlappingTargets, ScmError, StateSpaceTooLarge, UnknownNode
from interference_dags.scm import Constant, enumerate_worlds

from .strategies import dags, random_dag


def copy(parent):
    return lambda pa, u: pa[parent]


def coin_scm(extra=None):
    dag = Dag(["A", "Y"], [("A", "Y")])
    return Scm(dag, {"A": (0, 1), "Y": (0, 1)},
               {"A": lambda pa, u: u, "Y": copy("A")},
               {"A": Noise.uniform((0, 1))})


def chain():
    dag = Dag("XYZ", [("X", "Y"), ("Y", "Z")])
    return Scm(dag, {n: (0, 1) for n in "XYZ"},
               {"X": lambda pa, u: u, "Y": copy("X"), "Z": copy("Y")},
               {"X": Noise.bernoulli(F(1, 3))})


FIG1_CPT = {
    "C": F(2, 5),
    "A": {(0,): F(1, 4), (1,): F(3, 4)},
    "Y": {(0, 0): F(1, 10), (0, 1): F(1, 2), (1, 0): F(3, 10), (1, 1): F(9, 10)},  # parents (A, C)
}


def fig1_scm():
    return binary_scm(build_figure("fig1"), FIG1_CPT)


def bern(p, x):
    return p if x == 1 else 1 - p


class TestValidate:
    def test_chain_is_sound(self):
        assert validate_scm(chain()) == []

    def test_normalization(self):
        s = chain()
        s.noise["X"] = Noise((0, 1), (F(1, 2), F(2, 5)))
        assert [d.kind for d in validate_scm(s)] == ["NormalizationDefect"]

    def test_totality(self):
        dag = Dag(["A", "Y"], [("A", "Y")])
        s = Scm(dag, {"A": (0, 1), "Y": (0, 1)},
                {"A": lambda pa, u: u, "Y": TableMechanism(["A"], {((0,), 0): 0})},
                {"A": Noise.uniform((0, 1))})
        kinds = [d.kind for d in validate_scm(s)]
        assert kinds == ["TotalityDefect"]

    def test_domain_and_deterministic(self):
        dag = Dag({"A": NodeKind.OBSERVED, "Z": NodeKind.DETERMINISTIC}, [("A", "Z")])
        s = Scm(dag, {"A": (0, 1), "Z": (0, 1)},
                {"A": lambda pa, u: 2 * u, "Z": copy("A")},
                {"A": Noise.uniform((0, 1)), "Z": Noise.uniform((0, 1))})
        kinds = {d.kind for d in validate_scm(s)}
        assert {"DomainDefect", "DeterministicNoiseDefect"} <= kinds

    def test_missing_mechanism(self):
        with pytest.raises(ScmError):
            Scm(Dag(["A"]), {"A": (0, 1)}, {})


class TestJoint:
    def test_copy(self):
        j = joint_distribution(coin_scm())
        assert j.probability({"A": 1, "Y": 1}) == F(1, 2)
        assert j.probability({"A": 1, "Y": 0}) == 0

    def test_two_coins(self):
        dag = Dag(["A1", "A2"])
        s = Scm(dag, {"A1": (0, 1), "A2": (0, 1)}, {"A1": lambda pa, u: u, "A2": lambda pa, u: u},
                {"A1": Noise.uniform((0, 1)), "A2": Noise.uniform((0, 1))})
        j = joint_distribution(s)
        assert all(j.probability({"A1": a, "A2": b}) == F(1, 4) for a, b in product((0, 1), repeat=2))

    def test_fig1_factorization(self):
        j = joint_distribution(fig1_scm())
        assert j.total() == 1
        for c, a, y in product((0, 1), repeat=3):
            expected = (bern(FIG1_CPT["C"], c) * bern(FIG1_CPT["A"][(c,)], a) * bern(FIG1_CPT["Y"][(a, c)], y))
            assert j.probability({"C": c, "A": a, "Y": y}) == expected

    def test_latent_marginalized(self):
        d = build_figure("fig7")
        j = joint_distribution(random_scm(d, 3))
        assert "U" not in j.variables and j.total() == 1

    def test_bound(self):
        with pytest.raises(StateSpaceTooLarge):
            joint_distribution(random_scm(random_dag(np.random.default_rng(1), 8), 1, noise_size=8), max_states=1000)


class TestIntervene:
    def test_fig1_surgery(self):
        s = intervene(fig1_scm(), {"A": 1})
        assert not s.dag.has_edge("C", "A") and s.dag.has_edge("C", "Y")
        assert joint_distribution(s).probability({"A": 1}) == 1

    def test_empty(self):
        s = fig1_scm()
        assert intervene(s, {}) is s

    def test_fig4_two_treatments(self):
        s = intervene(random_scm(build_figure("fig4"), 0), {"A1": 1, "A2": 0})
        assert s.dag.parents("A1") == () and s.dag.parents("A2") == ()
        assert isinstance(s.mechanisms["A1"], Constant)

    def test_errors(self):
        with pytest.raises(UnknownNode):
            intervene(fig1_scm(), {"Q": 1})
        with pytest.raises(DomainViolation):
            intervene(fig1_scm(), {"A": 2})

    def test_truncated_factorization(self):
        j = joint_distribution(intervene(fig1_scm(), {"A": 0}))
        for c, y in product((0, 1), repeat=2):
            assert j.probability({"C": c, "A": 0, "Y": y}) == bern(FIG1_CPT["C"], c) * bern(FIG1_CPT["Y"][(0, c)], y)


class TestCounterfactual:
    def test_identity(self):
        assert counterfactual_expectation(coin_scm(), "Y", {"A": 1}) == 1

    def test_xor(self):
        dag = Dag(["A", "Y"], [("A", "Y")])
        s = Scm(dag, {"A": (0, 1), "Y": (0, 1)}, {"A": lambda pa, u: u, "Y": lambda pa, u: pa["A"] ^ u},
                {"A": Noise.uniform((0, 1)), "Y": Noise.bernoulli(F(1, 10))})
        assert counterfactual_expectation(s, "Y", {"A": 1}) == F(9, 10)

    def test_consistency_randomized(self):
        d = Dag("AMY", [("A", "M"), ("M", "Y"), ("A", "Y")])
        for seed in range(5):
            s = random_scm(d, seed)
            j = joint_distribution(s)
            for a in (0, 1):
                assert j.expectation("Y", {"A": a}) == counterfactual_expectation(s, "Y", {"A": a})

    def test_fig1_adjustment_by_hand(self):
        s = fig1_scm()
        expected = sum(bern(FIG1_CPT["C"], c) * FIG1_CPT["Y"][(1, c)] for c in (0, 1))
        assert counterfactual_expectation(s, "Y", {"A": 1}) == expected

    def test_conditional_on_covariate(self):
        assert counterfactual_expectation(fig1_scm(), "Y", {"A": 1}, given={"C": 0}) == F(3, 10)

    def test_outcome_targeted(self):
        with pytest.raises(OverlappingTargets):
            counterfactual_expectation(coin_scm(), "Y", {"Y": 1})


class TestNested:
    def med(self):
        d = Dag("AMY", [("A", "M"), ("M", "Y")])
        return Scm(d, {n: (0, 1) for n in "AMY"}, {"A": lambda pa, u: u, "M": copy("A"), "Y": copy("M")},
                   {"A": Noise.uniform((0, 1))})

    def test_copies_inner(self):
        q = CounterfactualQuery("Y", {"A": 0}, {"M"}, {"A": 1})
        assert nested_counterfactual_expectation(self.med(), q) == 1

    def test_composition(self):
        s = random_scm(build_figure("fig2"), 11)
        for a in (0, 1):
            q = CounterfactualQuery("Y", {"A": a}, {"M"}, {"A": a})
            assert nested_counterfactual_expectation(s, q) == counterfactual_expectation(s, "Y", {"A": a})

    def test_empty_mediators(self):
        s = random_scm(build_figure("fig2"), 12)
        q = CounterfactualQuery("Y", {"A": 1})
        assert nested_counterfactual_expectation(s, q) == counterfactual_expectation(s, "Y", {"A": 1})

    def test_invalid(self):
        with pytest.raises(ValueError):
            CounterfactualQuery("Y", {"A": 0}, {"M"})
        with pytest.raises(OverlappingTargets):
            nested_counterfactual_expectation(self.med(), CounterfactualQuery("Y", {"M": 0}, {"M"}, {"A": 1}))

    def test_shared_noise_across_worlds(self):
        # Y = M xor U with one U for both worlds: Y(1) and Y(0) always differ
        d = Dag("AMY", [("A", "M"), ("M", "Y"), ("A", "Y")])
        s = Scm(d, {n: (0, 1) for n in "AMY"},
                {"A": lambda pa, u: u, "M": copy("A"), "Y": lambda pa, u: pa["M"] ^ u},
                {"A": Noise.uniform((0, 1)), "Y": Noise.bernoulli(F(1, 3))})
        law = enumerate_worlds(s, [{"A": ("set", 1)}, {"A": ("set", 0)}], [(0, "Y"), (1, "Y")])
        assert law == {(1, 0): F(2, 3), (0, 1): F(1, 3)}


class TestIndependence:
    def test_fig8(self):
        d = build_figure("fig8")
        for seed in range(3):
            s = random_scm(d, seed, noise_size=2)
            assert conditionally_independent(s, {"Y1_T0"}, {"Y2_T0"}, {"A1", "A2", "T0"})

    def test_coins(self):
        dag = Dag(["A1", "A2"])
        s = Scm(dag, {"A1": (0, 1), "A2": (0, 1)}, {"A1": lambda pa, u: u, "A2": lambda pa, u: u},
                {"A1": Noise.uniform((0, 1)), "A2": Noise.uniform((0, 1))})
        assert conditionally_independent(s, {"A1"}, {"A2"})

    def test_copy_dependent(self):
        assert not conditionally_independent(coin_scm(), {"A"}, {"Y"})

    def test_latent_rejected(self):
        with pytest.raises(ScmError):
            conditionally_independent(random_scm(build_figure("fig7"), 0), {"U"}, {"A1"})


class TestSample:
    def test_deterministic_seed(self):
        s = fig1_scm()
        assert sample(s, 50, seed=4) == sample(s, 50, seed=4)

    def test_fair_coin_frequency(self):
        data = sample(coin_scm(), 100_000, seed=0)
        assert abs(np.mean(data.column("A")) - 0.5) < 0.01

    def test_degenerate(self):
        dag = Dag(["A", "Y"], [("A", "Y")])
        s = Scm(dag, {"A": (0, 1), "Y": (0, 1)}, {"A": lambda pa, u: 1, "Y": copy("A")})
        assert set(sample(s, 20, seed=1).rows) == {(1, 1)}

    def test_csv(self):
        text = sample(chain(), 3, seed=2).to_csv()
        assert text.splitlines()[0] == "X,Y,Z"

    def test_bad_n(self):
        with pytest.raises(ValueError):
            sample(chain(), 0, seed=0)


class TestBinaryScm:
    def test_cpt_recovered(self):
        j = joint_distribution(fig1_scm())
        for a, c in product((0, 1), repeat=2):
            assert j.expectation("Y", {"A": a, "C": c}) == FIG1_CPT["Y"][(a, c)]


def _triples(nodes):
    for x in nodes:
        for y in nodes:
            if x >= y:
                continue
            rest = [n for n in nodes if n not in (x, y)]
            yield x, y, ()
            for z in rest:
                yield x, y, (z,)


@settings(max_examples=25)
@given(dags(max_nodes=5), st.integers(0, 2 ** 32 - 1))
def test_soundness_property(dag, seed):
    s = random_scm(dag, seed)
    joint = joint_distribution(s)
    for x, y, z in _triples(dag.nodes):
        if d_separated(dag, {x}, {y}, set(z)):
            assert conditionally_independent(s, {x}, {y}, set(z), joint=joint)


def test_constructive_d_connection():
    rng = np.random.default_rng(7)
    for _ in range(15):
        dag = random_dag(rng, int(rng.integers(2, 6)))
        for x, y, z in _triples(dag.nodes):
            if d_separated(dag, {x}, {y}, set(z)):
                continue
            for attempt in range(20):
                s = random_scm(dag, rng)
                if not conditionally_independent(s, {x}, {y}, set(z)):
                    break
            else:
                pytest.fail(f"no dependent SCM found for {x}, {y} | {z} on {dag}")


def test_intervened_marginal_is_point_mass():
    rng = np.random.default_rng(3)
    for _ in range(10):
        dag = random_dag(rng, 5)
        s = random_scm(dag, rng)
        node = dag.nodes[int(rng.integers(len(dag)))]
        assert joint_distribution(intervene(s, {node: 1})).probability({node: 1}) == 1
