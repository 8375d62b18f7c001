import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bell, binary_entropy, ghz, partial_trace_loops, reduced_entropy
from tangnet import linalg
from tangnet.errors import ArgumentError, InvalidDensityError
from tangnet.infometrics import (
    TERM_NAMES,
    conditional_mutual_info,
    entropy,
    entropy_of_spectrum,
    multiworld_mi,
    mutual_info,
    mutual_info_pure_bipartite,
    rabi_entanglement,
    slit_state,
    slit_visibility,
)
from tangnet.states import DensityOperator, MultipartiteSpace, PartitionModel, PureState

Q = MultipartiteSpace.of(2)
AB = MultipartiteSpace((("A", 2), ("B", 2)))
GHZ3 = PureState(MultipartiteSpace.of(2, 2, 2), ghz(3))
QUAD = MultipartiteSpace((("q1", 2), ("q2", 2), ("q3", 2), ("q4", 2)))
ROLES4 = {"q1": "S1", "q2": "E1", "q3": "S2", "q4": "E2"}


def dm(m, space=Q):
    return DensityOperator(space, np.asarray(m, complex))


class TestEntropy:
    def test_pure(self):
        assert entropy(dm([[1, 0], [0, 0]])) == 0.0

    def test_maximally_mixed(self):
        assert entropy(dm(np.eye(2) / 2)) == pytest.approx(1.0, abs=1e-15)

    def test_three_quarters(self):
        assert entropy(dm(np.diag([0.75, 0.25]))) == pytest.approx(0.8112781245, abs=1e-10)
        assert entropy(dm(np.diag([0.75, 0.25]))) == pytest.approx(binary_entropy(0.25), abs=1e-14)

    def test_clamp_and_reject(self):
        assert entropy_of_spectrum([1.0, -5e-11]) == 0.0
        with pytest.raises(InvalidDensityError):
            entropy_of_spectrum([1.01, -0.01])

    def test_random_against_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            dims = [int(rng.integers(2, 4)) for _ in range(3)]
            psi = linalg.haar_random_state(dims, rng)
            for keep in ([0], [1], [0, 2], [1, 2]):
                assert entropy(psi, keep) == pytest.approx(reduced_entropy(psi.amplitudes, dims, keep), abs=1e-9)
                assert entropy(psi.density(), keep) == pytest.approx(entropy(psi, keep), abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32))
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 6))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        u = linalg.haar_random_unitary(d, rng)
        sp = MultipartiteSpace.of(d)
        assert abs(entropy(dm(rho, sp)) - entropy(dm(u @ rho @ u.conj().T, sp))) <= 1e-9
        assert 0 <= entropy(dm(rho, sp)) <= math.log2(d) + 1e-12


class TestMutualInfo:
    def test_product(self):
        psi = PureState.normalized(AB, np.kron([0.6, 0.8], [1, 1j]))
        assert mutual_info(psi, "A", "B") == pytest.approx(0.0, abs=1e-12)

    def test_bell(self):
        assert mutual_info(PureState(AB, bell()), "A", "B") == pytest.approx(2.0, abs=1e-12)

    def test_ghz_pair(self):
        assert mutual_info(GHZ3, [0], [1]) == pytest.approx(1.0, abs=1e-12)

    def test_overlap_rejected(self):
        with pytest.raises(ArgumentError):
            mutual_info(GHZ3, [0, 1], [1])
        with pytest.raises(ArgumentError):
            mutual_info(GHZ3, [], [1])


class TestPureBipartite:
    def test_product(self):
        assert mutual_info_pure_bipartite(PureState.basis(AB, (0, 1)), "B").total == 0.0

    def test_bell(self):
        r = mutual_info_pure_bipartite(PureState(AB, bell()), "B")
        assert (r.total, r.classical, r.quantum) == pytest.approx((2.0, 1.0, 1.0), abs=1e-12)

    def test_thirty_degrees(self):
        a = math.radians(30)
        psi = PureState.from_terms(AB, {(0, 1): math.cos(a), (1, 0): math.sin(a)})
        r = mutual_info_pure_bipartite(psi, "B")
        assert r.total == pytest.approx(2 * binary_entropy(0.25), abs=1e-12)
        assert r.total == pytest.approx(1.6225562, abs=1e-7)

    def test_matches_general_formula(self):
        for seed in range(20):
            psi = linalg.haar_random_state([3, 4], seed)
            assert mutual_info_pure_bipartite(psi, [1]).total == pytest.approx(mutual_info(psi, [0], [1]), abs=1e-9)


class TestConditional:
    def test_empty_condition(self):
        assert conditional_mutual_info(PureState(AB, bell()), "A", "B") == pytest.approx(2.0, abs=1e-12)

    def test_ghz(self):
        assert conditional_mutual_info(GHZ3, [0], [1], [2]) == pytest.approx(1.0, abs=1e-12)
        S = lambda *k: reduced_entropy(ghz(3), [2] * 3, list(k))  # noqa: E731
        assert S(0, 2) + S(1, 2) - S(2) - S(0, 1, 2) == pytest.approx(1.0, abs=1e-12)

    def test_uncorrelated_condition(self):
        rng = np.random.default_rng(5)
        ab = linalg.haar_random_state([2, 2], rng)
        c = np.diag([0.7, 0.3])
        rho = np.kron(np.outer(ab.amplitudes, ab.amplitudes.conj()), c)
        d = DensityOperator(MultipartiteSpace.of(2, 2, 2), rho)
        assert conditional_mutual_info(d, [0], [1], [2]) == pytest.approx(mutual_info(d, [0], [1]), abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_strong_subadditivity(self, seed):
        rng = np.random.default_rng(seed)
        dims = [int(rng.integers(2, 4)) for _ in range(4)]
        psi = linalg.haar_random_state(dims, rng)
        for a, b, c in itertools.permutations(range(3), 3):
            assert conditional_mutual_info(psi, [a], [b], [c]) >= -1e-9


class TestMultiworld:
    def test_ghz4(self):
        r = multiworld_mi(PureState(QUAD, ghz(4)), PartitionModel("model-c", ROLES4))
        assert [r.terms[k] for k in TERM_NAMES] == pytest.approx([2, 1, 0, 0], abs=1e-12)
        assert r.I_total == pytest.approx(1.0, abs=1e-9)
        assert r.flags["case4"] and r.flags["case3"] and not r.flags["case2"]
        assert r.composites["I_case4"] == pytest.approx(r.I_total, abs=1e-12)

    def test_ghz4_terms_against_oracle(self):
        v, dims = ghz(4), [2] * 4
        S = lambda *k: reduced_entropy(v, dims, list(k))  # noqa: E731
        i_sys = S(0, 1) + S(2, 3) - S(0, 1, 2, 3)
        i_env = S(1) + S(3) - S(1, 3)
        c1 = S(1, 3) + S(2, 3) - S(3) - S(1, 2, 3)
        c2 = S(1, 3) + S(0, 1) - S(1) - S(0, 1, 3)
        r = multiworld_mi(PureState(QUAD, v), PartitionModel("model-c", ROLES4))
        assert [r.terms[k] for k in TERM_NAMES] == pytest.approx([i_sys, i_env, c1, c2], abs=1e-9)

    def test_bell_pairs(self):
        r = multiworld_mi(PureState(QUAD, np.kron(bell(), bell())), PartitionModel("model-c", ROLES4))
        assert list(r.terms.values()) == pytest.approx([0, 0, 0, 0], abs=1e-12)
        assert r.I_total == pytest.approx(0.0, abs=1e-12)
        assert r.flags["case4"]

    def test_empty_environments(self):
        psi = linalg.haar_random_state([2, 3], 11)
        model = PartitionModel("custom", {"q0": "S1", "q1": "S2"})
        r = multiworld_mi(psi, model)
        assert r.I_total == pytest.approx(mutual_info(psi, [0], [1]), abs=1e-10)

    def test_outer_environment_traced(self):
        sp = MultipartiteSpace((("q1", 2), ("q2", 2), ("q3", 2), ("q4", 2), ("q5", 2)))
        psi = PureState(sp, ghz(5))
        r = multiworld_mi(psi, PartitionModel("model-c", dict(ROLES4, q5="E0")))
        assert not r.flags["case3"]
        rho = partial_trace_loops(np.outer(ghz(5), ghz(5)), [2] * 5, [0, 1, 2, 3])
        inner = multiworld_mi(DensityOperator(QUAD, rho), PartitionModel("model-c", ROLES4))
        assert r.I_total == pytest.approx(inner.I_total, abs=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32), st.booleans())
    def test_single_environment_is_chain_rule(self, seed, drop_first):
        psi = linalg.haar_random_state([2, 2, 2, 2], seed)
        sp = MultipartiteSpace((("s1", 2), ("s2", 2), ("e", 2), ("e0", 2)))
        psi = PureState(sp, psi.amplitudes)
        role = "E2" if drop_first else "E1"
        r = multiworld_mi(psi, PartitionModel("custom", {"s1": "S1", "s2": "S2", "e": role, "e0": "E0"}))
        assert r.flags["case2"]
        assert r.I_total == pytest.approx(r.composites["I(S1:S2|E)"], abs=1e-9)

    def test_wrong_model(self):
        psi = PureState(AB, bell())
        with pytest.raises(ArgumentError):
            multiworld_mi(psi, PartitionModel("model-a", {"A": "S", "B": "E0"}))

    def test_json_sorted(self):
        r = multiworld_mi(PureState(QUAD, ghz(4)), PartitionModel("model-c", ROLES4))
        text = r.to_json()
        assert text.endswith("\n") and '"I_total"' in text


class TestDemos:
    @staticmethod
    def _oracle(overlap):
        v = slit_state(overlap).amplitudes
        rho = partial_trace_loops(np.outer(v, v.conj()), [2, 2], [0])
        return 2 * abs(rho[0, 1])

    @pytest.mark.parametrize("o, want", [(0, 0.0), (1, 1.0), (0.5, 0.5), (0.3j, 0.3)])
    def test_slit(self, o, want):
        assert slit_visibility(o) == pytest.approx(want, abs=1e-12)
        assert slit_visibility(o) == pytest.approx(self._oracle(o), abs=1e-12)

    def test_slit_bad_overlap(self):
        with pytest.raises(ArgumentError):
            slit_visibility(1.5)

    @pytest.mark.parametrize("gt, want", [(0.0, 0.0), (math.pi / 4, 1.0), (math.pi / 2, 0.0)])
    def test_rabi(self, gt, want):
        assert rabi_entanglement(gt) == pytest.approx(want, abs=1e-10)

    def test_rabi_curve(self):
        for gt in np.linspace(0, math.pi / 2, 11):
            assert rabi_entanglement(gt) == pytest.approx(binary_entropy(math.cos(gt) ** 2), abs=1e-10)
