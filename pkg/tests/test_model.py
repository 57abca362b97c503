import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_profile
from wlpsched.model import (InherentlyInfeasibleError, InvalidInputError, ParallelismProfile,
                            ProfileError, Task, TaskSystem, compute_ell, compute_k,
                            compute_lambda, derive, inherently_infeasible, to_rat,
                            utilization, validate_profile)

TAU1 = Task("t1", 6, 4, ("1.0", "1.5", "2.0"))
TAU2 = Task("t2", 3, 4, ("1.0", "1.2", "1.3"))


class TestRationals:
    def test_decimal_strings_are_exact(self):
        assert to_rat("1.1") == F(11, 10)
        assert to_rat("2/3") == F(2, 3)

    def test_float_goes_through_shortest_repr(self):
        assert to_rat(1.1) == F(11, 10)

    @pytest.mark.parametrize("bad", ["abc", "1/0", True, None, [1]])
    def test_rejects_non_numbers(self, bad):
        with pytest.raises(InvalidInputError):
            to_rat(bad)

    def test_lowest_terms(self):
        q = to_rat("0.50")
        assert (q.numerator, q.denominator) == (1, 2)


class TestValidateProfile:
    def test_example_profile_ok(self):
        assert validate_profile(["1.0", "1.5", "2.0"]).ok

    def test_single_entry_is_vacuous(self):
        assert validate_profile(["1.0"]).ok

    def test_ratio_bound_is_strict(self):
        rep = validate_profile(["1.0", "2.0"])
        assert not rep.ok
        assert [(v.constraint, v.indices) for v in rep.violations] == [("ratio", (1, 2))]

    def test_superlinear_jump_reports_ratio_at_four_five(self):
        rep = validate_profile(["1.0", "1.1", "1.2", "1.3", "4.9"])
        kinds = {(v.constraint, v.indices) for v in rep.violations}
        assert ("ratio", (4, 5)) in kinds
        # 1.3 * 5/4 = 1.625 is the largest admissible value, exclusive
        ratio = next(v for v in rep.violations if v.constraint == "ratio")
        assert "13/8" in ratio.detail

    def test_non_increasing(self):
        rep = validate_profile(["1.0", "1.0"])
        assert ("increasing", (1, 2)) in {(v.constraint, v.indices) for v in rep.violations}

    def test_convex_increments(self):
        rep = validate_profile(["1.0", "1.2", "1.5"])
        assert [(v.constraint, v.indices) for v in rep.violations] == [("concave", (1, 2, 3))]

    def test_equal_increments_allowed(self):
        assert validate_profile(["1.0", "1.5", "2.0"]).ok

    @pytest.mark.parametrize("bad", [[], ["0"], ["1.0", "-1"]])
    def test_input_errors_are_distinct(self, bad):
        with pytest.raises(InvalidInputError):
            validate_profile(bad)

    def test_constructor_raises_profile_error(self):
        with pytest.raises(ProfileError) as exc:
            ParallelismProfile(["1.0", "2.0"])
        assert exc.value.violations[0].indices == (1, 2)


def _pairwise_ok(g):
    g = [F(0)] + list(g)
    m = len(g) - 1
    for j in range(1, m + 1):
        for jp in range(j + 1, m + 1):
            if not g[j] < g[jp]:
                return False
            if not g[jp] / g[j] < F(jp, j):
                return False
    return True


profiles = st.lists(st.fractions(min_value=F(1, 10), max_value=4, max_denominator=12),
                    min_size=1, max_size=8)


class TestProfileProperties:
    @settings(max_examples=300, deadline=None)
    @given(profiles)
    def test_adjacent_checks_imply_pairwise(self, g):
        if validate_profile(g).ok:
            assert _pairwise_ok(g)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 8))
    def test_generated_profiles_pass_pairwise(self, seed, m):
        g = random_profile(random.Random(seed), m).gammas
        assert _pairwise_ok(g)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(2, 7))
    def test_generalized_increments(self, seed, m):
        g = [F(0)] + list(random_profile(random.Random(seed), m).gammas)
        for j in range(1, m + 1):
            for jp in range(j + 1, m + 1):
                for c in range(1, m - jp + 1):
                    for d in range(1, m - j + 1):
                        if j + d <= jp + c:
                            assert (g[jp + c] - g[jp]) / c <= (g[j + d] - g[j]) / d

    def test_secant_form_needs_ordered_intervals(self):
        # a valid profile where the secant over [2, 3] beats the one over [1, 4]
        g = [F(0)] + list(ParallelismProfile(["1.85", "3.1", "4.35", "5.05"]).gammas)
        assert (g[3] - g[2]) / 1 > (g[4] - g[1]) / 3

    def test_prefix_of_valid_profile_is_valid(self):
        p = ParallelismProfile(["1.0", "1.5", "1.9", "2.2"])
        for m in range(1, 5):
            assert validate_profile(p.prefix(m)).ok


class TestDerived:
    def test_utilization(self):
        assert utilization(TAU1) == F(3, 2)
        assert utilization(TAU2) == F(3, 4)
        assert utilization(Task("x", 4, 4, ["1"])) == 1

    def test_k(self):
        assert (compute_k(TAU1), compute_k(TAU2)) == (1, 0)

    def test_ell(self):
        assert compute_ell(TAU1) == 1
        assert compute_ell(TAU2) == F(3, 4)

    def test_lambda(self):
        assert compute_lambda(TAU1) == 2
        assert compute_lambda(TAU2) == F(3, 4)

    def test_u_equal_gamma1_gives_full_ell(self):
        t = Task("x", 3, 2, ["1.5", "2.5"])
        assert (compute_k(t), compute_ell(t)) == (0, 1)

    def test_fractional_lambda(self):
        # two processors for 1/4 and three for 3/4 of each unit
        t = Task("x", 45, 20, ["1.0", "1.8", "2.4"])
        d = derive(t)
        assert (d.k, d.ell, d.lam) == (2, F(3, 4), F(11, 4))

    def test_inherently_infeasible(self):
        t = Task("x", 8, 4, ["1.0", "1.5", "1.8"])
        with pytest.raises(InherentlyInfeasibleError) as exc:
            compute_k(t)
        assert exc.value.tasks == [t]
        assert inherently_infeasible(TaskSystem((TAU1, t), 3)) == [t]

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 6))
    def test_invariants(self, seed, m):
        rng = random.Random(seed)
        prof = random_profile(rng, m)
        T = rng.randint(2, 30)
        C = rng.randint(1, int(prof.gammas[-1] * T))
        d = derive(Task("x", C, T, prof))
        g = [F(0)] + list(prof.gammas)
        assert 0 < d.ell <= 1
        assert d.lam == d.k + d.ell
        assert 0 <= d.k < m
        if d.k >= 1:
            assert g[d.k] < d.utilization
        else:
            assert d.utilization <= g[1]
        assert d.utilization <= g[d.k + 1]
        # the rate mixture reproduces u exactly
        assert d.ell * g[d.k + 1] + (1 - d.ell) * g[d.k] == d.utilization

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 6))
    def test_lambda_monotone_in_wcet(self, seed, m):
        rng = random.Random(seed)
        prof = random_profile(rng, m)
        T = rng.randint(2, 20)
        top = int(prof.gammas[-1] * T)
        lams = [compute_lambda(Task("x", C, T, prof)) for C in range(1, top + 1)]
        assert lams == sorted(lams)

    def test_reproducible(self):
        assert derive(TAU2) == derive(Task("t2", 3, 4, ("1.0", "1.2", "1.3")))


class TestTaskSystem:
    def test_basic(self):
        s = TaskSystem((TAU1, TAU2), 3)
        assert s.n == 2 and s.task(1) is TAU1 and s.hyperperiod() == 4

    def test_profile_length_must_match(self):
        with pytest.raises(InvalidInputError):
            TaskSystem((TAU1,), 2)

    @pytest.mark.parametrize("C,T", [(0, 4), (1, 0), (1.5, 4)])
    def test_integer_parameters(self, C, T):
        with pytest.raises(InvalidInputError):
            Task("x", C, T, ["1"])

    def test_with_processors_uses_prefix(self):
        s = TaskSystem((TAU1, TAU2), 3).with_processors(2)
        assert s.processors == 2 and s.task(1).profile.gammas == (F(1), F(3, 2))
