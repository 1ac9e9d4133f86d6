"""Tests for the closed-form sample-complexity bounds."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ticket.bounds import (
    BoundInputs,
    BoundReport,
    SpectralMode,
    compute_bound_report,
    epsilon_w,
    feasible_tau,
    k_prime,
    layer_samples_recycle,
    layer_samples_thm1,
    malach_layer_samples,
    malach_per_weight,
    propagation_bound,
    recycle_bits,
    recycle_layer_budget,
    recycle_pool_size,
    remark2_k_prime_bound,
    sequence_bound,
    simple_sequence_bound,
    thm1_bits,
    weight_count_ratio,
)
from ticket.errors import ParameterError
from ticket.network import ActivationKind, Architecture
from ticket.numeric import ceil_guarded
from ticket.sampling import generator

HEADLINE = Architecture.uniform([100] * 11)


def _inputs(mode: SpectralMode = SpectralMode.UNIT, **overrides) -> BoundInputs:
    params = {"arch": HEADLINE, "eps": 0.01, "delta": 0.01, "spectral_mode": mode}
    params.update(overrides)
    return BoundInputs(**params)


class TestBoundInputs:
    """Test input validation."""

    def test_explicit_needs_norms(self):
        """Explicit mode needs one norm per layer."""
        with pytest.raises(ParameterError):
            _inputs(SpectralMode.EXPLICIT, spectral_norms=(1.0, 2.0))

    def test_negative_norm(self):
        """Explicit norms must be non-negative."""
        arch = Architecture.uniform([2, 2])
        with pytest.raises(ParameterError):
            BoundInputs(arch, 0.1, 0.1, spectral_mode=SpectralMode.EXPLICIT, spectral_norms=(-1,))

    def test_delta_range(self):
        """delta must lie in (0, 1)."""
        with pytest.raises(ParameterError):
            _inputs(delta=1.0)

    def test_worst_case_norms(self):
        """Worst-case mode uses w_max n_max per layer."""
        assert _inputs(SpectralMode.WORST, w_max=0.5).layer_norms() == (50.0,) * 10


class TestEpsilonW:
    """Test the per-weight accuracy."""

    def test_headline_unit(self):
        """eps_w = 0.01 / (e 10 1000) for ReLU, unit norms, F_max=1."""
        assert epsilon_w(_inputs()) == pytest.approx(0.01 / (math.e * 10 * 1000), rel=1e-12)
        assert epsilon_w(_inputs()) == pytest.approx(3.679e-7, rel=1e-3)

    def test_worst_case_matches_closed_form(self):
        """Worst case with w_max=1: eps / (e l n_max^(3/2 + l))."""
        arch = Architecture.uniform([5, 5, 5, 5])
        inputs = BoundInputs(arch, 0.1, 0.1, spectral_mode=SpectralMode.WORST)
        assert epsilon_w(inputs) == pytest.approx(0.1 / (math.e * 3 * 5 ** (1.5 + 3)), rel=1e-12)

    def test_linear_in_eps(self):
        """eps_w is eps times a constant."""
        assert epsilon_w(_inputs(eps=0.02)) == pytest.approx(2 * epsilon_w(_inputs()), rel=1e-12)

    def test_logistic_lowers_factors(self):
        """Logistic layers contribute lambda = 1/4 to the spectral product."""
        arch = Architecture.uniform([4, 4, 4], ActivationKind.LOGISTIC)
        inputs = BoundInputs(
            arch, 0.1, 0.1, spectral_mode=SpectralMode.EXPLICIT, spectral_norms=(8.0, 2.0)
        )
        assert inputs.spectral_product() == pytest.approx(2.0)
        expected = 0.1 / (math.e * 2 * 0.25 * 8.0 * 2.0)
        assert epsilon_w(inputs) == pytest.approx(expected, rel=1e-12)

    def test_round_trip_with_propagation_bound(self):
        """propagation_bound(epsilon_w) recovers eps."""
        inputs = _inputs(SpectralMode.WORST)
        assert propagation_bound(inputs, epsilon_w(inputs)) == pytest.approx(0.01, rel=1e-12)

    @pytest.mark.parametrize(
        "smaller,larger",
        [
            ({"arch": Architecture.uniform([10] * 3)}, {"arch": Architecture.uniform([10] * 5)}),
            ({"arch": Architecture.uniform([10] * 3)}, {"arch": Architecture.uniform([20] * 3)}),
            ({"f_max": 1.0}, {"f_max": 3.0}),
        ],
    )
    def test_monotone(self, smaller, larger):
        """Deeper, wider or larger activations never increase eps_w."""
        assert epsilon_w(_inputs(**larger)) <= epsilon_w(_inputs(**smaller))

    def test_monotone_in_spectral_factor(self):
        """Larger explicit norms never increase eps_w."""
        arch = Architecture.uniform([3, 3, 3])
        values = [
            epsilon_w(
                BoundInputs(
                    arch, 0.1, 0.1, spectral_mode=SpectralMode.EXPLICIT, spectral_norms=(s, 2.0)
                )
            )
            for s in (0.5, 1.0, 2.0, 4.0)
        ]
        assert values == sorted(values, reverse=True)


class TestLayerSamples:
    """Test the per-layer widths of both sizing rules."""

    def test_thm1_headline_unit(self):
        """Unit norms at n_max=100, depth 10: M_i / n_max^2 is just under 630."""
        inputs = _inputs()
        per_weight = max(layer_samples_thm1(inputs, epsilon_w(inputs))) / 100**2
        assert 628 <= per_weight <= 630

    def test_thm1_headline_worst(self):
        """Worst-case norms: M_i / n_max^2 is at most 2450 and within 2%."""
        inputs = _inputs(SpectralMode.WORST)
        per_weight = max(layer_samples_thm1(inputs, epsilon_w(inputs))) / 100**2
        assert per_weight <= 2450
        assert abs(per_weight - 2450) <= 0.02 * 2450

    def test_recycle_headline(self):
        """Recycling rule: at most 144 (unit) and 574 (worst), each within 2%."""
        for mode, reported in ((SpectralMode.UNIT, 144), (SpectralMode.WORST, 574)):
            inputs = _inputs(mode)
            per_weight = max(layer_samples_recycle(inputs, epsilon_w(inputs))) / 100**2
            assert per_weight <= reported
            assert abs(per_weight - reported) <= 0.02 * reported

    def test_recycle_single_weight(self):
        """l=1, n=(1,1) reduces to ceil(2k'(1 + 4 ln(2k'/delta)))."""
        inputs = BoundInputs(Architecture.uniform([1, 1]), 0.1, 0.1)
        eps_w = epsilon_w(inputs)
        kp = k_prime(1.0, eps_w)
        expected = ceil_guarded(2 * kp * (1 + 4 * math.log(2 * kp / 0.1)))
        assert layer_samples_recycle(inputs, eps_w) == [expected]

    def test_thm1_monotone_in_eps_w(self):
        """Smaller eps_w never needs fewer neurons."""
        inputs = _inputs()
        widths = [layer_samples_thm1(inputs, e)[0] for e in (1e-6, 1e-5, 1e-4, 1e-3)]
        assert widths == sorted(widths, reverse=True)

    def test_degenerate_k_prime(self):
        """eps_w >= 3 w_max is rejected."""
        with pytest.raises(ParameterError):
            layer_samples_thm1(_inputs(), 3.0)

    def test_remark2_bound(self):
        """k' <= log_{3/2}(3 e l n_max^(3/2) / eps) in the unit setting."""
        inputs = _inputs()
        assert k_prime(1.0, epsilon_w(inputs)) <= remark2_k_prime_bound(HEADLINE, 0.01) + 1e-9

    def test_bit_counts(self):
        """The two k conventions differ by log_{3/2} 4."""
        eps_w = 1e-3
        assert thm1_bits(1.0, eps_w) == math.ceil(math.log(500) / math.log(1.5))
        assert recycle_bits(1.0, eps_w) == math.ceil(math.log(2000) / math.log(1.5))

    def test_recycle_budget(self):
        """max{n_i, n_(i-1)} m + 2(k-1) n_i n_(i-1) per layer."""
        arch = Architecture.uniform([3, 4, 2])
        assert recycle_layer_budget(arch, 100, 5) == [4 * 100 + 8 * 12, 4 * 100 + 8 * 8]

    def test_recycle_pool_size(self):
        """m = ceil(8 k' ln(k' / delta_w)) with delta_w = delta / (2 N_F)."""
        arch = Architecture.uniform([3, 4, 2])
        kp = k_prime(1.0, 1e-3)
        expected = ceil_guarded(8 * kp * math.log(kp / (0.1 / (2 * 20))))
        assert recycle_pool_size(arch, 0.1, 1.0, 1e-3) == expected


class TestWeightCountRatio:
    """Test N_G / N_F."""

    def test_uniform_exact(self):
        """M_i = 16 k' n^2 gives 32 n k'."""
        kp, n = 12.5, 7
        inputs = BoundInputs(Architecture.uniform([n] * 4), 0.1, 0.1)
        ratio = weight_count_ratio(inputs, [16 * kp * n * n] * 3)
        assert ratio == pytest.approx(32 * n * kp)

    def test_single_weight(self):
        """n=(1,1), M_1=m gives 2m."""
        inputs = BoundInputs(Architecture.uniform([1, 1]), 0.1, 0.1)
        assert weight_count_ratio(inputs, [37]) == 74

    def test_length_checked(self):
        """One M per layer."""
        with pytest.raises(ParameterError):
            weight_count_ratio(_inputs(), [1, 2])


class TestMalach:
    """Test the prior-work comparison bound."""

    def test_headline(self):
        """Headline setting: about 1.08e15 per weight, below 2e15."""
        value = malach_per_weight(_inputs())
        assert value == pytest.approx(1.076e15, rel=2e-3)
        assert value <= 2e15
        assert malach_layer_samples(_inputs()) == 100**2 * value

    def test_eps_scaling(self):
        """Halving eps multiplies the count by 4."""
        ratio = malach_per_weight(_inputs(eps=0.005)) / malach_per_weight(_inputs())
        assert ratio == pytest.approx(4.0, rel=1e-12)

    def test_depth_scaling(self):
        """Doubling the depth multiplies by 4 plus the log increase."""
        deep = malach_per_weight(_inputs(arch=Architecture.uniform([100] * 21)))
        expected = 4 * math.log(2 * 100**2 * 20 / 0.01) / math.log(2 * 100**2 * 10 / 0.01)
        assert deep / malach_per_weight(_inputs()) == pytest.approx(expected, rel=1e-12)


class TestBoundReport:
    """Test the assembled report."""

    def test_headline_report(self):
        """Per-weight values, combined minimum and ratio bound."""
        report = compute_bound_report(_inputs())
        assert 628 <= report.per_weight_thm1 <= 630
        assert report.per_weight_recycle <= 144
        assert report.M_combined == [min(a, b) for a, b in zip(report.M_thm1, report.M_recycle)]
        assert report.per_weight_combined == report.per_weight_recycle
        assert report.ratio <= report.ratio_thm1_bound
        assert report.k_prime == pytest.approx(39.25, abs=0.01)
        assert report.N_F == 100_000

    def test_combined_dominance(self):
        """M_combined <= M_thm1 and <= M_recycle in every mode."""
        for mode in (SpectralMode.UNIT, SpectralMode.WORST):
            report = compute_bound_report(_inputs(mode))
            for c, a, b in zip(report.M_combined, report.M_thm1, report.M_recycle, strict=True):
                assert c <= a and c <= b

    def test_validator_rejects_wrong_minimum(self):
        """A report whose combined list is not the minimum fails validation."""
        data = compute_bound_report(_inputs()).model_dump()
        data["M_combined"] = data["M_thm1"]
        with pytest.raises(ValueError):
            BoundReport.model_validate(data)

    def test_json_field_names(self):
        """Serialised names match the field list."""
        data = compute_bound_report(_inputs()).model_dump(mode="json")
        for name in ("eps_w", "k_prime", "k", "M_thm1", "M_recycle", "M_combined", "ratio"):
            assert name in data
        assert data["spectral_mode"] == "unit"


class TestSequenceBounds:
    """Test the positive-sequence lemma and its corollaries."""

    def test_constant_sequence(self):
        """a_t = b_t = 1 over 5 steps: bound 5e, true value 5."""
        a, b = [1.0] * 5, [1.0] * 5
        assert simple_sequence_bound(a, b) == pytest.approx(5 * math.e)
        assert sequence_bound(a, b, 0.0, 5.0) == pytest.approx(5 * math.e)

    def test_tau_one_feasible_for_large_a(self):
        """min a_t >= 2 makes tau=1 feasible."""
        a, b = [2.0, 3.0, 2.5], [0.5, 1.0, 0.25]
        assert sequence_bound(a, b, 0.2, 1.0) == pytest.approx(math.e * (0.2 + 0.5) * 15.0)

    def test_infeasible_tau(self):
        """Too many small terms for tau raises ParameterError."""
        with pytest.raises(ParameterError):
            sequence_bound([1.0, 1.0, 1.0], [1.0, 1.0, 1.0], 0.0, 1.0)

    def test_random_recursions(self):
        """The recursion never exceeds either bound over 1e4 random trials."""
        rng = generator(0, "test.sequence")
        for _ in range(10_000):
            steps = int(rng.integers(1, 11))
            a = rng.uniform(0.0, 3.0, steps).tolist()
            b = rng.uniform(0.0, 1.0, steps).tolist()
            x0 = float(rng.uniform(0.0, 1.0))
            x = x0
            for a_t, b_t in zip(a, b, strict=True):
                x = a_t * x + b_t
            tau = feasible_tau(a, 1.5)
            assert x <= sequence_bound(a, b, x0, tau) * (1 + 1e-12)

            y = 0.0
            for a_t, b_t in zip(a, b, strict=True):
                y = a_t * y + b_t
            assert y <= simple_sequence_bound(a, b) * (1 + 1e-12)


class TestFeasibleTau:
    """Test the feasible tau choice."""

    def test_all_large(self):
        """All a_t >= 2 with x=2 gives tau=1."""
        assert feasible_tau([2.0, 4.0], 2.0) == 1.0

    def test_counting(self):
        """(0.5, 0.5, 3) with x=2 gives 2."""
        assert feasible_tau([0.5, 0.5, 3.0], 2.0) == 2.0

    def test_golden_ratio(self):
        """x = phi gives max{phi, |{a_t < phi}|}."""
        phi = (1 + math.sqrt(5)) / 2
        assert feasible_tau([1.0, 3.0], phi) == pytest.approx(phi)
        assert feasible_tau([1.0, 1.2, 1.5, 3.0], phi) == 3.0

    def test_x_must_exceed_one(self):
        """x <= 1 is rejected."""
        with pytest.raises(ParameterError):
            feasible_tau([1.0], 1.0)

    @settings(max_examples=200)
    @given(
        a=st.lists(st.floats(0.0, 5.0), min_size=1, max_size=20),
        x=st.floats(1.01, 4.0),
    )
    def test_always_feasible(self, a, x):
        """|{a_t < 1 + 1/tau}| <= tau."""
        tau = feasible_tau(a, x)
        threshold = (1 + 1 / tau) * (1 - 1e-12)
        assert sum(1 for a_t in a if a_t < threshold) <= tau
