"""Tests for planning, sampling and pruning the large network."""

import dataclasses

import numpy as np
import pytest

from ticket.bounds import SpectralMode, recycle_layer_budget
from ticket.construction import (
    PruneMode,
    PruneResult,
    Side,
    build_large,
    categorize_product,
    category_codes,
    derive_plan,
    evaluate_pruned,
    plan_large,
    prune,
    prune_batch,
    prune_recycle,
    recycle_schedule,
    sample_large,
    sup_error,
    verify_sup_error,
    virtual_response,
)
from ticket.construction.categories import describe_code
from ticket.decomposition import DEFAULT_GAMMA, GrdParams, interval_index
from ticket.errors import (
    DimensionError,
    ParameterError,
    PruningFailure,
    UnsupportedArchitectureError,
)
from ticket.network import (
    ActivationKind,
    Architecture,
    InputDomain,
    TargetNetwork,
    f_max,
    spectral_norm,
)
from ticket.sampling import draw_signed, generator, ranges_for_accuracy, uniform_inputs

GAMMA = DEFAULT_GAMMA
SINGLE = Architecture.uniform([1, 1])


def _pruned(plan, target, seeds=range(5)):
    """Sample and prune with the first seed that succeeds."""
    for seed in seeds:
        large = sample_large(plan, seed)
        try:
            return large, prune(large, target)
        except PruningFailure:
            continue
    pytest.fail(f"Pruning failed for every seed in {list(seeds)}")


def _single(weight: float) -> TargetNetwork:
    return TargetNetwork(SINGLE, (np.array([[weight]]),), 1.0)


class TestPlan:
    """Test planning and sampling of G."""

    def test_single_weight_structure(self):
        """n=(1,1) gives widths (1, M, 1) with magnitudes inside [alpha, beta]."""
        large = build_large(SINGLE, 0.1, 0.1, 1.0, PruneMode.THM1, seed=0)
        assert large.realized_widths == (1, large.M[0], 1)
        assert large.depth == 2
        for matrix in large.in_weights + large.out_weights:
            assert np.all(np.abs(matrix) >= large.range.alpha)
            assert np.all(np.abs(matrix) <= large.range.beta)

    def test_headline_width(self):
        """100-wide, 10-layer ReLU network at eps=delta=0.01: M_i / n^2 in [628, 630]."""
        plan = plan_large(Architecture.uniform([100] * 11), 0.01, 0.01, 1.0)
        assert all(628 <= m / 100**2 <= 630 for m in plan.M)

    def test_recycle_width_is_budget(self):
        """Recycle plans size each layer to the consumption budget."""
        arch = Architecture.uniform([3, 4, 2])
        plan = derive_plan(arch, 0.1, 0.1, 1.0, 0.05, PruneMode.RECYCLE)
        assert list(plan.M) == recycle_layer_budget(arch, plan.m, plan.k)
        assert plan.m is not None

    def test_mask_bits_cover_half_eps_w(self):
        """Each side is decomposed to eps_w / 2."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, PruneMode.THM1)
        assert plan.grd == GrdParams.create(0.005, 1.0)
        assert plan.m is None

    def test_non_relu_rejected(self):
        """The construction is ReLU-only."""
        arch = Architecture.uniform([2, 2], ActivationKind.TANH)
        with pytest.raises(UnsupportedArchitectureError):
            plan_large(arch, 0.1, 0.1, 1.0)

    def test_negative_seed(self):
        """Seeds must be non-negative."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        with pytest.raises(ParameterError):
            sample_large(plan, -1)

    def test_deterministic(self):
        """One seed, one network; another seed, another network."""
        plan = derive_plan(Architecture.uniform([2, 3, 2]), 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        a, b, c = sample_large(plan, 3), sample_large(plan, 3), sample_large(plan, 4)
        for x, y in zip(a.in_weights + a.out_weights, b.in_weights + b.out_weights, strict=True):
            np.testing.assert_array_equal(x, y)
        assert not np.array_equal(a.in_weights[0], c.in_weights[0])

    def test_layers_use_own_streams(self):
        """Layer 2 of a network matches the single-layer draw on the same stream."""
        plan = derive_plan(Architecture.uniform([2, 3, 2]), 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        large = sample_large(plan, 9)
        dist = plan.ranges.weight_dist()
        expected = draw_signed(dist, generator(9, "construction.in", 2), (plan.M[1], 3))
        np.testing.assert_array_equal(large.in_weights[1], expected)


class TestCategories:
    """Test sign patterns and magnitude intervals of products."""

    RANGES = ranges_for_accuracy(0.01, 1.0)
    K = GrdParams.create(0.005).k

    @pytest.mark.parametrize(
        "out_w,in_w,sign,side",
        [
            (0.5, 0.5, 1, Side.PLUS),
            (-0.5, -0.5, 1, Side.MINUS),
            (0.5, -0.5, 1, None),
            (-0.5, 0.5, 1, None),
            (0.5, -0.5, -1, Side.PLUS),
            (-0.5, 0.5, -1, Side.MINUS),
            (0.5, 0.5, -1, None),
            (0.5, 0.5, 0, None),
        ],
    )
    def test_sign_table(self, out_w, in_w, sign, side):
        """Side follows the signs of out_w, in_w and w*."""
        got_side, interval = categorize_product(out_w, in_w, sign, self.RANGES, GAMMA, self.K)
        assert got_side == side
        assert interval == interval_index(0.25, GAMMA, self.K)

    def test_sign_pattern_frequency(self):
        """Each of the four sign patterns has frequency 1/4 within 0.01."""
        dist = self.RANGES.weight_dist()
        ins = draw_signed(dist, generator(0, "test.cat", 0), (100_000,))
        outs = draw_signed(dist, generator(0, "test.cat", 1), (100_000,))
        for s_out in (1, -1):
            for s_in in (1, -1):
                freq = np.mean((np.sign(outs) == s_out) & (np.sign(ins) == s_in))
                assert abs(freq - 0.25) <= 0.01

    def test_codes_agree_with_scalar(self):
        """category_codes matches categorize_product entry by entry."""
        dist = self.RANGES.weight_dist()
        rng = generator(0, "test.codes")
        ins = draw_signed(dist, rng, (50, 3))
        outs = draw_signed(dist, rng, (2, 50))
        target = np.array([[0.3, -0.2, 0.0], [-0.7, 0.1, 0.9]])
        codes = category_codes(ins, outs, target, self.RANGES, GAMMA, self.K)
        assert codes.shape == (50, 2, 3)
        for t in range(50):
            for j_out in range(2):
                for j_in in range(3):
                    side, interval = categorize_product(
                        outs[j_out, t],
                        ins[t, j_in],
                        int(np.sign(target[j_out, j_in])),
                        self.RANGES,
                        GAMMA,
                        self.K,
                    )
                    code = int(codes[t, j_out, j_in])
                    if side is None or interval is None:
                        assert code == 0
                    else:
                        assert describe_code(code, self.K) == f"{side.value}:{interval}"

    def test_describe_code(self):
        """0 is none, then plus 1..k and minus k+1..2k."""
        assert describe_code(0, 5) == "none"
        assert describe_code(3, 5) == "plus:3"
        assert describe_code(8, 5) == "minus:3"


@pytest.mark.parametrize("mode", [PruneMode.THM1, PruneMode.RECYCLE])
class TestSingleWeight:
    """Prune a one-weight target in both modes."""

    def test_virtual_weights(self, mode, single_weight_target):
        """w* = 0.5 and eps_w = 0.01 give 0.495 <= w_plus, w_minus <= 0.5."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, mode)
        _, result = _pruned(plan, single_weight_target)
        for virtual in (result.virtual_plus[0], result.virtual_minus[0]):
            assert 0.495 - 1e-9 <= virtual[0, 0] <= 0.5 + 1e-12
        assert result.mode is mode

    @pytest.mark.parametrize("weight", [0.5, -0.5, 0.03])
    def test_pruned_output_matches_virtual_response(self, mode, weight):
        """relu of the kept paths equals relu(virtual_response) for every scalar input."""
        target = _single(weight)
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, mode)
        large, result = _pruned(plan, target)
        w_plus = result.virtual_plus[0][0, 0]
        w_minus = result.virtual_minus[0][0, 0]
        for y in (-1.0, -0.3, 0.0, 0.4, 1.0):
            out = evaluate_pruned(large, result, np.array([[y]]))[0, 0]
            expected = max(0.0, virtual_response(w_plus, w_minus, np.sign(weight), y))
            assert out == pytest.approx(expected, abs=1e-12)
            assert abs(out - max(0.0, weight * y)) <= 0.005 + 1e-9

    @pytest.mark.parametrize("weight", [0.0, 0.004])
    def test_negligible_weight_gets_empty_masks(self, mode, weight):
        """|w*| <= eps_w / 2 keeps no neuron and outputs zero."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, mode)
        large = sample_large(plan, 0)
        result = prune(large, _single(weight))
        assert result.kept_neurons == 0
        assert not result.assignments
        assert evaluate_pruned(large, result, np.array([[1.0], [-1.0]])).tolist() == [[0.0], [0.0]]


class TestVirtualResponse:
    """Test the per-weight response of the kept paths."""

    def test_branches(self):
        """w_plus when y w* >= 0, w_minus otherwise."""
        assert virtual_response(0.49, 0.48, 1, 2.0) == pytest.approx(0.98)
        assert virtual_response(0.49, 0.48, 1, -2.0) == pytest.approx(-0.96)
        assert virtual_response(-0.49, -0.48, -1, -1.0) == pytest.approx(0.49)
        assert virtual_response(-0.49, -0.48, -1, 1.0) == pytest.approx(-0.48)


@pytest.mark.parametrize("mode", [PruneMode.THM1, PruneMode.RECYCLE])
class TestMultiLayer:
    """Prune a random 3-4-2 target."""

    EPS_W = 0.05

    def _run(self, mode, target):
        plan = derive_plan(target.arch, 0.1, 0.1, 1.0, self.EPS_W, mode)
        return _pruned(plan, target)

    def test_sign_discipline(self, mode, small_target):
        """Every kept product carries the sign of its target weight."""
        large, result = self._run(mode, small_target)
        for key, t in result.assignments.items():
            w_star = small_target.weights[key.layer - 1][key.j_out, key.j_in]
            out_w = large.out_weights[key.layer - 1][key.j_out, t]
            in_w = large.in_weights[key.layer - 1][t, key.j_in]
            assert np.sign(out_w * in_w) == np.sign(w_star)
            assert (out_w > 0) == (key.side is Side.PLUS)

    def test_dominance_and_accuracy(self, mode, small_target):
        """|w_pm| <= |w*| and |w* - w_pm| <= eps_w / 2 for every weight."""
        _, result = self._run(mode, small_target)
        for w_star, plus, minus in zip(
            small_target.weights, result.virtual_plus, result.virtual_minus, strict=True
        ):
            for virtual in (plus, minus):
                assert np.all(np.abs(virtual) <= np.abs(w_star) + 1e-9)
                assert np.all(np.abs(w_star - virtual) <= self.EPS_W / 2 + 1e-9)

    def test_mask_sparsity(self, mode, small_target):
        """At most 2k kept neurons per target weight."""
        large, result = self._run(mode, small_target)
        assert result.kept_neurons <= 2 * large.plan.k * small_target.arch.num_weights
        for in_mask, out_mask in zip(result.in_masks, result.out_masks, strict=True):
            assert np.all(in_mask.sum(axis=1) <= 1)
            assert np.all(out_mask.sum(axis=0) <= 1)

    def test_consumption_within_width(self, mode, small_target):
        """No procedure looks past the sampled neurons."""
        large, result = self._run(mode, small_target)
        assert result.neurons_consumed is not None
        for used, width in zip(result.neurons_consumed, large.M, strict=True):
            assert 0 < used <= width

    def test_from_masks_round_trip(self, mode, small_target):
        """Rebuilding from masks gives the same assignments and virtual weights."""
        large, result = self._run(mode, small_target)
        rebuilt = PruneResult.from_masks(large, result.in_masks, result.out_masks, mode=mode)
        assert rebuilt.assignments == result.assignments
        for a, b in zip(rebuilt.virtual_plus, result.virtual_plus, strict=True):
            np.testing.assert_array_equal(a, b)


class TestRecycle:
    """Recycling-specific behaviour."""

    @pytest.mark.parametrize("n_out,n_in", [(3, 2), (2, 3), (4, 4), (1, 5)])
    def test_schedule_visits_each_pair_once(self, n_out, n_in):
        """All pairs once; no index repeats inside an outer iteration."""
        schedule = recycle_schedule(n_out, n_in)
        assert len(schedule) == max(n_out, n_in)
        pairs = [pair for steps in schedule for pair in steps]
        assert sorted(pairs) == [(o, i) for o in range(n_out) for i in range(n_in)]
        for steps in schedule:
            assert len({o for o, _ in steps}) == len(steps)
            assert len({i for _, i in steps}) == len(steps)

    def test_schedule_order(self):
        """n_out=3, n_in=2 rotates the output index."""
        assert recycle_schedule(3, 2) == [[(1, 0), (2, 1)], [(2, 0), (0, 1)], [(0, 0), (1, 1)]]

    def test_needs_recycle_plan(self, single_weight_target):
        """prune_recycle refuses batch plans."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, PruneMode.THM1)
        with pytest.raises(ParameterError):
            prune_recycle(sample_large(plan, 0), single_weight_target)

    def test_runs_out_of_neurons(self, single_weight_target):
        """A network narrower than one pool fails with the recycle mode recorded."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, PruneMode.RECYCLE)
        narrow = dataclasses.replace(plan, M=(plan.m - 1,))
        with pytest.raises(PruningFailure) as exc_info:
            prune_recycle(sample_large(narrow, 0), single_weight_target)
        assert exc_info.value.mode == "recycle"
        assert exc_info.value.layer == 1

    @pytest.mark.parametrize(("narrow", "k"), [(2, 3), (3, 3), (5, 3), (8, 2)])
    def test_worst_case_replenishment_against_width(self, narrow, k):
        """Full 2k replacements after all but the last step fit the width only for narrow <= k."""
        wide, m = 8, 40
        arch = Architecture.uniform([narrow, wide])
        worst = wide * (m + 2 * k * (narrow - 1))
        width = recycle_layer_budget(arch, m, k)[0]
        assert (worst <= width) == (narrow <= k)


class TestBatchFailures:
    """Failure reporting of the batch prune."""

    def test_too_few_neurons(self, single_weight_target):
        """Three neurons cannot fill 2k slots."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.01, PruneMode.THM1)
        tiny = dataclasses.replace(plan, M=(3,))
        with pytest.raises(PruningFailure) as exc_info:
            prune_batch(sample_large(tiny, 0), single_weight_target)
        failure = exc_info.value
        assert failure.layer == 1
        assert failure.pair == (0, 0)
        assert failure.mode == "thm1"
        assert failure.neurons_consumed == 3
        assert failure.category.startswith(("plus:", "minus:"))

    def test_mismatched_target(self, small_target):
        """G must match the target's widths."""
        plan = derive_plan(SINGLE, 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        with pytest.raises(DimensionError):
            prune(sample_large(plan, 0), small_target)


class TestPruneResult:
    """Test mask validation."""

    def test_two_in_connections_rejected(self):
        """A kept neuron with two in-connections is invalid."""
        plan = derive_plan(Architecture.uniform([2, 1]), 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        large = sample_large(plan, 0)
        in_mask = np.zeros(large.in_weights[0].shape, dtype=bool)
        out_mask = np.zeros(large.out_weights[0].shape, dtype=bool)
        in_mask[0, :] = True
        out_mask[0, 0] = True
        with pytest.raises(ValueError):
            PruneResult.from_masks(large, [in_mask], [out_mask])

    def test_zero_masks_evaluate_to_zero(self, small_target):
        """With nothing kept every output is zero."""
        plan = derive_plan(small_target.arch, 0.1, 0.1, 1.0, 0.05, PruneMode.THM1)
        large = sample_large(plan, 0)
        empty = PruneResult.from_masks(
            large,
            [np.zeros(w.shape, dtype=bool) for w in large.in_weights],
            [np.zeros(w.shape, dtype=bool) for w in large.out_weights],
        )
        outputs = evaluate_pruned(large, empty, uniform_inputs(3, 20, 0))
        np.testing.assert_array_equal(outputs, np.zeros((20, 2)))


class TestVerify:
    """Test network-level verification."""

    def test_sup_error(self):
        """Largest row-wise 2-norm gap."""
        ref = np.array([[0.0, 0.0], [1.0, 1.0]])
        cand = np.array([[3.0, 4.0], [1.0, 1.0]])
        assert sup_error(ref, cand) == 5.0
        assert sup_error(ref, ref) == 0.0

    def test_sup_error_monotone_in_domain(self):
        """Adding inputs never lowers the measured error."""
        rng = generator(0, "test.sup")
        ref, cand = rng.normal(size=(30, 3)), rng.normal(size=(30, 3))
        assert sup_error(ref[:10], cand[:10]) <= sup_error(ref, cand)

    def test_sup_error_shape_mismatch(self):
        """Outputs must have equal shapes."""
        with pytest.raises(DimensionError):
            sup_error(np.zeros((2, 2)), np.zeros((2, 3)))

    @pytest.mark.parametrize("mode", [PruneMode.THM1, PruneMode.RECYCLE])
    def test_pruned_network_within_eps(self, mode, small_target):
        """With F_max and explicit norms of |W*| the pruned G is eps-close to F."""
        eps = 0.1
        domain = InputDomain(uniform_inputs(3, 500, 0))
        norms = tuple(spectral_norm(np.abs(w)) for w in small_target.weights)
        for seed in range(5):
            large = build_large(
                small_target.arch,
                eps,
                0.1,
                1.0,
                mode,
                seed,
                f_max=f_max(small_target, domain),
                spectral_mode=SpectralMode.EXPLICIT,
                spectral_norms=norms,
            )
            try:
                result = prune(large, small_target)
            except PruningFailure:
                continue
            report = verify_sup_error(small_target, large, result, domain, eps)
            assert report.passed
            assert 0.0 <= report.sup_error <= eps
            assert report.num_inputs == 500
            for virtual, dominating in zip(
                report.per_layer_spectral, report.dominating_spectral, strict=True
            ):
                assert virtual <= dominating + 1e-6
            return
        pytest.fail("Pruning failed for every seed")
