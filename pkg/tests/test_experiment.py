"""
Tests for fault_complex.experiment — Monte Carlo batches
==========================================================

Covers:
- ExperimentSpec validation and derived properties
- Memory, stability and sustainable entry points
- Zero-noise batches never fail
- Reproducibility across repeated runs and worker counts
- Early stopping on a failure target
- Memory failure rule: base-code logicals on data layers, pinned readout layers
- Unresolved windows counted as failures
- CSV row layout
"""

from dataclasses import replace
from unittest.mock import patch

import numpy as np
import pytest

from fault_complex.chain import homology
from fault_complex.codes import Variant
from fault_complex.decoder import DecodeConfig, WindowConfig
from fault_complex.errors import DecoderInconsistencyError, SpecError
from fault_complex.experiment import (
    CSV_COLUMNS,
    ExperimentKind,
    ExperimentSpec,
    StopRule,
    TrialBatch,
    _side_contexts,
    build_fault_complex,
    run_memory,
    run_spec,
    run_stability,
    run_sustainable,
    run_trial,
)
from fault_complex.foliation import Side
from fault_complex.gf2 import BinVector
from fault_complex.noise import (
    PRIOR_CEIL,
    PRIOR_FLOOR,
    GkpSpec,
    PhenomenologicalSpec,
    boundary_mask,
)


def _spec(**overrides):
    base = dict(
        kind="memory",
        code="toric:2:3",
        delta=2,
        side="primal",
        noise=PhenomenologicalSpec(0.0),
        decode=DecodeConfig(osd_order=10),
        window=WindowConfig(1, 1),
        trials=12,
        master_seed=5,
        chunk_size=4,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Spec validation
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestExperimentSpec:

    def test_kind_from_string(self):
        assert _spec().kind is ExperimentKind.MEMORY

    def test_bad_side(self):
        with pytest.raises(SpecError):
            _spec(side="left")

    def test_bad_trials(self):
        with pytest.raises(SpecError):
            _spec(trials=0)

    def test_stability_rejects_full_rank(self):
        with pytest.raises(SpecError):
            _spec(kind="stability", variant="full_rank")

    def test_default_variants(self):
        assert _spec().repetition_spec.variant is Variant.FULL_RANK
        assert _spec(kind="stability").repetition_spec.variant is Variant.CYCLIC

    def test_sides(self):
        assert [s.value for s in _spec(side="both").sides] == ["primal", "dual"]

    def test_stop_rule_and_budget(self):
        assert _spec().stop_rule is StopRule.FIXED
        assert _spec().trial_budget == 12
        early = _spec(target_failures=3, max_trials=40)
        assert early.stop_rule is StopRule.TARGET_FAILURES
        assert early.trial_budget == 40

    def test_build_fault_complex(self):
        handle, F = build_fault_complex(_spec(delta=3))
        assert handle.size == 3
        assert F.n_rounds == 2
        assert F.primal_grade == 1


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Batches
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestBatches:

    def test_zero_noise_never_fails(self):
        batch = run_memory(_spec())
        assert batch.trials == 12
        assert batch.failures == 0
        assert batch.rate == 0.0
        assert batch.stderr == 0.0

    def test_zero_noise_both_sides(self):
        batch = run_memory(_spec(side="both"))
        assert batch.failures == 0

    def test_batch_metadata(self):
        batch = run_memory(_spec(name="smoke"))
        assert batch.experiment == "smoke"
        assert batch.L == 3
        assert batch.D == 2
        assert (batch.w, batch.c) == (1, 1)
        assert batch.rounds == 1
        assert batch.seed == 5

    def test_default_window_spans_all_rounds(self):
        batch = run_memory(_spec(window=None, delta=3))
        assert (batch.w, batch.c) == (2, 2)

    def test_reproducible(self):
        spec = _spec(noise=PhenomenologicalSpec(0.08), trials=16)
        assert run_memory(spec).failures == run_memory(spec).failures

    def test_worker_count_does_not_change_result(self):
        spec = _spec(noise=PhenomenologicalSpec(0.08), trials=16)
        assert run_memory(spec).failures == run_memory(replace(spec, workers=2)).failures

    def test_gkp_noise(self):
        batch = run_memory(_spec(noise=GkpSpec(20.0), trials=4))
        assert batch.noise_param == 20.0
        assert 0 <= batch.failures <= 4

    def test_early_stop(self):
        spec = _spec(noise=PhenomenologicalSpec(0.3), target_failures=1, max_trials=40)
        batch = run_memory(spec)
        assert batch.trials % 4 == 0
        assert batch.failures >= 1 or batch.trials == 40
        assert batch.stop_rule == "target_failures"

    def test_run_memory_checks_kind(self):
        with pytest.raises(SpecError):
            run_memory(_spec(kind="stability"))


class TestStabilityAndSustainable:

    def test_stability_zero_noise(self):
        batch = run_stability(_spec(kind="stability", delta=3))
        assert batch.kind == "stability"
        assert batch.failures == 0

    def test_stability_checks_kind(self):
        with pytest.raises(SpecError):
            run_stability(_spec())

    def test_sustainable_sweeps_rounds(self):
        batches = run_sustainable(_spec(kind="sustainable"), [2, 3])
        assert [b.rounds for b in batches] == [1, 2]

    def test_sustainable_needs_increasing_rounds(self):
        with pytest.raises(SpecError):
            run_sustainable(_spec(kind="sustainable"), [3, 3])
        with pytest.raises(SpecError):
            run_sustainable(_spec(kind="sustainable"), [])

    def test_run_spec_dispatch(self):
        assert len(run_spec(_spec())) == 1
        assert len(run_spec(_spec(kind="sustainable"), [2, 3, 4])) == 3
        assert [b.rounds for b in run_spec(_spec(kind="sustainable", delta=3))] == [2]


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Failure rule
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestMemoryFailureRule:

    def _context(self, **overrides):
        spec = _spec(**overrides)
        _, F = build_fault_complex(spec)
        return F, _side_contexts(F, spec)

    def test_one_row_per_base_logical(self):
        _, contexts = self._context(code="toric:3:2", delta=3)
        assert contexts[0].correlations.shape[0] == 3

    def test_4d_both_sides_expose_all_logicals(self):
        _, contexts = self._context(code="toric:4:2", delta=2, side="both")
        assert [ctx.correlations.shape[0] for ctx in contexts] == [6, 6]

    def test_logical_in_one_data_layer_is_failure(self):
        F, contexts = self._context(code="toric:3:2", delta=3)
        n_q = F.base.dim(2)
        logical = homology(F.base, 2).representatives[0]
        residual = np.zeros(F.n_primal, dtype=np.uint8)
        residual[n_q:2 * n_q] = logical.bits
        assert (F.D_X @ BinVector(residual)).is_zero()
        assert contexts[0].fails(residual)

    def test_error_moved_through_time_is_not_failure(self):
        F, contexts = self._context(code="toric:3:2", delta=3)
        r, n_q = F.R.rows, F.base.dim(2)
        column = r * F.base.dim(3) + 1 * n_q
        residual = F.complex.boundary(3).bits[:, column].copy()
        assert (F.D_X @ BinVector(residual)).is_zero()
        assert not contexts[0].fails(residual)

    def test_readout_layer_residual_is_failure(self):
        F, contexts = self._context()
        pinned = contexts[0].pinned
        assert pinned.tolist() == boundary_mask(F, Side.PRIMAL).tolist()
        residual = np.zeros(F.n_primal, dtype=np.uint8)
        residual[np.flatnonzero(pinned)[0]] = 1
        assert contexts[0].fails(residual)

    def test_stability_pins_nothing(self):
        _, contexts = self._context(kind="stability", delta=3)
        assert not contexts[0].pinned.any()

    def test_saturated_noise_keeps_readout_layers_clean(self):
        spec = _spec(noise=PhenomenologicalSpec(1.0), delta=3, window=WindowConfig(2, 2))
        _, F = build_fault_complex(spec)
        contexts = _side_contexts(F, spec)
        seen = {}

        def record(F_, side, syndrome, cfg, win):
            seen["priors"] = np.asarray(cfg.priors)
            raise DecoderInconsistencyError("stop")

        with patch("fault_complex.experiment.window_decode", side_effect=record):
            with pytest.raises(DecoderInconsistencyError):
                run_trial(F, spec, contexts, 0)
        pinned = contexts[0].pinned
        assert np.all(seen["priors"][pinned] == PRIOR_FLOOR)
        assert np.all(seen["priors"][~pinned] == PRIOR_CEIL)


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Unresolved windows
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestUnresolvedWindows:

    def _setup(self, window):
        spec = _spec(noise=PhenomenologicalSpec(1.0), delta=3, window=window)
        _, F = build_fault_complex(spec)
        return spec, F, _side_contexts(F, spec)

    def test_partial_window_counts_as_failure(self):
        spec, F, contexts = self._setup(WindowConfig(1, 1))
        with patch("fault_complex.experiment.window_decode",
                   side_effect=DecoderInconsistencyError("stuck")):
            assert run_trial(F, spec, contexts, 0) == (True, True)

    def test_full_window_inconsistency_propagates(self):
        spec, F, contexts = self._setup(WindowConfig(2, 2))
        with patch("fault_complex.experiment.window_decode",
                   side_effect=DecoderInconsistencyError("stuck")):
            with pytest.raises(DecoderInconsistencyError) as exc_info:
                run_trial(F, spec, contexts, 3)
        assert exc_info.value.diagnostics["trial"] == 3


# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━
#  Rows
# ━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━━

class TestTrialBatch:

    def _batch(self, failures=5, trials=100):
        return TrialBatch(
            experiment="e", kind="memory", code="toric:2:3", L=3, D=2, side="primal",
            w=1, c=1, rounds=4, noise_param=0.01, trials=trials, failures=failures, seed=1,
        )

    def test_rate_and_stderr(self):
        batch = self._batch()
        assert batch.rate == pytest.approx(0.05)
        assert batch.stderr == pytest.approx((0.05 * 0.95 / 100) ** 0.5)

    def test_row_columns(self):
        assert list(self._batch().to_row()) == CSV_COLUMNS

    def test_dict_adds_run_metadata(self):
        data = self._batch().to_dict()
        assert data["stop_rule"] == "fixed"
        assert data["unresolved"] == 0
