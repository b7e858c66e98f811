"""Monte Carlo engine: determinism, coupling, aggregation, and agreement
with the scalar per-realization pipeline."""

import math

import numpy as np
import pytest

from fdsched import power, scheduling, sim
from fdsched.model import ChannelRealization, SystemConfig, rates
from fdsched.sim import (
    BLOCK_SIZE,
    Scheduler,
    SweepSpec,
    derived_trial_seed,
    dominance_violations,
    resolve_config,
    run_coupled,
    run_sweep,
    run_trials,
    selected_sinr_samples,
)

CFG = SystemConfig(1.0, 1.0, 1e-9, 0.03, 1e-8, 5, 5)


class TestDeterminism:
    def test_bit_identical_across_workers(self):
        for sched in (Scheduler.A2_OPA, Scheduler.ES_FDHD, Scheduler.HD_TDD):
            a = run_trials(CFG, sched, 10_000, seed=5, workers=1)
            b = run_trials(CFG, sched, 10_000, seed=5, workers=3)
            assert a == b

    def test_trials_are_a_prefix_function_of_seed(self):
        # Trial i's draws depend only on (seed, i): growing n_trials keeps
        # the earlier trials' per-trial rates bit-identical.
        short = sim._run_arrays(CFG, Scheduler.A2_OPA, BLOCK_SIZE + 7, seed=12)
        long = sim._run_arrays(CFG, Scheduler.A2_OPA, 3 * BLOCK_SIZE, seed=12)
        for key in short:
            assert np.array_equal(short[key], long[key][: BLOCK_SIZE + 7])

    def test_seed_changes_output(self):
        a = run_trials(CFG, Scheduler.A1, 5_000, seed=1)
        b = run_trials(CFG, Scheduler.A1, 5_000, seed=2)
        assert a.mean_sum_rate != b.mean_sum_rate

    def test_n_trials_validation(self):
        with pytest.raises(ValueError):
            run_trials(CFG, Scheduler.A1, 0, seed=1)


class TestAggregation:
    def test_sum_rate_is_component_sum(self):
        stats = run_trials(CFG, Scheduler.A2_OPA, 20_000, seed=3)
        assert stats.mean_sum_rate == pytest.approx(
            stats.mean_ul_rate + stats.mean_dl_rate, abs=1e-12
        )
        assert 0.0 <= stats.fd_fraction <= 1.0
        assert stats.std_error > 0.0
        assert stats.n_trials == 20_000

    def test_std_error_scaling(self):
        small = run_trials(CFG, Scheduler.A1, 50_000, seed=8)
        large = run_trials(CFG, Scheduler.A1, 200_000, seed=8)
        ratio = small.std_error / large.std_error
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_single_trial(self):
        stats = run_trials(CFG, Scheduler.A1, 1, seed=4)
        assert stats.std_error == 0.0
        assert stats.n_trials == 1


class TestModeBookkeeping:
    def test_hd_tdd_never_fd(self):
        assert run_trials(CFG, Scheduler.HD_TDD, 2_000, seed=6).fd_fraction == 0.0

    def test_fixed_power_selectors_always_fd(self):
        for sched in (Scheduler.A1, Scheduler.A2, Scheduler.A3, Scheduler.ES_FD):
            assert run_trials(CFG, sched, 2_000, seed=6).fd_fraction == 1.0

    def test_opa_always_fd_without_interference(self, monkeypatch):
        # Zero-interference hook: silence the cross gains, no SI.
        config = SystemConfig(1.0, 1.0, 1.0, 1.0, 0.0, 1, 1)
        real_draw = sim._draw_block

        def quiet_draw(cfg, rng):
            g_ul, g_dl, g_x = real_draw(cfg, rng)
            return g_ul, g_dl, np.zeros_like(g_x)

        monkeypatch.setattr(sim, "_draw_block", quiet_draw)
        for sched in (Scheduler.A1_OPA, Scheduler.A2_OPA, Scheduler.A3_OPA):
            assert run_trials(config, sched, 2_000, seed=7).fd_fraction == 1.0


class TestAgainstScalarPipeline:
    SELECTORS = {
        Scheduler.A1: scheduling.select_a1,
        Scheduler.A2: scheduling.select_a2,
        Scheduler.A3: scheduling.select_a3,
        Scheduler.ES_FD: scheduling.select_es_fd,
        Scheduler.ES_FDHD: scheduling.select_es_fdhd,
    }

    def _replay_channels(self, config, seed, n):
        rng = sim._block_rng(seed, 0)
        g_ul, g_dl, g_x = sim._draw_block(config, rng)
        return [
            ChannelRealization(g_ul[i], g_dl[i], g_x[i], config.si_gain)
            for i in range(n)
        ]

    @pytest.mark.parametrize("sched", list(SELECTORS))
    def test_selector_rates_match(self, sched):
        config = SystemConfig(1.4, 0.9, 0.2, 0.1, 0.3, 4, 3)
        n = 200
        arrays = sim._run_arrays(config, sched, n, seed=21)
        for i, ch in enumerate(self._replay_channels(config, 21, n)):
            out = rates(ch, self.SELECTORS[sched](ch, config), config)
            assert arrays["r_ul"][i] == pytest.approx(out.r_ul, rel=1e-13, abs=1e-15)
            assert arrays["r_dl"][i] == pytest.approx(out.r_dl, rel=1e-13, abs=1e-15)

    def test_hd_tdd_matches(self):
        config = SystemConfig(1.4, 0.9, 0.2, 0.1, 0.3, 4, 3)
        n = 200
        arrays = sim._run_arrays(config, Scheduler.HD_TDD, n, seed=22)
        for i, ch in enumerate(self._replay_channels(config, 22, n)):
            out = scheduling.select_hd_tdd(ch, config)
            assert arrays["r_ul"][i] == pytest.approx(out.r_ul, rel=1e-13)
            assert arrays["r_dl"][i] == pytest.approx(out.r_dl, rel=1e-13)

    @pytest.mark.parametrize(
        "sched,base",
        [
            (Scheduler.A1_OPA, scheduling.select_a1),
            (Scheduler.A2_OPA, scheduling.select_a2),
            (Scheduler.A3_OPA, scheduling.select_a3),
        ],
    )
    def test_opa_schedulers_match(self, sched, base):
        config = SystemConfig(1.0, 1.0, 1e-9, 0.03, 1e-8, 4, 4)
        n = 300
        arrays = sim._run_arrays(config, sched, n, seed=23)
        n_fd = 0
        for i, ch in enumerate(self._replay_channels(config, 23, n)):
            final = power.opa_enhanced_schedule(ch, config, base)
            out = rates(ch, final, config)
            n_fd += final.mode is scheduling.DuplexMode.FD
            assert arrays["fd"][i] == (final.mode is scheduling.DuplexMode.FD)
            assert arrays["r_ul"][i] == pytest.approx(out.r_ul, rel=1e-13, abs=1e-15)
            assert arrays["r_dl"][i] == pytest.approx(out.r_dl, rel=1e-13, abs=1e-15)
        assert 0 < n_fd < n  # the operating point actually mixes modes


class TestCoupling:
    def test_coupled_runs_see_identical_draws(self):
        stats, arrays = run_coupled(
            CFG, [Scheduler.ES_FDHD, Scheduler.ES_FD, Scheduler.A2_OPA], 4_000, seed=31
        )
        top = arrays[Scheduler.ES_FDHD]["r_ul"] + arrays[Scheduler.ES_FDHD]["r_dl"]
        es = arrays[Scheduler.ES_FD]["r_ul"] + arrays[Scheduler.ES_FD]["r_dl"]
        assert np.all(top >= es)
        assert stats[Scheduler.ES_FDHD].mean_sum_rate >= stats[Scheduler.ES_FD].mean_sum_rate

    def test_dominance_check_flags_corrupted_arrays(self, monkeypatch):
        _, arrays = run_coupled(CFG, [Scheduler.ES_FDHD, Scheduler.A2_OPA], 1_000, seed=33)
        corrupted = dict(arrays)
        corrupted[Scheduler.ES_FDHD] = {
            "r_ul": arrays[Scheduler.ES_FDHD]["r_ul"] * 0.0,
            "r_dl": arrays[Scheduler.ES_FDHD]["r_dl"] * 0.0,
            "fd": arrays[Scheduler.ES_FDHD]["fd"],
        }
        assert dominance_violations(corrupted)
        monkeypatch.setattr(sim, "dominance_violations", lambda arrays: ["injected"])
        with pytest.raises(RuntimeError, match="injected"):
            run_coupled(CFG, [Scheduler.ES_FDHD], 100, seed=1)

    def test_selected_sinr_samples_shape_and_law(self):
        g_ul, g_dl = selected_sinr_samples(CFG, Scheduler.A1, 5_000, seed=35)
        assert g_ul.shape == (5_000,) and g_dl.shape == (5_000,)
        assert np.all(g_ul >= 0) and np.all(g_dl >= 0)
        with pytest.raises(ValueError):
            selected_sinr_samples(CFG, Scheduler.ES_FD, 100, seed=1)


class TestSweeps:
    def test_single_value_sweep_equals_direct_run(self):
        spec = SweepSpec(
            swept_parameter="si_cancellation_db",
            values=(80.0,),
            scheduler=Scheduler.A2_OPA,
            base_config={"k_u": 5, "k_d": 5},
            n_trials=5_000,
            seed=51,
        )
        rows = run_sweep(spec)
        assert len(rows) == 1
        config = resolve_config(spec.base_config, "si_cancellation_db", 80.0)
        direct = run_trials(config, Scheduler.A2_OPA, 5_000, derived_trial_seed(51, 0))
        assert rows[0].stats == direct

    def test_k_users_sweep_sets_both_sides(self):
        config = resolve_config({}, "k_users", 7)
        assert config.k_u == 7 and config.k_d == 7

    def test_pu_scale_rule(self):
        config = resolve_config({"pu_dbm_scale": 0.95, "p0_dbm": 20.0})
        assert config.pu_max == pytest.approx(10.0 ** (0.95 * 20.0 / 10.0), rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepSpec("p0_dbm", (), Scheduler.A1, {}, 100, 0)
        with pytest.raises(ValueError):
            SweepSpec("p0_dbm", (1.0, 3.0, 2.0), Scheduler.A1, {}, 100, 0)
        with pytest.raises(ValueError):
            SweepSpec("bandwidth", (1.0,), Scheduler.A1, {}, 100, 0)
        with pytest.raises(ValueError):
            SweepSpec("p0_dbm", (1.0,), Scheduler.A1, {}, 0, 0)
        with pytest.raises(ValueError):
            SweepSpec("p0_dbm", (1.0,), Scheduler.A1, {"bogus": 1}, 100, 0)

    def test_si_sweep_fd_fraction_monotone(self):
        spec = SweepSpec(
            swept_parameter="si_cancellation_db",
            values=tuple(float(v) for v in range(60, 111, 10)),
            scheduler=Scheduler.A2_OPA,
            base_config={"p0_dbm": 0.0, "pu_dbm": 0.0, "k_u": 5, "k_d": 5,
                         "bandwidth_hz": 1e7},
            n_trials=20_000,
            seed=53,
        )
        fracs = [pt.stats.fd_fraction for pt in run_sweep(spec)]
        assert all(b >= a for a, b in zip(fracs, fracs[1:]))
        assert fracs[-1] > fracs[0]
