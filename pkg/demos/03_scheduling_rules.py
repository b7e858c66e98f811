#!/usr/bin/env python3
"""The three decoupled selection rules next to the exhaustive searches.

On a single snapshot: A1 grabs the strongest raw gains, A2 re-picks the DL
user by SINR given A1's uplink choice, A3 re-picks the UL user by its
signal-to-leakage ratio toward A1's downlink choice.  The exhaustive FD
search scans all pairs, and the FD/HD variant may abandon pairing entirely.
Averaged over many snapshots, the interference-aware rules close most of
the gap to the exhaustive search at a fraction of the cost.
"""

import numpy as np

from fdsched import (
    SystemConfig,
    draw_realization,
    rates,
    run_coupled,
    select_a1,
    select_a2,
    select_a3,
    select_es_fd,
    select_es_fdhd,
    select_hd_tdd,
)

# Interference-heavy regime so the rules actually disagree.
cfg = SystemConfig(p0_max=2.0, pu_max=1.5, sigma0_sq=0.05, sigmaD_sq=0.05,
                   si_gain=0.2, k_u=5, k_d=5)
ch = draw_realization(cfg, np.random.default_rng(99))

print("=== one snapshot, five rules ===")
for name, rule in [("A1", select_a1), ("A2", select_a2), ("A3", select_a3),
                   ("ES-FD", select_es_fd), ("ES-FDHD", select_es_fdhd)]:
    s = rule(ch, cfg)
    r = rates(ch, s, cfg)
    print(f"  {name:8s} -> ul={s.ul!s:>4} dl={s.dl!s:>4} mode={s.mode.value:5s} "
          f"sum={r.r_sum:6.3f} bps/Hz")
hd = select_hd_tdd(ch, cfg)
print(f"  {'HD-TDD':8s} -> half-and-half split          sum={hd.r_sum:6.3f} bps/Hz")

print("\n=== averaged over 100k coupled snapshots ===")
stats, _ = run_coupled(cfg, ["a1", "a2", "a3", "es-fd", "es-fdhd", "hd-tdd"],
                       n_trials=100_000, seed=1)
for sched, st in stats.items():
    print(f"  {sched.value:8s} mean sum rate = {st.mean_sum_rate:6.3f} "
          f"+- {st.std_error:.3f} bps/Hz")
print("  (identical seeds couple the draws, so the ordering is exact, not noisy)")
