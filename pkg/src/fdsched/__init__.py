"""Full-duplex cellular user scheduling, binary optimal power allocation,
and closed-form Rayleigh-fading sum-rate analysis, with a deterministic
Monte Carlo engine and numerical quadrature as mutual cross-checks."""

__version__ = "0.1.0"

from .analysis import (
    AnalyticalParams,
    AsymptoticRate,
    ClosedFormRate,
    QuadratureError,
    asymptotic_rate_a1,
    avg_rate_a1,
    avg_rate_a2,
    avg_rate_integral,
    avg_rate_ul_closed,
    cdf_sinr_dl_a1,
    cdf_sinr_dl_a2,
    cdf_sinr_ul,
)
from .model import (
    ChannelRealization,
    RateBreakdown,
    SystemConfig,
    config_from_db,
    draw_realization,
    rates,
    sinr_dl,
    sinr_ul,
)
from .power import OpaDecision, eta, opa, opa_enhanced_schedule, zeta
from .scheduling import (
    DuplexMode,
    Schedule,
    select_a1,
    select_a2,
    select_a3,
    select_es_fd,
    select_es_fdhd,
    select_hd_tdd,
)
from .sim import (
    Scheduler,
    SweepPoint,
    SweepSpec,
    TrialStats,
    derived_trial_seed,
    resolve_config,
    run_coupled,
    run_sweep,
    run_trials,
    selected_sinr_samples,
)
from .specfun import exp_integral_ei, harmonic_number, xi_n

__all__ = [
    "AnalyticalParams",
    "AsymptoticRate",
    "ChannelRealization",
    "ClosedFormRate",
    "DuplexMode",
    "OpaDecision",
    "QuadratureError",
    "RateBreakdown",
    "Schedule",
    "Scheduler",
    "SweepPoint",
    "SweepSpec",
    "SystemConfig",
    "TrialStats",
    "asymptotic_rate_a1",
    "avg_rate_a1",
    "avg_rate_a2",
    "avg_rate_integral",
    "avg_rate_ul_closed",
    "cdf_sinr_dl_a1",
    "cdf_sinr_dl_a2",
    "cdf_sinr_ul",
    "config_from_db",
    "derived_trial_seed",
    "draw_realization",
    "eta",
    "exp_integral_ei",
    "harmonic_number",
    "opa",
    "opa_enhanced_schedule",
    "rates",
    "resolve_config",
    "run_coupled",
    "run_sweep",
    "run_trials",
    "select_a1",
    "select_a2",
    "select_a3",
    "select_es_fd",
    "select_es_fdhd",
    "select_hd_tdd",
    "selected_sinr_samples",
    "sinr_dl",
    "sinr_ul",
    "xi_n",
    "zeta",
]
