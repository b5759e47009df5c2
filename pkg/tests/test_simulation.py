import numpy as np
import pytest

import fso_miso._backend as backend
from fso_miso import (
    ChannelDraw,
    Combiner,
    ParameterError,
    PhaseModel,
    PpmConfig,
    Scenario,
    ScenarioConfig,
    confidence_interval,
    make_array,
    noise_sigma_from_snr,
    pe_asymptotic,
    reference_energy,
    resolve_offsets,
    symbol_level_oracle,
    unconditional_pe,
)
from fso_miso._streams import Role, TrialStream, uniform_to_exponential
from fso_miso.validation import conditional_pe

from conftest import make_link_config


# --- configuration validation -------------------------------------------------


def test_config_coerces_enum_strings():
    cfg = make_link_config(scenario="SinglePerfect", combiner="egc")
    assert cfg.scenario is Scenario.SINGLE_PERFECT
    assert cfg.combiner is Combiner.EGC
    assert cfg.m_cells == 16


def test_config_rejects_out_of_range_values():
    bad = [
        dict(n_beams=0),
        dict(trials=0),
        dict(seed=-1),
        dict(seed=2**64),
        dict(radius=0.0),
        dict(fading_mean=0.0),
        dict(sigma_x=-0.1),
        dict(rho_c=-0.1),
        dict(sigma_h_sq=0.0),
        dict(offsets_u=(0.0, 1.0)),  # three beams need three offsets
    ]
    for overrides in bad:
        with pytest.raises(ParameterError):
            make_link_config(**overrides)


def test_invalid_gamma_surfaces_at_run_time():
    cfg = make_link_config(gamma=1.5, trials=10)
    with pytest.raises(ParameterError):
        unconditional_pe(cfg)


def test_default_offset_pool_and_its_limit():
    u, v = resolve_offsets(make_link_config(n_beams=3))
    assert np.array_equal(u, [0.0, 4.0, -4.0])
    assert np.array_equal(v, np.zeros(3))
    u, _ = resolve_offsets(make_link_config(n_beams=5))
    assert np.array_equal(u, [0.0, 4.0, -4.0, -8.0, 11.0])
    with pytest.raises(ParameterError):
        resolve_offsets(
            make_link_config(scenario=Scenario.MULTI_ARRAY, n_beams=6)
        )
    u, v = resolve_offsets(
        make_link_config(n_beams=2, offsets_u=(1.0, -1.0), offsets_v=(0.5, 0.0))
    )
    assert np.array_equal(u, [1.0, -1.0])
    assert np.array_equal(v, [0.5, 0.0])


def test_confidence_interval_clips_and_validates():
    res = unconditional_pe(make_link_config(trials=500))
    lo, hi = confidence_interval(res, 0.95)
    assert 0.0 <= lo <= res.estimate <= hi <= 1.0
    assert hi - res.estimate == pytest.approx(1.959963984540054 * res.std_error)
    with pytest.raises(ParameterError):
        confidence_interval(res, 1.0)
    with pytest.raises(ParameterError):
        confidence_interval(res, 0.0)


# --- determinism ----------------------------------------------------------------


@pytest.mark.parametrize(
    "overrides",
    [
        dict(scenario=Scenario.MULTI_ARRAY),
        dict(
            scenario=Scenario.SINGLE_FULL,
            phase_model=PhaseModel("gaussian", 0.4),
            sigma_x=0.15,
        ),
        dict(scenario=Scenario.ASYMPTOTIC_UNIFORM_PHASE, n_beams=7),
    ],
)
def test_estimates_are_identical_for_any_worker_count(overrides):
    cfg = make_link_config(trials=9000, **overrides)
    results = [unconditional_pe(cfg, workers=w) for w in (1, 2, 5)]
    assert results[0].estimate == results[1].estimate == results[2].estimate
    assert results[0].std_error == results[1].std_error == results[2].std_error


def test_oracle_is_identical_for_any_worker_count():
    cfg = make_link_config(
        scenario=Scenario.SINGLE_PERFECT, trials=9000, snr_db=0.0, ppm=PpmConfig(2)
    )
    draw = ChannelDraw(
        magnitudes=np.array([1.0, 0.8, 0.6]),
        betas=np.array([0.5, 0.3, 0.2]),
        phases=np.zeros(3),
    )
    results = [symbol_level_oracle(cfg, draw, workers=w) for w in (1, 3)]
    assert results[0].estimate == results[1].estimate


def test_seed_changes_the_estimate():
    a = unconditional_pe(make_link_config(trials=4000, seed=1))
    b = unconditional_pe(make_link_config(trials=4000, seed=2))
    assert a.estimate != b.estimate


# --- engine vs closed forms -------------------------------------------------------


@pytest.mark.parametrize(
    "scenario",
    [
        Scenario.MULTI_ARRAY,
        Scenario.SINGLE_NO_ALIGNMENT,
        Scenario.SINGLE_PERFECT,
        Scenario.SINGLE_PHASE_ERROR,
    ],
)
@pytest.mark.parametrize("combiner", [Combiner.MRC, Combiner.EGC])
def test_single_trial_with_fixed_channel_equals_conditional_pe(scenario, combiner):
    draw = ChannelDraw(
        magnitudes=np.array([1.2, 0.7, 0.9]),
        betas=np.array([0.5, 0.2, 0.3]),
        phases=np.array([0.3, -0.5, 0.1]),
    )
    cfg = make_link_config(
        scenario=scenario,
        combiner=combiner,
        trials=1,
        fixed_channel=draw,
        phase_model=PhaseModel("gaussian", 0.5),
    )
    res = unconditional_pe(cfg)
    assert res.std_error == 0.0
    assert res.estimate == pytest.approx(conditional_pe(cfg, draw), rel=1e-12)


def test_zero_jitter_collapses_pointing_onto_perfect_sync():
    base = dict(trials=4000, seed=11)
    pointing = unconditional_pe(
        make_link_config(scenario=Scenario.SINGLE_POINTING_ERROR, sigma_x=0.0, **base)
    )
    perfect = unconditional_pe(
        make_link_config(scenario=Scenario.SINGLE_PERFECT, **base)
    )
    assert pointing.estimate == perfect.estimate

    full = unconditional_pe(
        make_link_config(
            scenario=Scenario.SINGLE_FULL,
            sigma_x=0.0,
            phase_model=PhaseModel("gaussian", 0.4),
            **base,
        )
    )
    phase = unconditional_pe(
        make_link_config(
            scenario=Scenario.SINGLE_PHASE_ERROR,
            phase_model=PhaseModel("gaussian", 0.4),
            **base,
        )
    )
    assert full.estimate == phase.estimate


def test_no_alignment_mrc_is_the_multi_array_receiver():
    base = dict(combiner=Combiner.MRC, trials=4000, seed=5, gamma=1.0)
    nba = unconditional_pe(
        make_link_config(scenario=Scenario.SINGLE_NO_ALIGNMENT, **base)
    )
    multi = unconditional_pe(make_link_config(scenario=Scenario.MULTI_ARRAY, **base))
    assert nba.estimate == multi.estimate


def test_asymptotic_trial_reproduced_from_first_principles():
    cfg = make_link_config(
        scenario=Scenario.ASYMPTOTIC_UNIFORM_PHASE,
        combiner=Combiner.EGC,
        n_beams=5,
        sigma_h_sq=0.3,
        trials=1,
        seed=321,
    )
    res = unconditional_pe(cfg)

    u = TrialStream(cfg.seed, Role.GAIN, 1).uniforms(0, 1)[0, 0]
    w = float(uniform_to_exponential(np.array([u]), 5 * 0.3)[0])
    arr = make_array(cfg.side, cfg.rows, cfg.cols)
    from fso_miso import cell_energy

    central = np.array([cell_energy(c, (0.0, 0.0), cfg.radius) for c in arr.cells])
    sigma_cell = noise_sigma_from_snr(
        cfg.snr_db, reference_energy(arr, cfg.radius)
    ) / np.sqrt(arr.m_cells)
    want = pe_asymptotic(Combiner.EGC, w, central, sigma_cell, cfg.ppm.order)
    assert res.estimate == pytest.approx(want, rel=1e-12)


# --- kernel backends ---------------------------------------------------------------


def _swap_backend(monkeypatch, name):
    impl = backend.get_backend(name)
    monkeypatch.setattr(backend, "quad_form_pe_batch", impl.quad_form_pe_batch)
    monkeypatch.setattr(backend, "oracle_errors_batch", impl.oracle_errors_batch)


@pytest.mark.skipif(
    "compiled" not in backend.available_backends(),
    reason="compiled extension not built",
)
def test_backends_agree_on_both_kernel_paths(monkeypatch):
    cfg = make_link_config(
        scenario=Scenario.SINGLE_PHASE_ERROR,
        combiner=Combiner.EGC,
        phase_model=PhaseModel("gaussian", 0.5),
        trials=20_000,
        snr_db=0.0,
        ppm=PpmConfig(2),
        seed=7,
    )
    draw = ChannelDraw(
        magnitudes=np.array([1.0, 0.8, 0.6]),
        betas=np.array([0.5, 0.3, 0.2]),
        phases=np.array([0.4, -0.2, 0.1]),
    )
    out = {}
    for name in ("compiled", "python"):
        _swap_backend(monkeypatch, name)
        out[name] = (
            unconditional_pe(cfg, workers=2).estimate,
            symbol_level_oracle(cfg, draw, workers=2).estimate,
        )
    assert out["compiled"][0] == pytest.approx(out["python"][0], abs=1e-12)
    assert out["compiled"][1] == pytest.approx(out["python"][1], abs=1e-12)


def test_backend_name_is_one_of_the_available_set():
    assert backend.backend_name in backend.available_backends()
    with pytest.raises(ValueError):
        backend.get_backend("fortran")


# --- the symbol-level oracle ----------------------------------------------------


def test_oracle_rejects_unsupported_scenarios_and_mismatched_draws():
    draw = ChannelDraw(
        magnitudes=np.ones(3), betas=np.full(3, 1 / 3), phases=np.zeros(3)
    )
    with pytest.raises(ParameterError):
        symbol_level_oracle(
            make_link_config(scenario=Scenario.SINGLE_FULL, trials=10), draw
        )
    short = ChannelDraw(
        magnitudes=np.ones(2), betas=np.full(2, 0.5), phases=np.zeros(2)
    )
    with pytest.raises(ParameterError):
        symbol_level_oracle(make_link_config(trials=10), short)


def test_oracle_tracks_the_closed_form_at_moderate_error_rates():
    cfg = make_link_config(
        scenario=Scenario.MULTI_ARRAY,
        combiner=Combiner.EGC,
        snr_db=0.0,
        trials=60_000,
        ppm=PpmConfig(2),
    )
    draw = ChannelDraw(
        magnitudes=np.array([1.0, 0.9, 1.1]),
        betas=np.array([0.3, 0.3, 0.4]),
        phases=np.zeros(3),
    )
    closed = conditional_pe(cfg, draw)
    res = symbol_level_oracle(cfg, draw, workers=2)
    assert 0.01 < closed < 0.99
    assert abs(res.estimate - closed) < 4.0 * res.std_error


def test_conditional_pe_rejects_mixture_scenarios():
    draw = ChannelDraw(
        magnitudes=np.ones(3), betas=np.full(3, 1 / 3), phases=np.zeros(3)
    )
    with pytest.raises(ParameterError):
        conditional_pe(
            make_link_config(scenario=Scenario.SINGLE_FULL, trials=10), draw
        )
