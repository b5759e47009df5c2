"""End-to-end guarantees of the simulator, one test per guarantee.

Each test is self-contained and states its tolerances inline. Statistical
comparisons use the Monte Carlo standard errors of the runs involved; grid
comparisons share one master seed per test (common random numbers), so
adjacent points move together and trend assertions are meaningful at these
sample sizes.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

import fso_miso.cli as cli
from fso_miso import (
    Combiner,
    GaConfig,
    PhaseModel,
    PpmConfig,
    Scenario,
    ScenarioConfig,
    optimize_beam_radius,
    pe_asymptotic,
    pe_multi_array,
    pe_single_full,
    pe_single_perfect,
    pe_single_phase,
    pe_single_pointing,
    unconditional_pe,
)
from fso_miso.validation import (
    check_clt_gain,
    check_escape_stats,
    check_oracle_agreement,
    check_quadrature,
    check_tracker_variance,
)

pytestmark = pytest.mark.acceptance

MRC, EGC = Combiner.MRC, Combiner.EGC
WORKERS = 4


def _se(*results) -> float:
    return float(np.sqrt(sum(r.std_error**2 for r in results)))


def test_energy_integrals_match_simpson_oracle():
    t0 = time.perf_counter()
    result = check_quadrature(instances=50, rtol=1e-6)
    elapsed = time.perf_counter() - t0
    assert result.passed, result.line()
    assert elapsed < 60.0, f"quadrature cross-check took {elapsed:.1f}s"


def test_closed_forms_match_symbol_counting_oracle():
    t0 = time.perf_counter()
    result = check_oracle_agreement(
        trials=1_000_000,
        n_values=(1, 2, 3),
        m_values=(1, 4, 16),
        tol_se=3.0,
        workers=WORKERS,
    )
    elapsed = time.perf_counter() - t0
    assert result.passed, result.line()
    assert elapsed < 600.0, f"oracle agreement took {elapsed:.1f}s"


def test_tracker_variance_escape_rate_and_escape_counts():
    variance = check_tracker_variance(steps=100_000, a_values=(0.5, 0.9), rel_tol=0.02)
    assert variance.passed, variance.line()
    escape = check_escape_stats(draws=100_000)
    assert escape.passed, escape.line()


def test_coherent_sum_intensity_approaches_exponential_law():
    result = check_clt_gain(n_beams=50, samples=10_000, p_min=0.01)
    assert result.passed, result.line()


def test_one_array_with_coherent_beams_beats_separate_arrays():
    base = ScenarioConfig(
        scenario=Scenario.SINGLE_PERFECT,
        combiner=MRC,
        n_beams=3,
        side=2.0,
        rows=4,
        cols=4,
        radius=0.2,
        snr_db=10.0,
        trials=100_000,
        seed=314,
        ppm=PpmConfig(8),
    )
    for n in (3, 5):
        for comb in (MRC, EGC):
            for snr in (5.0, 10.0, 15.0, 20.0):
                single = unconditional_pe(
                    replace(base, n_beams=n, combiner=comb, snr_db=snr),
                    workers=WORKERS,
                )
                multi = unconditional_pe(
                    replace(
                        base,
                        scenario=Scenario.MULTI_ARRAY,
                        n_beams=n,
                        combiner=comb,
                        snr_db=snr,
                    ),
                    workers=WORKERS,
                )
                gap = multi.estimate - single.estimate
                assert gap > 3.0 * _se(single, multi), (
                    f"N={n} {comb.value} snr={snr}: single {single.estimate:.5f} "
                    f"vs multi {multi.estimate:.5f}"
                )


def test_alignment_gain_erodes_as_phase_and_pointing_errors_grow():
    # three beams whose lens offsets sit half a cycle/mm apart interfere
    # strongly across the whole array; phase noise and tracking escapes then
    # cost real energy and the beam-aligned receiver degrades toward (and
    # past) the no-alignment one
    base = ScenarioConfig(
        scenario=Scenario.SINGLE_PHASE_ERROR,
        combiner=MRC,
        n_beams=3,
        side=2.0,
        rows=3,
        cols=3,
        radius=0.2,
        snr_db=10.0,
        trials=60_000,
        seed=11,
        ppm=PpmConfig(8),
        offsets_u=(0.0, 0.5, -0.5),
        phase_model=PhaseModel("gaussian", 0.0),
    )
    sigma_phi_grid = (0.0, 0.3, 0.6, 1.0, 1.5, 2.2, 3.0)
    sigma_x_grid = (0.0, 0.05, 0.1, 0.2, 0.35, 0.6, 1.0)

    for comb in (MRC, EGC):
        nba = unconditional_pe(
            replace(base, scenario=Scenario.SINGLE_NO_ALIGNMENT, combiner=comb),
            workers=WORKERS,
        )
        curves = {
            "phase": [
                unconditional_pe(
                    replace(
                        base,
                        combiner=comb,
                        phase_model=PhaseModel("gaussian", s),
                    ),
                    workers=WORKERS,
                )
                for s in sigma_phi_grid
            ],
            "pointing": [
                unconditional_pe(
                    replace(
                        base,
                        scenario=Scenario.SINGLE_POINTING_ERROR,
                        combiner=comb,
                        phase_model=PhaseModel("none"),
                        sigma_x=s,
                    ),
                    workers=WORKERS,
                )
                for s in sigma_x_grid
            ],
        }
        for label, curve in curves.items():
            # clearly below the no-alignment level with no errors
            zero_gap = nba.estimate - curve[0].estimate
            assert zero_gap > 3.0 * _se(nba, curve[0]), (
                f"{comb.value}/{label}: aligned {curve[0].estimate:.5f} not below "
                f"no-alignment {nba.estimate:.5f}"
            )
            # non-decreasing along the error grid (allowing sampling noise)
            for a, b in zip(curve, curve[1:]):
                assert b.estimate - a.estimate >= -2.0 * _se(a, b), (
                    f"{comb.value}/{label}: Pe dropped from {a.estimate:.5f} "
                    f"to {b.estimate:.5f}"
                )
            # and by the end of the grid the advantage is gone
            top = curve[-1]
            assert top.estimate >= nba.estimate - 3.0 * _se(nba, top), (
                f"{comb.value}/{label}: never reached the no-alignment level"
            )


def test_returns_diminish_in_beams_and_cells():
    base = ScenarioConfig(
        scenario=Scenario.ASYMPTOTIC_UNIFORM_PHASE,
        combiner=MRC,
        n_beams=5,
        side=2.0,
        rows=4,
        cols=4,
        radius=0.2,
        snr_db=10.0,
        trials=200_000,
        seed=2718,
        ppm=PpmConfig(8),
    )
    for comb in (MRC, EGC):
        by_n = [
            unconditional_pe(replace(base, combiner=comb, n_beams=n), workers=WORKERS)
            for n in (3, 5, 7)
        ]
        d1 = by_n[0].estimate - by_n[1].estimate
        d2 = by_n[1].estimate - by_n[2].estimate
        assert d1 > 0.0 and d2 > 0.0, f"{comb.value}: Pe not improving in N"
        assert abs(d1) > abs(d2), f"{comb.value}: N increments not diminishing"

        by_m = [
            unconditional_pe(
                replace(base, combiner=comb, rows=g, cols=g), workers=WORKERS
            )
            for g in (2, 4, 8)
        ]
        if comb is MRC:
            d1 = by_m[0].estimate - by_m[1].estimate
            d2 = by_m[1].estimate - by_m[2].estimate
            assert d1 > 0.0 and d2 > 0.0, "MRC: Pe not improving in M"
            assert abs(d1) > abs(d2), "MRC: M increments not diminishing"
        else:
            # with the whole-array energy fixed, EGC is blind to the tiling
            spread = max(r.estimate for r in by_m) - min(r.estimate for r in by_m)
            assert spread < 3.0 * max(r.std_error for r in by_m), (
                f"EGC varies across M by {spread:.2e}"
            )


def test_genetic_search_finds_interior_radius_that_tracks_jitter():
    base = ScenarioConfig(
        scenario=Scenario.SINGLE_POINTING_ERROR,
        combiner=MRC,
        n_beams=5,
        side=2.0,
        rows=4,
        cols=4,
        radius=0.2,
        snr_db=3.0,
        trials=20_000,
        seed=97,
        ppm=PpmConfig(8),
        noise_reference_radius=0.2,
        offsets_u=(0.0, 0.5, -0.5, 1.0, -1.0),
    )
    ga = GaConfig(rho_min=0.02, rho_max=0.6, population=24, generations=16, seed=5)
    optima = []
    for sigma_x in (0.02, 0.05, 0.1):
        result = optimize_beam_radius(
            ga, base=replace(base, sigma_x=sigma_x), workers=WORKERS
        )
        assert ga.rho_min < result.rho_star < ga.rho_max
        # re-evaluate the winner and both bounds at higher precision
        fine = replace(base, sigma_x=sigma_x, trials=100_000)
        star = unconditional_pe(
            replace(fine, radius=result.rho_star), workers=WORKERS
        )
        for bound in (ga.rho_min, ga.rho_max):
            edge = unconditional_pe(replace(fine, radius=bound), workers=WORKERS)
            assert edge.estimate - star.estimate > 3.0 * _se(star, edge), (
                f"sigma_x={sigma_x}: rho*={result.rho_star:.4f} does not beat "
                f"the bound {bound}"
            )
        optima.append(result.rho_star)
    assert optima[0] <= optima[1] <= optima[2], (
        f"optimum should widen with jitter, got {optima}"
    )


def test_structural_invariants_hold_on_random_configurations():
    rng = np.random.default_rng(1234)
    checked = 0

    def assert_invariants(pe_mrc: float, pe_egc: float, m_cells: int, tag: str):
        nonlocal checked
        assert 0.0 <= pe_mrc <= 1.0 and 0.0 <= pe_egc <= 1.0, tag
        assert pe_mrc <= pe_egc + 1e-12, (
            f"{tag}: MRC {pe_mrc!r} worse than EGC {pe_egc!r}"
        )
        if m_cells == 1:
            assert pe_mrc == pe_egc, f"{tag}: single-cell combiners differ"
        checked += 1

    def random_channel(n):
        mags = np.sqrt(rng.exponential(0.5, n))
        alpha = mags**2
        betas = alpha / alpha.sum()
        return mags, betas

    def random_tensor(m, n):
        g = rng.normal(size=(m, n, n)) + 1j * rng.normal(size=(m, n, n))
        return 0.1 * np.einsum("mik,mjk->mij", g, g.conj())

    orders = (2, 4, 8, 16)

    for k in range(3000):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 10))
        order = int(orders[rng.integers(0, 4)])
        sigma = float(rng.uniform(0.05, 2.0))
        e = rng.uniform(0.0, 1.0, m)
        mags, betas = random_channel(n)
        pe_m = pe_multi_array(MRC, e, mags, betas, sigma, order)
        pe_e = pe_multi_array(EGC, e, mags, betas, sigma, order)
        assert_invariants(pe_m, pe_e, n * m, f"multi[{k}]")

    for k in range(3000):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 10))
        order = int(orders[rng.integers(0, 4)])
        sigma = float(rng.uniform(0.05, 2.0))
        tensor = random_tensor(m, n)
        mags, betas = random_channel(n)
        phases = rng.uniform(-np.pi, np.pi, n)
        pe_m = pe_single_phase(MRC, tensor, mags, betas, phases, sigma, order)
        pe_e = pe_single_phase(EGC, tensor, mags, betas, phases, sigma, order)
        assert_invariants(pe_m, pe_e, m, f"phase[{k}]")
        # zero-error anchor: the phased form at zero phase IS the perfect one
        assert pe_single_phase(
            MRC, tensor, mags, betas, np.zeros(n), sigma, order
        ) == pe_single_perfect(MRC, tensor, mags, betas, sigma, order)

    for k in range(2000):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 10))
        order = int(orders[rng.integers(0, 4)])
        sigma = float(rng.uniform(0.05, 2.0))
        tensor = random_tensor(m, n)
        mags, betas = random_channel(n)
        phases = rng.uniform(-np.pi, np.pi, n)
        esc = rng.uniform(0.0, 0.3, (n, m))
        rho_c = float(rng.uniform(0.05, 0.5))
        sigma_x = float(rng.uniform(0.01, 0.8))
        args = (tensor, mags, betas, phases, esc, rho_c, sigma_x, sigma, order)
        pe_m = pe_single_full(MRC, *args)
        pe_e = pe_single_full(EGC, *args)
        assert_invariants(pe_m, pe_e, m, f"full[{k}]")
        # zero-jitter anchors, exact: no escapes means the pure forms
        assert pe_single_full(
            MRC, tensor, mags, betas, phases, esc, rho_c, 0.0, sigma, order
        ) == pe_single_phase(MRC, tensor, mags, betas, phases, sigma, order)
        assert pe_single_pointing(
            MRC, tensor, mags, betas, esc, rho_c, 0.0, sigma, order
        ) == pe_single_perfect(MRC, tensor, mags, betas, sigma, order)

    for k in range(2000):
        m = int(rng.integers(1, 10))
        order = int(orders[rng.integers(0, 4)])
        sigma = float(rng.uniform(0.05, 2.0))
        w = float(rng.exponential(1.0))
        e = rng.uniform(0.0, 1.0, m)
        pe_m = pe_asymptotic(MRC, w, e, sigma, order)
        pe_e = pe_asymptotic(EGC, w, e, sigma, order)
        assert_invariants(pe_m, pe_e, m, f"asymptotic[{k}]")

    assert checked == 10_000


def test_sweep_command_reruns_are_byte_identical(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text(
        "[array]\nside = 2.0\nrows = 4\ncols = 4\nrho = 0.2\n\n"
        "[channel]\nn_beams = 3\nsnr_db = 10\n\n"
        "[sweep]\nvariable = snr_db\nvalues = 5 10\n"
        "scenarios = SinglePerfect, MultiArray\ncombiners = mrc, egc\n"
        "trials = 2000\nseed = 7\n"
    )
    outs = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
    assert cli.main(["sweep", "--config", str(ini), "--out", str(outs[0])]) == 0
    assert cli.main(["sweep", "--config", str(ini), "--out", str(outs[1])]) == 0
    assert (
        cli.main(
            ["sweep", "--config", str(ini), "--out", str(outs[2]), "--workers", "3"]
        )
        == 0
    )
    blobs = [p.read_bytes() for p in outs]
    assert blobs[0] == blobs[1], "rerun with the same seed changed the CSV"
    assert blobs[0] == blobs[2], "worker count changed the CSV"
