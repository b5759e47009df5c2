"""Self-check suites: independent oracles cross-checking the production
paths, exposed to the CLI `validate` command and reused by the test suite.

Design rule: every oracle here is computed by a route the production code
never takes (brute-force composite Simpson instead of erf/adaptive
quadrature, symbol counting instead of closed forms, long AR trajectories
instead of the covariance recursion), so agreement is evidence, not
tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.stats import chisquare, kstest

from .channel import ChannelDraw, PhaseModel, allocate_power, sample_fading
from .detection import (
    Combiner,
    PpmConfig,
    pe_multi_array,
    pe_single_no_alignment,
    pe_single_perfect,
    pe_single_phase,
)
from .errors import ParameterError
from .geometry import Cell, cell_energy, cross_energy
from .pointing import (
    TrackerParams,
    TrackerState,
    escape_probability,
    n0_pmf,
    sample_alignment,
    step,
    steady_state_sigma,
)
from .simulation import Scenario, ScenarioConfig, symbol_level_oracle


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


# --- independent quadrature oracle --------------------------------------


def simpson_cell_energy(
    cell: Cell,
    center: tuple[float, float],
    radius: float,
    peak_intensity: float = 1.0,
    n: int = 1024,
) -> float:
    """Brute-force 2-D composite Simpson integration of the beam intensity."""
    x = np.linspace(cell.x_lo, cell.x_hi, n + 1)
    y = np.linspace(cell.y_lo, cell.y_hi, n + 1)
    gx = np.exp(-((x - center[0]) ** 2) / (2.0 * radius**2))
    gy = np.exp(-((y - center[1]) ** 2) / (2.0 * radius**2))
    f = (peak_intensity / radius**2) * gx[:, None] * gy[None, :]
    return float(simpson(simpson(f, x=y, axis=1), x=x))


def simpson_cross_energy(
    cell: Cell,
    delta_u: float,
    delta_v: float,
    radius: float,
    peak_intensity: float = 1.0,
    gamma: float = 1.0,
    n: int = 2048,
) -> complex:
    """Brute-force Simpson integration of the modulated cross-intensity."""
    x = np.linspace(cell.x_lo, cell.x_hi, n + 1)
    y = np.linspace(cell.y_lo, cell.y_hi, n + 1)
    fx = np.exp(-(x**2) / (2.0 * radius**2) - 2j * np.pi * delta_u * x)
    fy = np.exp(-(y**2) / (2.0 * radius**2) - 2j * np.pi * delta_v * y)
    f = (gamma * peak_intensity / radius**2) * fx[:, None] * fy[None, :]
    return complex(simpson(simpson(f, x=y, axis=1), x=x))


def check_quadrature(
    seed: int = 20240801, instances: int = 50, rtol: float = 1e-6
) -> CheckResult:
    """Production energy integrals vs the Simpson oracle on random cases."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(instances):
        radius = rng.uniform(0.1, 0.4)
        lam = rng.uniform(0.5, 2.0)
        width = rng.uniform(0.05, 1.2)
        height = rng.uniform(0.05, 1.2)
        x_lo = rng.uniform(-1.2, 1.2 - width)
        y_lo = rng.uniform(-1.2, 1.2 - height)
        cell = Cell(0, x_lo, x_lo + width, y_lo, y_lo + height)

        # redraw centers so far from the cell that the energy underflows;
        # relative error is meaningless at magnitudes ~1e-12 * peak. a
        # coarse grid is enough to sort kept instances from skipped ones
        for _ in range(100):
            cx, cy = rng.uniform(-0.8, 0.8, size=2)
            if simpson_cell_energy(cell, (cx, cy), radius, lam, n=64) >= 1e-3 * lam:
                break
        got = cell_energy(cell, (cx, cy), radius, lam)
        want = simpson_cell_energy(cell, (cx, cy), radius, lam)
        worst = max(worst, abs(got - want) / abs(want))

        # same guard for the cross term, which also cancels at large spacing
        for _ in range(100):
            du, dv = rng.uniform(-6.0, 6.0, size=2)
            gamma = rng.uniform(0.2, 1.0)
            coarse = simpson_cross_energy(cell, du, dv, radius, lam, gamma, n=64)
            if abs(coarse) >= 1e-3 * lam:
                break
        want_c = simpson_cross_energy(cell, du, dv, radius, lam, gamma)
        got_c = cross_energy(cell, du, dv, radius, lam, gamma)
        worst = max(worst, abs(got_c - want_c) / abs(want_c))
    passed = worst < rtol
    return CheckResult(
        "quadrature-cross-check",
        passed,
        f"{instances} random instances, worst rel err {worst:.3e} (tol {rtol:g})",
    )


# --- closed-form vs symbol-counting oracle -------------------------------


def conditional_pe(config: ScenarioConfig, draw: ChannelDraw) -> float:
    """Closed-form conditional Pe at a fixed channel draw.

    Covers the scenarios whose conditional law is fully determined by the
    draw (the same set the symbol-level oracle accepts).
    """
    from .simulation import _Context  # shared precomputation

    ctx = _Context(config)
    sig = ctx.sigma_cell
    order = config.ppm.order
    comb = config.combiner
    if config.scenario is Scenario.MULTI_ARRAY:
        return pe_multi_array(
            comb, ctx.central, draw.magnitudes, draw.betas, sig, order
        )
    if config.scenario is Scenario.SINGLE_NO_ALIGNMENT:
        return pe_single_no_alignment(
            comb, ctx.single_central, draw.magnitudes, draw.betas, sig, order
        )
    if config.scenario is Scenario.SINGLE_PERFECT:
        return pe_single_perfect(
            comb, ctx.tensor, draw.magnitudes, draw.betas, sig, order
        )
    if config.scenario is Scenario.SINGLE_PHASE_ERROR:
        return pe_single_phase(
            comb, ctx.tensor, draw.magnitudes, draw.betas, draw.phases, sig, order
        )
    raise ParameterError(
        f"no fixed-draw closed form for scenario {config.scenario.value}"
    )


_AGREEMENT_SCENARIOS = (
    Scenario.MULTI_ARRAY,
    Scenario.SINGLE_NO_ALIGNMENT,
    Scenario.SINGLE_PERFECT,
    Scenario.SINGLE_PHASE_ERROR,
)


def _agreement_draw(
    rng: np.random.Generator, config: ScenarioConfig
) -> tuple[ChannelDraw, float]:
    """A channel draw whose conditional Pe sits away from 0 and 1, so the
    3-SE comparison has teeth. Redraws are deterministic under the rng."""
    for _ in range(200):
        alpha = sample_fading(config.n_beams, config.fading_mean, rng)
        draw = ChannelDraw(
            magnitudes=np.sqrt(alpha),
            betas=allocate_power(alpha),
            phases=rng.normal(0.0, 0.5, size=config.n_beams),
        )
        pe = conditional_pe(config, draw)
        if 5e-3 <= pe <= 0.45:
            return draw, pe
    raise ParameterError(
        f"could not find a non-degenerate draw for {config.scenario.value}"
    )


def check_oracle_agreement(
    seed: int = 8,
    trials: int = 1_000_000,
    n_values: tuple[int, ...] = (1, 2, 3),
    m_values: tuple[int, ...] = (1, 4, 16),
    tol_se: float = 3.0,
    snr_db: float = 0.0,
    workers: int = 1,
) -> CheckResult:
    """Closed-form conditional Pe vs brute-force symbol counting.

    Order-2 PPM makes the closed forms exact, so the empirical rate must
    sit within tol_se standard errors for every scenario/combiner/N/M cell.
    """
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    count = 0
    for scenario in _AGREEMENT_SCENARIOS:
        for combiner in (Combiner.MRC, Combiner.EGC):
            for n in n_values:
                for m in m_values:
                    rows = int(round(np.sqrt(m)))
                    if rows * rows != m:
                        raise ParameterError(f"M must be a perfect square, got {m}")
                    config = ScenarioConfig(
                        scenario=scenario,
                        combiner=combiner,
                        n_beams=n,
                        side=2.0,
                        rows=rows,
                        cols=rows,
                        radius=0.2,
                        snr_db=snr_db,
                        trials=trials,
                        seed=int(rng.integers(0, 2**63)),
                        phase_model=PhaseModel("gaussian", 0.5),
                        ppm=PpmConfig(2),
                    )
                    draw, closed = _agreement_draw(rng, config)
                    res = symbol_level_oracle(config, draw, workers=workers)
                    gap = abs(res.estimate - closed)
                    se = max(res.std_error, 1e-12)
                    worst = max(worst, gap / se)
                    count += 1
                    if gap > tol_se * se:
                        failures.append(
                            f"{scenario.value}/{combiner.value} N={n} M={m}: "
                            f"closed {closed:.5g} vs mc {res.estimate:.5g} "
                            f"({gap / se:.2f} SE)"
                        )
    passed = not failures
    detail = (
        f"{count} cells at {trials} trials, worst gap {worst:.2f} SE (tol {tol_se:g})"
    )
    if failures:
        detail += "; " + "; ".join(failures[:4])
    return CheckResult("oracle-agreement", passed, detail)


# --- tracker law ----------------------------------------------------------


def check_tracker_variance(
    seed: int = 11,
    steps: int = 100_000,
    a_values: tuple[float, ...] = (0.5, 0.9),
    rel_tol: float = 0.02,
) -> CheckResult:
    """Long no-reset trajectories vs the closed-form steady-state std."""
    rng = np.random.default_rng(seed)
    details = []
    passed = True
    for a in a_values:
        params = TrackerParams(phi=a, sigma_w=1.0, n_0=10**9)
        target = steady_state_sigma(a, 1.0)
        state = TrackerState(position=rng.normal(0.0, target, size=2))
        burn = 1000
        acc = 0.0
        for k in range(steps + burn):
            state = step(state, params, rng, estimate_perfect=False)
            if k >= burn:
                acc += state.position[0] ** 2 + state.position[1] ** 2
        emp = np.sqrt(acc / (2 * steps))
        rel = abs(emp - target) / target
        passed &= rel <= rel_tol
        details.append(f"a={a}: emp {emp:.4f} vs {target:.4f} ({rel:.2%})")
    return CheckResult(
        "tracker-variance", bool(passed), "; ".join(details) + f" (tol {rel_tol:.0%})"
    )


def check_escape_stats(
    seed: int = 13,
    draws: int = 100_000,
    n_beams: int = 5,
    sigma_x: float = 0.739,
    rho_c: float = 1.0,
    p_min: float = 0.01,
) -> CheckResult:
    """Escape frequency vs the Rayleigh tail and the escaped-count
    histogram vs its binomial law."""
    rng = np.random.default_rng(seed)
    p = escape_probability(rho_c, sigma_x)
    counts = np.zeros(n_beams + 1, dtype=int)
    escaped_total = 0
    for _ in range(draws):
        state = sample_alignment(n_beams, rho_c, sigma_x, rng)
        counts[state.n_escaped] += 1
        escaped_total += state.n_escaped
    freq = escaped_total / (draws * n_beams)
    se = np.sqrt(p * (1.0 - p) / (draws * n_beams))
    freq_ok = abs(freq - p) <= 3.0 * se
    expected = n0_pmf(n_beams, p) * draws
    stat, p_value = chisquare(counts, expected)
    chi_ok = p_value >= p_min
    return CheckResult(
        "escape-stats",
        bool(freq_ok and chi_ok),
        f"escape freq {freq:.5f} vs {p:.5f} (3SE {3*se:.5f}); "
        f"chi-square p={p_value:.3f} (min {p_min})",
    )


# --- distributional checks ------------------------------------------------


def check_fading_ks(
    seed: int = 17,
    samples: int = 1_000_000,
    mean: float = 0.5,
    d_max: float = 0.002,
) -> CheckResult:
    """KS distance of sampled fading intensities from Exp(mean)."""
    rng = np.random.default_rng(seed)
    x = sample_fading(samples, mean, rng)
    stat, p = kstest(x, "expon", args=(0.0, mean))
    return CheckResult(
        "fading-ks",
        bool(stat <= d_max),
        f"D={stat:.5f} (max {d_max}), p={p:.3f}, {samples} samples",
    )


def check_clt_gain(
    seed: int = 19,
    n_beams: int = 50,
    samples: int = 10_000,
    p_min: float = 0.01,
) -> CheckResult:
    """Coherent-sum intensity W = X^2 + Y^2 under uniform phases and
    unit-mean gains vs the exponential limit law with mean N sigma_h^2."""
    rng = np.random.default_rng(seed)
    alpha = rng.exponential(1.0, size=(samples, n_beams))
    h = np.sqrt(alpha / n_beams)  # equal power split, sigma_h^2 = 1/N
    phi = rng.uniform(-np.pi, np.pi, size=(samples, n_beams))
    x = (h * np.cos(phi)).sum(axis=1)
    y = (h * np.sin(phi)).sum(axis=1)
    w = x * x + y * y
    mean_w = n_beams * (1.0 / n_beams)
    stat, p = kstest(w, "expon", args=(0.0, mean_w))
    return CheckResult(
        "clt-intensity-gain",
        bool(p >= p_min),
        f"KS p={p:.3f} (min {p_min}), D={stat:.5f}, {samples} samples of N={n_beams}",
    )


# --- suite ----------------------------------------------------------------


def run_all(quick: bool = False, seed: int = 0, workers: int = 1) -> list[CheckResult]:
    """Every validation check exactly once; `quick` shrinks sample sizes."""
    base = int(seed)
    if quick:
        return [
            check_quadrature(seed=base + 20240801, instances=10),
            check_oracle_agreement(
                seed=base + 8,
                trials=150_000,
                n_values=(1, 2),
                m_values=(1, 4),
                workers=workers,
            ),
            check_tracker_variance(seed=base + 11, steps=20_000, rel_tol=0.05),
            check_escape_stats(seed=base + 13, draws=20_000),
            check_fading_ks(seed=base + 17, samples=200_000, d_max=0.0045),
            check_clt_gain(seed=base + 19, samples=4_000),
        ]
    return [
        check_quadrature(seed=base + 20240801),
        check_oracle_agreement(seed=base + 8, workers=workers),
        check_tracker_variance(seed=base + 11),
        check_escape_stats(seed=base + 13),
        check_fading_ks(seed=base + 17),
        check_clt_gain(seed=base + 19),
    ]
