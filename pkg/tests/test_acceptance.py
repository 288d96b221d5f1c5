"""Release gate: the ten headline checks, one logged PASS/FAIL line each."""

import math
from functools import lru_cache

import numpy as np

from coordlab.dynamics import (
    LLLConfig,
    beta_bound_closed_form,
    beta_min,
    g_of_beta_K,
    gibbs_exact,
    gibbs_lower_bound,
    log_gibbs_lower_bound,
    optimal_mass,
    simulate,
    transition_matrix,
)
from coordlab.equilibrium import enumerate_maximizers, verify_relaxation
from coordlab.game import GameSpec, potential_difference_check
from coordlab.graph import generate_circulant
from coordlab.profile import ActionProfile

from conftest import connected_corpus

CORPUS = connected_corpus()
FIG_BETAS = (0.5, 1.0, 2.0, 5.0, 10.0)


def corpus_thetas(g):
    return (-1.0, 0.5, g.n / (2 * g.k), 3.0, 10.0)


@lru_cache(maxsize=None)
def fig_g(k, theta, beta):
    return g_of_beta_K(20, k, theta, beta)


def test_criterion_01_exact_potential(acceptance_log):
    worst = 0.0
    checked = 0
    for g in CORPUS:
        for theta in corpus_thetas(g):
            spec = GameSpec(g, theta)
            for bits in range(1 << g.n):
                a = ActionProfile(g.n, bits)
                for i in range(g.n):
                    d_u, d_phi = potential_difference_check(spec, a, i)
                    worst = max(worst, abs(d_u - d_phi))
                    checked += 1
    passed = len(CORPUS) >= 10 and worst <= 1e-12
    acceptance_log(1, "exact potential identity", passed, f"{checked} flips, max |dU-dPhi|={worst:.2e}")
    assert passed


def test_criterion_02_maximizer_characterization(acceptance_log):
    failures = []
    for g in CORPUS:
        for theta in corpus_thetas(g):
            spec = GameSpec(g, theta)
            report = enumerate_maximizers(spec, include_nash=False)
            zeros, ones = ActionProfile.zeros(g.n), ActionProfile.ones(g.n)
            if spec.is_degenerate:
                expected, value = [zeros, ones], g.k * theta / 2
            elif theta > spec.threshold:
                expected, value = [zeros], g.k * theta / 2
            else:
                expected, value = [ones], (g.n - g.k * theta) / 2
            if report.maximizer_profiles != expected or abs(report.max_potential - value) > 1e-9:
                failures.append((g.n, g.k, theta))
    passed = not failures
    acceptance_log(2, "maximizers are the predicted consensus profiles", passed, f"{len(CORPUS) * 5} instances, failures={failures}")
    assert passed


def test_criterion_03_relaxation(acceptance_log):
    worst = 0.0
    for g in CORPUS:
        for theta in corpus_thetas(g):
            worst = max(worst, verify_relaxation(GameSpec(g, theta)).gap)
    passed = worst <= 1e-6
    acceptance_log(3, "spectral relaxation is exact", passed, f"max gap={worst:.2e}")
    assert passed


def test_criterion_04_stationarity(acceptance_log):
    worst = 0.0
    count = 0
    for g in (g for g in CORPUS if g.n <= 8):
        for theta in corpus_thetas(g):
            spec = GameSpec(g, theta)
            for beta in (0.0, 0.5, 2.0, 10.0):
                mu = gibbs_exact(spec, beta, keep_states=True).probabilities
                p = transition_matrix(spec, beta)
                worst = max(worst, float(np.abs(mu @ p - mu).max()))
                count += 1
    passed = worst <= 1e-10
    acceptance_log(4, "Gibbs law is stationary for the LLL kernel", passed, f"{count} chains, max |muP-mu|={worst:.2e}")
    assert passed


def test_criterion_05_degree_ordering_hard_task(acceptance_log):
    degrees = (2, 4, 6, 8, 10)
    broken = []
    for beta in FIG_BETAS:
        values = [fig_g(k, 5.1, beta) for k in degrees]
        if not all(b > a for a, b in zip(values, values[1:])):
            broken.append(beta)
    passed = not broken
    top = ", ".join(f"{fig_g(k, 5.1, 1.0):.3g}" for k in degrees)
    acceptance_log(5, "N=20 theta=5.1: g strictly increasing in K", passed, f"g(1,K)=[{top}], broken betas={broken}")
    assert passed


def test_criterion_06_degree_ordering_above_threshold(acceptance_log):
    degrees = (4, 6, 8, 10)
    broken = []
    low_pair = []
    for beta in FIG_BETAS:
        values = [fig_g(k, 3.0, beta) for k in degrees]
        if not all(b > a for a, b in zip(values, values[1:])):
            broken.append(beta)
        low_pair.append(f"{fig_g(2, 3.0, beta):.3g}/{fig_g(4, 3.0, beta):.3g}")
    passed = not broken
    # K=2 sits below N/(2 theta), so the (2, 4) pair is only reported
    acceptance_log(
        6, "N=20 theta=3: g ordered for K=4..10", passed, f"g(K=2)/g(K=4) by beta: {' '.join(low_pair)}"
    )
    assert passed


def test_criterion_07_lower_bound_sandwich(acceptance_log):
    violations = []
    worst_zero = 0.0
    points = 0
    for k in (2, 3, 4, 6, 8):
        for theta in (-1.0, 0.7, 2.5, 5.0):
            spec = GameSpec(generate_circulant(12, k), theta)
            for beta in (0.0, 0.5, 1.0, 2.0, 5.0):
                exact = optimal_mass(spec, beta)
                bound = gibbs_lower_bound(12, k, theta, beta)
                points += 1
                if bound > exact * (1 + 1e-12):
                    violations.append((k, theta, beta))
                if beta == 0.0:
                    worst_zero = max(worst_zero, abs(log_gibbs_lower_bound(12, k, theta, 0.0) - math.log(exact)))
    passed = points == 100 and not violations and worst_zero <= 1e-12
    acceptance_log(
        7, "lower bound below exact mass", passed, f"{points} points, violations={violations}, beta=0 log gap={worst_zero:.1e}"
    )
    assert passed


def test_criterion_08_closed_form_soundness(acceptance_log):
    details = []
    passed = True
    for n, k, theta, delta in [(20, 10, 5.1, 0.05), (6, 2, 10.0, 0.1), (10, 4, -1.0, 0.1)]:
        spec = GameSpec(generate_circulant(n, k), theta)
        bound = beta_bound_closed_form(n, k, theta, delta)
        mass = optimal_mass(spec, bound)
        searched = beta_min(spec, delta)
        ok = mass >= 1 - delta and bound >= searched
        passed &= ok
        details.append(f"({n},{k},{theta},{delta}): bound={bound:.4g} mass={mass:.4f} beta_min={searched:.4g}")
    acceptance_log(8, "closed-form beta reaches 1-delta and dominates beta_min", passed, "; ".join(details))
    assert passed


def test_criterion_09_simulation_matches_gibbs(acceptance_log):
    spec = GameSpec(generate_circulant(6, 2), 10.0)
    worst = 0.0
    for beta in (0.0, 2.0, 5.0):
        exact = gibbs_exact(spec, beta, keep_states=True).probabilities
        for seed in (0, 1, 2):
            stats = simulate(spec, LLLConfig(beta=beta, steps=10**6, seed=seed, burn_in=10**4))
            worst = max(worst, stats.tv_distance(exact))
    passed = worst <= 0.02
    acceptance_log(9, "LLL occupancy matches Gibbs law", passed, f"9 runs of 1e6 steps, max TV={worst:.4f}")
    assert passed


def test_criterion_10_monotone_in_beta(acceptance_log):
    small_grid = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0)
    failures = []
    smallest = math.inf
    instances = 0

    def check(label, values):
        nonlocal smallest, instances
        instances += 1
        steps = [b - a for a, b in zip(values, values[1:])]
        smallest = min(smallest, min(steps))
        if min(steps) <= 1e-12:
            failures.append(label)

    for g in CORPUS:
        for theta in corpus_thetas(g):
            spec = GameSpec(g, theta)
            if spec.is_degenerate:
                continue
            check((g.n, g.k, theta), [optimal_mass(spec, b) for b in small_grid])
    for theta in (5.1, 3.0):
        for k in (2, 4, 6, 8, 10):
            check((20, k, theta), [fig_g(k, theta, b) for b in (0.0,) + FIG_BETAS])
    passed = not failures
    acceptance_log(10, "g strictly increasing in beta", passed, f"{instances} instances, smallest step={smallest:.2e}")
    assert passed
