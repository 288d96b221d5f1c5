"""Log-linear learning: simulation, exact stationary law and rationality bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .enumeration import DEFAULT_BLOCK_BITS, check_enumerable, iter_blocks
from .errors import ConvergenceFailure, DegenerateTheta, TooLarge
from .game import GameSpec, utility
from .graph import generate_circulant
from .profile import ActionProfile, ProfileLike, as_profile

STATE_TABLE_MAX_N = 16
TRANSITION_MATRIX_MAX_N = 12
BISECTION_WIDTH = 1e-6
BETA_SEARCH_CAP = 1e6
MIN_BURN_IN = 10_000


class DegenerateThetaWarning(UserWarning):
    """theta = N/(2K): the optimal-profile mass is split over both consensus profiles."""


@dataclass(frozen=True)
class LLLConfig:
    beta: float
    steps: int
    seed: int = 0
    replicas: int = 1
    initial_profile: Union[ActionProfile, str, None] = None
    burn_in: int | None = None

    def __post_init__(self):
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a finite value >= 0, got {self.beta}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.burn_in is not None and not 0 <= self.burn_in < self.steps:
            raise ValueError("burn_in must lie in [0, steps)")
        if isinstance(self.initial_profile, str) and self.initial_profile != "uniform-random":
            object.__setattr__(self, "initial_profile", as_profile(self.initial_profile))

    @property
    def effective_burn_in(self) -> int:
        """1% of steps, at least 10^4, but never more than half the run."""
        if self.burn_in is not None:
            return self.burn_in
        return min(max(MIN_BURN_IN, self.steps // 100), self.steps // 2)


@dataclass(frozen=True)
class GibbsTable:
    n: int
    beta: float
    log_partition: float
    consensus_mass_0: float
    consensus_mass_1: float
    expected_potential: float
    log_rest_mass: float
    """log of the stationary mass outside both consensus profiles"""
    probabilities: np.ndarray | None = field(default=None, repr=False, compare=False)

    def mass(self, profile: ProfileLike) -> float:
        p = as_profile(profile, self.n)
        if p.bits == 0:
            return self.consensus_mass_0
        if p.bits == (1 << self.n) - 1:
            return self.consensus_mass_1
        if self.probabilities is None:
            raise ValueError("per-state table not kept; call gibbs_exact(..., keep_states=True)")
        return float(self.probabilities[p.bits])

    def failure_mass(self, which: int) -> float:
        """``1 - mass(consensus which)`` without cancellation."""
        other = self.consensus_mass_1 if which == 0 else self.consensus_mass_0
        return math.exp(self.log_rest_mass) + other


@dataclass
class TrajectoryStats:
    visit_fraction_at_astar: float
    final_profiles: list[ActionProfile]
    counted_steps: int
    empirical_distribution: np.ndarray | None = None

    @property
    def final_profile(self) -> ActionProfile:
        return self.final_profiles[-1]

    def empirical_probabilities(self) -> np.ndarray:
        if self.empirical_distribution is None:
            raise ValueError("per-state counts are only kept for N <= 16")
        return self.empirical_distribution / self.empirical_distribution.sum()

    def tv_distance(self, probabilities: np.ndarray) -> float:
        return 0.5 * float(np.abs(self.empirical_probabilities() - probabilities).sum())

    def to_dict(self) -> dict:
        out = {
            "visit_fraction_at_astar": self.visit_fraction_at_astar,
            "counted_steps": self.counted_steps,
            "final_profiles": [p.to_string() for p in self.final_profiles],
        }
        if self.empirical_distribution is not None:
            out["empirical_distribution"] = [int(c) for c in self.empirical_distribution]
        return out


def optimal_profiles(spec: GameSpec) -> list[ActionProfile]:
    """Potential maximizers: 0_N above N/(2K), 1_N below, both on the tie."""
    n = spec.n
    if spec.is_degenerate:
        return [ActionProfile.zeros(n), ActionProfile.ones(n)]
    if spec.theta > spec.threshold:
        return [ActionProfile.zeros(n)]
    return [ActionProfile.ones(n)]


def _softmax_pair(logit_0: float, logit_1: float) -> float:
    """Probability of action 1 under a two-point softmax."""
    top = max(logit_0, logit_1)
    w0 = math.exp(logit_0 - top)
    w1 = math.exp(logit_1 - top)
    return w1 / (w0 + w1)


def choice_probability(spec: GameSpec, a: ProfileLike, i: int, beta: float) -> float:
    """Probability that revising agent ``i`` picks action 1 given the others in ``a``."""
    profile = as_profile(a, spec.n)
    u1 = utility(spec, profile.with_action(i, 1), i)
    u0 = utility(spec, profile.with_action(i, 0), i)
    return _softmax_pair(beta * u0, beta * u1)


def _activation_table(spec: GameSpec, beta: float) -> list[float]:
    """P(choose 1) indexed by the count of active neighbours (regular graph)."""
    cost = spec.k * spec.theta / spec.n
    return [_softmax_pair(0.0, beta * (c / spec.k - cost)) for c in range(spec.k + 1)]


def lll_step(
    spec: GameSpec,
    a: ProfileLike,
    beta: float,
    rng: np.random.Generator,
    agent: int | None = None,
) -> ActionProfile:
    """One asynchronous revision: a uniform agent resamples from the logit rule."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    profile = as_profile(a, spec.n)
    i = int(rng.integers(spec.n)) if agent is None else agent
    p1 = choice_probability(spec, profile, i, beta)
    return profile.with_action(i, int(rng.random() < p1))


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Independent PCG64 stream for one replica, keyed by ``(seed, replica)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replica,)))


def _run_chain(
    spec: GameSpec, state: int, steps: int, burn_in: int, p_active: list[float], rng, record: bool
) -> tuple[int, list[int] | None, int]:
    masks = spec.graph.neighbor_masks
    targets = {p.bits for p in optimal_profiles(spec)}
    agents = rng.integers(0, spec.n, size=steps).tolist()
    draws = rng.random(steps).tolist()
    trace: list[int] | None = [] if record else None
    hits = 0
    for t in range(steps):
        i = agents[t]
        bit = 1 << i
        if draws[t] < p_active[(state & masks[i]).bit_count()]:
            state |= bit
        else:
            state &= ~bit
        if t >= burn_in:
            if state in targets:
                hits += 1
            if record:
                trace.append(state)
    return state, trace, hits


def simulate(spec: GameSpec, cfg: LLLConfig) -> TrajectoryStats:
    """Run ``cfg.replicas`` independent LLL chains and pool their occupancy.

    Occupancy counts the state after every revision past the burn-in.
    """
    n = spec.n
    p_active = _activation_table(spec, cfg.beta)
    burn_in = cfg.effective_burn_in
    record = n <= STATE_TABLE_MAX_N
    counts = np.zeros(1 << n, dtype=np.int64) if record else None
    total_hits = 0
    finals: list[ActionProfile] = []
    for r in range(cfg.replicas):
        rng = replica_rng(cfg.seed, r)
        if isinstance(cfg.initial_profile, ActionProfile):
            state = as_profile(cfg.initial_profile, n).bits
        else:
            state = int(rng.integers(0, 2, size=n) @ (1 << np.arange(n, dtype=np.int64)))
        state, trace, hits = _run_chain(spec, state, cfg.steps, burn_in, p_active, rng, record)
        total_hits += hits
        finals.append(ActionProfile(n, state))
        if record:
            counts += np.bincount(np.asarray(trace, dtype=np.int64), minlength=1 << n)
    counted = cfg.replicas * (cfg.steps - burn_in)
    return TrajectoryStats(total_hits / counted, finals, counted, counts)


def gibbs_exact(
    spec: GameSpec,
    beta: float,
    keep_states: bool | None = None,
    block_bits: int = DEFAULT_BLOCK_BITS,
) -> GibbsTable:
    """Exact stationary law ``mu(a) ~ exp(beta * potential(a))``.

    Works from normalized potentials with a streaming log-sum-exp; blocks
    are merged in index order so results are bit-stable.
    """
    n = spec.n
    check_enumerable(n)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if keep_states is None:
        keep_states = n <= STATE_TABLE_MAX_N
    if keep_states and n > STATE_TABLE_MAX_N:
        raise TooLarge(f"per-state table capped at N={STATE_TABLE_MAX_N}")
    last = (1 << n) - 1
    shift = -np.inf
    rest = 0.0
    weighted = 0.0
    phi_0 = phi_1 = 0.0
    pieces = []
    for start, values in iter_blocks(spec, block_bits):
        logits = beta * values
        block_shift = float(logits.max())
        w = np.exp(logits - block_shift)
        if start == 0:
            phi_0 = float(values[0])
            w[0] = 0.0
        if start + values.size - 1 == last:
            phi_1 = float(values[-1])
            w[-1] = 0.0
        block_rest = float(w.sum())
        block_weighted = float(values @ w)
        if block_shift > shift:
            scale = math.exp(shift - block_shift) if math.isfinite(shift) else 0.0
            rest, weighted, shift = rest * scale, weighted * scale, block_shift
        else:
            scale = math.exp(block_shift - shift)
            block_rest, block_weighted = block_rest * scale, block_weighted * scale
        rest += block_rest
        weighted += block_weighted
        if keep_states:
            pieces.append(logits)
    w0 = math.exp(beta * phi_0 - shift)
    w1 = math.exp(beta * phi_1 - shift)
    total = rest + w0 + w1
    log_z = shift + math.log(total)
    expected = (weighted + phi_0 * w0 + phi_1 * w1) / total
    probabilities = None
    if keep_states:
        probabilities = np.exp(np.concatenate(pieces) - log_z)
    return GibbsTable(
        n=n,
        beta=float(beta),
        log_partition=log_z,
        consensus_mass_0=w0 / total,
        consensus_mass_1=w1 / total,
        expected_potential=expected,
        log_rest_mass=(math.log(rest) - math.log(total)) if rest > 0 else -math.inf,
        probabilities=probabilities,
    )


def optimal_mass(spec: GameSpec, beta: float, table: GibbsTable | None = None) -> float:
    """Stationary mass on the optimal consensus profile(s)."""
    table = gibbs_exact(spec, beta, keep_states=False) if table is None else table
    if spec.is_degenerate:
        return table.consensus_mass_0 + table.consensus_mass_1
    if spec.theta > spec.threshold:
        return table.consensus_mass_0
    return table.consensus_mass_1


def g_of_beta_K(n: int, k: int, theta: float, beta: float) -> float:
    """Optimal-profile mass on the canonical k-regular circulant.

    At theta = N/(2K) the two consensus masses are summed and a
    DegenerateThetaWarning is emitted.
    """
    spec = GameSpec(generate_circulant(n, k), theta)
    if spec.is_degenerate:
        warnings.warn(
            f"theta={theta} equals N/(2K)={spec.threshold}; summing both consensus masses",
            DegenerateThetaWarning,
            stacklevel=2,
        )
    return optimal_mass(spec, beta)


def beta_min(spec: GameSpec, delta: float) -> float:
    """Smallest beta with optimal-profile mass at least ``1 - delta``.

    Geometric bracketing from [0, 1], then bisection to width 1e-6; the
    returned value is the upper end of the final bracket.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if spec.is_degenerate:
        raise DegenerateTheta(
            f"theta={spec.theta} equals N/(2K)={spec.threshold}; the optimum is not unique"
        )
    target = 1.0 - delta
    if optimal_mass(spec, 0.0) >= target:
        return 0.0
    lo, hi = 0.0, 1.0
    while optimal_mass(spec, hi) < target:
        lo, hi = hi, 2.0 * hi
        if hi > BETA_SEARCH_CAP:
            raise ConvergenceFailure(f"mass stays below {target} up to beta={BETA_SEARCH_CAP}")
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if optimal_mass(spec, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def _optimal_normalized_potential(n: int, k: int, theta: float) -> float:
    return max(0.0, n / 2 - k * theta)


def log_gibbs_lower_bound(n: int, k: int, theta: float, beta: float) -> float:
    if beta < 0:
        raise ValueError("beta must be >= 0")
    top = _optimal_normalized_potential(n, k, theta)
    return beta * top + beta * k * theta - n * np.logaddexp(0.5 * beta, beta * k * theta / n)


def gibbs_lower_bound(n: int, k: int, theta: float, beta: float) -> float:
    """Binomial lower bound on the optimal-profile mass.

    Obtained by bounding ``a^T A a <= |a| K`` in every term of the partition
    function; exact at beta=0 and tight as beta grows (theta off the tie).
    """
    return math.exp(log_gibbs_lower_bound(n, k, theta, beta))


def beta_bound_closed_form(n: int, k: int, theta: float, delta: float) -> float:
    """Rationality level that provably lifts the optimal-profile mass to ``1 - delta``.

    Inverts the binomial lower bound: ``beta = -log(exp(-log(1-delta)/N) - 1)
    / |K theta/N - 1/2|``.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    margin = abs(k * theta / n - 0.5)
    if margin <= 1e-12 * max(1.0, abs(k * theta / n)):
        raise DegenerateTheta(f"theta={theta} equals N/(2K)={n / (2 * k)}")
    x = math.log1p(-delta) / n
    return (x - math.log(-math.expm1(x))) / margin


def expected_potential(spec: GameSpec, beta: float) -> float:
    """Stationary mean of the normalized potential (diagnostic only)."""
    return gibbs_exact(spec, beta, keep_states=False).expected_potential


def transition_matrix(spec: GameSpec, beta: float) -> np.ndarray:
    """Dense 2^N x 2^N LLL transition matrix (rows sum to one)."""
    n = spec.n
    if n > TRANSITION_MATRIX_MAX_N:
        raise TooLarge(f"transition matrix capped at N={TRANSITION_MATRIX_MAX_N}")
    p_active = np.array(_activation_table(spec, beta))
    states = np.arange(1 << n, dtype=np.int64)
    rows = np.zeros((1 << n, 1 << n))
    for i in range(n):
        active_nbrs = np.zeros_like(states)
        for j in spec.graph.neighbors(i):
            active_nbrs += (states >> j) & 1
        p1 = p_active[active_nbrs]
        on = states | (1 << i)
        off = states & ~(1 << i)
        np.add.at(rows, (states, on), p1 / n)
        np.add.at(rows, (states, off), (1.0 - p1) / n)
    return rows


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    theta: float
    beta: float
    g_exact: float
    g_lower_bound: float
    expected_potential: float


def sweep(n: int, theta: float, degrees: Sequence[int], betas: Iterable[float]) -> list[SweepRow]:
    """Exact optimal-profile mass, its lower bound and E[potential] over a (K, beta) grid."""
    betas = list(betas)
    rows = []
    for k in degrees:
        spec = GameSpec(generate_circulant(n, k), theta)
        for beta in betas:
            table = gibbs_exact(spec, beta, keep_states=False)
            rows.append(
                SweepRow(
                    n=n,
                    k=k,
                    theta=theta,
                    beta=float(beta),
                    g_exact=optimal_mass(spec, beta, table),
                    g_lower_bound=gibbs_lower_bound(n, k, theta, beta),
                    expected_potential=table.expected_potential,
                )
            )
    return rows
