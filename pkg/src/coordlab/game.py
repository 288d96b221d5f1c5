"""Payoffs, utilities and the exact potential of the networked coordination game.

Each edge hosts a 2x2 coordination game with task difficulty ``theta``: an
active agent pays ``theta/N`` per neighbour and earns ``1/K`` from every
active neighbour. On a K-regular graph the sum of these pairwise games is an
exact potential game.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import VertexOutOfRange
from .graph import Graph, quadratic_form
from .profile import ActionProfile, ProfileLike, as_profile

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class GameSpec:
    graph: Graph
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta}")
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> int:
        return self.graph.k

    @property
    def threshold(self) -> float:
        """Difficulty N/(2K) at which both consensus profiles tie in potential."""
        return self.n / (2 * self.k)

    @property
    def is_degenerate(self) -> bool:
        return abs(self.theta - self.threshold) <= DEGENERACY_TOL


@dataclass(frozen=True)
class BimatrixOutcome:
    payoff_i: float
    payoff_j: float


def pairwise_payoff(spec: GameSpec, a_i: int, a_j: int) -> float:
    """Row player's payoff ``a_i (a_j/K - theta/N)`` in one edge game."""
    return a_i * (a_j / spec.k - spec.theta / spec.n)


def bimatrix_outcome(spec: GameSpec, a_i: int, a_j: int) -> BimatrixOutcome:
    return BimatrixOutcome(pairwise_payoff(spec, a_i, a_j), pairwise_payoff(spec, a_j, a_i))


def pairwise_potential(spec: GameSpec, a_i: int, a_j: int) -> float:
    """Potential of a single edge game; symmetric in its arguments."""
    return a_i * a_j / spec.k + (1 - a_i - a_j) * spec.theta / spec.n


def bimatrix_nash_set(spec: GameSpec, deg_i: int, deg_j: int) -> set[tuple[int, int]]:
    """Pure equilibria of one edge game whose endpoints have the given degrees.

    Intervals are closed, so theta=0 and theta=N/max(deg) both yield the two
    consensus outcomes.
    """
    if deg_i < 1 or deg_j < 1:
        raise ValueError("degrees must be positive")
    m_ij = spec.n / max(deg_i, deg_j)
    theta = spec.theta
    if theta > m_ij:
        return {(0, 0)}
    if theta >= 0:
        return {(0, 0), (1, 1)}
    return {(1, 1)}


def _check_vertex(spec: GameSpec, i: int) -> None:
    if not 0 <= i < spec.n:
        raise VertexOutOfRange(f"agent {i} outside [0, {spec.n})")


def utility(spec: GameSpec, a: ProfileLike, i: int) -> float:
    """Closed form ``a_i (active_neighbours/K - K theta/N)``."""
    profile = as_profile(a, spec.n)
    _check_vertex(spec, i)
    if not profile[i]:
        return 0.0
    active = (profile.bits & spec.graph.neighbor_masks[i]).bit_count()
    return active / spec.k - spec.k * spec.theta / spec.n


def utility_from_pairs(spec: GameSpec, a: ProfileLike, i: int) -> float:
    """Utility as the sum of the edge-game payoffs of agent ``i``."""
    profile = as_profile(a, spec.n)
    _check_vertex(spec, i)
    return sum(pairwise_payoff(spec, profile[i], profile[j]) for j in spec.graph.neighbors(i))


def potential(spec: GameSpec, a: ProfileLike) -> float:
    """``theta K/2 - (theta K/N) |a| + a^T A a / (2K)``."""
    profile = as_profile(a, spec.n)
    n, k, theta = spec.n, spec.k, spec.theta
    return (
        theta * k / 2
        - theta * k / n * profile.ones_count
        + quadratic_form(spec.graph, profile) / (2 * k)
    )


def potential_from_pairs(spec: GameSpec, a: ProfileLike) -> float:
    """Half the sum of edge potentials over ordered neighbour pairs."""
    profile = as_profile(a, spec.n)
    total = 0.0
    for i in range(spec.n):
        for j in spec.graph.neighbors(i):
            total += pairwise_potential(spec, profile[i], profile[j])
    return total / 2


def normalized_potential(spec: GameSpec, a: ProfileLike) -> float:
    """Potential without its constant ``theta K/2`` term."""
    profile = as_profile(a, spec.n)
    k = spec.k
    return -k * spec.theta / spec.n * profile.ones_count + quadratic_form(
        spec.graph, profile
    ) / (2 * k)


def potential_difference_check(spec: GameSpec, a: ProfileLike, i: int) -> tuple[float, float]:
    """Utility and potential changes when agent ``i`` flips its action.

    Returns ``(U_i(flipped) - U_i(a), Phi(flipped) - Phi(a))``; for an exact
    potential the two agree up to rounding.
    """
    profile = as_profile(a, spec.n)
    _check_vertex(spec, i)
    flipped = profile.flip(i)
    d_u = utility(spec, flipped, i) - utility(spec, profile, i)
    d_phi = potential(spec, flipped) - potential(spec, profile)
    return d_u, d_phi


def consensus_potentials(spec: GameSpec) -> tuple[float, float]:
    """Potentials of the all-inactive and all-active profiles."""
    return (
        potential(spec, ActionProfile.zeros(spec.n)),
        potential(spec, ActionProfile.ones(spec.n)),
    )
