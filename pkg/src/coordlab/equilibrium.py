"""Brute-force equilibrium and potential-maximizer oracles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enumeration import DEFAULT_BLOCK_BITS, check_enumerable, iter_blocks
from .errors import Disconnected, RelaxationNotExact
from .game import GameSpec
from .graph import is_connected, spectrum
from .profile import ActionProfile

NASH_TOL = 1e-12
TIE_TOL = 1e-9
RELAXATION_TOL = 1e-6


@dataclass(frozen=True)
class EquilibriumReport:
    n: int
    k: int
    theta: float
    nash_profiles: list[ActionProfile] | None
    maximizer_profiles: list[ActionProfile]
    max_potential: float
    theta_threshold: float
    degenerate: bool = False

    @property
    def nash_matches_maximizers(self) -> bool | None:
        """None when Nash enumeration was skipped."""
        if self.nash_profiles is None:
            return None
        return set(self.nash_profiles) == set(self.maximizer_profiles)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "theta": self.theta,
            "theta_threshold": self.theta_threshold,
            "degenerate": self.degenerate,
            "max_potential": self.max_potential,
            "maximizers": [p.to_hex() for p in self.maximizer_profiles],
        }
        if self.nash_profiles is not None:
            out["nash"] = [p.to_hex() for p in self.nash_profiles]
            out["nash_count"] = len(self.nash_profiles)
            out["nash_equals_maximizers"] = self.nash_matches_maximizers
        return out


@dataclass(frozen=True)
class RelaxationReport:
    top_eigenvalue: float
    relaxed_optimum: float
    binary_optimum: float
    relaxed_maximizers: list[ActionProfile] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return abs(self.relaxed_optimum - self.binary_optimum)


def _block_states(start: int, size: int) -> np.ndarray:
    return np.arange(start, start + size, dtype=np.int64)


def _nash_mask(spec: GameSpec, states: np.ndarray) -> np.ndarray:
    """True where no agent gains more than NASH_TOL by flipping."""
    k = spec.k
    cost = k * spec.theta / spec.n
    stable = np.ones(states.shape, dtype=bool)
    for i in range(spec.n):
        active_nbrs = np.zeros(states.shape, dtype=np.int64)
        for j in spec.graph.neighbors(i):
            active_nbrs += (states >> j) & 1
        # utility when active; inactive agents earn 0
        u_active = active_nbrs / k - cost
        playing = ((states >> i) & 1).astype(bool)
        gain = np.where(playing, -u_active, u_active)
        stable &= gain <= NASH_TOL
    return stable


def enumerate_nash(spec: GameSpec, block_bits: int = DEFAULT_BLOCK_BITS) -> list[ActionProfile]:
    """Every pure profile where no unilateral flip pays more than 1e-12."""
    n = spec.n
    check_enumerable(n)
    size = 1 << min(n, block_bits)
    found: list[ActionProfile] = []
    for start in range(0, 1 << n, size):
        states = _block_states(start, size)
        found.extend(ActionProfile(n, int(s)) for s in states[_nash_mask(spec, states)])
    return found


def enumerate_maximizers(
    spec: GameSpec, block_bits: int = DEFAULT_BLOCK_BITS, include_nash: bool = True
) -> EquilibriumReport:
    """Exact argmax of the potential over {0,1}^N (ties within 1e-9)."""
    n = spec.n
    check_enumerable(n)
    best = max(float(values.max()) for _, values in iter_blocks(spec, block_bits))
    winners: list[int] = []
    for start, values in iter_blocks(spec, block_bits):
        winners.extend(start + int(s) for s in np.flatnonzero(values >= best - TIE_TOL))
    return EquilibriumReport(
        n=n,
        k=spec.k,
        theta=spec.theta,
        nash_profiles=enumerate_nash(spec, block_bits) if include_nash else None,
        maximizer_profiles=[ActionProfile(n, s) for s in winners],
        max_potential=best + spec.theta * spec.k / 2,
        theta_threshold=spec.threshold,
        degenerate=spec.is_degenerate,
    )


def relaxed_optimum(spec: GameSpec, top_eigenvalue: float) -> float:
    """Optimum of the potential over the ball ``sum c_t^2 <= N`` in the eigenbasis.

    All energy goes to the top eigen-direction when its coefficient
    ``lambda_1/(2K) - K theta/N`` is positive, otherwise none is spent.
    """
    n, k, theta = spec.n, spec.k, spec.theta
    return theta * k / 2 + n * max(0.0, top_eigenvalue / (2 * k) - k * theta / n)


def verify_relaxation(spec: GameSpec, block_bits: int = DEFAULT_BLOCK_BITS) -> RelaxationReport:
    """Compare the spectral relaxation against the brute-force binary optimum.

    Raises RelaxationNotExact when they differ by more than 1e-6.
    """
    check_enumerable(spec.n)
    eig = spectrum(spec.graph)
    if eig.multiplicity_of_top > 1 or not is_connected(spec.graph):
        raise Disconnected(
            f"top eigenvalue has multiplicity {eig.multiplicity_of_top}; graph is disconnected"
        )
    relaxed = relaxed_optimum(spec, eig.top)
    report = enumerate_maximizers(spec, block_bits, include_nash=False)
    coefficient = eig.top / (2 * spec.k) - spec.k * spec.theta / spec.n
    maximizers = []
    if coefficient <= TIE_TOL:
        maximizers.append(ActionProfile.zeros(spec.n))
    if coefficient >= -TIE_TOL:
        maximizers.append(ActionProfile.ones(spec.n))
    result = RelaxationReport(eig.top, relaxed, report.max_potential, maximizers)
    if result.gap > RELAXATION_TOL:
        raise RelaxationNotExact(
            f"relaxed optimum {relaxed!r} differs from binary optimum {report.max_potential!r}"
        )
    return result
