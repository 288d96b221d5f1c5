"""K-regular graphs: construction, degree augmentation, connectivity, spectra."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AugmentationNotFound,
    ConvergenceFailure,
    DegreeSaturated,
    InfeasibleDegree,
    InvalidGraph,
)
from .profile import ProfileLike, as_profile

EIGEN_TOL = 1e-9
MULTIPLICITY_TOL = 1e-6


@dataclass(frozen=True)
class Graph:
    """Undirected, loop-free, K-regular graph on vertices ``0..n-1``.

    Instances are immutable; ``adjacency[i]`` is the sorted neighbour tuple
    of vertex ``i``.
    """

    n: int
    k: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidGraph(f"need at least 2 vertices, got {self.n}")
        if len(self.adjacency) != self.n:
            raise InvalidGraph(f"adjacency lists {len(self.adjacency)} vertices, n={self.n}")
        if self.k < 1:
            raise InvalidGraph("degree must be at least 1")
        for i, nbrs in enumerate(self.adjacency):
            if len(nbrs) != self.k:
                raise InvalidGraph(f"vertex {i} has degree {len(nbrs)}, expected {self.k}")
            if list(nbrs) != sorted(set(nbrs)):
                raise InvalidGraph(f"neighbours of {i} must be sorted and unique")
            for j in nbrs:
                if j == i:
                    raise InvalidGraph(f"self-loop at vertex {i}")
                if not 0 <= j < self.n:
                    raise InvalidGraph(f"vertex {i} lists out-of-range neighbour {j}")
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if i not in self._neighbor_sets[j]:
                    raise InvalidGraph(f"edge {i}->{j} has no reverse {j}->{i}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for edge in edges:
            i, j = (int(v) for v in edge)
            if i == j:
                raise InvalidGraph(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidGraph(f"edge ({i}, {j}) outside [0, {n})")
            nbrs[i].add(j)
            nbrs[j].add(i)
        degrees = {len(s) for s in nbrs}
        if len(degrees) != 1:
            raise InvalidGraph(f"graph is not regular: degrees {sorted(degrees)}")
        return cls(n, degrees.pop(), tuple(tuple(sorted(s)) for s in nbrs))

    @cached_property
    def _neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.adjacency)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Neighbourhood of each vertex packed as a bitmask."""
        return tuple(sum(1 << j for j in nbrs) for nbrs in self.adjacency)

    @property
    def edge_count(self) -> int:
        return self.n * self.k // 2

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._neighbor_sets[i]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, nbrs in enumerate(self.adjacency):
            a[i, list(nbrs)] = 1.0
        return a

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> Graph:
        graph = cls.from_edges(int(data["n"]), data["edges"])
        if "k" in data and int(data["k"]) != graph.k:
            raise InvalidGraph(f"declared k={data['k']} but edges give degree {graph.k}")
        return graph

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> Graph:
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    multiplicity_of_top: int

    @property
    def top(self) -> float:
        return self.eigenvalues[0]


def check_feasible(n: int, k: int) -> None:
    """Raise InfeasibleDegree unless a k-regular graph on n vertices exists."""
    if not 2 <= k <= n - 1:
        raise InfeasibleDegree(f"degree K={k} outside [2, N-1] for N={n}")
    if (n * k) % 2:
        raise InfeasibleDegree(f"N*K must be even (N={n}, K={k})")


def circulant_graph(n: int, offsets: Iterable[int]) -> Graph:
    """Connect every ``i`` to ``i ± d (mod n)`` for each offset ``d``."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for d in offsets:
        for i in range(n):
            j = (i + d) % n
            nbrs[i].add(j)
            nbrs[j].add(i)
    return Graph.from_edges(n, ((i, j) for i in range(n) for j in nbrs[i]))


def circulant_offsets(n: int, k: int) -> list[int]:
    offsets = list(range(1, k // 2 + 1))
    if k % 2:
        offsets.append(n // 2)
    return offsets


def generate_circulant(n: int, k: int) -> Graph:
    """Canonical connected k-regular circulant on n vertices.

    Offsets are ``1..k//2``, plus the antipodal offset ``n/2`` when k is odd.

    >>> generate_circulant(4, 2).edges()
    [(0, 1), (0, 3), (1, 2), (2, 3)]
    """
    check_feasible(n, k)
    return circulant_graph(n, circulant_offsets(n, k))


def _offset_free(g: Graph, d: int) -> bool:
    return not any(g.has_edge(i, (i + d) % g.n) for i in range(g.n))


def _offset_matching(g: Graph, d: int) -> list[tuple[int, int]] | None:
    """Perfect matching from alternate edges of the offset-``d`` cycles."""
    n = g.n
    cycles = math.gcd(n, d)
    length = n // cycles
    if length % 2:
        return None
    matching = []
    for start in range(cycles):
        for t in range(0, length, 2):
            u = (start + t * d) % n
            matching.append((u, (u + d) % n))
    if any(g.has_edge(u, v) for u, v in matching):
        return None
    return matching


def _complement_matching(g: Graph) -> list[tuple[int, int]] | None:
    import networkx as nx

    comp = nx.complement(nx.Graph(g.edges()))
    comp.add_nodes_from(range(g.n))
    matching = nx.max_weight_matching(comp, maxcardinality=True)
    if 2 * len(matching) != g.n:
        return None
    return sorted(tuple(sorted(e)) for e in matching)


def augment_degree(g: Graph) -> Graph:
    """Return a regular supergraph of ``g`` with degree K+1 (even N) or K+2 (odd N).

    Even N adds a perfect matching from the complement: the antipodal
    offset first, then alternate edges of a free circulant offset, then a
    general maximum matching. Odd N adds a free circulant offset as a
    2-factor; no general 2-factor search is attempted.
    """
    n, k = g.n, g.k
    step = 1 if n % 2 == 0 else 2
    if k + step > n - 1:
        raise DegreeSaturated(f"degree {k}+{step} would exceed N-1={n - 1}")
    extra: list[tuple[int, int]] | None = None
    if step == 1:
        candidates = [n // 2] + list(range(1, n // 2))
        for d in candidates:
            extra = _offset_matching(g, d)
            if extra is not None:
                break
        if extra is None:
            extra = _complement_matching(g)
    else:
        for d in range(1, n // 2 + 1):
            if _offset_free(g, d):
                extra = [(i, (i + d) % n) for i in range(n)]
                break
    if extra is None:
        raise AugmentationNotFound(f"no edge-disjoint augmentation for N={n}, K={k}")
    return Graph.from_edges(n, g.edges() + extra)


def is_connected(g: Graph) -> bool:
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    reached = 1
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if not seen[v]:
                seen[v] = True
                reached += 1
                queue.append(v)
    return reached == g.n


def jacobi_eigenvalues(
    matrix: np.ndarray, tol: float = EIGEN_TOL, max_rotations: int | None = None
) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm drops to ``tol``. Returns
    the diagonal sorted in descending order.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=0.0, rtol=0.0):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    cap = 100 * n * n if max_rotations is None else max_rotations
    # pivots below this are skipped; if all are, the off-norm is already <= tol
    skip = tol / max(n, 1)
    rotations = 0
    while True:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                if rotations >= cap:
                    raise ConvergenceFailure(
                        f"Jacobi did not reach off-norm {tol} within {cap} rotations (off={off:.3e})"
                    )
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                rotations += 1
    return np.sort(np.diag(a))[::-1]


@lru_cache(maxsize=128)
def spectrum(g: Graph) -> Spectrum:
    eig = jacobi_eigenvalues(g.adjacency_matrix())
    top = eig[0]
    mult = int(np.sum(np.abs(eig - top) <= MULTIPLICITY_TOL))
    return Spectrum(tuple(float(x) for x in eig), mult)


def quadratic_form(g: Graph, a: ProfileLike) -> int:
    """``a^T A a``: ordered pairs of adjacent active agents (always even)."""
    profile = as_profile(a, g.n)
    bits = profile.bits
    masks = g.neighbor_masks
    total = 0
    for i in range(g.n):
        if bits >> i & 1:
            total += (bits & masks[i]).bit_count()
    return total
