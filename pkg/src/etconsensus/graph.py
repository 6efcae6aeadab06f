"""Weighted undirected graphs and the spectra of their Laplacians."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricWeights,
    DisconnectedGraph,
    GraphError,
    NegativeWeight,
    NonzeroDiagonal,
    NumericalFailure,
)

# Positive weights below this are treated as rounding noise and rejected.
MIN_EDGE_WEIGHT = 1e-15


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.n) if self.weights[i, j] > 0]

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


def _support_connected(w: np.ndarray) -> tuple[bool, int]:
    """BFS from agent 0 over positive entries; returns (connected, first unreached)."""
    n = w.shape[0]
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if not seen[j] and w[i, j] > 0:
                seen[j] = True
                queue.append(j)
    for j in range(n):
        if not seen[j]:
            return False, j
    return True, -1


def build_graph(weights) -> WeightedGraph:
    """Validate an adjacency matrix and wrap it as an immutable graph.

    Raises the first violation found, scanning row-major, as one of
    AsymmetricWeights, NegativeWeight, NonzeroDiagonal or DisconnectedGraph.
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise GraphError(f"adjacency must be square, got shape {w.shape}")
    n = w.shape[0]
    if n < 2:
        raise GraphError("need at least 2 agents")
    if not np.all(np.isfinite(w)):
        raise GraphError("adjacency contains non-finite entries")
    for i in range(n):
        if w[i, i] != 0:
            raise NonzeroDiagonal(f"a[{i + 1},{i + 1}] = {w[i, i]!r} must be 0", (i, i))
    for i in range(n):
        for j in range(n):
            a = w[i, j]
            if a < 0 or 0 < a < MIN_EDGE_WEIGHT:
                raise NegativeWeight(f"a[{i + 1},{j + 1}] = {a!r} is not a valid weight", (i, j))
            if a != w[j, i]:
                raise AsymmetricWeights(
                    f"a[{i + 1},{j + 1}] = {a!r} but a[{j + 1},{i + 1}] = {w[j, i]!r}", (i, j)
                )
    ok, missing = _support_connected(w)
    if not ok:
        raise DisconnectedGraph(f"agent {missing + 1} is not reachable from agent 1", (0, missing))
    w.setflags(write=False)
    return WeightedGraph(w)


def is_connected(g: WeightedGraph) -> bool:
    return _support_connected(np.asarray(g.weights))[0]


def laplacian(g: WeightedGraph) -> np.ndarray:
    """L = D - A, returned read-only."""
    w = g.weights
    lap = np.diag(w.sum(axis=1)) - w
    lap.setflags(write=False)
    return lap


def kn_quadratic(z) -> float:
    """z^T K_n z with K_n = I - 11^T/n, i.e. the summed squared deviation from the mean."""
    z = np.asarray(z, dtype=float)
    d = z - z.mean()
    return float(d @ d)


def jacobi_eigenvalues(a, *, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= 1e-15 * scale:
            return np.sort(np.diag(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    raise NumericalFailure(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def fiedler_value(lap) -> float:
    """Algebraic connectivity: the second-smallest Laplacian eigenvalue."""
    rho2 = float(jacobi_eigenvalues(lap)[1])
    if not rho2 > 0:
        raise NumericalFailure(f"second-smallest eigenvalue {rho2!r} is not positive")
    return rho2


def spectral_norm(lap) -> float:
    """Largest eigenvalue, which is the 2-norm for a symmetric PSD matrix."""
    return float(jacobi_eigenvalues(lap)[-1])
