"""Bipartite matching between a cluster's requests and its caches.

Requests sit on the left, caches on the right.  max_matching runs
Hopcroft-Karp with a fixed scan order (left vertices ascending, adjacency in
stored order), so the returned assignment is deterministic for a given graph,
not merely of deterministic size.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import DomainError, MissingCopyCount

_INF = float("inf")


@dataclass(frozen=True)
class ClusterBipartiteGraph:
    num_left: int
    num_right: int
    adjacency: tuple[tuple[int, ...], ...]  # adjacency[u] = caches usable by u

    def __post_init__(self):
        if self.num_left < 0 or self.num_right < 0:
            raise DomainError("vertex counts must be nonnegative")
        if len(self.adjacency) != self.num_left:
            raise DomainError("adjacency must list every left vertex")
        for nbrs in self.adjacency:
            for v in nbrs:
                if not 0 <= v < self.num_right:
                    raise DomainError(f"right vertex {v} out of range")


@dataclass(frozen=True)
class MatchingOutcome:
    pairs: tuple[tuple[int, int], ...]  # (left, right), left ascending
    unmatched_left: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.pairs)


def max_matching(graph: ClusterBipartiteGraph) -> MatchingOutcome:
    """Maximum bipartite matching (Hopcroft-Karp), deterministic tie-breaking."""
    nl, nr = graph.num_left, graph.num_right
    adj = graph.adjacency
    match_l = [-1] * nl
    match_r = [-1] * nr
    dist = [0.0] * nl

    def bfs() -> bool:
        queue = deque()
        for u in range(nl):
            if match_l[u] == -1:
                dist[u] = 0.0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in range(nl):
            if match_l[u] == -1:
                dfs(u)

    pairs = tuple((u, match_l[u]) for u in range(nl) if match_l[u] != -1)
    unmatched = tuple(u for u in range(nl) if match_l[u] == -1)
    return MatchingOutcome(pairs=pairs, unmatched_left=unmatched)


def fractional_load(placement_at_cache, requests, copies) -> float:
    """Load sum_n u_n / d_n of one cache over its stored files.

    placement_at_cache lists (file, stored fraction) pairs; entries with zero
    fraction are ignored.  requests and copies are indexable by file id.
    Raises MissingCopyCount when a stored file has copy count zero.
    """
    load = 0.0
    for entry in placement_at_cache:
        n, frac = entry
        if frac <= 0:
            continue
        d_n = copies[n]
        if d_n == 0:
            raise MissingCopyCount(f"file {n} is stored but has copy count 0")
        load += requests[n] / d_n
    return load
