"""Knapsack storage allocation and sequential matching for steep popularity.

Storage: a fractional knapsack over files maximizes the per-cluster hit value
v_n = 1 - (1 - p_n)^d subject to copy-count weights w_n and capacity d*M.
Fully selected files keep c_n = w_n copies; the (at most one) fractional file
is dropped.  Copies are dealt to caches round-robin in file order.

Delivery: requests are matched most-popular-last.  Scanning files from least
to most popular, each request picks a uniformly random available cache holding
its file and retires that cache.  Files whose requests cannot all be matched
are broadcast from the server, one transmission per distinct file.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DomainError
from .popularity import ZipfCatalog
from .traffic import RequestProfile


@dataclass(frozen=True)
class KnapsackInstance:
    values: np.ndarray  # v_n = 1 - (1 - p_n)^d
    weights: np.ndarray  # per-file copy cost, ints in [1, d]
    capacity: float  # d * M
    cluster_size: int
    n1: int  # head/middle split (1-indexed file count)
    n2: int  # middle/tail split (1-indexed file count)


@dataclass(frozen=True)
class KsPlacement:
    x: np.ndarray  # fractional solution, x_n in [0, 1]
    copies: np.ndarray  # c_n = w_n * floor(x_n)
    cached: frozenset  # files with x_n == 1 (0-indexed)
    cache_contents: tuple[tuple[int, ...], ...]
    cache_sets: tuple[tuple[int, ...], ...]  # caches holding each file, sorted


def build_knapsack(config: SystemConfig, catalog: ZipfCatalog) -> KnapsackInstance:
    if config.beta <= 1:
        raise DomainError("knapsack storage targets beta > 1")
    if config.d < 2:
        raise DomainError("need cluster size d >= 2")
    N, d, beta = config.N, config.d, config.beta
    p = catalog.p
    p1 = float(p[0])
    log_d = math.log(d)

    n1 = int(math.floor(d ** (1.0 / beta) / (p1 * log_d ** (2.0 / beta))))
    n1 = max(1, n1)
    n2 = min(N, int(math.ceil(d ** ((1.0 + 1.0 / beta) / 2.0))))
    n2 = max(1, n2)
    if n1 > n2:
        warnings.warn(
            f"split points crossed (n1={n1} > n2={n2}) at d={d}; clamping n1",
            RuntimeWarning,
            stacklevel=2,
        )
        n1 = n2

    weights = np.ones(N, dtype=np.int64)
    weights[0] = d
    head = slice(1, n1)  # files 2..n1
    weights[head] = np.ceil((1.0 + p1 / 2.0) * config.rho * d * p[head]).astype(np.int64)
    mid_cost = int(math.ceil(4.0 * p1 * log_d**2))
    weights[n1:n2] = mid_cost  # files n1+1..n2
    np.minimum(weights, d, out=weights)  # a cluster cannot hold > d copies

    values = 1.0 - (1.0 - p) ** d
    values.setflags(write=False)
    weights.setflags(write=False)
    return KnapsackInstance(
        values=values,
        weights=weights,
        capacity=float(d * config.M),
        cluster_size=d,
        n1=n1,
        n2=n2,
    )


def solve_fractional_knapsack(instance: KnapsackInstance) -> KsPlacement:
    """Greedy ratio fill; exact for the fractional relaxation."""
    v, w = instance.values, instance.weights
    n_files = len(v)
    order = sorted(range(n_files), key=lambda i: (-(v[i] / w[i]), i))
    x = np.zeros(n_files)
    remaining = instance.capacity
    for i in order:
        if remaining <= 0:
            break
        if w[i] <= remaining:
            x[i] = 1.0
            remaining -= float(w[i])
        else:
            x[i] = remaining / float(w[i])
            remaining = 0.0
    copies = np.where(x == 1.0, w, 0).astype(np.int64)
    cached = frozenset(int(i) for i in np.nonzero(x == 1.0)[0])

    d = instance.cluster_size
    seq = np.repeat(np.arange(n_files), copies)
    contents: list[list[int]] = [[] for _ in range(d)]
    for r, n in enumerate(seq):
        contents[r % d].append(int(n))
    cache_sets: list[list[int]] = [[] for _ in range(n_files)]
    for k, files in enumerate(contents):
        for n in files:
            cache_sets[n].append(k)
    x.setflags(write=False)
    copies.setflags(write=False)
    return KsPlacement(
        x=x,
        copies=copies,
        cached=cached,
        cache_contents=tuple(tuple(c) for c in contents),
        cache_sets=tuple(tuple(sorted(s)) for s in cache_sets),
    )


@dataclass(frozen=True)
class MlpOutcome:
    matched: tuple[tuple[int, int], ...]  # (file, cache) in match order
    unmatched_requests: int
    server_files: tuple[int, ...]  # distinct files with unmatched requests, sorted


def mlp_match(requests, placement: KsPlacement, rng: np.random.Generator) -> MlpOutcome:
    """Most-popular-last matching for one cluster.

    Files are scanned from the least popular (largest index) down to the most
    popular.  Every matched request consumes exactly one uniform draw over the
    sorted list of currently available caches holding its file; requests that
    find no available cache consume no draw.
    """
    n_files = len(placement.cache_sets)
    available = [True] * len(placement.cache_contents)
    matched: list[tuple[int, int]] = []
    unmatched = 0
    server: list[int] = []

    for n in range(n_files - 1, -1, -1):
        r = int(requests[n])
        if r == 0:
            continue
        served_short = False
        for _ in range(r):
            cand = [k for k in placement.cache_sets[n] if available[k]]
            if not cand:
                unmatched += 1
                served_short = True
                continue
            k = cand[int(rng.integers(0, len(cand)))]
            available[k] = False
            matched.append((n, k))
        if served_short:
            server.append(n)

    return MlpOutcome(
        matched=tuple(matched),
        unmatched_requests=unmatched,
        server_files=tuple(sorted(server)),
    )


@dataclass(frozen=True)
class RateEnvelope:
    """Order-level rate guarantees; leading constants are not pinned down."""

    order_value: float  # min{K / (d*M)^(beta-1), K^(1/beta)}
    vanishing_memory_met: bool  # d*M >= N*log(N): rate is o(1)
    expected_uncached: float  # exact E[# distinct uncached files requested by K users]
    constants_unverified: bool


def pam_steep_rate(config: SystemConfig, catalog: ZipfCatalog | None = None) -> RateEnvelope:
    if config.beta <= 1:
        raise DomainError("steep envelope requires beta > 1")
    if catalog is None:
        from .popularity import build_catalog

        catalog = build_catalog(config.N, config.beta)
    placement = solve_fractional_knapsack(build_knapsack(config, catalog))
    K, d, M, beta = config.K, config.d, config.M, config.beta

    if M > 0 and d * M > 1:
        order_value = min(K / (d * M) ** (beta - 1.0), K ** (1.0 / beta))
    else:
        order_value = K ** (1.0 / beta)
    vanishing = d * M >= config.N * math.log(config.N)

    mask = np.ones(config.N, dtype=bool)
    if placement.cached:
        mask[list(placement.cached)] = False
    expected_uncached = float(np.sum(1.0 - (1.0 - catalog.p[mask]) ** K))

    return RateEnvelope(
        order_value=order_value,
        vanishing_memory_met=bool(vanishing),
        expected_uncached=expected_uncached,
        constants_unverified=True,
    )


@dataclass(frozen=True)
class SteepServeOutcome:
    server_files: int  # distinct files broadcast by the server
    matched_users: int
    unmatched_requests: int
    rate: float


def pam_steep_serve(
    profile: RequestProfile, placement: KsPlacement, rng: np.random.Generator
) -> SteepServeOutcome:
    """Serve one profile: MLP per cluster (index order), shared draw stream."""
    server_mask = np.zeros(profile.counts.shape[0], dtype=bool)
    matched_users = 0
    unmatched = 0
    for c in range(profile.counts.shape[1]):
        outcome = mlp_match(profile.counts[:, c], placement, rng)
        matched_users += len(outcome.matched)
        unmatched += outcome.unmatched_requests
        for n in outcome.server_files:
            server_mask[n] = True
    distinct = int(np.count_nonzero(server_mask))
    return SteepServeOutcome(
        server_files=distinct,
        matched_users=matched_users,
        unmatched_requests=unmatched,
        rate=float(distinct),
    )


def placement_to_csv(placement: KsPlacement, path: str) -> None:
    """Dump (cache, file) pairs, 1-indexed, cache-major."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("cache,file\n")
        for k, files in enumerate(placement.cache_contents):
            for n in files:
                fh.write(f"{k + 1},{n + 1}\n")
