"""Poisson request profiles on counter-based random streams.

Streams are keyed by (seed, trial) through the Philox counter-based generator,
so any trial's profile can be regenerated in isolation: results do not depend
on iteration order or on how trials are sheared across workers.  Role 0 of a
stream draws the request profile; role 1 feeds any randomized matcher run on
the same trial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DomainError
from .popularity import ZipfCatalog

_MASK64 = (1 << 64) - 1

PROFILE_ROLE = 0
MATCHING_ROLE = 1


def stream(seed: int, trial: int, role: int = PROFILE_ROLE) -> np.random.Generator:
    """Independent generator for (seed, trial, role); same inputs, same draws."""
    if trial < 0:
        raise DomainError("trial index must be >= 0")
    key = np.array([seed & _MASK64, trial & _MASK64], dtype=np.uint64)
    bitgen = np.random.Philox(key=key)
    if role:
        bitgen = bitgen.jumped(role)
    return np.random.Generator(bitgen)


@dataclass(frozen=True)
class RequestProfile:
    """Request counts u[n, c] for file n (0-indexed) in cluster c."""

    counts: np.ndarray  # shape (N, num_clusters), dtype int64
    config: SystemConfig

    @property
    def total_users(self) -> int:
        return int(self.counts.sum())

    def cluster_totals(self) -> np.ndarray:
        """Y(c) = total requests per cluster, shape (num_clusters,)."""
        return self.counts.sum(axis=0)


def sample_profile(
    config: SystemConfig, catalog: ZipfCatalog, seed: int, trial: int = 0
) -> RequestProfile:
    """Draw u[n, c] ~ Poisson(rho * d * p_n), independent across (n, c)."""
    if catalog.N != config.N:
        raise DomainError(f"catalog size {catalog.N} != config N {config.N}")
    rng = stream(seed, trial, PROFILE_ROLE)
    lam = config.rho * config.d * catalog.p
    counts = rng.poisson(lam=lam[:, None], size=(config.N, config.num_clusters))
    counts = counts.astype(np.int64, copy=False)
    counts.setflags(write=False)
    return RequestProfile(counts=counts, config=config)


def distinct_files(profile: RequestProfile, cluster_subset=None) -> int:
    """Number of files with at least one request in the given clusters."""
    counts = profile.counts
    if cluster_subset is not None:
        subset = sorted(set(int(c) for c in cluster_subset))
        if subset and (subset[0] < 0 or subset[-1] >= counts.shape[1]):
            raise DomainError("cluster index out of range")
        counts = counts[:, subset]
    return int(np.count_nonzero(counts.sum(axis=1) > 0))


def profile_to_csv(profile: RequestProfile, path: str) -> None:
    """Dump nonzero (cluster, file, count) triples, cluster-major, 1-indexed."""
    files, clusters = np.nonzero(profile.counts)
    order = np.lexsort((files, clusters))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("cluster,file,count\n")
        for i in order:
            n, c = files[i], clusters[i]
            fh.write(f"{c + 1},{n + 1},{profile.counts[n, c]}\n")
