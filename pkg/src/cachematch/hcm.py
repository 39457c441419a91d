"""Hierarchical color matching: color-partitioned placement and delivery.

Files are split round-robin into chi color classes; inside each cluster every
color class x receives floor(d * P_x) dedicated caches, where P_x is the
class's popularity mass (leftover caches stay colorless and idle).  Users are
matched only within their file's color, and each color runs its own coded
delivery across the clusters.  Unmatched users are unicast.

The color count chi = floor(alpha * g * d / (2 * (1 + t) * log K)) uses the
popularity split gain g = (3^(1-beta) - 1) / 4^(1-beta); when log K < 2*g*alpha
the plan degenerates to a single color.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .delivery import coded_delivery_rate
from .errors import DomainError
from .mathkit import SQRT_TWO_PI
from .popularity import ZipfCatalog
from .traffic import RequestProfile


def popularity_split_gain(beta: float) -> float:
    """g = (3^(1-beta) - 1) / 4^(1-beta), in (0, 1/2] for beta in [0, 1)."""
    if not 0 <= beta < 1:
        raise DomainError("split gain requires beta in [0, 1)")
    e = 1.0 - beta
    return (3.0**e - 1.0) / 4.0**e


def _check_slack(config: SystemConfig, t: float) -> None:
    if not 0 <= t <= config.t0:
        raise DomainError(f"t = {t} must lie in [0, t0 = {config.t0}]")


def compute_chi(config: SystemConfig, t: float) -> int:
    """Color count; returns 1 when K is too small for a multi-color plan."""
    if not 0 <= config.beta < 1:
        raise DomainError("color plans require beta in [0, 1)")
    _check_slack(config, t)
    g = popularity_split_gain(config.beta)
    log_k = math.log(config.K)
    if log_k < 2.0 * g * config.alpha:
        return 1
    chi = int(math.floor(config.alpha * g * config.d / (2.0 * (1.0 + t) * log_k)))
    return max(1, chi)


def unicast_fallback(config: SystemConfig) -> bool:
    """True when log K < 2*g*alpha, forcing the single-color fallback."""
    g = popularity_split_gain(config.beta)
    return math.log(config.K) < 2.0 * g * config.alpha


@dataclass(frozen=True)
class ColorPlan:
    chi: int
    t: float
    gain: float  # g
    file_color: np.ndarray  # color of each file, 0-indexed, shape (N,)
    class_sizes: np.ndarray  # |W_x|, shape (chi,)
    class_mass: np.ndarray  # P_x, shape (chi,)
    caches_per_color: np.ndarray  # floor(d * P_x) per cluster, shape (chi,)
    colorless: int  # caches per cluster left unassigned
    fallback: bool  # single-color fallback was forced


def build_color_plan(config: SystemConfig, catalog: ZipfCatalog, t: float) -> ColorPlan:
    if catalog.N != config.N:
        raise DomainError(f"catalog size {catalog.N} != config N {config.N}")
    chi = compute_chi(config, t)
    file_color = np.arange(config.N, dtype=np.int64) % chi
    class_sizes = np.bincount(file_color, minlength=chi)
    class_mass = np.bincount(file_color, weights=catalog.p, minlength=chi)
    caches_per_color = np.floor(config.d * class_mass).astype(np.int64)
    colorless = config.d - int(caches_per_color.sum())
    for arr in (file_color, class_sizes, class_mass, caches_per_color):
        arr.setflags(write=False)
    return ColorPlan(
        chi=chi,
        t=float(t),
        gain=popularity_split_gain(config.beta),
        file_color=file_color,
        class_sizes=class_sizes,
        class_mass=class_mass,
        caches_per_color=caches_per_color,
        colorless=colorless,
        fallback=unicast_fallback(config),
    )


def hcm_rate(config: SystemConfig, t: float) -> float:
    """Analytic expected rate of the color plan at slack t."""
    if not 0 <= config.beta < 1:
        raise DomainError("color-plan rate requires beta in [0, 1)")
    _check_slack(config, t)
    chi = compute_chi(config, t)
    N, M, K = config.N, config.M, config.K
    unmatched = K ** (-t) / SQRT_TWO_PI
    if M >= math.ceil(N / chi):
        return unmatched
    if M == 0:
        return config.rho * K
    if M <= math.floor(N / chi):
        return min(config.rho * K, N / M - chi + unmatched)
    leftover_classes = N % chi
    coded = leftover_classes * (math.ceil(N / chi) / M - 1.0)
    return min(config.rho * K, coded + unmatched)


def per_color_rate_sum(config: SystemConfig, t: float) -> float:
    """Looser three-branch form of the summed per-color delivery rates."""
    if not 0 <= config.beta < 1:
        raise DomainError("color-plan rate requires beta in [0, 1)")
    _check_slack(config, t)
    chi = compute_chi(config, t)
    N, M = config.N, config.M
    if M >= math.ceil(N / chi):
        return 0.0
    if M == 0:
        return math.inf
    if M <= math.floor(N / chi):
        return N / M - 1.0
    return (N % chi) * (math.ceil(N / chi) / M - 1.0)


def unmatched_chain_bound(plan: ColorPlan, config: SystemConfig) -> float:
    """(1/sqrt(2*pi)) * K * sum_x P_x * (2*rho*e^(1-2*rho))^floor(d*P_x)."""
    base = 2.0 * config.rho * math.exp(1.0 - 2.0 * config.rho)
    terms = plan.class_mass * base ** plan.caches_per_color.astype(np.float64)
    return config.K * float(terms.sum()) / SQRT_TWO_PI


@dataclass(frozen=True)
class HcmTrialRate:
    coded_term: float
    unmatched_term: float
    total: float


def hcm_simulate(
    profile: RequestProfile, plan: ColorPlan, config: SystemConfig
) -> HcmTrialRate:
    """One-trial empirical decomposition under the color plan."""
    u = profile.counts
    chi = plan.chi
    clusters = config.num_clusters

    color_totals = np.zeros((chi, clusters), dtype=np.int64)
    np.add.at(color_totals, plan.file_color, u)
    slots = plan.caches_per_color[:, None]
    unmatched = int(np.maximum(color_totals - slots, 0).sum())

    coded = 0.0
    for x in range(chi):
        m_x = int(plan.caches_per_color[x])
        if m_x == 0:
            continue  # no caches for this color; its users are all unmatched
        rows = u[x::chi, :]
        cs = np.cumsum(rows, axis=0)
        prev = cs - rows
        matched = np.minimum(cs, m_x) - np.minimum(prev, m_x)
        distinct = int(np.count_nonzero(matched.sum(axis=1) > 0))
        coded += coded_delivery_rate(
            m_x * clusters, config.M, int(plan.class_sizes[x]), distinct
        )

    total = min(coded + unmatched, float(profile.total_users))
    return HcmTrialRate(coded, float(unmatched), total)


def color_plan_to_csv(plan: ColorPlan, config: SystemConfig, files_path: str, caches_path: str) -> None:
    """Dump (file, color) and (cluster, cache, color) tables, 1-indexed.

    Caches are colored in index order inside every cluster: color 1 takes the
    first floor(d*P_1) caches, color 2 the next block, and so on; leftover
    caches are listed with color 0 (colorless).
    """
    with open(files_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("file,color\n")
        for n, x in enumerate(plan.file_color):
            fh.write(f"{n + 1},{int(x) + 1}\n")
    cache_color = np.zeros(config.d, dtype=np.int64)  # 0 = colorless
    k = 0
    for x, m_x in enumerate(plan.caches_per_color):
        cache_color[k : k + int(m_x)] = x + 1
        k += int(m_x)
    with open(caches_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("cluster,cache,color\n")
        for c in range(config.num_clusters):
            for j in range(config.d):
                fh.write(f"{c + 1},{c * config.d + j + 1},{cache_color[j]}\n")
