"""System description, structural validation, and config-file loading.

The network is K caches of M files each, partitioned into K/d clusters of d
caches.  Requests for a catalog of N files arrive per cluster as independent
Poisson counts with intensity rho*d*p_n for file n, where p_n is a Zipf(beta)
popularity.  t0 > 0 is the tail-decay slack used by the analytic unmatched-user
terms.

Hard invariants (d | K, N >= K, rho in (0, 1/2), beta != 1, positivity) make a
configuration unusable when broken; the cluster-size floor

    d >= (2*(1 + t0) / alpha) * log K,      alpha = -log(2*rho*e^(1-2*rho))

only marks the analytic formulas as outside their proof regime, so it is
reported as a warning rather than an error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import HardInvariantViolation

CONFIG_KEYS = ("k", "d", "n", "m", "rho", "beta", "t0")


@dataclass(frozen=True)
class SystemConfig:
    K: int  # number of caches; d must divide K
    d: int  # cluster size
    N: int  # catalog size; N >= K
    M: float  # per-cache memory, in files
    rho: float  # request intensity per cache slot, 0 < rho < 1/2
    beta: float  # Zipf exponent, beta >= 0 and beta != 1
    t0: float  # tail-decay slack, t0 > 0

    @property
    def num_clusters(self) -> int:
        return self.K // self.d

    @property
    def alpha(self) -> float:
        """alpha = -log(2*rho*e^(1-2*rho)); positive for rho in (0, 1/2)."""
        return -math.log(2.0 * self.rho * math.exp(1.0 - 2.0 * self.rho))

    @property
    def cluster_floor(self) -> float:
        """Smallest d for which the tail bounds are proved at slack t0."""
        return 2.0 * (1.0 + self.t0) / self.alpha * math.log(self.K)

    @property
    def meets_cluster_floor(self) -> bool:
        return self.d >= self.cluster_floor

    @property
    def expected_users(self) -> float:
        return self.rho * self.K


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    severity: str  # "error" or "warning"
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def hard_failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed and c.severity == "error")

    @property
    def warnings(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed and c.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.hard_failures


def validate(config: SystemConfig) -> ValidationReport:
    """Check every structural invariant of *config*.

    Returns the full pass/fail report when no hard invariant is broken
    (soft failures appear as warnings).  Raises HardInvariantViolation,
    carrying the report, when any hard invariant fails.
    """
    checks = []

    def check(name, passed, severity, detail):
        checks.append(CheckResult(name, bool(passed), severity, detail))

    ints_ok = all(isinstance(v, int) for v in (config.K, config.d, config.N))
    check("integer_sizes", ints_ok, "error", "K, d, N must be integers")
    positive = ints_ok and config.K >= 1 and config.d >= 1 and config.N >= 1
    check("positive_sizes", positive, "error", "K, d, N must be >= 1")
    check(
        "memory_nonnegative",
        isinstance(config.M, (int, float)) and config.M >= 0 and math.isfinite(config.M),
        "error",
        "M must be a finite nonnegative real",
    )
    check(
        "cluster_divides",
        positive and config.K % config.d == 0,
        "error",
        f"d = {config.d} must divide K = {config.K}",
    )
    check(
        "catalog_covers_caches",
        positive and config.N >= config.K,
        "error",
        f"N = {config.N} must be >= K = {config.K}",
    )
    check(
        "intensity_range",
        0.0 < config.rho < 0.5,
        "error",
        f"rho = {config.rho} must lie in (0, 1/2)",
    )
    check(
        "zipf_exponent",
        config.beta >= 0 and config.beta != 1.0,
        "error",
        f"beta = {config.beta} must be >= 0 and != 1 (unit exponent unsupported)",
    )
    check("tail_slack", config.t0 > 0, "error", f"t0 = {config.t0} must be > 0")

    hard_ok = all(c.passed for c in checks)
    if hard_ok:
        check(
            "cluster_floor",
            config.meets_cluster_floor,
            "warning",
            "d = %d is below the proof floor %.4g; analytic tail bounds are "
            "outside their proven regime" % (config.d, config.cluster_floor),
        )

    report = ValidationReport(tuple(checks))
    if not report.ok:
        names = ", ".join(c.name for c in report.hard_failures)
        raise HardInvariantViolation(f"hard invariant(s) failed: {names}", report)
    return report


def load_config(path: str) -> SystemConfig:
    """Build a SystemConfig from a JSON file with keys k, d, n, m, rho, beta, t0."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise HardInvariantViolation(f"{path}: expected a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise HardInvariantViolation(f"{path}: unknown keys {unknown}")
    missing = sorted(set(CONFIG_KEYS) - set(raw))
    if missing:
        raise HardInvariantViolation(f"{path}: missing keys {missing}")
    return SystemConfig(
        K=int(raw["k"]),
        d=int(raw["d"]),
        N=int(raw["n"]),
        M=float(raw["m"]),
        rho=float(raw["rho"]),
        beta=float(raw["beta"]),
        t0=float(raw["t0"]),
    )


@dataclass(frozen=True)
class PolyKPoint:
    """Polynomial scaling point: N = K^nu, d = K^delta, M = K^mu."""

    nu: float
    delta: float
    mu: float
    beta: float

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be >= 1 (catalog at least as large as caches)")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not 0 <= self.mu <= 1 or self.mu > self.nu:
            raise ValueError("mu must lie in [0, 1] with mu <= nu")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
