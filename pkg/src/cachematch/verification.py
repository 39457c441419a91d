"""Numerical verification of every inequality the analysis relies on.

Each check evaluates one proved inequality (or structural property) at a
concrete config, either in closed form or against a short Monte Carlo run
with 3-sigma slack.  Checks whose preconditions the config does not meet are
reported as SKIPPED, never silently dropped; in particular, when the config
misses the cluster-size floor d >= (2*(1+t0)/alpha)*ln K, all checks that
compare simulation against the t0-tail formulas are skipped because those
formulas are only guaranteed above the floor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    DISTINCT_FRACTION,
    distinct_files_tail_bound,
    gap_constant,
    lower_bound_report,
    optimality_gap,
)
from .config import SystemConfig, validate
from .errors import DomainError, InsufficientMemory
from .hcm import build_color_plan, hcm_rate, unmatched_chain_bound
from .mathkit import (
    SQRT_TWO_PI,
    conditional_mean_above,
    cramer_h,
    excess_stirling_bound,
    expected_excess,
    poisson_pmf,
    poisson_tail,
    poisson_upper_tail_bound,
)
from .montecarlo import (
    HCM_SCHEME,
    PAM_SHALLOW_SCHEME,
    PCD_SCHEME,
    ExperimentSpec,
    collect_trials,
)
from .pam_shallow import memory_threshold, pam_shallow_rate, pam_shallow_serve, proportional_placement
from .pam_steep import build_knapsack, mlp_match, pam_steep_rate, solve_fractional_knapsack
from .pcd import pcd_rate_shallow, pcd_rate_steep, unmatched_tail_term
from .popularity import build_catalog, partial_sum_A, partial_sum_envelope
from .traffic import MATCHING_ROLE, sample_profile, stream

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    status: str
    detail: str


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckOutcome, ...]
    warnings: tuple[str, ...]

    @property
    def failed(self) -> tuple[CheckOutcome, ...]:
        return tuple(c for c in self.checks if c.status == FAIL)

    @property
    def all_pass(self) -> bool:
        return not self.failed

    def to_json(self) -> str:
        payload = {
            "warnings": list(self.warnings),
            "checks": [
                {"name": c.name, "status": c.status, "detail": c.detail} for c in self.checks
            ],
            "passed": sum(c.status == PASS for c in self.checks),
            "failed": sum(c.status == FAIL for c in self.checks),
            "skipped": sum(c.status == SKIPPED for c in self.checks),
        }
        return json.dumps(payload, sort_keys=True, indent=2)


class _Suite:
    def __init__(self) -> None:
        self.checks: list[CheckOutcome] = []

    def run(self, name: str, fn) -> None:
        try:
            ok, detail = fn()
        except (DomainError, InsufficientMemory) as exc:
            self.checks.append(CheckOutcome(name, SKIPPED, str(exc)))
            return
        except Exception as exc:  # an unexpected crash is a failure, not a skip
            self.checks.append(CheckOutcome(name, FAIL, f"raised {exc!r}"))
            return
        self.checks.append(CheckOutcome(name, PASS if ok else FAIL, detail))

    def skip(self, name: str, reason: str) -> None:
        self.checks.append(CheckOutcome(name, SKIPPED, reason))


def _mc_stats(rows: np.ndarray, col: int) -> tuple[float, float]:
    vals = rows[:, col]
    n = len(vals)
    se = 0.0 if n < 2 else float(vals.std(ddof=1) / math.sqrt(n))
    return float(vals.mean()), se


def _binomial_tail(n: int, q: float, k0: int) -> float:
    """Exact Pr{Bin(n, q) >= k0} via log-space summation."""
    if k0 <= 0:
        return 1.0
    if k0 > n:
        return 0.0
    lq, l1q = math.log(q), math.log1p(-q)
    total = 0.0
    for j in range(k0, n + 1):
        lc = math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)
        total += math.exp(lc + j * lq + (n - j) * l1q)
    return min(total, 1.0)


def verify_config(config: SystemConfig, seed: int = 0, trials: int = 400) -> VerificationReport:
    report = validate(config)
    warnings = tuple(w.detail for w in report.warnings)
    floor_met = config.meets_cluster_floor
    suite = _Suite()
    catalog = build_catalog(config.N, config.beta)
    lam = config.rho * config.d  # mean requests per cluster
    shallow = 0 <= config.beta < 1

    # --- scalar tail machinery -------------------------------------------
    def partial_sum_sandwich():
        if not shallow:
            raise DomainError("sandwich envelope applies to beta in [0, 1)")
        for m in sorted({1, 2, 10, min(100, config.N), config.N}):
            lo, hi = partial_sum_envelope(m, config.beta)
            val = partial_sum_A(m, config.beta)
            if not lo <= val <= hi:
                return False, f"sandwich violated at m={m}: {lo} <= {val} <= {hi}"
        return True, f"A_m within [(m^(1-b)-1)/(1-b), m^(1-b)/(1-b)] up to m={config.N}"

    def excess_vs_mode():
        m = max(config.d, int(math.ceil(lam)))
        lhs = expected_excess(lam, m)
        rhs = m * poisson_pmf(m, lam)
        ok = lhs <= rhs + 1e-10
        return ok, f"E[(Y-m)+] = {lhs:.6g} vs m*pmf = {rhs:.6g} at m={m}, lam={lam:.4g}"

    def conditional_mean_identity():
        m = max(1, int(math.ceil(lam)))
        direct_num = sum(j * poisson_pmf(j, lam) for j in range(m, m + 400))
        direct_den = sum(poisson_pmf(j, lam) for j in range(m, m + 400))
        formula = conditional_mean_above(lam, m)
        rel = abs(direct_num / direct_den - formula) / max(1.0, formula)
        return rel <= 1e-10, f"identity residual {rel:.3g} at m={m}"

    def chernoff_tail():
        for eps in (0.1, 0.5, 1.0):
            m0 = int(math.ceil((1.0 + eps) * lam))
            tail = poisson_tail(m0, lam)
            bound = poisson_upper_tail_bound(lam, eps)
            if tail > bound:
                return False, f"tail {tail:.6g} > bound {bound:.6g} at eps={eps}"
        return True, "Pr{Y >= (1+eps)lam} <= exp(-lam*h(1+eps)) for eps in {0.1, 0.5, 1}"

    def excess_factorial():
        lhs = expected_excess(lam, config.d)
        rhs = excess_stirling_bound(config.d, config.rho)
        return lhs <= rhs, f"E[(Y-d)+] = {lhs:.6g} vs d*(rho*e^(1-rho))^d/sqrt(2pi) = {rhs:.6g}"

    suite.run("partial-sum-sandwich", partial_sum_sandwich)
    suite.run("poisson-excess-vs-mode", excess_vs_mode)
    suite.run("poisson-conditional-mean", conditional_mean_identity)
    suite.run("poisson-chernoff-tail", chernoff_tail)
    suite.run("excess-factorial-bound", excess_factorial)

    def cluster_unmatched_analytic():
        exact = config.num_clusters * expected_excess(lam, config.d)
        bound = config.K * (config.rho * math.e ** (1.0 - config.rho)) ** config.d / SQRT_TWO_PI
        return exact <= bound, f"exact E[U0] = {exact:.6g} vs factorial bound {bound:.6g}"

    suite.run("cluster-unmatched-analytic", cluster_unmatched_analytic)

    # --- replication-free scheme, Monte Carlo ----------------------------
    pcd_rows = None

    def get_pcd_rows():
        nonlocal pcd_rows
        if pcd_rows is None:
            spec = ExperimentSpec(config=config, scheme=PCD_SCHEME, trials=trials, seed=seed)
            pcd_rows = collect_trials(spec)
        return pcd_rows

    if floor_met:

        def unmatched_tail_mc():
            rows = get_pcd_rows()
            mean, se = _mc_stats(rows, 2)
            tail = unmatched_tail_term(config.K, config.t0)
            exact = config.num_clusters * expected_excess(lam, config.d)
            ok = mean <= tail + 3 * se and mean <= exact + 3 * se + 1e-12
            return ok, f"mean U0 = {mean:.6g} (se {se:.3g}) vs K^-t0 tail {tail:.6g}"

        def pcd_rate_mc():
            rows = get_pcd_rows()
            mean, se = _mc_stats(rows, 0)
            analytic = (pcd_rate_shallow(config) if shallow else pcd_rate_steep(config)).total
            ok = mean <= analytic + 3 * se
            return ok, f"mean rate {mean:.6g} (se {se:.3g}) vs analytic {analytic:.6g}"

        suite.run("unmatched-tail-mc", unmatched_tail_mc)
        suite.run("pcd-rate-mc", pcd_rate_mc)
    else:
        reason = (
            f"cluster floor not met (d = {config.d} < {config.cluster_floor:.4g}); "
            "t0-tail formulas are not guaranteed"
        )
        suite.skip("unmatched-tail-mc", reason)
        suite.skip("pcd-rate-mc", reason)

    def distinct_coverage_tail():
        if config.beta != 0:
            raise DomainError("coverage tail is proved for uniform popularity")
        if config.N < 10:
            raise DomainError("coverage tail is proved for N >= 10")
        eps = 0.2
        q = (1.0 - 1.0 / config.N) ** config.N  # per-file miss probability <= e^-1
        k0 = int(math.ceil((math.exp(-1.0) + eps) * config.N))
        exact = _binomial_tail(config.N, q, k0)
        bound = distinct_files_tail_bound(config.N, eps)
        return exact <= bound, f"exact miss tail {exact:.6g} vs KL bound {bound:.6g}"

    suite.run("distinct-coverage-tail", distinct_coverage_tail)

    # --- replication scheme, shallow -------------------------------------
    if shallow:
        above = config.M >= memory_threshold(config)

        def replication_threshold():
            if above:
                placement = proportional_placement(config, catalog)
                copies = placement.copies
                ok = (
                    copies.min() >= 1
                    and copies.max() <= config.d
                    and int(copies.sum()) <= config.d * int(math.floor(config.M))
                )
                return ok, f"placement exists; copies sum {int(copies.sum())}, cap {config.d * int(math.floor(config.M))}"
            try:
                proportional_placement(config, catalog)
            except InsufficientMemory as exc:
                return True, f"below threshold, placement correctly refused: {exc}"
            return False, "below threshold but placement did not refuse"

        def load_decay_positive():
            from .pam_shallow import load_decay_exponent

            z = load_decay_exponent(config.rho, config.beta)
            return z > 0, f"z = {z:.6g}"

        suite.run("replication-threshold", replication_threshold)
        suite.run("load-decay-positive", load_decay_positive)

        if above and floor_met:

            def pam_rate_mc():
                spec = ExperimentSpec(
                    config=config, scheme=PAM_SHALLOW_SCHEME, trials=trials, seed=seed
                )
                rows = collect_trials(spec)
                mean, se = _mc_stats(rows, 0)
                analytic = pam_shallow_rate(config)
                return mean <= analytic + 3 * se, (
                    f"mean rate {mean:.6g} (se {se:.3g}) vs analytic {analytic:.6g}"
                )

            suite.run("pam-rate-mc", pam_rate_mc)
        else:
            suite.skip(
                "pam-rate-mc",
                "memory below replication threshold" if not above else "cluster floor not met",
            )

        if above:

            def pam_feasible_all_matched():
                placement = proportional_placement(config, catalog)
                bad = 0
                for trial in range(min(trials, 50)):
                    profile = sample_profile(config, catalog, seed, trial)
                    out = pam_shallow_serve(profile, placement, config)
                    if out.all_feasible and out.unmatched_survivors != 0:
                        bad += 1
                return bad == 0, f"{bad} feasible trials with unmatched users"

            suite.run("pam-feasible-all-matched", pam_feasible_all_matched)
        else:
            suite.skip("pam-feasible-all-matched", "memory below replication threshold")
    else:
        for name in ("replication-threshold", "load-decay-positive", "pam-rate-mc", "pam-feasible-all-matched"):
            suite.skip(name, "requires beta in [0, 1)")

    # --- lower bounds and the gap -----------------------------------------
    def gap_ratio():
        ratio = optimality_gap(config)
        cap = gap_constant(config)
        return ratio <= cap, f"ratio {ratio:.6g} vs constant {cap:.6g}"

    def lower_bound_consistency():
        rep = lower_bound_report(config)
        achievable = [pcd_rate_shallow(config).total, pam_shallow_rate(config), hcm_rate(config, config.t0)]
        worst = min(achievable)
        ok = rep.closed_form <= worst and rep.best <= config.rho * config.K
        return ok, f"closed form {rep.closed_form:.6g} vs min achievable {worst:.6g}"

    suite.run("gap-ratio", gap_ratio)
    suite.run("lower-bound-consistency", lower_bound_consistency)

    # --- color plan -------------------------------------------------------
    if shallow:
        plan = build_color_plan(config, catalog, config.t0)

        def hcm_dominance():
            lhs = hcm_rate(config, config.t0)
            rhs = pcd_rate_shallow(config).total
            return lhs <= rhs, f"color-plan rate {lhs:.6g} vs replication-free {rhs:.6g}"

        def hcm_exact_branch():
            if config.M < math.ceil(config.N / plan.chi):
                raise DomainError("memory below the exact-branch threshold ceil(N/chi)")
            lhs = hcm_rate(config, config.t0)
            rhs = unmatched_tail_term(config.K, config.t0)
            return lhs == rhs, f"{lhs!r} == {rhs!r}"

        def hcm_chain():
            if int(plan.caches_per_color.min()) < 1:
                raise DomainError("chain bound needs every color to own a cache")
            exact = 0.0
            for x in range(plan.chi):
                lam_x = config.rho * config.d * float(plan.class_mass[x])
                exact += config.num_clusters * expected_excess(lam_x, int(plan.caches_per_color[x]))
            bound = unmatched_chain_bound(plan, config)
            return exact <= bound, f"exact unmatched {exact:.6g} vs chain bound {bound:.6g}"

        suite.run("hcm-dominance", hcm_dominance)
        suite.run("hcm-exact-branch", hcm_exact_branch)
        suite.run("hcm-chain-bound", hcm_chain)

        if floor_met:

            def hcm_rate_mc():
                spec = ExperimentSpec(config=config, scheme=HCM_SCHEME, trials=trials, seed=seed)
                rows = collect_trials(spec)
                mean, se = _mc_stats(rows, 0)
                analytic = hcm_rate(config, config.t0)
                return mean <= analytic + 3 * se, (
                    f"mean rate {mean:.6g} (se {se:.3g}) vs analytic {analytic:.6g}"
                )

            suite.run("hcm-rate-mc", hcm_rate_mc)
        else:
            suite.skip("hcm-rate-mc", "cluster floor not met")
    else:
        for name in ("hcm-dominance", "hcm-exact-branch", "hcm-chain-bound", "hcm-rate-mc"):
            suite.skip(name, "requires beta in [0, 1)")

    # --- steep replication ------------------------------------------------
    if config.beta > 1 and config.d >= 2:
        instance = build_knapsack(config, catalog)
        placement = solve_fractional_knapsack(instance)

        def knapsack_memory():
            total = int(placement.copies.sum())
            ok = total <= config.d * config.M and int(placement.copies.max(initial=0)) <= config.d
            return ok, f"copies total {total} within capacity {config.d * config.M:.6g}"

        def knapsack_density_prefix():
            density = instance.values / instance.weights
            order = sorted(range(config.N), key=lambda n: (-density[n], n))
            seen_zero = False
            for n in order:
                if placement.x[n] == 0:
                    seen_zero = True
                elif placement.x[n] == 1 and seen_zero:
                    return False, f"file {n} taken after a denser file was dropped"
            return True, "greedy picks form a density-ordered prefix"

        def mlp_structural():
            for trial in range(min(trials, 20)):
                profile = sample_profile(config, catalog, seed, trial)
                rng = stream(seed, trial, MATCHING_ROLE)
                for c in range(config.num_clusters):
                    req = profile.counts[:, c]
                    out = mlp_match(req, placement, rng)
                    caches = [k for _, k in out.matched]
                    if len(set(caches)) != len(caches):
                        return False, f"trial {trial} cluster {c}: a cache matched twice"
                    for n, k in out.matched:
                        if k not in placement.cache_sets[n]:
                            return False, f"trial {trial}: matched cache lacks the file"
                    if len(out.matched) + out.unmatched_requests != int(req.sum()):
                        return False, f"trial {trial}: request conservation broken"
            return True, "matchings feasible and request-conserving"

        def steep_envelope():
            env = pam_steep_rate(config, catalog)
            direct = min(
                config.K / (config.d * config.M) ** (config.beta - 1.0),
                config.K ** (1.0 / config.beta),
            )
            ok = env.order_value == direct and env.expected_uncached >= 0
            ok = ok and env.vanishing_memory_met == (
                config.d * config.M >= config.N * math.log(config.N)
            )
            return ok, f"order value {env.order_value:.6g}, E[uncached] {env.expected_uncached:.6g}"

        suite.run("knapsack-memory", knapsack_memory)
        suite.run("knapsack-density-prefix", knapsack_density_prefix)
        suite.run("mlp-structural", mlp_structural)
        suite.run("steep-envelope", steep_envelope)
    else:
        for name in ("knapsack-memory", "knapsack-density-prefix", "mlp-structural", "steep-envelope"):
            suite.skip(name, "requires beta > 1 and d >= 2")

    return VerificationReport(checks=tuple(suite.checks), warnings=warnings)
