"""Machine-checkable validation suite.

Each criterion function measures one family of checks and returns a
CriterionResult with the raw numbers it saw, so reports stay useful when a
check fails. Randomised checks draw from seeded generators and are
reproducible run to run.

Levels: "quick" covers the exact-oracle suites up to n=5 plus all
closed-form identities; "full" extends the oracle suites to n=6 and adds
the order-200 saddle limits and the n=2000 sampling runs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import oracle, rates, sampler, trees
from .errors import CriticalPointError
from .textio import fmt17

QUICK = "quick"
FULL = "full"


@dataclass
class CriterionResult:
    cid: str
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid}: {self.name}"

    def to_json_dict(self):
        return {
            "id": self.cid,
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
        }


def _rel_err(a, b):
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def criterion_connected_weight_scaling(n_values=(3, 4, 5, 6), trials=20, seed=101):
    """Connected-event weight scales linearly in q: Z_K(n, lam, q) equals
    q * Z_K(n, lam, 1) to relative 1e-12."""
    rng = random.Random(seed)
    worst = 0.0
    cases = 0
    for n in n_values:
        for _ in range(trials):
            lam = rng.uniform(0.1, min(10.0, n - 0.1))
            q = rng.uniform(0.5, 10.0)
            zk_q = oracle.enumerate_report(oracle.ModelParams(n, lam, q)).z_connected
            zk_1 = oracle.enumerate_report(oracle.ModelParams(n, lam, 1.0)).z_connected
            worst = max(worst, _rel_err(zk_q, q * zk_1))
            cases += 1
    return CriterionResult(
        "1",
        "connected weight scales as q times the percolation weight",
        worst <= 1e-12,
        {"cases": cases, "worst_rel_err": fmt17(worst), "tolerance": "1e-12"},
    )


def criterion_rearrangement_identity(n_values=(3, 4, 5, 6)):
    """Multiplicity-sum rearrangement reproduces the exact weight of the
    acyclic-and-bounded event to relative 1e-9."""
    lams = (0.5, 1.0, 2.0)
    qs = (1.0, 1.5, 2.0, 3.0)
    worst = 0.0
    cases = 0
    for n in n_values:
        r_values = sorted({2, 3, n})
        for lam in lams:
            for q in qs:
                rep = oracle.enumerate_report(
                    oracle.ModelParams(n, lam, q), r_list=r_values
                )
                for r in r_values:
                    lhs = trees.acyclic_partition_identity(n, lam, q, r)
                    rhs = rep.z_acyclic_bounded[r]
                    worst = max(worst, _rel_err(lhs, rhs))
                    cases += 1
    return CriterionResult(
        "2",
        "acyclic-and-bounded rearrangement identity",
        worst <= 1e-9,
        {"cases": cases, "worst_rel_err": fmt17(worst), "tolerance": "1e-9"},
    )


def criterion_saddle_limits(r=200):
    """Order-r saddle point against its large-order limits, tolerances as
    stated: 1e-3 on s below alpha=1, 1e-2 elsewhere."""
    rows = []
    ok = True
    for alpha in (0.25, 0.5, 0.9, 1.5, 2.0, 5.0):
        sp = trees.solve_saddle(alpha, r)
        s_lim, th_lim, v_lim = trees.saddle_limits(alpha)
        s_tol = 1e-3 if alpha <= 1.0 else 1e-2
        errs = {
            "s": (abs(sp.s - s_lim), s_tol),
            "theta": (abs(sp.theta - th_lim), 1e-2),
            "value": (abs(sp.value - v_lim), 1e-2),
        }
        row = {"alpha": fmt17(alpha)}
        for key, (err, tol) in errs.items():
            row[f"{key}_err"] = fmt17(err)
            row[f"{key}_tol"] = fmt17(tol)
            row[f"{key}_ok"] = err < tol
            ok = ok and err < tol
        rows.append(row)
    return CriterionResult(
        "3",
        f"saddle point at order r={r} vs large-order limits",
        ok,
        {"rows": rows},
    )


def criterion_free_energy(samples=50, seed=202):
    """Closed-form free energy equals the grid-plus-golden sup of the rate
    curve to 1e-6, at parameters at least 0.05 away from critical; and the
    percolation free energy vanishes."""
    rng = random.Random(seed)
    worst = 0.0
    drawn = 0
    while drawn < samples:
        lam = rng.uniform(0.1, 10.0)
        q = rng.uniform(0.5, 10.0)
        if abs(lam - rates.lambda_c(q)) <= 0.05:
            continue
        drawn += 1
        closed = rates.free_energy(lam, q)
        numeric = rates.phi_sup(lam, q)
        worst = max(worst, abs(closed - numeric))
    worst_perc = max(
        abs(rates.free_energy(lam, 1.0)) for lam in (0.5, 0.9, 1.5, 3.0, 7.0)
    )
    passed = worst <= 1e-6 and worst_perc <= 1e-6
    return CriterionResult(
        "4",
        "closed-form free energy vs numeric sup of the rate curve",
        passed,
        {
            "samples": drawn,
            "worst_abs_err": fmt17(worst),
            "worst_percolation_abs": fmt17(worst_perc),
            "tolerance": "1e-6",
        },
    )


def criterion_phase_location():
    """Scan lambda on a 0.01-grid: the first point with a positive giant
    fraction lands within 0.01 of the predicted critical coupling."""
    rows = []
    ok = True
    for q in (1.0, 1.5, 2.0, 3.0, 4.0):
        lc = rates.lambda_c(q)
        onset = None
        k = 1
        while k * 0.01 < lc + 0.2:
            lam = k * 0.01
            k += 1
            try:
                positive = rates.theta_star(lam, q) > 0.0
            except CriticalPointError:
                # exactly-critical grid point: the branch is refused; the
                # transition for q <= 2 is continuous with zero fraction here
                positive = False
            if positive:
                onset = lam
                break
        good = onset is not None and abs(onset - lc) <= 0.01 + 1e-12
        ok = ok and good
        rows.append(
            {
                "q": fmt17(q),
                "lambda_c": fmt17(lc),
                "onset": fmt17(onset) if onset is not None else None,
                "ok": good,
            }
        )
    return CriterionResult(
        "5", "phase transition located on a 0.01 lambda-grid", ok, {"rows": rows}
    )


def criterion_endpoint_rates(trials=100, seed=303):
    """Rate-curve endpoints equal the connected and acyclic rates to 1e-12."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(trials):
        lam = rng.uniform(0.1, 10.0)
        q = rng.uniform(0.5, 10.0)
        worst = max(worst, abs(rates.phi(1.0, lam, q) - rates.connected_rate(lam)))
        worst = max(worst, abs(rates.phi(0.0, lam, q) - rates.acyclic_rate(lam, q)))
    return CriterionResult(
        "6",
        "rate-curve endpoints match connected and acyclic rates",
        worst <= 1e-12,
        {"trials": trials, "worst_abs_err": fmt17(worst), "tolerance": "1e-12"},
    )


def criterion_bounded_vs_acyclic(n_values=(3, 4, 5, 6)):
    """Exact inequality Z[no component larger than r] <=
    Z[acyclic] * (1-lam/n)^(-r*n/2) over the criterion-2 grid."""
    lams = (0.5, 1.0, 2.0)
    qs = (1.0, 1.5, 2.0, 3.0)
    violations = []
    cases = 0
    for n in n_values:
        r_values = sorted({2, 3, n})
        for lam in lams:
            for q in qs:
                rep = oracle.enumerate_report(
                    oracle.ModelParams(n, lam, q), r_list=r_values
                )
                for r in r_values:
                    bound = rep.z_acyclic * (1.0 - lam / n) ** (-0.5 * r * n)
                    cases += 1
                    if rep.z_bounded[r] > bound * (1.0 + 1e-12):
                        violations.append((n, lam, q, r))
    return CriterionResult(
        "7",
        "bounded-size weight dominated by the acyclic weight bound",
        not violations,
        {"cases": cases, "violations": violations},
    )


def criterion_sampler_correctness(sweeps=100_000, seed=404):
    """Stationarity of the exact n=3 kernel, and total-variation agreement
    of the sampled largest-size marginal with the oracle at n=5."""
    import numpy as np

    p3 = oracle.ModelParams(3, 1.5, 2.0)
    mat = sampler.transition_matrix(p3)
    w = np.array(
        [
            oracle.weight(oracle.EdgeConfiguration(n=3, bits=b), p3)
            for b in range(mat.shape[0])
        ]
    )
    resid = float(np.abs(w @ mat - w).max() / w.sum())

    p5 = oracle.ModelParams(5, 1.5, 2.0)
    cfg = sampler.ChainConfig(
        params=p5, seed=seed, burn_in_sweeps=1000, sample_sweeps=sweeps, thin=1
    )
    counts = {}
    total = 0
    for rec in sampler.iter_records(cfg):
        s = round(rec.largest_fraction * 5)
        counts[s] = counts.get(s, 0) + 1
        total += 1
    exact = oracle.largest_size_distribution(p5)
    tv = 0.5 * sum(
        abs(counts.get(s, 0) / total - exact.get(s, 0.0))
        for s in set(exact) | set(counts)
    )
    passed = resid <= 1e-12 and tv < 0.02
    return CriterionResult(
        "8",
        "sampler stationarity (n=3) and oracle marginal agreement (n=5)",
        passed,
        {
            "stationarity_residual": fmt17(resid),
            "tv_distance": fmt17(tv),
            "sweeps": sweeps,
            "tolerances": {"residual": "1e-12", "tv": "0.02"},
        },
    )


def criterion_giant_component(n=2000, seed=505):
    """Sampled giant-component fraction at n=2000 against the mean-field
    prediction: within 0.02 where a giant exists, below 0.05 where not."""
    rows = []
    ok = True

    def run(lam, q, burn, sample, thin, init):
        cfg = sampler.ChainConfig(
            params=oracle.ModelParams(n, lam, q),
            seed=seed,
            burn_in_sweeps=burn,
            sample_sweeps=sample,
            thin=thin,
            init=init,
        )
        return sampler.estimate_theta(cfg)

    mean, err = run(3.0, 2.0, burn=20, sample=80, thin=2, init="full")
    target = rates.mean_field_roots(3.0, 2.0)[-1]
    good = abs(mean - target) <= 0.02
    ok = ok and good
    rows.append(
        {
            "lambda": "3", "q": "2", "mean": fmt17(mean), "stderr": fmt17(err),
            "target": fmt17(target), "tolerance": "0.02", "ok": good,
        }
    )

    mean, err = run(1.0, 2.0, burn=20, sample=80, thin=2, init="empty")
    good = mean < 0.05
    ok = ok and good
    rows.append(
        {
            "lambda": "1", "q": "2", "mean": fmt17(mean), "stderr": fmt17(err),
            "target": "< 0.05", "ok": good,
        }
    )

    mean, err = run(3.0, 1.0, burn=10, sample=80, thin=2, init="full")
    target = rates.mean_field_roots(3.0, 1.0)[-1]
    good = abs(mean - target) <= 0.02
    ok = ok and good
    rows.append(
        {
            "lambda": "3", "q": "1", "mean": fmt17(mean), "stderr": fmt17(err),
            "target": fmt17(target), "tolerance": "0.02", "ok": good,
        }
    )
    return CriterionResult(
        "9", "giant-component law at n=2000", ok, {"rows": rows}
    )


def criterion_property_suites(seed=606):
    """Bundled structural properties: symmetry and discrete convexity of the
    two-large-components rate, monotone stationarity quotient, nonnegative
    shrinking truncation gap, multiplicity-sum bound, and monotone giant
    fraction."""
    rng = random.Random(seed)
    checks = {}

    worst_sym = 0.0
    for _ in range(200):
        theta = rng.uniform(0.01, 0.99)
        lam = rng.uniform(0.2, 8.0)
        worst_sym = max(
            worst_sym, abs(rates.xi(theta, lam) - rates.xi(1.0 - theta, lam))
        )
    checks["xi_symmetry_worst"] = fmt17(worst_sym)
    sym_ok = worst_sym <= 1e-12

    lam = 2.0
    grid = [i / 200 for i in range(1, 200)]
    vals = [rates.xi(t, lam) for t in grid]
    min_second = min(
        vals[i - 1] - 2.0 * vals[i] + vals[i + 1] for i in range(1, len(vals) - 1)
    )
    checks["xi_min_second_difference"] = fmt17(min_second)
    convex_ok = min_second >= -1e-9

    quot_ok = True
    for r in (2, 5, 20):
        ss = [0.01 + 0.02 * i for i in range(60)]
        qs = [trees.theta_of_s(s, r) for s in ss]
        quot_ok = quot_ok and all(a > b for a, b in zip(qs, qs[1:]))
    checks["theta_of_s_strictly_decreasing"] = quot_ok

    gap_ok = True
    inv_e = math.exp(-1.0)
    for s in (0.05, 0.15, 0.25, 0.33, inv_e):
        gaps = [trees.delta_r(s, r) for r in (2, 5, 10, 25, 60, 150)]
        gap_ok = gap_ok and all(g >= 0.0 for g in gaps)
        gap_ok = gap_ok and all(a >= b for a, b in zip(gaps, gaps[1:]))
    # geometric convergence away from the radius
    gap_ok = gap_ok and trees.delta_r(0.2, 60) < 1e-12
    checks["truncation_gap_ok"] = gap_ok

    bound_ok = True
    min_ratio, max_ratio = math.inf, 0.0
    for n in range(2, 13):
        for k in range(1, n + 1):
            for r in range(1, 7):
                exact = trees.q_nkr(n, k, r)
                bound = trees.q_upper_bound(n, k, r)
                if exact > 0.0:
                    ratio = bound / exact
                    min_ratio = min(min_ratio, ratio)
                    max_ratio = max(max_ratio, ratio)
                if bound < exact:
                    bound_ok = False
    checks["q_bound_ok"] = bound_ok
    checks["q_bound_min_ratio"] = fmt17(min_ratio)
    # looseness diagnostic only; the bound may exceed the sum by a
    # polynomial factor and no assertion is made on it
    checks["q_bound_max_ratio"] = fmt17(max_ratio)

    mono_ok = True
    for q in (1.0, 1.5, 2.0, 3.0, 4.0):
        lams = [rates.lambda_c(q) + 0.05 + 0.25 * i for i in range(12)]
        tmax = [rates.mean_field_roots(lam, q)[-1] for lam in lams]
        mono_ok = mono_ok and all(a <= b + 1e-12 for a, b in zip(tmax, tmax[1:]))
    checks["theta_max_nondecreasing"] = mono_ok

    passed = sym_ok and convex_ok and quot_ok and gap_ok and bound_ok and mono_ok
    return CriterionResult("10", "structural property suites", passed, checks)


def run_suite(level=QUICK):
    """Execute the criteria for the requested level, in order."""
    if level not in (QUICK, FULL):
        raise ValueError(f"unknown level {level!r}")
    small = (3, 4, 5)
    results = []
    if level == QUICK:
        results.append(criterion_connected_weight_scaling(n_values=small))
        results.append(criterion_rearrangement_identity(n_values=small))
        results.append(criterion_free_energy())
        results.append(criterion_phase_location())
        results.append(criterion_endpoint_rates())
        results.append(criterion_bounded_vs_acyclic(n_values=small))
        results.append(criterion_sampler_correctness(sweeps=20_000))
        results.append(criterion_property_suites())
    else:
        results.append(criterion_connected_weight_scaling())
        results.append(criterion_rearrangement_identity())
        results.append(criterion_saddle_limits())
        results.append(criterion_free_energy())
        results.append(criterion_phase_location())
        results.append(criterion_endpoint_rates())
        results.append(criterion_bounded_vs_acyclic())
        results.append(criterion_sampler_correctness())
        results.append(criterion_giant_component())
        results.append(criterion_property_suites())
    return results
