"""End-to-end verification against the brute-force max-cut oracle, and the
property self-test run by ``sisrecon selftest``."""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import SISReconError
from .graphs import AdjacencyMatrix, all_graphs, connected_graphs, relabel_for_reduction
from .io import dumps, plan_to_dict
from .maxcut import _cut_values, _uqp_values, _all_assignments, maxcut_bruteforce, optimality_gap, uqp_from_graph
from .ml import run_reduction
from .reduction import MU, build_reduced_trace, check_inequalities, extract_quadratic_form, plan_reduced_size
from .sis import SISParams, enumerate_successors, validate_params

DEFAULT_PARAMS = SISParams(0.05, 0.1)
# 2^15 candidates: full-mode search up to a 6-node host (4-node max-cut instance)
FULL_LIMIT_BITS = 15


def cmd_verify(Gtilde: AdjacencyMatrix, p: SISParams = DEFAULT_PARAMS, full_limit_bits: int = FULL_LIMIT_BITS) -> dict:
    """Compare the oracle cut value with the reduced (and, if small enough, full) pipeline.

    Mismatches are reported with ``agree = False``; inequality flags are
    recomputed from the plan by :func:`check_inequalities`.
    """
    oracle = maxcut_bruteforce(Gtilde)[0]
    reduced = run_reduction(Gtilde, p, "reduced")
    report: dict = {"oracle_value": oracle, "reduced_value": reduced.cut_value}
    n = Gtilde.n + 2
    plan = reduced.plan
    if n * (n - 1) // 2 <= full_limit_bits:
        full = run_reduction(Gtilde, p, "full")
        report["full_value"] = full.cut_value
        plan = full.plan
    values = [v for k, v in report.items() if k != "oracle_value"]
    report["agree"] = all(v == oracle for v in values)
    report["plan_digest"] = hashlib.sha256(dumps(plan_to_dict(plan)).encode()).hexdigest()
    report["inequalities"] = check_inequalities(plan)
    return report


# self-test ---------------------------------------------------------------------


@dataclass
class PropertyResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def check_probability_conservation(max_n: int = 5, tol: float = 1e-12) -> tuple[bool, str]:
    checked = 0
    for n in range(1, max_n + 1):
        for A in connected_graphs(n):
            for beta, delta in product((0.01, 0.05), (0.05, 0.1)):
                p = SISParams(beta, delta)
                if not validate_params(A, p):
                    continue
                for x in product((0, 1), repeat=n):
                    total = math.fsum(pr for _, pr in enumerate_successors(x, A, p))
                    if abs(total - 1.0) > tol:
                        return False, f"sum {total!r} in state {x} on {A}"
                    checked += 1
    return True, f"{checked} (graph, params, state) triples"


def check_uqp_cut_equivalence(max_n: int = 6) -> tuple[bool, str]:
    count = 0
    for n in range(1, max_n + 1):
        Y = _all_assignments(n, n)
        for G in all_graphs(n):
            cut = _cut_values(G, Y)
            uqp = _uqp_values(uqp_from_graph(G), Y)
            if not np.array_equal(uqp, cut.astype(float)):
                return False, f"mismatch on {G}"
            count += 1
    return True, f"{count} graphs, all assignments"


def check_gap(max_n: int = 6) -> tuple[bool, str]:
    count = 0
    for n in range(2, max_n + 1):
        for G in connected_graphs(n):
            gap = optimality_gap(uqp_from_graph(G))
            if gap < 1:
                return False, f"gap {gap} on {G}"
            count += 1
    return True, f"{count} connected graphs"


def random_connected_host(n: int, rng: np.random.Generator) -> AdjacencyMatrix:
    """Random spanning tree plus random extra links, relabelled for the reduction."""
    links = set()
    for v in range(2, n + 1):
        links.add((int(rng.integers(1, v)), v))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < 0.3:
                links.add((i, j))
    return relabel_for_reduction(AdjacencyMatrix.from_links(n, links))[0]


def random_plan(rng: np.random.Generator, n: int):
    """Reduced plan with random host, quadratic support, targets and feasible params."""
    host = random_connected_host(n, rng)
    budget = 1.0 / (n + host.link_count)
    delta = float(rng.uniform(0.2, 0.9)) * budget
    beta = float(rng.uniform(0.2, 0.9)) * budget
    p = SISParams(beta, delta)
    pairs = [(i, j) for i in range(3, n + 1) for j in range(i + 1, n + 1)]
    r_quad = [pr for pr in pairs if rng.random() < 0.5]
    targets = {l: float(rng.uniform(-3.0, 6.0)) for l in range(3, n + 1)}
    return plan_reduced_size(host, p, r_quad, targets)


def quadratic_extraction_errors(plan, fault: float = 0.0) -> dict[str, float]:
    """Worst errors of the extracted form against the plan (raises on non-quadratic)."""
    trace = build_reduced_trace(plan)
    scale = MU / plan.m0
    c_quad, c_lin, _ = extract_quadratic_form(trace, plan.host, plan.params, scale=scale)
    quad_err = max((abs(v - plan.c_quad(i, j)) for (i, j), v in c_quad.items()), default=0.0)
    lin_err = max((abs(c_lin[l] + fault - plan.achieved_lin[l]) for l in c_lin), default=0.0)
    window = all(0 <= plan.achieved_lin[l] - plan.uqp_lin[l] < 1.0 / plan.n for l in plan.free_nodes)
    return {"quad": quad_err, "lin": lin_err, "window": 0.0 if window else 1.0}


def check_quadratic_extraction(count: int = 12, seed: int = 7, fault: float = 0.0) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.PCG64(seed))
    for k in range(count):
        n = (5, 6, 7)[k % 3]
        plan = random_plan(rng, n)
        try:
            err = quadratic_extraction_errors(plan, fault)
        except SISReconError as exc:
            return False, f"plan {k}: {exc}"
        if err["quad"] >= 1e-9 or err["lin"] >= 1e-9 or err["window"]:
            return False, f"plan {k} (n={n}): {err}"
    return True, f"{count} random plans"


def check_verify_sweep(max_n: int = 4, p: SISParams = DEFAULT_PARAMS) -> tuple[bool, str]:
    count = 0
    for n in range(2, max_n + 1):
        for G in connected_graphs(n):
            rep = cmd_verify(G, p)
            if not rep["agree"] or not all(rep["inequalities"].values()):
                return False, f"{G}: {rep}"
            count += 1
    return True, f"{count} instances agree"


def run_selftest(fault: str | None = None, out=print) -> int:
    """Run every property, print a table and return 0 (all pass) or 1.

    ``fault="coefficient"`` perturbs the compared linear coefficients by
    0.5, a negative control that must make ``quadratic_extraction`` fail.
    """
    checks = [
        ("probability_conservation", check_probability_conservation),
        ("uqp_cut_equivalence", check_uqp_cut_equivalence),
        ("gap_at_least_one", check_gap),
        ("quadratic_extraction", lambda: check_quadratic_extraction(fault=0.5 if fault == "coefficient" else 0.0)),
        ("verify_sweep", check_verify_sweep),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except SISReconError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(PropertyResult(name, ok, detail, time.perf_counter() - t0))
    width = max(len(r.name) for r in results)
    for r in results:
        out(f"{r.name:<{width}}  {'PASS' if r.ok else 'FAIL'}  {r.seconds:7.2f}s  {r.detail}")
    return 0 if all(r.ok for r in results) else 1
