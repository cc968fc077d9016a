"""Exhaustive ML reconstruction and the max-cut solver built on it."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sisrecon.errors import Degenerate, TooLarge
from sisrecon.gadgets import GadgetTransition, gadget_states
from sisrecon.graphs import AdjacencyMatrix, connected_graphs
from sisrecon.maxcut import UQPInstance, maxcut_bruteforce, uqp_bruteforce
from sisrecon.ml import ml_full_bruteforce, ml_reduced_bruteforce, reevaluate, run_reduction, solve_maxcut_via_reduction
from sisrecon.reduction import MU, build_full_trace, build_reduced_trace, extract_quadratic_form, plan_full_reduction
from sisrecon.sis import SISParams, TraceBuilder, ViralTrace, basis_state, log_likelihood, simulate
from sisrecon.verify import random_plan

P = SISParams(0.05, 0.1)


def test_single_state_trace_ties_everything():
    r = ml_full_bruteforce(ViralTrace.from_states([(1, 0, 1)]), P)
    assert r.best_value == 0 and len(r.argmax) == 8 and r.candidates_evaluated == 8


def test_force_link_gadget_excludes_missing_link():
    t = ViralTrace.from_states(gadget_states(GadgetTransition.force_link(2, 3), 3))
    r = ml_full_bruteforce(t, P)
    assert all(AdjacencyMatrix.from_upper_bits(3, s)[2, 3] == 1 for s in r.argmax)


def test_full_search_matches_direct_likelihood():
    A = AdjacencyMatrix.from_links(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    t = simulate(A, SISParams(0.15, 0.05), (1, 1, 1, 1), 400, seed=3)
    r = ml_full_bruteforce(t, SISParams(0.15, 0.05))
    direct = []
    for code in range(64):
        C = AdjacencyMatrix.from_upper_bits(4, code)
        try:
            direct.append(log_likelihood(t, C, SISParams(0.15, 0.05)))
        except ValueError:
            direct.append(-math.inf)
    best = max(direct)
    assert r.best_value == pytest.approx(best, abs=1e-9)
    expected = [format(c, "06b") for c, v in enumerate(direct) if abs(v - best) <= 1e-9]
    assert list(r.argmax) == expected


def test_argmax_members_reevaluate_to_best():
    A = AdjacencyMatrix.cycle(4)
    t = simulate(A, SISParams(0.15, 0.05), (1, 1, 1, 1), 300, seed=9)
    r = ml_full_bruteforce(t, SISParams(0.15, 0.05))
    assert np.all(reevaluate(r, t, SISParams(0.15, 0.05)) == r.best_value)


def test_connected_only_filter():
    r = ml_full_bruteforce(ViralTrace.from_states([(1, 0, 1)]), P, connected_only=True)
    assert len(r.argmax) == 4
    assert all(len(AdjacencyMatrix.from_upper_bits(3, s).links()) >= 2 for s in r.argmax)


def test_limits_and_degenerate():
    t = ViralTrace.from_states([basis_state(9, 1)])
    with pytest.raises(TooLarge):
        ml_full_bruteforce(t, P)
    with pytest.raises(TooLarge):
        ml_reduced_bruteforce(t, AdjacencyMatrix.path(9), P, limit=5)
    with pytest.raises(Degenerate):
        ml_full_bruteforce(ViralTrace.from_states([(1, 0), (0, 1)]), P)


def test_argmax_is_capped():
    t = ViralTrace.from_states([basis_state(6, 1)])
    r = ml_full_bruteforce(t, P)
    assert r.truncated and len(r.argmax) == 4096


def test_reduced_examples():
    host = AdjacencyMatrix.path(5)
    r = ml_reduced_bruteforce(ViralTrace.from_states([basis_state(5, 2)]), host, P)
    assert len(r.argmax) == 8 and r.best_value == 0
    b = TraceBuilder()
    for _ in range(4):
        b.extend(gadget_states(GadgetTransition.lin_infect(4), 5))
        b.append(basis_state(5, 2, 4))
    r = ml_reduced_bruteforce(b.build(), host, P)
    assert all(s[1] == "1" for s in r.argmax)
    t = ViralTrace(((basis_state(5, 3), 50),))
    r = ml_reduced_bruteforce(t, host, P)
    assert all(s[0] == "0" for s in r.argmax)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_reduced_argmax_equals_extracted_form_argmax(seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    plan = random_plan(rng, (5, 6)[seed % 2])
    trace = build_reduced_trace(plan)
    c_quad, c_lin, _ = extract_quadratic_form(trace, plan.host, plan.params, scale=MU / plan.m0)
    m = plan.n - 2
    Q = np.zeros((m, m))
    for (i, j), v in c_quad.items():
        Q[i - 3, j - 3] = v
    _, opt = uqp_bruteforce(UQPInstance(Q, [c_lin[l] for l in plan.free_nodes]))
    r = ml_reduced_bruteforce(trace, plan.host, plan.params)
    # exact ties are not expected on perturbed coefficients; compare the optimiser sets
    assert {tuple(int(c) for c in s) for s in r.argmax} == set(opt)


@pytest.mark.parametrize("G,value", [
    (AdjacencyMatrix.complete(2), 1),
    (AdjacencyMatrix.cycle(4), 4),
    (AdjacencyMatrix.complete(3), 2),
])
@pytest.mark.parametrize("mode", ["reduced", "full"])
def test_solver_examples(G, value, mode):
    assert solve_maxcut_via_reduction(G, P, mode)[0] == value


def test_single_node_instance():
    run = run_reduction(AdjacencyMatrix.empty(1), P, "reduced")
    assert run.cut_value == 0 and run.plan.n == 3
    assert run.result.candidates_evaluated == 2


@pytest.mark.parametrize("N", [2, 3, 4])
def test_reduced_solver_matches_oracle(N):
    for G in connected_graphs(N):
        run = run_reduction(G, P, "reduced")
        best = maxcut_bruteforce(G)[0]
        assert run.cut_value == best


def test_full_argmax_restricts_to_reduced_optimum():
    for G in connected_graphs(3):
        plan = plan_full_reduction(G, P)
        full = build_full_trace(plan)
        fr = ml_full_bruteforce(full, P)
        rr = ml_reduced_bruteforce(full, plan.host, P)
        rows = {"".join(str(A[1, l]) for l in range(3, plan.n + 1)) for A in fr.matrices()}
        assert rows == set(rr.argmax)
        assert fr.best_value == pytest.approx(rr.best_value, abs=1e-9)
