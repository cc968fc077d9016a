"""Reduction plans, reduced and full traces, and quadratic-form extraction."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sisrecon.errors import NotQuadratic
from sisrecon.gadgets import GadgetTransition, enforcement_links, gadget_states, xi
from sisrecon.graphs import AdjacencyMatrix, connected_graphs, is_connected
from sisrecon.reduction import (
    LAMBDA_PLUS,
    MU,
    ReductionPlan,
    achieved_coefficient,
    build_full_trace,
    build_reduced_trace,
    check_inequalities,
    chi_shift,
    chi_value,
    count_gadgets,
    delta_f_bound,
    eta_values,
    extract_quadratic_form,
    gamma_min,
    lambda_minus_values,
    plan_full_reduction,
    plan_reduced_size,
    plan_reduction,
    prewalk_trace,
    select_kappas,
    select_multiplicities,
)
from sisrecon.sis import SISParams, ViralTrace, basis_state, is_realizable, log_likelihood
from sisrecon.verify import random_plan

P = SISParams(0.05, 0.1)

# 30-digit evaluations of -2/log(3/4) and its product with log 2
MU_REF = 6.95211899356441382075299880329
LAMBDA_PLUS_REF = 4.81884167930641800916480866162


def test_constants():
    assert MU == pytest.approx(MU_REF, rel=1e-15)
    assert LAMBDA_PLUS == pytest.approx(LAMBDA_PLUS_REF, rel=1e-15)


def test_zero_target_needs_no_gadgets():
    host = AdjacencyMatrix.path(4)
    m0, m1, m2 = select_multiplicities({3: 0.0, 4: 0.0}, [], host, P)
    assert m0 == math.floor(4 * LAMBDA_PLUS) + 1
    assert m1 == {3: 0, 4: 0} and m2 == {3: 0, 4: 0}
    plan = plan_reduced_size(host, P, [], {3: 0.0, 4: 0.0})
    assert plan.achieved_lin == {3: 0.0, 4: 0.0}
    assert build_reduced_trace(plan).segments == ((basis_state(4, 2), 1),)


plan_seeds = st.integers(0, 2**32 - 1)


def _plan_from_seed(seed, sizes=(5, 6, 7)):
    rng = np.random.Generator(np.random.PCG64(seed))
    return random_plan(rng, sizes[seed % len(sizes)])


@given(plan_seeds)
@settings(max_examples=40, deadline=None)
def test_plan_invariants(seed):
    plan = _plan_from_seed(seed)
    n = plan.n
    xis, lams = lambda_minus_values(plan.host, plan.params)
    etas = eta_values(plan.r_quad, n)
    assert MU > 0 and LAMBDA_PLUS > 0
    for l in plan.free_nodes:
        assert lams[l] < 0 and etas[l] >= 0
        assert xis[l] == pytest.approx(xi(plan.host, plan.params, l))
        # coefficient recomputed from the raw counts
        c = (plan.m1[l] * LAMBDA_PLUS + plan.m2[l] * lams[l]) / plan.m0 + etas[l]
        assert c == pytest.approx(plan.achieved_lin[l], abs=1e-12)
        assert 0 <= plan.achieved_lin[l] - plan.uqp_lin[l] < 1 / n
        assert 0 <= plan.achieved_lin[l] - plan.target_lin[l] < 1 / n
    assert plan.m0 * 1.0 > n * LAMBDA_PLUS


@given(plan_seeds)
@settings(max_examples=40, deadline=None)
def test_reduced_trace_extraction_matches_plan(seed):
    plan = _plan_from_seed(seed)
    trace = build_reduced_trace(plan)
    c_quad, c_lin, _ = extract_quadratic_form(trace, plan.host, plan.params, scale=MU / plan.m0)
    for (i, j), v in c_quad.items():
        assert abs(v - plan.c_quad(i, j)) < 1e-9
    for l, v in c_lin.items():
        assert abs(v - plan.achieved_lin[l]) < 1e-9


@given(plan_seeds)
@settings(max_examples=25, deadline=None)
def test_reduced_trace_structure(seed):
    plan = _plan_from_seed(seed)
    trace = build_reduced_trace(plan)
    assert is_realizable(trace, plan.host, plan.params)
    # gadget counts equal the multiplicities
    counts = count_gadgets(trace, plan.n)
    for (i, j), _ in [(pr, 0) for pr in plan.r_quad]:
        assert counts[GadgetTransition.quad_infect(i, j)] == plan.m0
    for g, c in counts.items():
        if g.kind.value == "quad_infect" and g.nodes not in plan.r_quad:
            assert c == 0
        if g.kind.value == "lin_infect":
            assert c == plan.m1[g.nodes[0]]
        if g.kind.value == "lin_const":
            assert c == plan.m2[g.nodes[0]]
    # node 1 is infected only by gadget transitions and constant transitions are the LIN_CONST ones
    for x, y, c in trace.transitions():
        if x == y:
            assert sum(x) == 1 and x[0] == 0 and x[1] == 0
        elif y[0] and not x[0]:
            assert x[1] == 1 and 2 <= sum(x) <= 3
        elif x[0]:
            assert not y[0]


def test_reduced_trace_counts_quad_gadget_pairs():
    host = AdjacencyMatrix.path(4)
    base = plan_reduced_size(host, P, [], {3: 0.0, 4: 0.0})
    plan = replace(base, r_quad=frozenset({(3, 4)}), m0=2)
    trace = build_reduced_trace(plan)
    tally = trace.tally()
    assert tally[(basis_state(4, 2, 3, 4), basis_state(4, 1, 2, 3, 4))] == 2


def test_single_gadget_extraction():
    host = AdjacencyMatrix.path(5)
    g = GadgetTransition.lin_infect(4)
    t = ViralTrace.from_states(gadget_states(g, 5))
    _, c_lin, _ = extract_quadratic_form(t, host, P)
    assert c_lin[4] == pytest.approx(math.log(2), abs=1e-14)
    assert c_lin[3] == 0 and c_lin[5] == 0
    g = GadgetTransition.lin_const(5)
    t = ViralTrace.from_states(gadget_states(g, 5))
    _, c_lin, _ = extract_quadratic_form(t, host, P)
    assert c_lin[5] == pytest.approx(math.log1p(-P.beta_T / xi(host, P, 5)), abs=1e-14)
    assert c_lin[5] < 0


def test_extraction_detects_non_quadratic_trace():
    host = AdjacencyMatrix.path(5)
    t = ViralTrace.from_states([basis_state(5, 2, 3, 4, 5), basis_state(5, 1, 2, 3, 4, 5)])
    with pytest.raises(NotQuadratic):
        extract_quadratic_form(t, host, P)


def test_select_kappas_on_empty_trace():
    plan = plan_reduction(AdjacencyMatrix.complete(2), P)
    kappas, dfm = select_kappas(plan, ViralTrace.from_states([basis_state(4, 2)]))
    assert dfm == 0 and kappas == {2: 1, 3: 1, 4: 1}


def test_chi_examples():
    host = AdjacencyMatrix.from_links(3, [(1, 2), (1, 3)])
    assert chi_value(0, host, P, 3) == 0
    assert chi_value(1, host, P, 3) == pytest.approx(math.log(0.85 / 0.9), abs=1e-15)
    assert chi_value(6, host, P, 3) == pytest.approx(2 * chi_value(3, host, P, 3), abs=1e-15)


def test_gamma_min_takes_worse_case():
    host = AdjacencyMatrix.path(4)
    d = 2  # node 3 on the path 2-3-4
    vals = [math.log((0.9 - 0.05 * (d + a)) / (0.9 - 0.05 * (d + 1 + a))) for a in (0, 1)]
    assert gamma_min(host, P, 3) == pytest.approx(min(vals), abs=1e-15)


def test_full_trace_on_two_node_host():
    host = AdjacencyMatrix.complete(2)
    plan = plan_reduced_size(host, P, [], {}, kappas={2: 3}, mode="full")
    t = build_full_trace(plan)
    assert t.expanded() == [(0, 1), (1, 1), (1, 0), (1, 1)] + [(0, 1)] * 4 + [(1, 1), (1, 0)]
    assert is_realizable(t, host, P)


@pytest.fixture(scope="module")
def k3_full_plan():
    return plan_full_reduction(AdjacencyMatrix.complete(3), P)


def test_full_plan_invariants(k3_full_plan):
    plan = k3_full_plan
    assert plan.mode == "full" and plan.n == 5
    assert check_inequalities(plan) == {"lemma3_window_ok": True, "kappa_dominance_ok": True}
    dfm = delta_f_bound(prewalk_trace(plan), plan.host, P)
    assert dfm == pytest.approx(plan.delta_f_max)
    for l in range(2, plan.n + 1):
        assert plan.kappas[l] * gamma_min(plan.host, P, l) > dfm
        assert chi_shift(plan, l) < 0
    for l in plan.free_nodes:
        assert 0 <= plan.effective_lin(l) - plan.uqp_lin[l] < 1 / plan.n


def test_full_trace_forces_enforcement_links(k3_full_plan):
    plan = k3_full_plan
    t = build_full_trace(plan)
    assert is_realizable(t, plan.host, P)
    exp = t.expanded()
    triples = set(zip(exp, exp[1:], exp[2:]))
    for i, j in enforcement_links(plan.host):
        found = any(
            tuple(gadget_states(GadgetTransition.force_link(a, b), plan.n)) in triples for a, b in ((i, j), (j, i))
        )
        assert found, (i, j)
        assert log_likelihood(t, plan.host.with_entry(i, j, 0), P) == -math.inf


def test_full_trace_shifts_linear_coefficients_by_chi(k3_full_plan):
    plan = k3_full_plan
    t = build_full_trace(plan)
    c_quad, c_lin, _ = extract_quadratic_form(t, plan.host, P, scale=MU / plan.m0)
    for l in plan.free_nodes:
        assert c_lin[l] == pytest.approx(plan.effective_lin(l), abs=1e-9)
    for (i, j), v in c_quad.items():
        assert v == pytest.approx(plan.c_quad(i, j), abs=1e-9)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_full_plans_verify_for_all_small_instances(N):
    for G in connected_graphs(N):
        plan = plan_full_reduction(G, P)
        assert all(check_inequalities(plan).values())


def test_user_host_is_relabelled():
    host = AdjacencyMatrix.star(5, center=3)
    plan = plan_full_reduction(AdjacencyMatrix.complete(3), SISParams(0.04, 0.08), host=host)
    assert plan.host[1, 2] == 1
    assert is_connected(plan.host.induced(range(2, 6)))
    assert all(check_inequalities(plan).values())


def test_plan_dict_round_trip(k3_full_plan):
    again = ReductionPlan.from_dict(k3_full_plan.to_dict())
    assert again.to_dict() == k3_full_plan.to_dict()
    assert build_full_trace(again) == build_full_trace(k3_full_plan)


def test_achieved_coefficient_formula():
    assert achieved_coefficient(10, 3, 2, -1.5, 0.25) == pytest.approx(0.3 * LAMBDA_PLUS - 0.3 + 0.25)
