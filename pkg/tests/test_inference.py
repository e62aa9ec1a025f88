"""Likelihoods (proper, misspecified) and maximum likelihood estimation."""

import math

import numpy as np
import pytest

from projgraph import (
    Family,
    FullGraph,
    InducedSubgraph,
    LikelihoodKind,
    NodeSubset,
    ParamVector,
    Replicates,
    build_distribution,
    complete_graph,
    completion_log_likelihood,
    dyad_count,
    edge_count,
    edge_prob,
    empty_graph,
    expected_stats,
    finite_difference_hessian,
    fisher_information,
    format_mle_csv,
    graph_from_edges,
    graph_from_index,
    graph_to_index,
    log_likelihood,
    log_normalizer,
    marginal_distribution,
    misspecified_log_likelihood,
    mle,
    model_spec,
    proper_log_likelihood,
    register_family,
    stat_covariance,
    substream,
    sufficient_stats,
    unregister_family,
)

INVARIANT = model_spec("BernoulliInvariant")
OFFSET = model_spec("BernoulliOffset")
EDGE_TRI = model_spec("EdgeTriangle")


def _triangle_with_tail():
    """5 nodes, 5 edges, 1 triangle: statistics strictly inside the hull."""
    return graph_from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])


@pytest.fixture
def edges_newton():
    """Edge-count clone without the closed-form shortcut, to force the Newton path."""
    fam = Family(
        name="EdgesNewton",
        stat_dim=1,
        offset_edges=False,
        stats=lambda g: (float(edge_count(g)),),
    )
    register_family(fam)
    yield model_spec("EdgesNewton")
    unregister_family("EdgesNewton")


# --------------------------------------------------------------------------
# observed-data containers
# --------------------------------------------------------------------------


def test_induced_subgraph_requires_strictly_larger_population():
    with pytest.raises(ValueError, match="must be smaller than"):
        InducedSubgraph(subgraph=complete_graph(4), population_n=4)
    with pytest.raises(ValueError):
        InducedSubgraph(subgraph=complete_graph(4), population_n=3)


def test_replicates_validation():
    with pytest.raises(ValueError, match="non-empty"):
        Replicates(graphs=())
    with pytest.raises(ValueError, match="share one node count"):
        Replicates(graphs=(empty_graph(3), empty_graph(4)))
    assert Replicates(graphs=(empty_graph(3), complete_graph(3))).n == 3


# --------------------------------------------------------------------------
# likelihood values
# --------------------------------------------------------------------------


def test_full_graph_likelihood_matches_distribution_table():
    theta = ParamVector(theta=(0.4, -0.3))
    d = build_distribution(EDGE_TRI, theta, 4)
    for k in (0, 17, 40, 63):
        g = graph_from_index(4, k)
        got = log_likelihood(EDGE_TRI, theta, FullGraph(g))
        assert got == pytest.approx(float(d.log_probs[k]), abs=1e-12)


def test_uniform_model_assigns_equal_probability():
    theta = ParamVector(theta=(0.0, 0.0))
    for k in range(8):
        got = log_likelihood(EDGE_TRI, theta, FullGraph(graph_from_index(3, k)))
        assert got == pytest.approx(-math.log(8), abs=1e-14)


def test_replicates_likelihood_is_additive():
    theta = ParamVector(theta=(0.3, 0.1))
    graphs = (graph_from_index(4, 9), graph_from_index(4, 33), graph_from_index(4, 60))
    total = log_likelihood(EDGE_TRI, theta, Replicates(graphs=graphs))
    parts = sum(log_likelihood(EDGE_TRI, theta, FullGraph(g)) for g in graphs)
    assert total == pytest.approx(parts, abs=1e-12)


def test_proper_likelihood_closed_form_matches_enumeration():
    """Dual route: the binomial closed form for independent dyads against the
    explicit sum over all completions of the unobserved dyads."""
    y = graph_from_edges(3, [(0, 1), (1, 2)])
    for spec in (INVARIANT, OFFSET):
        for theta in (-1.0, 0.0, 0.5):
            for population_n in (4, 5, 6):
                pv = ParamVector(theta=(theta,))
                closed = proper_log_likelihood(spec, pv, y, population_n)
                enumerated = completion_log_likelihood(spec, pv, y, population_n)
                assert closed == pytest.approx(enumerated, abs=1e-10)


def test_proper_likelihood_equals_log_marginal_probability():
    """Dual route: summing completions must equal marginalizing the full
    population table, for every possible observed subgraph."""
    subset = NodeSubset(parent_n=4, members=(0, 1, 2))
    for spec, theta in (
        (EDGE_TRI, ParamVector(theta=(0.3, 0.4))),
        (OFFSET, ParamVector(theta=(0.5,))),
    ):
        marg = marginal_distribution(build_distribution(spec, theta, 4), subset)
        for k in range(8):
            y = graph_from_index(3, k)
            got = proper_log_likelihood(spec, theta, y, 4)
            assert got == pytest.approx(math.log(marg[k]), abs=1e-10)


def test_proper_likelihood_binomial_example():
    # population edge probability 1/5 at theta=0, n=4; one edge out of three dyads
    y = graph_from_edges(3, [(0, 1)])
    got = proper_log_likelihood(OFFSET, ParamVector(theta=(0.0,)), y, 4)
    assert got == pytest.approx(math.log(0.2) + 2 * math.log(0.8), abs=1e-12)


def test_misspecified_likelihood_uses_the_subgraph_size():
    y = graph_from_edges(3, [(0, 1)])
    got = misspecified_log_likelihood(OFFSET, ParamVector(theta=(0.0,)), y)
    assert got == pytest.approx(math.log(0.25) + 2 * math.log(0.75), abs=1e-12)


def test_misspecified_likelihood_matches_small_distribution_table():
    theta = ParamVector(theta=(0.2, 0.6))
    d = build_distribution(EDGE_TRI, theta, 3)
    for k in range(8):
        got = misspecified_log_likelihood(EDGE_TRI, theta, graph_from_index(3, k))
        assert got == pytest.approx(float(d.log_probs[k]), abs=1e-12)


def test_size_invariant_family_proper_equals_misspecified():
    """When marginals are size-consistent the two likelihoods coincide for
    every parameter value and every observation."""
    rng = substream(42, "identity")
    for _ in range(25):
        n_sub = int(rng.integers(2, 5))
        y = graph_from_index(n_sub, int(rng.integers(1 << dyad_count(n_sub))))
        population_n = int(rng.integers(n_sub + 1, 8))
        for theta in (-2.0, -0.5, 0.0, 1.0, 2.0):
            pv = ParamVector(theta=(theta,))
            proper = proper_log_likelihood(INVARIANT, pv, y, population_n)
            mis = misspecified_log_likelihood(INVARIANT, pv, y)
            assert proper == pytest.approx(mis, abs=1e-10)


def test_likelihood_kind_dispatch():
    y = graph_from_edges(3, [(0, 1)])
    data = InducedSubgraph(subgraph=y, population_n=5)
    theta = ParamVector(theta=(0.3,))
    assert log_likelihood(OFFSET, theta, data, LikelihoodKind.PROPER) == pytest.approx(
        proper_log_likelihood(OFFSET, theta, y, 5), abs=1e-14
    )
    assert log_likelihood(OFFSET, theta, data, "misspecified") == pytest.approx(
        misspecified_log_likelihood(OFFSET, theta, y), abs=1e-14
    )


def test_misspecified_kind_requires_subgraph_data():
    theta = ParamVector(theta=(0.0,))
    with pytest.raises(ValueError, match="only to induced-subgraph data"):
        log_likelihood(INVARIANT, theta, FullGraph(complete_graph(3)), "misspecified")
    with pytest.raises(ValueError, match="only to induced-subgraph data"):
        mle(INVARIANT, FullGraph(complete_graph(3)), "misspecified")


def test_proper_likelihood_rejects_oversized_subgraph():
    theta = ParamVector(theta=(0.0,))
    with pytest.raises(ValueError, match="must be smaller than population size"):
        proper_log_likelihood(INVARIANT, theta, complete_graph(4), 4)
    with pytest.raises(ValueError, match="must be smaller than population size"):
        completion_log_likelihood(EDGE_TRI, ParamVector(theta=(0.0, 0.0)), complete_graph(4), 4)


# --------------------------------------------------------------------------
# information matrices
# --------------------------------------------------------------------------


def test_fisher_information_examples():
    # C(4,2) * pi * (1 - pi) with pi = 1/2 and pi = 1/5
    info = fisher_information(INVARIANT, ParamVector(theta=(0.0,)), 4)
    np.testing.assert_allclose(info, [[1.5]], atol=1e-14)
    info = fisher_information(OFFSET, ParamVector(theta=(0.0,)), 4)
    np.testing.assert_allclose(info, [[0.96]], atol=1e-14)
    info = fisher_information(EDGE_TRI, ParamVector(theta=(0.0, 0.0)), 3)
    np.testing.assert_allclose(info, [[0.75, 0.1875], [0.1875, 7 / 64]], atol=1e-14)


def test_fisher_information_is_stat_covariance():
    theta = ParamVector(theta=(0.4, -0.2))
    np.testing.assert_allclose(
        fisher_information(EDGE_TRI, theta, 5),
        stat_covariance(EDGE_TRI, theta, 5),
        atol=0,
    )


def test_finite_difference_hessian_recovers_quadratic():
    a = np.array([[2.0, 0.5], [0.5, 1.0]])
    hess = finite_difference_hessian(lambda t: 0.5 * float(t @ a @ t), np.array([0.3, -0.7]))
    np.testing.assert_allclose(hess, a, atol=1e-6)


# --------------------------------------------------------------------------
# closed-form estimation for independent-dyad families
# --------------------------------------------------------------------------


def test_full_graph_logit_estimator():
    # 3 edges out of 6 dyads: logit(1/2) = 0
    g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
    result = mle(INVARIANT, FullGraph(g))
    assert result.theta_hat == pytest.approx((0.0,), abs=1e-14)
    assert result.converged and not result.boundary
    assert result.iterations == 0
    assert result.log_lik == pytest.approx(6 * math.log(0.5), abs=1e-12)
    # std err = 1 / sqrt(d * pi * (1 - pi))
    assert result.std_err[0] == pytest.approx(1 / math.sqrt(1.5), abs=1e-12)


def test_full_graph_offset_estimator_adds_log_n():
    g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
    result = mle(OFFSET, FullGraph(g))
    assert result.theta_hat == pytest.approx((math.log(4),), abs=1e-12)


def test_replicates_pool_the_edge_counts():
    graphs = (
        graph_from_edges(4, [(0, 1)]),
        graph_from_edges(4, [(0, 1), (1, 2), (2, 3)]),
    )
    result = mle(INVARIANT, Replicates(graphs=graphs))
    # 4 edges over 12 dyads: logit(1/3)
    assert result.theta_hat == pytest.approx((math.log(4 / 8),), abs=1e-12)
    assert result.converged


def test_subgraph_estimators_shift_by_the_size_used():
    """The misspecified estimator offsets by the subgraph size, the proper one
    by the population size; their gap is exactly log(n_sub / N)."""
    y = graph_from_edges(5, [(0, 1), (1, 2), (2, 3)])
    data = InducedSubgraph(subgraph=y, population_n=40)
    proper = mle(OFFSET, data, LikelihoodKind.PROPER)
    mis = mle(OFFSET, data, LikelihoodKind.MISSPECIFIED)
    logit = math.log(3 / 7)
    assert proper.theta_hat == pytest.approx((logit + math.log(40),), abs=1e-12)
    assert mis.theta_hat == pytest.approx((logit + math.log(5),), abs=1e-12)
    gap = mis.theta_hat[0] - proper.theta_hat[0]
    assert gap == pytest.approx(math.log(5 / 40), abs=1e-12)
    # same logit, same curvature: identical standard errors
    assert mis.std_err == pytest.approx(proper.std_err, abs=1e-12)


def test_size_invariant_subgraph_estimator_ignores_population_size():
    y = graph_from_edges(4, [(0, 1), (2, 3)])
    for population_n in (5, 20, 1000):
        result = mle(INVARIANT, InducedSubgraph(y, population_n), LikelihoodKind.PROPER)
        assert result.theta_hat == pytest.approx((math.log(2 / 4),), abs=1e-12)


def test_boundary_data_has_no_finite_estimate():
    empty = mle(INVARIANT, FullGraph(empty_graph(4)))
    assert empty.boundary and not empty.converged
    assert empty.theta_hat == (-math.inf,)
    assert empty.std_err is None
    assert math.isnan(empty.log_lik)
    assert empty.iterations == 0
    full = mle(INVARIANT, FullGraph(complete_graph(4)))
    assert full.theta_hat == (math.inf,)
    assert full.boundary


def test_boundary_replicates():
    result = mle(OFFSET, Replicates(graphs=(empty_graph(3), empty_graph(3))))
    assert result.boundary and result.theta_hat == (-math.inf,)


# --------------------------------------------------------------------------
# Newton estimation for enumerated families
# --------------------------------------------------------------------------


def test_newton_matches_closed_form_logit(edges_newton):
    """Dual route: the moment-equation solver on the edge-count clone must
    agree with the closed-form logit estimator."""
    for edges in ([(0, 1), (1, 2), (2, 3)], [(0, 1)], [(0, 1), (0, 2), (1, 2), (3, 4)]):
        g = graph_from_edges(5, edges)
        newton = mle(edges_newton, FullGraph(g))
        closed = mle(INVARIANT, FullGraph(g))
        assert newton.converged and not newton.boundary
        assert newton.theta_hat[0] == pytest.approx(closed.theta_hat[0], abs=1e-8)
        assert newton.std_err[0] == pytest.approx(closed.std_err[0], rel=1e-6)
        assert newton.log_lik == pytest.approx(closed.log_lik, abs=1e-10)
        assert newton.iterations > 0


def test_newton_boundary_detection(edges_newton):
    assert mle(edges_newton, FullGraph(empty_graph(4))).boundary
    assert mle(edges_newton, FullGraph(complete_graph(4))).boundary


def test_edge_triangle_full_graph_mle_solves_the_moment_equation():
    g = _triangle_with_tail()
    result = mle(EDGE_TRI, FullGraph(g))
    assert result.converged and not result.boundary
    mu = expected_stats(EDGE_TRI, ParamVector(theta=result.theta_hat), 5)
    assert mu.values == pytest.approx((5.0, 1.0), abs=1e-8)
    # standard errors come from the Fisher information at the estimate
    info = fisher_information(EDGE_TRI, ParamVector(theta=result.theta_hat), 5)
    expected_se = tuple(math.sqrt(v) for v in np.diag(np.linalg.inv(info)))
    assert result.std_err == pytest.approx(expected_se, rel=1e-9)


def test_edge_triangle_replicates_mle_matches_mean_statistics():
    graphs = (
        graph_from_edges(4, [(0, 1), (0, 2), (1, 2)]),
        graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    )
    result = mle(EDGE_TRI, Replicates(graphs=graphs))
    assert result.converged
    mu = expected_stats(EDGE_TRI, ParamVector(theta=result.theta_hat), 4)
    assert mu.values == pytest.approx((3.5, 0.5), abs=1e-8)
    # R independent replicates multiply the information R-fold
    info = 2 * fisher_information(EDGE_TRI, ParamVector(theta=result.theta_hat), 4)
    expected_se = tuple(math.sqrt(v) for v in np.diag(np.linalg.inv(info)))
    assert result.std_err == pytest.approx(expected_se, rel=1e-9)


def test_edge_triangle_boundary_full_graphs():
    for g in (empty_graph(4), complete_graph(4), graph_from_edges(3, [(0, 1)])):
        result = mle(EDGE_TRI, FullGraph(g))
        assert result.boundary
        assert all(math.isnan(v) for v in result.theta_hat)


# --------------------------------------------------------------------------
# proper estimation for the dyad-dependent family
# --------------------------------------------------------------------------


def test_proper_mle_finite_classes_for_three_of_five_nodes():
    """Only the one-edge subgraph admits a finite maximizer; the other three
    isomorphism classes run to infinity (detected as boundary)."""
    finite = graph_from_edges(3, [(0, 1)])
    result = mle(EDGE_TRI, InducedSubgraph(finite, 5), LikelihoodKind.PROPER)
    assert result.converged and not result.boundary
    assert result.theta_hat == pytest.approx(
        (-0.42694321506694394, -1.6810546662481873), abs=1e-6
    )
    assert result.log_lik == pytest.approx(-1.8909687975283576, abs=1e-8)
    assert result.std_err == pytest.approx((1.8462841262745118, 18.064504609765514), rel=1e-4)
    for y in (empty_graph(3), graph_from_edges(3, [(0, 1), (1, 2)]), complete_graph(3)):
        out = mle(EDGE_TRI, InducedSubgraph(y, 5), LikelihoodKind.PROPER)
        assert out.boundary and not out.converged
        assert all(math.isnan(v) for v in out.theta_hat)
        assert out.std_err is None


def test_proper_mle_finite_classes_for_four_of_five_nodes():
    """Exactly the (3 edges, 1 triangle) and (4 edges, 1 triangle) classes have
    finite maximizers when one of five nodes is unobserved."""
    triangle_plus_isolate = graph_from_edges(4, [(0, 1), (0, 2), (1, 2)])
    paw = graph_from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    res_a = mle(EDGE_TRI, InducedSubgraph(triangle_plus_isolate, 5), LikelihoodKind.PROPER)
    assert res_a.converged
    assert res_a.theta_hat == pytest.approx(
        (-0.8426711889920467, 0.9764909979902264), abs=1e-6
    )
    assert res_a.log_lik == pytest.approx(-3.8577705877900463, abs=1e-8)
    res_b = mle(EDGE_TRI, InducedSubgraph(paw, 5), LikelihoodKind.PROPER)
    assert res_b.converged
    assert res_b.theta_hat == pytest.approx(
        (1.7993385312940662, -0.8140078837542574), abs=1e-6
    )
    assert res_b.log_lik == pytest.approx(-3.756612133961852, abs=1e-8)
    boundary_reps = (
        empty_graph(4),
        graph_from_edges(4, [(0, 1)]),
        graph_from_edges(4, [(0, 1), (2, 3)]),
        graph_from_edges(4, [(0, 1), (1, 2), (2, 3)]),
        graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
        graph_from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3), (1, 3)]),
        complete_graph(4),
    )
    for y in boundary_reps:
        out = mle(EDGE_TRI, InducedSubgraph(y, 5), LikelihoodKind.PROPER)
        assert out.boundary, f"expected boundary for stats {sufficient_stats(EDGE_TRI, y).values}"


def test_proper_mle_is_a_stationary_point():
    """The reported maximizer must zero the gradient of the proper likelihood
    (checked by central differences, independent of the optimizer)."""
    y = graph_from_edges(3, [(0, 1)])
    result = mle(EDGE_TRI, InducedSubgraph(y, 5), LikelihoodKind.PROPER)
    step = 1e-6
    for k in range(2):
        hi = list(result.theta_hat)
        lo = list(result.theta_hat)
        hi[k] += step
        lo[k] -= step
        fd = (
            proper_log_likelihood(EDGE_TRI, ParamVector(theta=tuple(hi)), y, 5)
            - proper_log_likelihood(EDGE_TRI, ParamVector(theta=tuple(lo)), y, 5)
        ) / (2 * step)
        assert abs(fd) < 1e-6


def test_proper_mle_log_lik_matches_direct_evaluation():
    y = graph_from_edges(3, [(0, 1)])
    result = mle(EDGE_TRI, InducedSubgraph(y, 5), LikelihoodKind.PROPER)
    direct = proper_log_likelihood(EDGE_TRI, ParamVector(theta=result.theta_hat), y, 5)
    assert result.log_lik == pytest.approx(direct, abs=1e-12)


def test_misspecified_mle_on_subgraph_uses_subgraph_model():
    y = graph_from_edges(4, [(0, 1), (0, 2), (1, 2)])
    result = mle(EDGE_TRI, InducedSubgraph(y, 6), LikelihoodKind.MISSPECIFIED)
    assert result.converged
    mu = expected_stats(EDGE_TRI, ParamVector(theta=result.theta_hat), 4)
    assert mu.values == pytest.approx((3.0, 1.0), abs=1e-8)


# --------------------------------------------------------------------------
# CSV output
# --------------------------------------------------------------------------


def test_mle_csv_layout_one_dimensional():
    g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
    result = mle(INVARIANT, FullGraph(g))
    text = format_mle_csv(INVARIANT, [(LikelihoodKind.PROPER, result)])
    lines = text.splitlines()
    assert lines[0] == "family,kind,theta_hat_1,std_err_1,log_lik,converged,boundary,iterations"
    fields = lines[1].split(",")
    assert fields[0] == "BernoulliInvariant"
    assert fields[1] == "proper"
    assert float(fields[2]) == 0.0
    assert float(fields[3]) == pytest.approx(1 / math.sqrt(1.5), abs=1e-12)
    assert float(fields[4]) == pytest.approx(6 * math.log(0.5), abs=1e-12)
    assert fields[5:] == ["true", "false", "0"]


def test_mle_csv_layout_two_dimensional_boundary():
    result = mle(EDGE_TRI, FullGraph(empty_graph(4)))
    text = format_mle_csv(EDGE_TRI, [(LikelihoodKind.PROPER, result)])
    lines = text.splitlines()
    assert lines[0] == (
        "family,kind,theta_hat_1,theta_hat_2,std_err_1,std_err_2,"
        "log_lik,converged,boundary,iterations"
    )
    fields = lines[1].split(",")
    assert fields[0] == "EdgeTriangle"
    assert fields[2] == "nan" and fields[3] == "nan"
    assert fields[4] == "" and fields[5] == ""
    assert fields[6] == "nan"
    assert fields[7:] == ["false", "true", "0"]


def test_mle_csv_infinite_estimates_round_trip():
    result = mle(INVARIANT, FullGraph(complete_graph(3)))
    text = format_mle_csv(INVARIANT, [(LikelihoodKind.PROPER, result)])
    fields = text.splitlines()[1].split(",")
    assert fields[2] == "inf"
    assert float(fields[2]) == math.inf
