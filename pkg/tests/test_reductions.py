import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gadgetforge.errors import InputError, PreconditionError, ResourceLimitError
from gadgetforge.generators import complete_graph, gen_random_degree_bounded, path_graph
from gadgetforge.graph import CliqueInstance, DksInstance, Graph, Solution, induced_edge_count, max_degree
from gadgetforge.reductions import (
    FENCE_EDGES,
    ReductionTrace,
    TorusLayout,
    clique_threshold,
    cycle_gadget,
    embed_solution,
    fence_gadget,
    lift_solution,
    pad_graph,
    padded_size,
    psi,
    reduce_chain,
    reduce_clique_to_dks5,
    reduce_deg4_to_deg3_cycle,
    reduce_deg5_to_deg4_fence,
    reduce_full_chain,
    replay,
    sigma,
)


def test_fence_gadget_shape():
    g = fence_gadget()
    assert (g.n, g.m) == (8, 13)
    assert g.degrees.tolist() == [3, 3, 3, 3, 3, 3, 4, 4]
    assert len(FENCE_EDGES) == 13


def test_cycle_gadget_shape():
    g = cycle_gadget()
    assert (g.n, g.m) == (4, 4)
    assert set(g.degrees.tolist()) == {2}


@pytest.mark.parametrize("phi_v, expected", [(0, (0, 0)), (1, (27, 0)), (4, (27, 1))])
def test_attachment_maps(phi_v, expected):
    assert (psi(phi_v, 9), sigma(phi_v, 9)) == expected


def test_attachment_maps_need_odd_square():
    for n in (4, 8, 10):
        with pytest.raises(InputError):
            psi(0, n)


def test_attachment_maps_brute_force():
    # exact rational arithmetic as an independent oracle
    for n in (9, 25, 49):
        root = math.isqrt(n)
        for phi_v in range(n):
            t = phi_v * n * root
            assert psi(phi_v, n) == t % (n * n)
            assert sigma(phi_v, n) == t // (n * n)


@pytest.mark.parametrize("n", [9, 25, 49, 81])
def test_attachment_points_distinct(n):
    points = {(psi(v, n), sigma(v, n)) for v in range(n)}
    assert len(points) == n


def test_padded_size():
    assert padded_size(3, 3) == 9
    assert padded_size(9, 3) == 9
    assert padded_size(9, 8) == 25
    assert padded_size(10, 2) == 25
    assert padded_size(1, 2) == 9
    for n in range(1, 60):
        for s in range(2, n + 1):
            p = padded_size(n, s)
            r = math.isqrt(p)
            assert r * r == p and r % 2 == 1 and p >= n and p > s + 1
            assert not any(q * q >= n and q * q > s + 1 for q in range(1, r, 2))


def test_pad_graph_keeps_edges():
    g = pad_graph(path_graph(3), 9)
    assert g.n == 9 and g.edges == ((0, 1), (1, 2))
    with pytest.raises(InputError):
        pad_graph(path_graph(3), 2)


def test_torus_reduction_k3():
    inst, threshold, trace = reduce_clique_to_dks5(CliqueInstance(complete_graph(3), 3))
    g = inst.graph
    assert g.n == 59049 and g.m == 2 * 9**5 + 3
    assert max_degree(g) == 5
    assert inst.k == 19683 and threshold == 39369 == clique_threshold(3, 9)
    assert inst.degree_bound == 5
    step = trace.steps[0]
    assert step.kind == "torus" and step.base_n == 9 and step.original_n == 3
    size = 9**4
    for v in range(9):
        block = g.edge_array[(g.edge_array[:, 0] >= v * size) & (g.edge_array[:, 1] < (v + 1) * size)]
        assert len(block) == 2 * size


def test_torus_inter_edges_follow_attachment_maps():
    base = Graph(4, [(0, 1), (0, 3), (2, 3)])
    inst, _, trace = reduce_clique_to_dks5(CliqueInstance(base, 2))
    layout = trace.steps[0].layout
    size = layout.torus_size
    inter = {(u, v) for u, v in inst.graph.edges if u // size != v // size}
    expected = set()
    for u, v in base.edges:
        a = layout.vertex_index(u, psi(v, 9), sigma(v, 9))
        b = layout.vertex_index(v, psi(u, 9), sigma(u, 9))
        expected.add((min(a, b), max(a, b)))
    assert inter == expected


def test_edgeless_base_has_no_inter_edges():
    inst, _, _ = reduce_clique_to_dks5(CliqueInstance(Graph(2), 2))
    assert inst.graph.m == 2 * 9**5


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 9), st.data())
def test_torus_reduction_invariants(n, data):
    m = data.draw(st.integers(0, n * (n - 1) // 2))
    base = gen_random_degree_bounded(n, n - 1, m, data.draw(st.integers(0, 999)))
    s = data.draw(st.integers(2, min(n, 7)))  # keeps the padded size at 9
    inst, threshold, trace = reduce_clique_to_dks5(CliqueInstance(base, s))
    big_n = trace.steps[0].base_n
    size = big_n**4
    g = inst.graph
    assert g.m == 2 * big_n**5 + base.m
    assert max_degree(g) <= 5
    assert threshold == 2 * s * size + s * (s - 1) // 2
    e = g.edge_array
    cross = e[e[:, 0] // size != e[:, 1] // size]
    endpoints = cross.ravel()
    # injective attachment: no torus vertex carries two inter-torus edges
    assert len(np.unique(endpoints)) == len(endpoints)
    assert np.bincount(endpoints // size, minlength=big_n).max(initial=0) <= big_n
    assert trace.steps[0].base_graph() == pad_graph(base, big_n)


def test_torus_resource_guard():
    with pytest.raises(ResourceLimitError):
        reduce_clique_to_dks5(CliqueInstance(complete_graph(3), 3), max_vertices=50000)
    with pytest.raises(InputError):
        reduce_clique_to_dks5(CliqueInstance(complete_graph(3), 1))


def test_fence_on_k4():
    inst, trace = reduce_deg5_to_deg4_fence(DksInstance(complete_graph(4), 2))
    assert (inst.graph.n, inst.graph.m, inst.k) == (32, 58, 16)
    assert max_degree(inst.graph) <= 4


def test_fence_single_vertex_is_gadget():
    inst, _ = reduce_deg5_to_deg4_fence(DksInstance(Graph(1), 1))
    assert inst.graph == fence_gadget() and inst.k == 8


def test_fence_ports_on_outer_vertices():
    inst, trace = reduce_deg5_to_deg4_fence(DksInstance(complete_graph(7), 1))
    step = trace.steps[0]
    for v, plist in enumerate(step.ports):
        assert [p for _, p in plist] == [0, 1, 2, 3, 4, 5]
        assert [u for u, _ in plist] == [u for u in range(7) if u != v]
    assert max_degree(inst.graph) == 4


def test_fence_rejects_degree_seven():
    with pytest.raises(InputError, match="degree"):
        reduce_deg5_to_deg4_fence(DksInstance(complete_graph(8), 1))


def test_cycle_on_k4():
    inst, _ = reduce_deg4_to_deg3_cycle(DksInstance(complete_graph(4), 3))
    assert (inst.graph.n, inst.graph.m, inst.k) == (16, 22, 12)
    assert max_degree(inst.graph) == 3
    single, _ = reduce_deg4_to_deg3_cycle(DksInstance(Graph(1), 1))
    assert single.graph == cycle_gadget()


def test_cycle_rejects_degree_five():
    with pytest.raises(InputError):
        reduce_deg4_to_deg3_cycle(DksInstance(complete_graph(6), 1))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["fence", "cycle"]), st.integers(1, 40), st.data())
def test_gadget_edge_accounting(kind, n, data):
    d = 6 if kind == "fence" else 4
    m = data.draw(st.integers(0, min(n * d // 2, n * (n - 1) // 2)))
    g = gen_random_degree_bounded(n, d, m, data.draw(st.integers(0, 999)))
    k = data.draw(st.integers(0, n))
    fn, size, internal, bound = {
        "fence": (reduce_deg5_to_deg4_fence, 8, 13, 4),
        "cycle": (reduce_deg4_to_deg3_cycle, 4, 4, 3),
    }[kind]
    inst, trace = fn(DksInstance(g, k))
    assert inst.graph.n == size * n
    assert inst.graph.m == internal * n + m
    assert inst.k == size * k
    assert max_degree(inst.graph) <= bound
    assert trace.steps[0].base_graph() == g
    # each base edge uses one port per endpoint; no port used twice
    e = inst.graph.edge_array
    cross = e[e[:, 0] // size != e[:, 1] // size]
    assert len(cross) == m
    assert len(np.unique(cross.ravel())) == 2 * m


def test_synthetic_chain_from_degree_five():
    g = gen_random_degree_bounded(6, 5, 12, seed=3)
    final, trace = reduce_chain(DksInstance(g, 2, degree_bound=5))
    assert final.graph.n == 32 * 6
    assert final.k == 32 * 2
    assert max_degree(final.graph) <= 3
    assert [s.kind for s in trace.steps] == ["fence", "cycle"]
    graphs = replay(trace, g)
    assert graphs[-1] == final.graph


def test_full_chain_guard_fires_on_k3():
    with pytest.raises(ResourceLimitError, match="cycle"):
        reduce_full_chain(CliqueInstance(complete_graph(3), 3))


def test_full_chain_when_cap_allows():
    final, thresholds, trace = reduce_full_chain(CliqueInstance(complete_graph(3), 3), max_vertices=2_000_000)
    k0 = 3 * 9**4
    assert [s.kind for s in trace.steps] == ["torus", "fence", "cycle"]
    assert final.k == 32 * k0 and final.graph.n == 32 * 9**5
    assert max_degree(final.graph) <= 3
    assert thresholds == [39369, 13 * k0 + 39369, 4 * 8 * k0 + 13 * k0 + 39369]


def test_trace_composition_checked():
    _, t1 = reduce_deg5_to_deg4_fence(DksInstance(complete_graph(3), 1))
    _, t2 = reduce_deg4_to_deg3_cycle(DksInstance(complete_graph(3), 1))
    with pytest.raises(InputError, match="compose"):
        t1.then(t2)


def test_trace_json_round_trip(tmp_path):
    g = gen_random_degree_bounded(6, 5, 10, seed=1)
    _, trace = reduce_chain(DksInstance(g, 3))
    path = tmp_path / "t.json"
    trace.write(path)
    again = ReductionTrace.read(path)
    assert again == trace
    assert again.dumps() == trace.dumps()
    record = json.loads(path.read_text())
    assert record["steps"][0]["gadget_base_index"] == [8 * v for v in range(6)]

    _, _, torus = reduce_clique_to_dks5(CliqueInstance(complete_graph(3), 2))
    assert ReductionTrace.loads(torus.dumps()) == torus
    assert json.loads(torus.dumps())["steps"][0]["phi"] == list(range(9))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["steps"][0].update(kind="square"),
        lambda d: d["steps"][0].pop("ports"),
        lambda d: d["steps"][0].update(gadget_base_index=[0, 1, 2]),
        lambda d: d.pop("steps"),
    ],
)
def test_bad_traces_rejected(mutate):
    _, trace = reduce_deg5_to_deg4_fence(DksInstance(complete_graph(3), 1))
    record = trace.to_dict()
    mutate(record)
    with pytest.raises(InputError):
        ReductionTrace.from_dict(record)


def test_replay_rejects_wrong_graph():
    _, trace = reduce_deg5_to_deg4_fence(DksInstance(complete_graph(3), 1))
    with pytest.raises(InputError):
        replay(trace, path_graph(3))


def test_lift_fence_edge_drops_26():
    base = complete_graph(3)
    inst, trace = reduce_deg5_to_deg4_fence(DksInstance(base, 2))
    up = embed_solution(trace.steps[0], inst.graph, [0, 2])
    assert up.edge_count == 27
    down = lift_solution(trace, 0, up)
    assert down.vertices == (0, 2)
    assert up.edge_count - down.edge_count == 26


def test_lift_torus_recovers_triangle():
    base = complete_graph(3)
    inst, threshold, trace = reduce_clique_to_dks5(CliqueInstance(base, 3))
    sol = embed_solution(trace.steps[0], inst.graph, [0, 1, 2])
    assert sol.edge_count == threshold == 39369
    assert lift_solution(trace, 0, sol).vertices == (0, 1, 2)


def test_lift_empty():
    inst, trace = reduce_deg4_to_deg3_cycle(DksInstance(complete_graph(3), 0))
    lifted = lift_solution(trace, 0, Solution((), 0))
    assert lifted == Solution((), 0)


def test_lift_requires_complete_gadgets():
    inst, trace = reduce_deg4_to_deg3_cycle(DksInstance(complete_graph(3), 1))
    with pytest.raises(PreconditionError, match="gadget 0"):
        lift_solution(trace, 0, Solution.of(inst.graph, [0, 1, 2, 4]))
    with pytest.raises(InputError):
        lift_solution(trace, 0, Solution.of(inst.graph, [0, 1]))
    with pytest.raises(InputError):
        lift_solution(trace, 1, Solution.of(inst.graph, [0, 1, 2, 3]))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["fence", "cycle"]), st.integers(1, 10), st.data())
def test_value_bookkeeping(kind, n, data):
    d = 5 if kind == "fence" else 4
    m = data.draw(st.integers(0, min(n * d // 2, n * (n - 1) // 2)))
    g = gen_random_degree_bounded(n, d, m, data.draw(st.integers(0, 999)))
    chosen = sorted(data.draw(st.sets(st.integers(0, n - 1))))
    k = len(chosen)
    fn, internal = (reduce_deg5_to_deg4_fence, 13) if kind == "fence" else (reduce_deg4_to_deg3_cycle, 4)
    inst, trace = fn(DksInstance(g, k))
    up = embed_solution(trace.steps[0], inst.graph, chosen)
    assert up.edge_count == internal * k + induced_edge_count(g, chosen)
    assert lift_solution(trace, 0, up) == Solution.of(g, chosen)


def test_layout_round_trip():
    layout = TorusLayout(9, tuple(range(9)))
    for v, i, j in itertools.product([0, 4, 8], [0, 40, 80], [0, 7, 80]):
        x = layout.vertex_index(v, i, j)
        assert layout.coordinates(x) == (v, i, j)
