import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from catalytic.hypergraph import (
    Hypergraph,
    HypergraphError,
    SectionedResource,
    attach_injection_vertex,
    build_state,
    transformed_demo_resource,
    y_inject,
)
from catalytic.statevec import (
    Postselect,
    Sample,
    is_real_state,
    make_named_state,
    qubit_marginal,
)


def test_single_vertex_is_plus():
    np.testing.assert_allclose(build_state(Hypergraph(1)).amps, make_named_state("plus").amps)


def test_cz_plus_plus():
    np.testing.assert_allclose(build_state(Hypergraph(2, {(1, 2)})).amps, np.array([1, 1, 1, -1]) / 2)


def test_single_hyperedge():
    amps = build_state(Hypergraph(3, edges3={(1, 2, 3)})).amps
    expected = np.full(8, 8**-0.5)
    expected[7] *= -1
    np.testing.assert_allclose(amps, expected)


def test_definition_oracle():
    # Sign of |z> is (-1)^(number of edges fully inside z).
    g = Hypergraph(4, {(1, 2), (2, 4)}, {(1, 3, 4), (2, 3, 4)})
    amps = build_state(g).amps
    for i, z in enumerate(itertools.product((0, 1), repeat=4)):
        hits = sum(all(z[v - 1] for v in e) for e in [*g.edges2, *g.edges3])
        assert amps[i] == pytest.approx((-1) ** hits / 4)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_vertices=2, edges2=[(1, 3)]),
        dict(num_vertices=2, edges2=[(1, 1)]),
        dict(num_vertices=3, edges2=[(1, 2), (2, 1)]),
        dict(num_vertices=4, edges3=[(1, 2, 3, 4)]),
        dict(num_vertices=0),
    ],
)
def test_invalid_hypergraphs(kwargs):
    with pytest.raises(HypergraphError):
        Hypergraph(**kwargs)


def test_build_state_size_limit():
    with pytest.raises(HypergraphError):
        build_state(Hypergraph(21))


@st.composite
def hypergraphs(draw):
    m = draw(st.integers(1, 6))
    pairs = list(itertools.combinations(range(1, m + 1), 2))
    triples = list(itertools.combinations(range(1, m + 1), 3))
    e2 = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    e3 = draw(st.lists(st.sampled_from(triples), unique=True)) if triples else []
    return Hypergraph(m, e2, e3)


@given(hypergraphs())
def test_hypergraph_states_real_and_flat(g):
    s = build_state(g)
    assert is_real_state(s, 1e-12)
    np.testing.assert_allclose(np.abs(s.amps), 2 ** (-g.num_vertices / 2), atol=1e-12)


@given(hypergraphs(), st.randoms(use_true_random=False))
def test_edge_order_irrelevant(g, rnd):
    edges = sorted(g.edges2) + sorted(g.edges3)
    rnd.shuffle(edges)
    np.testing.assert_array_equal(build_state(g, edges).amps, build_state(g).amps)


def test_attach_injection_vertex():
    g, v = attach_injection_vertex(Hypergraph(1), 1)
    assert (g.num_vertices, v, g.edges2) == (2, 2, {(1, 2)})
    path = Hypergraph(3, {(1, 2), (2, 3)})
    g, v = attach_injection_vertex(path, 3)
    assert v == 4 and (3, 4) in g.edges2 and g.edges3 == path.edges3
    g2, v2 = attach_injection_vertex(g, 3)
    assert v2 == 5 and {(3, 4), (3, 5)} <= g2.edges2
    with pytest.raises(HypergraphError):
        attach_injection_vertex(path, 4)


def _qubit1_state(state):
    # Qubit 1 of a 2-qubit state whose qubit 2 is collapsed: take the dominant Schmidt vector.
    rho = qubit_marginal(state, 1)
    w, v = np.linalg.eigh(rho)
    return v[:, -1], w[-1]


@pytest.mark.parametrize("eig, byproduct, raw", [(1, "I", [1, 1j]), (-1, "Z", [1, -1j])])
def test_y_inject_branches(eig, byproduct, raw):
    s = build_state(Hypergraph(2, {(1, 2)}))
    r = y_inject(s, 2, 1, Postselect(eig))
    assert r.byproduct == byproduct
    assert r.outcome.probability == pytest.approx(0.5, abs=1e-12)
    vec, purity = _qubit1_state(r.state)
    assert purity == pytest.approx(1, abs=1e-12)
    assert abs(np.vdot(vec, np.array(raw) / np.sqrt(2))) ** 2 == pytest.approx(1, abs=1e-12)
    corrected = qubit_marginal(r.corrected(1), 1)
    plus_i = make_named_state("plus_i").amps
    assert np.real(plus_i.conj() @ corrected @ plus_i) >= 1 - 1e-10


def test_sectioned_resource_partition():
    g = Hypergraph(3)
    with pytest.raises(HypergraphError):
        SectionedResource(g, {1}, {2}, set())
    with pytest.raises(HypergraphError):
        SectionedResource(g, {1, 2}, {2}, {3})


def test_demo_resource():
    res, state = transformed_demo_resource()
    assert res.input_section == {1, 2, 3} and res.body_section == {4} and res.output_section == set()
    assert res.hypergraph.edges2 == {(3, 4)}
    assert is_real_state(state)
    for policy in (Postselect(1), Postselect(-1), Sample(5)):
        r = y_inject(state, 4, 3, policy)
        rho = qubit_marginal(r.corrected(3), 3)
        plus_i = make_named_state("plus_i").amps
        assert np.real(plus_i.conj() @ rho @ plus_i) >= 1 - 1e-10


def test_resource_json_round_trip():
    res, _ = transformed_demo_resource()
    data = json.loads(res.to_json())
    assert data == {
        "num_vertices": 4,
        "edges2": [[3, 4]],
        "edges3": [],
        "sections": {"input": [1, 2, 3], "body": [4], "output": []},
    }
    assert SectionedResource.from_dict(data) == res
