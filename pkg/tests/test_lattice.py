from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dysonize.algebra import OperatorMatrix, spin_operators
from dysonize.errors import ClusterError, DimensionError
from dysonize.lattice import MAX_DIM, Cluster, check_guardrail, embed, square_cluster
from oracles import kron_embed


def test_two_site_open_cluster():
    c = square_cluster(2, 1)
    assert c.n_sites == 2
    assert [(i, j) for i, j, _ in c.bonds] == [(0, 1), (1, 0)]
    assert c.sublattice == (1, 2)
    assert c.is_bipartite()
    assert c.sublattice_one_bonds() == ((0, 1, "+x"),)


def test_two_by_two_periodic_keeps_duplicates():
    c = square_cluster(2, 2, "periodic")
    assert len(c.bonds) == 16
    assert c.neighbor_counts() == [4, 4, 4, 4]
    pairs = Counter(frozenset((i, j)) for i, j, _ in c.bonds)
    # four distinct edges, each reached by two displacements in each direction
    assert len(pairs) == 4 and set(pairs.values()) == {4}
    assert c.is_bipartite()
    assert len(c.sublattice_one_bonds()) == 8


def test_checkerboard_tags():
    c = square_cluster(3, 2)
    # row-major site index m * ly + n
    assert c.sublattice[0] == 1  # (0, 0)
    assert c.sublattice[2] == 2  # (1, 0)
    assert c.sublattice[3] == 1  # (1, 1)


def test_open_bond_counts():
    c = square_cluster(3, 3)
    assert len(c.bonds) == 2 * 12
    assert sorted(c.neighbor_counts()) == [2, 2, 2, 2, 3, 3, 3, 3, 4]


def test_periodic_side_of_length_one_has_no_wrap():
    c = square_cluster(1, 3, "periodic")
    assert all(lab in ("+y", "-y") for _, _, lab in c.bonds)
    assert len(c.bonds) == 6


def test_odd_ring_is_not_bipartite():
    c = square_cluster(3, 1, "periodic")
    assert not c.is_bipartite()
    with pytest.raises(ClusterError, match="not bipartite"):
        c.sublattice_one_bonds()


@pytest.mark.parametrize("args", [(1, 1), (0, 3), (2, 2, "twisted")])
def test_bad_clusters(args):
    with pytest.raises(ClusterError):
        square_cluster(*args)


def test_cluster_validation():
    with pytest.raises(ClusterError):
        Cluster(2, (1, 2), ((0, 0, "x"),))
    with pytest.raises(ClusterError):
        Cluster(2, (1, 2), ((0, 2, "x"),))
    with pytest.raises(ClusterError):
        Cluster(2, (1, 3), ())


@pytest.mark.parametrize("shape", [(2, 1, "open"), (2, 2, "periodic"), (3, 2, "open")])
def test_cluster_serialization_round_trip(shape):
    c = square_cluster(*shape)
    again = Cluster.loads(c.dumps())
    assert again == c and again.dumps() == c.dumps()


def test_embed_identity_is_global_identity():
    c = square_cluster(2, 2)
    dims = (3, 3, 3, 3)
    eye = OperatorMatrix.identity(3, "spin(2s=2):m asc")
    for site in range(4):
        assert np.array_equal(embed(eye, site, c, dims).entries, np.eye(81))


def test_embedded_sz_product_diagonal():
    c = square_cluster(2, 1)
    sz = spin_operators(1)["S_z"]
    prod = embed(sz, 0, c, (2, 2)).entries @ embed(sz, 1, c, (2, 2)).entries
    assert np.allclose(np.diag(prod), [0.25, -0.25, -0.25, 0.25])
    assert np.allclose(prod, np.diag(np.diag(prod)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 10_000))
def test_embed_matches_kronecker_and_commutes(i, j, seed):
    rng = np.random.default_rng(seed)
    c = square_cluster(3, 1)
    dims = (2, 3, 2)
    a = OperatorMatrix("a", rng.normal(size=(dims[i],) * 2) + 1j * rng.normal(size=(dims[i],) * 2), "x")
    b = OperatorMatrix("b", rng.normal(size=(dims[j],) * 2), "x")
    ea, eb = embed(a, i, c, dims).entries, embed(b, j, c, dims).entries
    assert np.allclose(ea, kron_embed(a.entries, i, dims))
    if i != j:
        assert np.allclose(ea @ eb, eb @ ea)


def test_embed_dimension_mismatch():
    c = square_cluster(2, 1)
    with pytest.raises(DimensionError):
        embed(spin_operators(2)["S_z"], 0, c, (2, 2))
    with pytest.raises(DimensionError):
        embed(spin_operators(1)["S_z"], 2, c, (2, 2))


def test_guardrail():
    assert check_guardrail((2,) * 14) == MAX_DIM
    with pytest.raises(DimensionError, match="exceeds"):
        check_guardrail((2,) * 15)
