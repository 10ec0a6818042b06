import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dysonize.algebra import DoubledSpin
from dysonize.dyson import LocalSpace
from dysonize.errors import ClusterError, DegenerateSpinError, DimensionError, ModelError
from dysonize.lattice import square_cluster
from dysonize.models import (
    MODELS, HamiltonianSpec, build_hamiltonian, neel_report, reference_energy, reference_state,
    total_operator, transcription_audit,
)
from oracles import heisenberg_from_bonds

PAIR = square_cluster(2, 1)
PLAQUETTE = square_cluster(2, 2, "periodic")


def spec(model, rep="spin", J=1.0, tau=0.0, two_s=1):
    return HamiltonianSpec(model, rep, J, tau, DoubledSpin(two_s))


def eigs(h, g=None):
    m = h.entries
    if g is not None:
        r = np.sqrt(g.weights)
        m = r[:, None] * m / r[None, :]
        return np.linalg.eigvalsh((m + m.conj().T) / 2)
    return np.linalg.eigvalsh(m)


def test_spec_validation():
    with pytest.raises(ModelError):
        spec("heisenberg_FM", "mapped_truncated")
    with pytest.raises(ModelError):
        spec("ising")
    with pytest.raises(ModelError):
        spec("tJ_AF", "momentum")
    with pytest.raises(DegenerateSpinError):
        spec("tJ_AF", two_s=0)


def test_ferromagnet_sign_flag():
    assert spec("heisenberg_FM", J=-1.0).flags
    assert not spec("heisenberg_FM", J=1.0).flags
    h, _ = build_hamiltonian(spec("heisenberg_FM", J=-1.0), PAIR)
    assert h.metadata["flags"]


@pytest.mark.parametrize("model", MODELS)
def test_spec_round_trip(model):
    s = spec(model, "mapped_substituted", 0.3, -1.25, 3)
    assert HamiltonianSpec.from_dict(s.to_dict()) == s


def test_two_site_ferromagnet_golden():
    # -J/2 per directed traversal, two traversals: H = -J S1.S2
    h, g = build_hamiltonian(spec("heisenberg_FM"), PAIR)
    assert np.allclose(eigs(h), [-0.25, -0.25, -0.25, 0.75])
    assert g.is_identity()


def test_two_site_antiferromagnet_golden():
    # only bonds leaving sublattice 1: H = J S1.S2
    h, _ = build_hamiltonian(spec("heisenberg_AFM"), PAIR)
    assert np.allclose(eigs(h), [-0.75, 0.25, 0.25, 0.25])


@pytest.mark.parametrize("two_s", [1, 2])
def test_spin_heisenberg_matches_brute_force(two_s):
    c = PLAQUETTE
    pairs = [(i, j) for i, j, _ in c.bonds]
    h, _ = build_hamiltonian(spec("heisenberg_FM", J=0.8, two_s=two_s), c)
    assert np.allclose(h.entries, heisenberg_from_bonds(two_s, 4, pairs, -0.4))
    sub = [(i, j) for i, j, _ in c.sublattice_one_bonds()]
    h, _ = build_hamiltonian(spec("heisenberg_AFM", J=1.3, two_s=two_s), c)
    assert np.allclose(h.entries, heisenberg_from_bonds(two_s, 4, sub, 1.3))


@pytest.mark.parametrize("rep", ["mapped_transcribed", "mapped_substituted"])
@pytest.mark.parametrize("c", [PAIR, PLAQUETTE, square_cluster(3, 1)])
@pytest.mark.parametrize("two_s", [1, 2, 3])
def test_ferromagnet_vacuum(rep, c, two_s):
    h, _ = build_hamiltonian(spec("heisenberg_FM", rep, two_s=two_s), c)
    vac = reference_state(spec("heisenberg_FM", rep, two_s=two_s), c)
    if rep == "mapped_substituted":
        # the substituted form keeps the classical energy of the fully polarized state
        vac_energy = reference_energy(spec("heisenberg_FM", two_s=two_s), c)
        assert np.abs(h.entries @ vac - vac_energy * vac).max() < 1e-12
    else:
        assert np.abs(h.entries @ vac).max() < 1e-12


MAPPED_PAIRS = [(m, r) for m in MODELS for r in ("mapped_transcribed", "mapped_substituted", "mapped_truncated")
                if r != "mapped_truncated" or m.startswith("tJ")]


@pytest.mark.parametrize("model,rep", MAPPED_PAIRS)
def test_conserved_totals(model, rep):
    s = spec(model, rep, J=0.9, tau=0.35, two_s=2)
    h, _ = build_hamiltonian(s, PLAQUETTE)
    names = ["S_z", "A"] if model.startswith("tJ") else ["S_z"]
    for name in names:
        x = total_operator(name, s, PLAQUETTE).entries
        assert np.abs(h.entries @ x - x @ h.entries).max() < 1e-12


def test_unknown_total_element():
    with pytest.raises(ModelError):
        total_operator("R_plus", spec("heisenberg_FM"), PAIR)
    with pytest.raises(ModelError):
        total_operator("Q", spec("tJ_ferro"), PAIR)


def test_total_charge_counts_fermions():
    s = spec("tJ_ferro", "mapped_substituted", two_s=2)
    a_tot = total_operator("A", s, PAIR).entries
    assert np.allclose(a_tot, np.diag(np.diag(a_tot)))
    # each site contributes s plus half its fermion number
    assert sorted(set(np.round(np.diag(a_tot).real, 12))) == [2.0, 2.5, 3.0]


def test_antiferromagnet_needs_bipartite_cluster():
    ring = square_cluster(3, 1, "periodic")
    for model in ("heisenberg_AFM", "tJ_AF"):
        with pytest.raises(ClusterError):
            build_hamiltonian(spec(model), ring)
    build_hamiltonian(spec("heisenberg_FM"), ring)


def test_guardrail_refuses_large_builds():
    with pytest.raises(DimensionError):
        build_hamiltonian(spec("tJ_ferro"), square_cluster(3, 3))


@pytest.mark.parametrize("model", MODELS)
def test_backends_build_identical_matrices(model):
    s = spec(model, "mapped_substituted", 1.1, 0.4, 2)
    a, _ = build_hamiltonian(s, PLAQUETTE, backend="python")
    b, _ = build_hamiltonian(s, PLAQUETTE)
    assert np.allclose(a.entries, b.entries, atol=1e-14)


@pytest.mark.parametrize("two_s", [1, 2])
def test_ferro_tJ_without_holes_is_heisenberg(two_s):
    """The zero-fermion block of the ferro t-J model is -2 H_FM minus J s^2 per directed bond."""
    c, J = PLAQUETTE, 0.7
    st_ = spec("tJ_ferro", "mapped_substituted", J, 0.3, two_s)
    h, _ = build_hamiltonian(st_, c)
    states = LocalSpace(two_s, "super_dyson").states
    local = [k for k, (u, a) in enumerate(states) if a == 0]
    d = len(states)
    idx = [sum(local[v] * d ** (3 - p) for p, v in enumerate(combo)) for combo in np.ndindex(*(len(local),) * 4)]
    block = h.entries[np.ix_(idx, idx)]
    fm, _ = build_hamiltonian(spec("heisenberg_FM", "mapped_substituted", J, two_s=two_s), c)
    shift = J * (two_s / 2) ** 2 * len(c.bonds)
    assert np.abs(block - (-2 * fm.entries - shift * np.eye(len(idx)))).max() < 1e-12


@pytest.mark.parametrize("two_s", [1, 2, 3])
@pytest.mark.parametrize("model", ["heisenberg_FM", "heisenberg_AFM", "tJ_AF"])
def test_transcriptions_exact_up_to_reference_energy(model, two_s):
    audit = transcription_audit(spec(model, J=0.9, tau=0.6, two_s=two_s), PLAQUETTE)
    assert audit.exact, audit.rows


def test_reference_energies():
    s = DoubledSpin(2)
    for model, per_bond, bonds in (("heisenberg_FM", -0.5, 16), ("heisenberg_AFM", -1.0, 8), ("tJ_AF", -2.0, 8)):
        e = reference_energy(HamiltonianSpec(model, "spin", 1.0, 0.0, s), PLAQUETTE)
        assert e == pytest.approx(per_bond * s.s ** 2 * bonds)


def test_ferro_tJ_transcription_discrepancy_is_reported():
    audit = transcription_audit(spec("tJ_ferro", J=1.0, tau=0.5, two_s=1), PAIR)
    assert not audit.exact
    by_degree = {r.degree: r for r in audit.rows}
    assert by_degree[0].discrepancy < 1e-12
    assert by_degree[2].discrepancy == pytest.approx(2.5)
    assert by_degree[4].discrepancy == pytest.approx(3.0)
    assert len(audit.term_norms) == 14
    assert audit.to_dict()["exact"] is False


def test_neel_energy_is_variational():
    for model in ("heisenberg_AFM", "tJ_AF"):
        rep = neel_report(spec(model, J=1.0, tau=0.3, two_s=2), PLAQUETTE)
        assert rep.neel_energy >= rep.ground_energy - 1e-12
        assert rep.gap > 0
    with pytest.raises(ModelError):
        neel_report(spec("heisenberg_FM"), PAIR)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(MODELS), st.floats(-2, 2), st.floats(-2, 2), st.integers(1, 3))
def test_mapped_substituted_is_isospectral_on_random_couplings(model, J, tau, two_s):
    s = spec(model, "spin", J, tau, two_s)
    h, _ = build_hamiltonian(s, PAIR)
    hm, g = build_hamiltonian(s.replace(representation="mapped_substituted"), PAIR)
    assert np.abs(np.sort(eigs(h)) - np.sort(eigs(hm, g))).max() < 1e-9
