import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccarray.lattice import LatticeSpec, ModelError, build_hamiltonian, recurrence_residual
from ccarray.oracle import diagonalize
from ccarray.spectral import (
    NoState,
    QuantizationBranch,
    ResonantStateSolution,
    RootBracketError,
    all_branches,
    band_pole_function,
    band_pole_roots,
    bound_profile_double,
    bound_state_single,
    coefficient_ratios,
    double_bound_states,
    quantization_function,
    quantization_solve,
    resonant_state,
    single_mu,
)
from ccarray.verification import bisect_decay

ODD_BOUND = QuantizationBranch("positive", "x=2n*pi")
EVEN_BOUND = QuantizationBranch("negative", "x=2n*pi")


# -- band-pole equation


def test_band_pole_single_root_above_band():
    roots = band_pole_roots(0.2, 21)
    assert np.sum(roots > 1.02) == 1 and np.sum(roots < 0.98) == 0


def test_band_pole_single_root_below_band():
    roots = band_pole_roots(-0.2, 21)
    assert np.sum(roots < 0.98) == 1 and np.sum(roots > 1.02) == 0


@pytest.mark.parametrize("lam", [0.2, -0.2, 0.05, 1.5])
def test_band_pole_roots_are_eigenvalues(lam):
    roots = band_pole_roots(lam, 21)
    np.testing.assert_allclose(band_pole_function(roots, lam, 21), 1.0, atol=1e-9)
    eig = np.linalg.eigvalsh(build_hamiltonian(LatticeSpec.single(21, lam)))
    assert max(np.min(np.abs(eig - r)) for r in roots) < 1e-9
    # even-parity eigenstates only: one per distinct pole gap plus one outside
    assert len(roots) == 11


def test_band_pole_errors():
    with pytest.raises(ModelError):
        band_pole_roots(0.0)
    with pytest.raises(ModelError):
        band_pole_roots(0.2, 20)


def test_root_bracket_error_carries_dump():
    err = RootBracketError("no root", [(0.0, 1.0, 2.0, 3.0)])
    assert "[0.0, 1.0]" in str(err) and err.brackets[0][2] == 2.0


# -- single bound state


def test_single_bound_energy_and_mu():
    s = bound_state_single(0.2)
    assert s.energy == pytest.approx(1 + math.sqrt(0.0404), abs=1e-15)
    assert s.energy == pytest.approx(1.201, abs=1e-3)
    assert abs(single_mu(0.2)) == pytest.approx(0.0499, abs=1e-4)
    ratio = abs(s.profile.at(1) / s.profile.at(0))
    assert ratio == pytest.approx(abs(single_mu(0.2)), rel=1e-12)
    assert s.profile.parity_defect("even") == 0.0
    assert int(s.profile.sites[np.argmax(s.profile.probabilities)]) == 0


def test_single_bound_sign_structure():
    above, below = bound_state_single(0.2), bound_state_single(-0.2)
    assert np.real(above.profile.at(1)) < 0 < np.real(above.profile.at(0))
    assert np.real(below.profile.at(1)) > 0
    assert above.location == "above_band" and below.location == "below_band"
    assert below.energy == pytest.approx(1 - math.sqrt(0.0404), abs=1e-15)


def test_single_bound_zero_detuning():
    with pytest.raises(ModelError):
        bound_state_single(0.0)


@given(st.floats(-0.999, 3).filter(lambda x: abs(x) > 1e-3), st.floats(0.001, 0.05))
def test_single_bound_solves_recurrence(lam, J):
    s = bound_state_single(lam, hopping=J, tail_tol=1e-40)
    w = len(s.profile) // 2
    spec = LatticeSpec.single(2 * w + 1, lam, hopping=J, boundary="open")
    res = recurrence_residual(s.profile, s.energy, spec)
    assert res[1:-1].max() < 1e-14
    assert abs(s.energy - 1) > 2 * J


# -- two cavities: quantization


def test_odd_even_decay_near_degeneracy():
    odd = quantization_solve(ODD_BOUND, -0.2, 5)
    even = quantization_solve(EVEN_BOUND, -0.2, 5)
    assert odd.decay == pytest.approx(2.998, abs=1e-3)
    assert abs(odd.decay - bisect_decay(-0.2, 5, True)) < 1e-10
    assert abs(even.decay - bisect_decay(-0.2, 5, False)) < 1e-10
    assert abs(odd.decay - even.decay) < 1e-6
    assert odd.decay == pytest.approx(math.asinh(10), abs=1e-6)
    assert odd.parity.value == "odd" and even.parity.value == "even"
    assert odd.profile.parity_defect("odd") <= 1e-12
    assert even.profile.parity_defect("even") <= 1e-12


def test_odd_profile_peaks_at_the_cavities():
    odd = quantization_solve(ODD_BOUND, -0.2, 5)
    p = odd.profile.probabilities
    peaks = sorted(odd.profile.sites[np.argsort(p)[-2:]])
    assert peaks == [-5, 5]
    assert p[np.abs(odd.profile.sites) == 5].sum() > 0.99


def test_positive_root_repulsive_has_only_zero_solution():
    res = quantization_solve(ODD_BOUND, 0.2, 5)
    assert isinstance(res, NoState) and not res
    assert quantization_function(0.0, ODD_BOUND, 0.2, 5) == 0.0


def test_above_band_pair_for_positive_detuning():
    states = double_bound_states(0.2, 5)
    assert {s.parity.value for s in states} == {"odd", "even"}
    for s in states:
        assert s.location == "above_band" and s.energy > 1.02
        # alternating sign on the outer wings
        assert np.sign(np.real(s.profile.at(6))) == -np.sign(np.real(s.profile.at(5)))


def test_weak_coupling_loses_the_odd_state():
    # slope 2J/|lam0| >= 2d leaves only the zero solution on the positive root
    assert not quantization_solve(ODD_BOUND, -0.001, 5)
    assert quantization_solve(EVEN_BOUND, -0.001, 5)


@pytest.mark.parametrize("lam0,d", [(-0.2, 5), (-0.05, 3), (0.3, 4), (-0.02, 2)])
def test_double_bound_energies_match_oracle(lam0, d):
    states = double_bound_states(lam0, d)
    spec = LatticeSpec.double(201, lam0, d)
    eig = diagonalize(spec).eigenvalues
    out = eig[(eig < 0.98) | (eig > 1.02)]
    assert len(out) == len(states)
    for s in states:
        assert np.min(np.abs(eig - s.energy)) < 1e-8


@pytest.mark.parametrize("lam0,d", [(-0.05, 3), (0.3, 4)])
def test_double_bound_profile_solves_recurrence(lam0, d):
    spec = LatticeSpec.double(81, lam0, d, boundary="open")
    for s in double_bound_states(lam0, d, window=40):
        res = recurrence_residual(s.profile, s.energy, spec)
        assert res[1:-1].max() < 1e-13


def test_branch_classification_table():
    table = {(b.root_sign.value, b.x_class.value): (b.classify(-0.2), b.classify(0.2)) for b in all_branches()}
    assert table[("positive", "x=2n*pi")] == ("odd_bound", "none")
    assert table[("negative", "x=2n*pi")] == ("even_bound", "none")
    assert table[("positive", "x=(2n+1)*pi")] == ("none", "odd_bound")
    assert table[("negative", "x=(2n+1)*pi")] == ("none", "even_bound")
    assert table[("positive", "y=0")] == ("odd_resonant", "odd_resonant")
    assert table[("negative", "y=0")] == ("even_resonant", "even_resonant")


def test_bound_profile_rejects_nonpositive_decay():
    with pytest.raises(ModelError):
        bound_profile_double(0.0, 5, "odd")


# -- resonant states


def test_resonant_wave_vectors():
    assert resonant_state(2, 5, "odd").x == pytest.approx(2 * math.pi / 5, abs=1e-15)
    assert resonant_state(2, 5, "even").x == pytest.approx(math.pi / 2, abs=1e-15)


@pytest.mark.parametrize("parity", ["odd", "even"])
@pytest.mark.parametrize("m,d", [(1, 5), (2, 5), (3, 7), (1, 2)])
def test_resonant_profiles_confined(parity, m, d):
    st_ = resonant_state(m, d, parity, window=d + 4)
    outside = st_.profile.values[np.abs(st_.profile.sites) >= d]
    assert np.all(outside == 0)
    assert st_.profile.parity_defect(parity) == 0.0
    n = 2 * d - 1
    block = np.eye(n) - 0.01 * (np.eye(n, k=1) + np.eye(n, k=-1))
    inner = st_.profile.on_sites(np.arange(-d + 1, d))
    assert np.max(np.abs(block @ inner - st_.energy * inner)) < 1e-12


def test_resonant_vanishing_mode_is_error():
    with pytest.raises(ModelError):
        resonant_state(5, 5, "odd")
    with pytest.raises(ModelError):
        resonant_state(0, 5, "even")


def test_resonant_validity_threshold():
    assert resonant_state(2, 5, "odd", lam0=2.0).valid  # ratio 100
    assert not resonant_state(2, 5, "odd", lam0=0.2).valid  # ratio 10
    assert resonant_state(2, 5, "odd").valid is None
    weak = quantization_solve(QuantizationBranch("positive", "y=0"), 0.2, 5, mode_index=2)
    strong = quantization_solve(QuantizationBranch("positive", "y=0"), 2.0, 5, mode_index=2)
    assert isinstance(weak, NoState) and isinstance(strong, ResonantStateSolution)
    with pytest.raises(ModelError):
        quantization_solve(QuantizationBranch("negative", "y=0"), 2.0, 5)


def test_resonant_state_nearly_exact_for_strong_detuning():
    lam0, d = 20.0, 5
    st_ = resonant_state(2, d, "odd", lam0=lam0)
    spec = LatticeSpec.double(101, lam0, d)
    eig = diagonalize(spec).eigenvalues
    assert np.min(np.abs(eig - st_.energy)) < 1e-5


# -- coefficient relations


def test_coefficient_ratios_vanish_on_root():
    y0 = quantization_solve(ODD_BOUND, -0.2, 5).decay
    assert coefficient_ratios(1j * y0, -0.2, 5).consistency_residual < 1e-9


def test_coefficient_ratios_large_detuning_limit():
    lam0 = 1e3 * 2 * 0.01
    r = coefficient_ratios(2 * math.pi / 5, lam0, 5)
    assert abs(r.a_over_b) < 2e-3 and abs(r.d_over_b) < 2e-3
    assert abs(r.c_over_b + 1) < 2e-3


def test_coefficient_ratios_generic_k_is_off_shell():
    assert coefficient_ratios(0.37 + 0.2j, -0.2, 5).consistency_residual > 1e-6
