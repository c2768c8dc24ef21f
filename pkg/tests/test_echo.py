import warnings

import numpy as np
import pytest

from oracles import expm_unitary, variance_qfi
from trmetro.core import HADAMARD, SZ, StateVector, TruncationError, random_hermitian, random_unitary
from trmetro.echo import (
    DickeSpin,
    EchoSpec,
    SqueezeSpec,
    TwoModeSpace,
    echo_fi_matches_qfi,
    holstein_primakoff_check,
    parametric_amplification,
    run_echo,
    spin_squeeze_generators,
    su11_interferometer,
)
from trmetro.fisher import ParamDistribution, classical_fi


class TestEcho:
    def test_hadamard_closed_form(self):
        spec = EchoSpec(HADAMARD, SZ / 2)
        for a in np.linspace(0, 2 * np.pi, 13):
            assert spec.outcome_probs(a)[0] == pytest.approx(np.cos(a / 2) ** 2, abs=1e-14)

    def test_probs_against_scipy(self):
        rng = np.random.default_rng(4)
        V, H = random_unitary(3, rng), random_hermitian(3, rng)
        spec = EchoSpec(V, H)
        for a in (0.1, 0.8):
            ret = V.conj().T @ expm_unitary(H, a) @ V[:, 0]
            assert spec.outcome_probs(a)[0] == pytest.approx(abs(ret[0]) ** 2, abs=1e-12)

    def test_non_unitary_preparation(self):
        with pytest.raises(ValueError):
            EchoSpec(np.ones((2, 2)), SZ)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            EchoSpec(np.eye(2), np.eye(3))

    def test_run_echo_result(self):
        dist, res = run_echo(EchoSpec(HADAMARD, SZ / 2, 0.9))
        assert res.check() == []
        assert res.fi == pytest.approx(1.0, abs=1e-6)
        assert res.qfi == pytest.approx(1.0, abs=1e-6)
        assert res.success_prob == pytest.approx(np.cos(0.45) ** 2)

    def test_small_alpha_fi_approaches_qfi(self):
        rng = np.random.default_rng(9)
        V, H = random_unitary(4, rng), random_hermitian(4, rng)
        gap = echo_fi_matches_qfi(EchoSpec(V, H, 1e-3))
        assert gap.gap <= 1e-4
        assert gap.shrink >= 3.5
        assert gap.qfi == pytest.approx(variance_qfi(H, V[:, 0]), rel=1e-6)
        assert gap.variance_bound == pytest.approx(gap.qfi, rel=1e-6)

    def test_large_alpha_warns(self):
        rng = np.random.default_rng(2)
        V, H = random_unitary(2, rng), random_hermitian(2, rng)
        with pytest.warns(UserWarning):
            gap = echo_fi_matches_qfi(EchoSpec(V, H, 0.5))
        assert not gap.weak_regime


class TestParametricAmplification:
    @pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
    def test_ratio_is_exp_r(self, r):
        rep = parametric_amplification(SqueezeSpec(r, fock_dim=60), 0.1)
        assert rep.ratio == pytest.approx(np.exp(r), rel=1e-2)
        assert rep.tail_mass < 1e-6

    def test_no_squeezing_no_gain(self):
        rep = parametric_amplification(SqueezeSpec(0.0, fock_dim=20), 0.1)
        assert rep.ratio == pytest.approx(1.0, abs=1e-12)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            parametric_amplification(SqueezeSpec(2.0, fock_dim=12), 0.1)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            SqueezeSpec(-0.1)


class TestSU11:
    def test_two_mode_squeezed_vacuum_amplitudes(self):
        # |TMSV> = sum_n tanh(r)^n / cosh(r) |n, n>
        D, r = 20, 0.4
        S = TwoModeSpace(D).two_mode_squeeze(r)
        vac = np.zeros(D * D)
        vac[0] = 1
        psi = (S @ vac).reshape(D, D)
        n = np.arange(6)
        assert np.allclose(np.abs(psi[n, n]), np.tanh(r) ** n / np.cosh(r), atol=1e-8)
        off = psi - np.diag(np.diag(psi))
        assert np.abs(off).max() < 1e-10

    def test_fi_near_qfi(self):
        res = su11_interferometer(0.5, 1e-3, 25)
        assert res.check() == []
        assert res.fi >= 0.99 * res.qfi
        # QFI of the phase on one arm of a TMSV: 4 Var(n_a) = sinh^2(2r)
        assert res.qfi == pytest.approx(np.sinh(1.0) ** 2, rel=1e-4)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            su11_interferometer(1.5, 1e-3, 6)


class TestSpin:
    def test_dicke_algebra(self):
        s = DickeSpin(6)
        comm = s.S_plus @ s.S_minus - s.S_minus @ s.S_plus
        assert np.allclose(comm, 2 * s.S_z)
        casimir = s.S_x @ s.S_x + s.S_y @ s.S_y + s.S_z @ s.S_z
        assert np.allclose(casimir, 3 * 4 * np.eye(7))

    def test_generators_hermitian(self):
        for kind in ("TAT", "OAT"):
            H = spin_squeeze_generators(8, kind, 0.3).matrix
            assert np.allclose(H, H.conj().T)
        with pytest.raises(ValueError):
            spin_squeeze_generators(8, "XYZ")
        with pytest.raises(ValueError):
            spin_squeeze_generators(1)

    def test_tat_echo_beats_unsqueezed(self):
        # squeeze, rotate about S_x, unsqueeze, read the reference state
        N, r, a = 8, 0.5, 1e-3
        s = DickeSpin(N)
        Hsq = spin_squeeze_generators(N, "TAT", np.pi / 2)
        spec = EchoSpec(expm_unitary(Hsq.matrix, r), s.S_x, a)
        plain = EchoSpec(np.eye(N + 1), s.S_x, a)
        fi_sq = classical_fi(ParamDistribution(spec.outcome_probs), a).value
        fi_plain = classical_fi(ParamDistribution(plain.outcome_probs), a).value
        assert fi_plain == pytest.approx(N, rel=1e-3)
        assert fi_sq > 2 * fi_plain

    def test_holstein_primakoff_small_excitation(self):
        rep = holstein_primakoff_check(1000, 1)
        assert rep.relative < 1e-3
        assert rep.warnings == ()

    def test_holstein_primakoff_warns_when_excited(self):
        with pytest.warns(UserWarning):
            rep = holstein_primakoff_check(10, 5)
        assert rep.relative > 0.1

    def test_holstein_primakoff_vector_input(self):
        psi = StateVector.normalized(np.r_[1.0, 0.1, np.zeros(99)])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rep = holstein_primakoff_check(100, psi)
        assert rep.excitation == pytest.approx(0.01 / 1.01)
