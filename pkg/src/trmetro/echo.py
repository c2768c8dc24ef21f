"""Echo metrology: prepare with V, imprint exp(-i alpha H), undo V, check for |0>.

Also holds the squeezing instances: single-mode parametric amplification,
two-mode SU(1,1) interferometry and collective-spin squeezing generators on
the Dicke subspace.
"""
from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FockSpace,
    HermitianOperator,
    StateVector,
    check_truncation,
    tail_mass,
    unitary_from_generator,
)
from .fisher import ParamDistribution, classical_fi, qfi_pure, variance
from .results import ScenarioResult

WEAK_ALPHA = 0.05


@dataclass(frozen=True)
class EchoSpec:
    V: np.ndarray
    H: HermitianOperator
    alpha: float = 0.0
    initial: StateVector | None = None

    def __post_init__(self):
        V = np.array(self.V, dtype=complex)
        H = self.H if isinstance(self.H, HermitianOperator) else HermitianOperator(self.H)
        if V.shape != H.matrix.shape:
            raise ValueError(f"V has shape {V.shape}, generator has {H.matrix.shape}")
        if np.max(np.abs(V.conj().T @ V - np.eye(V.shape[0]))) > 1e-10:
            raise ValueError("preparation V is not unitary")
        initial = self.initial if self.initial is not None else StateVector.basis(0, V.shape[0])
        if initial.dim != V.shape[0]:
            raise ValueError("initial state dimension does not match V")
        V.setflags(write=False)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "initial", initial)

    @property
    def probe(self) -> np.ndarray:
        """Information-bearing state before the signal, ``V|0>``."""
        return self.V @ self.initial.amplitudes

    def signal_state(self, alpha: float) -> StateVector:
        return StateVector(unitary_from_generator(self.H, alpha) @ self.probe)

    def return_amplitudes(self, alpha: float) -> np.ndarray:
        """Amplitudes of ``V^dag exp(-i alpha H) V|0>`` in the |0>-aligned basis."""
        out = self.V.conj().T @ (unitary_from_generator(self.H, alpha) @ self.probe)
        # rotate so component 0 is the overlap with |0>
        return np.concatenate(([np.vdot(self.initial.amplitudes, out)],
                               out - np.vdot(self.initial.amplitudes, out) * self.initial.amplitudes))

    def outcome_probs(self, alpha: float) -> np.ndarray:
        amps = self.return_amplitudes(alpha)
        p0 = abs(amps[0]) ** 2
        # sum the small components directly; 1 - p0 would lose digits at small alpha
        p1 = float(np.vdot(amps[1:], amps[1:]).real)
        return np.array([p0, p1])


def run_echo(spec: EchoSpec, step: float | None = None) -> tuple[ParamDistribution, ScenarioResult]:
    """Binary return-to-|0> distribution and its FI/QFI at ``spec.alpha``."""
    dist = ParamDistribution(spec.outcome_probs, labels=("returned", "escaped"))
    fi = classical_fi(dist, spec.alpha, step)
    qfi = qfi_pure(spec.signal_state, spec.alpha, step)
    p = dist(spec.alpha)
    result = ScenarioResult(
        name="echo",
        distribution=p,
        fi=fi.value,
        qfi=qfi.value,
        success_prob=float(p[0]),
        metadata={"alpha": spec.alpha},
    )
    return dist, result


@dataclass(frozen=True)
class EchoGap:
    fi: float
    qfi: float
    gap: float
    gap_half: float
    coefficient: float
    variance_bound: float
    weak_regime: bool

    @property
    def shrink(self) -> float:
        """Gap reduction factor when alpha is halved (4 for a clean O(alpha^2) gap)."""
        return self.gap / self.gap_half if self.gap_half > 0 else np.inf


def echo_fi_matches_qfi(spec: EchoSpec, step: float | None = None) -> EchoGap:
    """Compare the echo FI with the QFI of ``exp(-i alpha H) V|0>``.

    The gap is evaluated at ``alpha`` and ``alpha/2``; ``coefficient`` is the
    least-squares ``C`` in ``gap = C alpha^2``.
    """
    alpha = spec.alpha
    weak = abs(alpha) <= WEAK_ALPHA
    if not weak:
        _warnings.warn(f"alpha={alpha} is outside the small-alpha regime |alpha| <= {WEAK_ALPHA}")

    def gap_at(a):
        h = step if step is not None else max(abs(a) * 1e-2, 1e-7)
        s = EchoSpec(spec.V, spec.H, a, spec.initial)
        fi = classical_fi(ParamDistribution(s.outcome_probs), a, h).value
        qfi = qfi_pure(s.signal_state, a, h).value
        return fi, qfi, abs(fi - qfi)

    fi, qfi, g1 = gap_at(alpha)
    _, _, g2 = gap_at(alpha / 2)
    a1, a2 = alpha ** 2, (alpha / 2) ** 2
    coef = (g1 * a1 + g2 * a2) / (a1 ** 2 + a2 ** 2) if alpha else 0.0
    return EchoGap(fi, qfi, g1, g2, coef, 4 * variance(spec.H, spec.probe), weak)


# -- single-mode squeezing ---------------------------------------------------


def squeeze_generator(space: FockSpace, phi: float) -> HermitianOperator:
    """``(i/2)(exp(-2i phi) a^2 - h.c.)`` on the truncated mode."""
    a2 = space.a @ space.a
    m = np.exp(-2j * phi) * a2
    return HermitianOperator(0.5j * (m - m.conj().T))


@dataclass(frozen=True)
class SqueezeSpec:
    r: float
    phi: float = np.pi / 2
    g: float = 1.0
    t: float = 1.0
    fock_dim: int = 60

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeezing parameter must be non-negative")
        if not 0 <= self.phi < 2 * np.pi:
            raise ValueError("squeezing angle must lie in [0, 2pi)")
        FockSpace(self.fock_dim)


@dataclass(frozen=True)
class AmplificationReport:
    r: float
    kick: float
    displacement: float
    plain_displacement: float
    ratio: float
    tail_mass: float

    @property
    def expected(self) -> float:
        return float(np.exp(self.r))


def parametric_amplification(spec: SqueezeSpec, alpha: float) -> AmplificationReport:
    """Squeeze, kick with ``exp(-i g alpha Q t)``, antisqueeze; compare momentum kicks.

    ``displacement`` is the shift of <P> produced by the full protocol and
    ``plain_displacement`` the shift the bare kick gives the vacuum.
    """
    space = FockSpace(spec.fock_dim)
    Hsq = squeeze_generator(space, spec.phi)
    kick = spec.g * alpha * spec.t
    vac = space.vacuum().amplitudes
    Usq = unitary_from_generator(Hsq, spec.r)
    squeezed = Usq @ vac
    check_truncation(squeezed)
    Ukick = unitary_from_generator(HermitianOperator(space.Q), kick)
    final = Usq.conj().T @ (Ukick @ squeezed)
    check_truncation(final)
    plain = Ukick @ vac
    P = space.P

    def mean_p(v):
        return float(np.vdot(v, P @ v).real)

    disp = mean_p(final) - mean_p(vac)
    plain_disp = mean_p(plain) - mean_p(vac)
    return AmplificationReport(
        r=spec.r,
        kick=kick,
        displacement=disp,
        plain_displacement=plain_disp,
        ratio=disp / plain_disp,
        tail_mass=max(tail_mass(squeezed), tail_mass(final)),
    )


# -- two-mode squeezing ------------------------------------------------------


@dataclass(frozen=True)
class TwoModeSpace:
    dim: int

    def ops(self):
        m = FockSpace(self.dim)
        eye = np.eye(self.dim)
        return np.kron(m.a, eye), np.kron(eye, m.a)

    def two_mode_squeeze(self, r: float) -> np.ndarray:
        """``exp(r (a^dag b^dag - b a))`` from its truncated Hermitian generator."""
        a, b = self.ops()
        gen = 1j * (a.conj().T @ b.conj().T - b @ a)
        return unitary_from_generator(HermitianOperator(gen), r)


def su11_interferometer(r: float, alpha: float, D: int, step: float | None = None) -> ScenarioResult:
    """Two-mode squeeze, phase ``exp(i alpha a^dag a)`` on mode a, unsqueeze, count photons.

    FI is taken from the full joint photon-number distribution; QFI is that
    of the pre-measurement state ``exp(i alpha n_a) S(r)|0,0>``.
    """
    space = TwoModeSpace(D)
    S = space.two_mode_squeeze(r)
    vac = np.zeros(D * D, dtype=complex)
    vac[0] = 1.0
    probe = S @ vac
    check_truncation(probe, (D, D))
    n_a = np.kron(np.arange(D), np.ones(D))

    def signal(a):
        return np.exp(1j * a * n_a) * probe

    def counts(a):
        final = S.conj().T @ signal(a)
        p = np.abs(final) ** 2
        return p / p.sum()

    dist = ParamDistribution(counts)
    final = S.conj().T @ signal(alpha)
    check_truncation(final, (D, D))
    fi = classical_fi(dist, alpha, step)
    qfi = qfi_pure(lambda a: StateVector(signal(a)), alpha, step)
    p = dist(alpha)
    return ScenarioResult(
        name="su11",
        distribution=p,
        fi=fi.value,
        qfi=qfi.value,
        success_prob=float(p[0]),
        metadata={"r": r, "alpha": alpha, "fock_dim": D, "tail_mass": tail_mass(probe, (D, D))},
    )


# -- collective spins on the Dicke subspace ----------------------------------


@dataclass(frozen=True)
class DickeSpin:
    """Spin-N/2 operators on Dicke states ``|k>``, k = 0..N excitations.

    ``S_z|k> = (k - N/2)|k>`` and ``S_-`` lowers k, so ``|0>`` is the fully
    polarized reference state that the bosonic vacuum corresponds to.
    """

    N: int

    @property
    def dim(self) -> int:
        return self.N + 1

    @property
    def S_minus(self) -> np.ndarray:
        k = np.arange(1, self.N + 1)
        return np.diag(np.sqrt(k * (self.N - k + 1.0)), k=1).astype(complex)

    @property
    def S_plus(self) -> np.ndarray:
        return self.S_minus.conj().T

    @property
    def S_x(self) -> np.ndarray:
        return (self.S_plus + self.S_minus) / 2

    @property
    def S_y(self) -> np.ndarray:
        return (self.S_plus - self.S_minus) / 2j

    @property
    def S_z(self) -> np.ndarray:
        return np.diag(np.arange(self.N + 1) - self.N / 2).astype(complex)

    def lowering_boson(self) -> np.ndarray:
        """Bosonic annihilator on the same ladder, ``a|k> = sqrt(k)|k-1>``."""
        return FockSpace(self.dim).a


def spin_squeeze_generators(N: int, kind: str = "TAT", phi: float = 0.0) -> HermitianOperator:
    """Twisting Hamiltonian on the (N+1)-dimensional symmetric subspace.

    ``TAT``: ``(i/2N)(exp(-2i phi) S_-^2 - h.c.)``, the spin image of the
    single-mode squeezer. ``OAT``: ``S_z^2``.
    """
    if N < 2:
        raise ValueError("spin squeezing needs N >= 2")
    spin = DickeSpin(int(N))
    kind = kind.upper()
    if kind == "OAT":
        return HermitianOperator(spin.S_z @ spin.S_z)
    if kind == "TAT":
        m = np.exp(-2j * phi) * (spin.S_minus @ spin.S_minus)
        return HermitianOperator(0.5j * (m - m.conj().T) / N)
    raise ValueError(f"unknown twisting kind {kind!r}")


@dataclass(frozen=True)
class HolsteinPrimakoffReport:
    N: int
    excitation: float
    deviation: float
    relative: float
    warnings: tuple = field(default=())


def holstein_primakoff_check(N: int, state) -> HolsteinPrimakoffReport:
    """Distance between ``S_-|state>`` and ``sqrt(N) a|state>`` on the Dicke ladder.

    ``state`` is an excitation number or a Dicke-basis state vector.
    """
    spin = DickeSpin(int(N))
    if isinstance(state, (int, np.integer)):
        if not 0 <= state <= N:
            raise ValueError(f"excitation {state} outside 0..{N}")
        psi = StateVector.basis(int(state), spin.dim).amplitudes
    else:
        psi = state.amplitudes if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
        if psi.size != spin.dim:
            raise ValueError("state is not on the Dicke subspace of this N")
    approx = np.sqrt(N) * (spin.lowering_boson() @ psi)
    exact = spin.S_minus @ psi
    dev = float(np.linalg.norm(exact - approx))
    scale = float(np.linalg.norm(approx))
    excitation = float(np.vdot(psi, np.arange(spin.dim) * psi).real)
    notes = ()
    if excitation > 0.1 * N:
        notes = (f"excitation {excitation:.3g} is not small against N={N}",)
        _warnings.warn(notes[0])
    return HolsteinPrimakoffReport(N, excitation, dev, dev / scale if scale > 0 else 0.0, notes)
