"""Von Neumann pointer coupling, postselection and weak-value amplification.

The probe is a wavefunction sampled on a periodic position grid; momentum
``P = -i d/dq`` is diagonal in the discrete Fourier basis, so translations
``exp(-i s P)`` are applied as exact phase ramps on band-limited data.
"""
from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .core import HermitianOperator, StateVector
from .fisher import ParamDistribution, classical_fi, qfi_pure

WEAK_FRACTION = 0.05


@dataclass(frozen=True)
class GridProbe:
    q: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if q.shape != amps.shape or q.ndim != 1:
            raise ValueError("grid and amplitudes must be 1-d arrays of one length")
        dq = q[1] - q[0]
        norm = np.sum(np.abs(amps) ** 2) * dq
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"probe not normalized: integral |phi|^2 = {norm!r}")
        if max(abs(amps[0]), abs(amps[-1])) >= 1e-8:
            raise ValueError("probe wavefunction reaches the grid boundary")
        q.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dq(self) -> float:
        return float(self.q[1] - self.q[0])

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.q.size, d=self.dq)

    def density(self) -> np.ndarray:
        """Position probabilities per grid cell (sum to 1)."""
        return np.abs(self.amplitudes) ** 2 * self.dq

    def mean(self) -> float:
        return float(np.sum(self.q * self.density()))

    def std(self) -> float:
        p = self.density()
        mu = np.sum(self.q * p)
        return float(np.sqrt(np.sum((self.q - mu) ** 2 * p)))

    def overlap(self, other: "GridProbe") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.dq)


def gaussian_probe(delta_phi: float, L: float | None = None, M: int = 4096) -> GridProbe:
    """Real Gaussian pointer with position standard deviation ``delta_phi``."""
    L = 12 * delta_phi if L is None else L
    q = np.linspace(-L, L, M, endpoint=False)
    phi = np.exp(-q ** 2 / (4 * delta_phi ** 2))
    phi /= np.sqrt(np.sum(phi ** 2) * (q[1] - q[0]))
    return GridProbe(q, phi)


def translate(amps: np.ndarray, k: np.ndarray, shift: float) -> np.ndarray:
    """``phi(q) -> phi(q - shift)`` via ``exp(-i shift P)``."""
    return np.fft.ifft(np.fft.fft(amps) * np.exp(-1j * k * shift))


def weak_value(A, psi_i, psi_f) -> complex:
    """``<f|A|i> / <f|i>``."""
    a = A.matrix if isinstance(A, HermitianOperator) else np.asarray(A, dtype=complex)
    vi = psi_i.amplitudes if isinstance(psi_i, StateVector) else np.asarray(psi_i, dtype=complex)
    vf = psi_f.amplitudes if isinstance(psi_f, StateVector) else np.asarray(psi_f, dtype=complex)
    overlap = np.vdot(vf, vi)
    if abs(overlap) <= 1e-12:
        raise ValueError("pre- and postselected states are orthogonal; weak value undefined")
    return complex(np.vdot(vf, a @ vi) / overlap)


@dataclass(frozen=True)
class WvaSpec:
    A: HermitianOperator
    psi_i: StateVector
    psi_f: StateVector
    probe: GridProbe
    alpha: float

    def __post_init__(self):
        A = self.A if isinstance(self.A, HermitianOperator) else HermitianOperator(self.A)
        object.__setattr__(self, "A", A)
        if self.alpha < 0:
            raise ValueError("coupling strength must be non-negative")
        if not (A.dim == self.psi_i.dim == self.psi_f.dim):
            raise ValueError("target operator and states have different dimensions")
        if abs(np.vdot(self.psi_f.amplitudes, self.psi_i.amplitudes)) <= 1e-12:
            raise ValueError("postselected state is orthogonal to the initial state")

    @property
    def weak_value(self) -> complex:
        return weak_value(self.A, self.psi_i, self.psi_f)

    @property
    def delta_phi(self) -> float:
        return self.probe.std()

    @property
    def weakness(self) -> float:
        w = np.linalg.eigvalsh(self.A.matrix)
        return float(self.alpha * (w[-1] - w[0]) / self.delta_phi)

    def with_alpha(self, alpha: float) -> "WvaSpec":
        return WvaSpec(self.A, self.psi_i, self.psi_f, self.probe, alpha)

    def branches(self, alpha: float | None = None):
        """Eigenvalues, eigenvectors, target amplitudes and shifted pointers."""
        alpha = self.alpha if alpha is None else alpha
        w, v = np.linalg.eigh(self.A.matrix)
        c = v.conj().T @ self.psi_i.amplitudes
        k = self.probe.k
        shifted = np.array([translate(self.probe.amplitudes, k, alpha * a) for a in w])
        return w, v, c, shifted

    def joint_state(self, alpha: float | None = None) -> np.ndarray:
        """``exp(-i alpha A x P)|psi_i>|phi>`` as a (target dim, M) array."""
        _, v, c, shifted = self.branches(alpha)
        return np.einsum("tn,n,nm->tm", v, c, shifted)

    def postselected(self, alpha: float | None = None) -> np.ndarray:
        """Unnormalized pointer left after projecting the target on ``psi_f``."""
        return self.psi_f.amplitudes.conj() @ self.joint_state(alpha)


def couple_and_postselect(spec: WvaSpec) -> tuple[GridProbe, float]:
    """Exact coupling followed by postselection; returns pointer and success probability."""
    unnorm = spec.postselected()
    success = float(np.sum(np.abs(unnorm) ** 2) * spec.probe.dq)
    if success <= 1e-300:
        raise ValueError("postselection succeeds with zero probability")
    return GridProbe(spec.probe.q, unnorm / np.sqrt(success)), success


def complementary_probability(spec: WvaSpec) -> float:
    """Probability of failing the postselection, from the joint state directly."""
    joint = spec.joint_state()
    f = spec.psi_f.amplitudes
    rest = joint - np.outer(f, f.conj() @ joint)
    return float(np.sum(np.abs(rest) ** 2) * spec.probe.dq)


@dataclass(frozen=True)
class FirstOrderReport:
    infidelity: float
    trace_distance: float
    weak_value: complex
    approx: GridProbe
    exact: GridProbe
    warnings: tuple = field(default=())


def first_order_validate(spec: WvaSpec) -> FirstOrderReport:
    """Compare the exact postselected pointer with its first-order weak-value form.

    The approximation translates the pointer by ``alpha Re(A_w)`` and applies
    ``exp(alpha Im(A_w) P)`` in the momentum representation. ``infidelity``
    is ``1 - |<approx|exact>|``; ``trace_distance`` is
    ``sqrt(1 - |<approx|exact>|^2)``, the pure-state distance, which is first
    order in the neglected terms.
    """
    aw = spec.weak_value
    notes = ()
    if spec.alpha * abs(aw) > WEAK_FRACTION * spec.delta_phi:
        notes = (f"alpha |A_w| = {spec.alpha * abs(aw):.3g} exceeds {WEAK_FRACTION} delta_phi",)
        _warnings.warn(notes[0])
    exact, _ = couple_and_postselect(spec)
    probe = spec.probe
    k = probe.k
    ft = np.fft.fft(probe.amplitudes) * np.exp(-1j * k * spec.alpha * aw.real) * np.exp(spec.alpha * aw.imag * k)
    approx = np.fft.ifft(ft)
    approx /= np.sqrt(np.sum(np.abs(approx) ** 2) * probe.dq)
    approx = GridProbe(probe.q, approx)
    ov = min(abs(approx.overlap(exact)), 1.0)
    return FirstOrderReport(1.0 - ov, float(np.sqrt(1.0 - ov ** 2)), aw, approx, exact, notes)


@dataclass(frozen=True)
class FiComparison:
    fi_no_ps: float
    fi_ps: float
    fi_position_only: float
    analytic_no_ps: float
    analytic_ps: float
    success_prob: float
    qfi_joint: float

    @property
    def ratio(self) -> float:
        return self.fi_ps / self.fi_no_ps


def fi_comparison(spec: WvaSpec, step: float | None = None) -> FiComparison:
    """Per-measured-probe FI about the coupling, with and without postselection.

    Without postselection the target is read out in the eigenbasis of ``A``
    and the pointer in position, which realizes ``<A^2>/delta_phi^2`` for any
    initial target state; ``fi_position_only`` ignores the target entirely.
    With postselection, the FI is that of the renormalized pointer
    distribution on the kept events.
    """
    dq = spec.probe.dq
    alpha = spec.alpha

    def joint_branch_probs(a):
        _, _, c, shifted = spec.branches(a)
        return (np.abs(c)[:, None] ** 2 * np.abs(shifted) ** 2 * dq).reshape(-1)

    def position_only(a):
        return np.sum(np.abs(spec.joint_state(a)) ** 2, axis=0) * dq

    def postselected_probs(a):
        u = np.abs(spec.postselected(a)) ** 2
        return u / u.sum()

    fi_no = classical_fi(ParamDistribution(joint_branch_probs), alpha, step).value
    fi_pos = classical_fi(ParamDistribution(position_only), alpha, step).value
    fi_ps = classical_fi(ParamDistribution(postselected_probs), alpha, step).value

    def joint_vec(a):
        return (spec.joint_state(a) * np.sqrt(dq)).reshape(-1)

    qfi = qfi_pure(joint_vec, alpha, step).value
    _, success = couple_and_postselect(spec)
    A = spec.A.matrix
    vi = spec.psi_i.amplitudes
    a2 = float(np.vdot(vi, A @ A @ vi).real)
    dphi2 = spec.delta_phi ** 2
    return FiComparison(
        fi_no_ps=fi_no,
        fi_ps=fi_ps,
        fi_position_only=fi_pos,
        analytic_no_ps=a2 / dphi2,
        analytic_ps=abs(spec.weak_value) ** 2 / dphi2,
        success_prob=success,
        qfi_joint=qfi,
    )
