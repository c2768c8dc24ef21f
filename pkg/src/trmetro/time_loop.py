"""Entanglement-assisted sensing of a field with unknown direction.

The field acts on a qubit as ``exp(-i alpha n.sigma / 2)``. Protocol cores
receive the field only as an opaque ``alpha -> unitary`` (or ``s -> channel``)
callable; the direction ``n`` reaches the hindsight protocol's measurement
stage and nothing else.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    HADAMARD,
    I2,
    SX,
    KrausChannel,
    StateVector,
    pauli_direction,
    unitary_from_generator,
)
from .fisher import ParamDistribution, classical_fi, qfi_mixed, qfi_pure, scheme_within
from .results import ScenarioResult

Evolution = Callable[[float], np.ndarray]

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
SINGLET_PROJECTOR = np.outer(SINGLET, SINGLET.conj())


def singlet_preparer() -> np.ndarray:
    """Two-qubit unitary with ``V|00> = |Psi->``."""
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    return np.kron(I2, SX) @ cnot @ np.kron(HADAMARD, I2) @ np.kron(SX, I2)


@dataclass(frozen=True)
class FieldSpec:
    direction: np.ndarray
    alpha: float

    def __post_init__(self):
        n = np.asarray(self.direction, dtype=float)
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-10:
            raise ValueError(f"field direction must be a unit 3-vector, got {n}")
        n.setflags(write=False)
        object.__setattr__(self, "direction", n)

    @property
    def generator(self) -> np.ndarray:
        return pauli_direction(self.direction).matrix / 2

    def evolution(self) -> Evolution:
        """Opaque ``alpha -> exp(-i alpha n.sigma/2)``; the direction stays hidden."""
        gen = self.generator
        return lambda a: unitary_from_generator(gen, a)


@dataclass(frozen=True)
class TimeLoopResult(ScenarioResult):
    direction_used: object = "agnostic"


def _probe_qfi(psi: np.ndarray, evolve: Evolution, alpha: float, step: float | None = None) -> float:
    return qfi_pure(lambda a: StateVector(evolve(a) @ psi), alpha, step).value


def naive_probe_qfis(alpha: float, direction=(1.0, 0.0, 0.0), step: float = 1e-5) -> np.ndarray:
    """QFI of each sigma_x, sigma_y, sigma_z (+1) eigenstate probe under the field."""
    evolve = FieldSpec(direction, alpha).evolution()
    probes = []
    for P in (SX, np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])):
        w, v = np.linalg.eigh(P)
        probes.append(v[:, -1])
    return np.array([_probe_qfi(p, evolve, alpha, step) for p in probes])


def naive_average_fi(alpha: float, direction=(1.0, 0.0, 0.0)) -> float:
    """Mean QFI over the three Pauli-eigenstate probes (2/3 for any axis-aligned field)."""
    if not 0 < alpha < np.pi:
        raise ValueError("alpha must lie in (0, pi)")
    return float(np.mean(naive_probe_qfis(alpha, direction)))


def _singlet_fi_result(name: str, survival: Callable[[float], float], joint: Callable,
                       alpha: float) -> TimeLoopResult:
    dist = ParamDistribution(lambda a: (lambda p: [p, 1 - p])(survival(a)), labels=("singlet", "not"))
    fi = classical_fi(dist, alpha).value
    qfi = qfi_pure(joint, alpha).value
    return TimeLoopResult(name=name, distribution=dist(alpha), fi=fi, qfi=qfi,
                          theoretical_max=qfi, success_prob=None, metadata={"alpha": alpha})


def agnostic_core(evolve: Evolution, alpha: float) -> TimeLoopResult:
    def joint(a):
        return StateVector(np.kron(evolve(a), I2) @ SINGLET)

    def survival(a):
        return abs(np.vdot(SINGLET, joint(a).amplitudes)) ** 2

    return _singlet_fi_result("agnostic", survival, joint, alpha)


def agnostic(field: FieldSpec) -> TimeLoopResult:
    """Singlet probe-ancilla pair, field on the probe, singlet-or-not readout."""
    return agnostic_core(field.evolution(), field.alpha)


def positronium_core(evolve: Evolution, alpha: float) -> TimeLoopResult:
    def joint(a):
        u = evolve(a)
        return StateVector(np.kron(u, u.conj().T) @ SINGLET)

    def survival(a):
        return abs(np.vdot(SINGLET, joint(a).amplitudes)) ** 2

    res = _singlet_fi_result("positronium", survival, joint, alpha)
    return res


def positronium(field: FieldSpec) -> TimeLoopResult:
    """Qubit sees ``U``, antiqubit sees ``U^dag``; singlet-or-not readout."""
    return positronium_core(field.evolution(), field.alpha)


def perpendicular_axis(n) -> np.ndarray:
    """Deterministic unit vector orthogonal to ``n``."""
    n = np.asarray(n, dtype=float)
    ref = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    m = np.cross(n, ref)
    return m / np.linalg.norm(m)


def hindsight_core(evolve: Evolution, alpha: float):
    """Evolution stage: singlet, field on the probe. Returns ``alpha -> joint state``."""
    return lambda a: np.kron(evolve(a), I2) @ SINGLET


def hindsight_readout(joint: Callable[[float], np.ndarray], direction, alpha: float) -> TimeLoopResult:
    """Measurement stage, run once the direction is known.

    The ancilla is measured along an axis ``m`` perpendicular to ``n``; this
    steers the probe into an equator state of ``n.sigma``, which is optimal.
    The probe is then read out along the same axis ``m``.
    """
    m = perpendicular_axis(direction)
    _, basis = np.linalg.eigh(pauli_direction(m).matrix)
    # rows: (probe outcome, ancilla outcome) projections
    proj = np.array([np.kron(basis[:, s], basis[:, t]).conj() for s in range(2) for t in range(2)])

    def probs(a):
        return np.abs(proj @ joint(a)) ** 2

    dist = ParamDistribution(probs)
    fi = classical_fi(dist, alpha).value
    qfi = qfi_pure(lambda a: StateVector(joint(a)), alpha).value

    branch_qfi = []
    for t in range(2):
        anc = basis[:, t].conj()

        def conditional(a, anc=anc):
            v = joint(a).reshape(2, 2) @ anc
            return StateVector.normalized(v)

        branch_qfi.append(qfi_pure(conditional, alpha).value)

    return TimeLoopResult(
        name="hindsight", distribution=dist(alpha), fi=fi, qfi=qfi, theoretical_max=qfi,
        metadata={"alpha": alpha, "ancilla_axis": m.tolist(), "branch_qfi": branch_qfi},
        direction_used=np.asarray(direction, dtype=float),
    )


def hindsight(field: FieldSpec) -> TimeLoopResult:
    joint = hindsight_core(field.evolution(), field.alpha)
    return hindsight_readout(joint, field.direction, field.alpha)


def dephasing_channel(strength: float, direction) -> KrausChannel:
    """Dephasing in the ``n.sigma`` eigenbasis; ``strength = 1`` removes all coherence."""
    if not 0 <= strength <= 1:
        raise ValueError("dephasing strength must lie in [0, 1]")
    P = pauli_direction(direction).matrix
    return KrausChannel((np.sqrt(1 - strength / 2) * I2, np.sqrt(strength / 2) * P))


def agnostic_dephasing_core(channel: Callable[[float], KrausChannel], strength: float) -> TimeLoopResult:
    def joint(s):
        rho = SINGLET_PROJECTOR
        out = 0
        for k in channel(s).kraus_ops:
            kk = np.kron(k, I2)
            out = out + kk @ rho @ kk.conj().T
        return out

    def probs(s):
        p = float(np.trace(SINGLET_PROJECTOR @ joint(s)).real)
        return [p, 1 - p]

    scheme = scheme_within(strength, 0.0, 1.0)
    dist = ParamDistribution(probs, labels=("singlet", "not"))
    fi = classical_fi(dist, strength, scheme=scheme).value
    qfi = qfi_mixed(joint, strength, scheme=scheme).value
    return TimeLoopResult(name="agnostic-dephasing", distribution=dist(strength), fi=fi, qfi=qfi,
                          theoretical_max=qfi, metadata={"strength": strength})


def agnostic_dephasing(strength: float, direction) -> TimeLoopResult:
    """Estimate the dephasing strength without using its axis."""
    if not 0 <= strength <= 1:
        raise ValueError("dephasing strength must lie in [0, 1]")
    return agnostic_dephasing_core(lambda s: dephasing_channel(s, direction), strength)
