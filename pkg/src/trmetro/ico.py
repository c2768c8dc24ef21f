"""Quantum SWITCH on a control qubit C and a system S.

Composition convention: ``A o B`` applies ``B`` first. With the control in
|0> the system undergoes ``A o B``; with |1>, ``B o A``. The switch is built
from the combined Kraus operators

    S_ij = |0><0| (x) K_i^A K_j^B + |1><1| (x) K_j^B K_i^A,

so it is CPTP by construction. Each use queries each channel once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    I2,
    SX,
    SY,
    SZ,
    DensityOperator,
    KrausChannel,
    StateVector,
    apply_channel,
    compose,
    partial_trace,
    unitary_from_generator,
)
from .fisher import qfi_mixed, scheme_within

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = StateVector.normalized([1, 1])
# sequential QFI below this is finite-difference noise on a constant family
SEQ_QFI_FLOOR = 1e-12


@dataclass(frozen=True)
class SwitchOutput:
    """Joint C(x)S state with its forward, reverse and coherent blocks.

    ``C_coh`` is ``sum_jk K_k^B K_j^A rho (K_k^B)^dag (K_j^A)^dag``. It fills
    the |1><0| slot of ``joint`` (times the control coherence) and its
    adjoint fills |0><1|; for ``A = B`` the two coincide.
    """

    joint: DensityOperator
    F: np.ndarray
    R: np.ndarray
    C_coh: np.ndarray
    channel_queries: int = field(default=2)

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.F.shape[0]
        return self.joint.matrix[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def system(self) -> DensityOperator:
        return partial_trace(self.joint, [1])

    def control(self) -> DensityOperator:
        return partial_trace(self.joint, [0])


def depolarize(r: float, d: int = 2) -> KrausChannel:
    """``rho -> (1 - r) rho + r I/d`` in Pauli (d = 2) or Weyl (d > 2) Kraus form."""
    if not 0 <= r <= 1:
        raise ValueError(f"depolarizing strength {r} outside [0, 1]")
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if d == 2:
        return KrausChannel((np.sqrt(1 - 3 * r / 4) * I2,
                             np.sqrt(r) / 2 * SX, np.sqrt(r) / 2 * SY, np.sqrt(r) / 2 * SZ))
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    ops = [np.sqrt(1 - r + r / d ** 2) * np.eye(d)]
    for a in range(d):
        for b in range(d):
            if a or b:
                W = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
                ops.append(np.sqrt(r) / d * W)
    return KrausChannel(tuple(ops))


def switch_kraus(A: KrausChannel, B: KrausChannel) -> list[np.ndarray]:
    if A.dim != B.dim:
        raise ValueError(f"channels act on different dimensions ({A.dim}, {B.dim})")
    return [np.kron(P0, ka @ kb) + np.kron(P1, kb @ ka) for ka in A.kraus_ops for kb in B.kraus_ops]


def _control_density(control) -> np.ndarray:
    if isinstance(control, StateVector):
        if control.dim != 2:
            raise ValueError("control must be a qubit")
        return control.density().matrix
    rho = control.matrix if isinstance(control, DensityOperator) else DensityOperator(control).matrix
    if rho.shape != (2, 2):
        raise ValueError("control must be a qubit")
    return rho


def switch_apply(A: KrausChannel, B: KrausChannel, rho_S: DensityOperator, control=PLUS) -> SwitchOutput:
    rc = _control_density(control)
    if rho_S.dim != A.dim:
        raise ValueError("system state does not match the channels")
    rs = rho_S.matrix
    joint_in = np.kron(rc, rs)
    out = sum(S @ joint_in @ S.conj().T for S in switch_kraus(A, B))
    F = apply_channel(compose(A, B), rho_S).matrix
    R = apply_channel(compose(B, A), rho_S).matrix
    C = sum(kb @ ka @ rs @ kb.conj().T @ ka.conj().T for ka in A.kraus_ops for kb in B.kraus_ops)
    return SwitchOutput(DensityOperator(out, (2, rho_S.dim)), F, R, C)


@dataclass(frozen=True)
class ParamChannel:
    """``alpha -> KrausChannel`` on an allowed parameter interval."""

    fn: Callable[[float], KrausChannel]
    domain: tuple[float, float] = (-np.inf, np.inf)

    def __call__(self, alpha: float) -> KrausChannel:
        return self.fn(alpha)

    def scheme(self, alpha0: float, step: float | None = None) -> str:
        return scheme_within(alpha0, *self.domain, step)


def depolarizing_family(d: int = 2) -> ParamChannel:
    return ParamChannel(lambda r: depolarize(r, d), (0.0, 1.0))


def unitary_family(generator) -> ParamChannel:
    return ParamChannel(lambda a: KrausChannel.unitary(unitary_from_generator(generator, a)))


@dataclass(frozen=True)
class SwitchComparison:
    qfi_switch: float
    qfi_seq: float

    @property
    def relative_gain(self) -> float:
        if self.qfi_seq <= SEQ_QFI_FLOOR:
            return np.inf if self.qfi_switch > SEQ_QFI_FLOOR else 0.0
        return (self.qfi_switch - self.qfi_seq) / self.qfi_seq

    def __iter__(self):
        return iter((self.qfi_switch, self.qfi_seq))


def switch_vs_sequential_qfi(E: ParamChannel, rho_S: DensityOperator, alpha0: float,
                             step: float | None = None) -> SwitchComparison:
    """QFI of the switch output (control |+>) against the sequential ``E o E`` output."""
    if not isinstance(E, ParamChannel):
        E = ParamChannel(E)
    scheme = E.scheme(alpha0, step)
    sw = qfi_mixed(lambda a: switch_apply(E(a), E(a), rho_S, PLUS).joint, alpha0, step, scheme)
    seq = qfi_mixed(lambda a: apply_channel(compose(E(a), E(a)), rho_S), alpha0, step, scheme)
    return SwitchComparison(sw.value, seq.value)


@dataclass(frozen=True)
class ControlReadout:
    qfi_control: float
    qfi_system: float
    qfi_joint: float

    def __iter__(self):
        return iter((self.qfi_control, self.qfi_system))


def noisy_unitary_channel(U: np.ndarray, noise: KrausChannel) -> KrausChannel:
    """Unitary followed by noise."""
    return compose(noise, KrausChannel.unitary(U))


def noise_robust_control_readout(U_family: Callable[[float], np.ndarray], noise: KrausChannel,
                                 rho_S: DensityOperator, rho_C, alpha0: float,
                                 step: float | None = None) -> ControlReadout:
    """QFI left in the control and in the system after switching two noisy uses."""

    def out(a):
        E = noisy_unitary_channel(U_family(a), noise)
        return switch_apply(E, E, rho_S, rho_C)

    qc = qfi_mixed(lambda a: out(a).control(), alpha0, step).value
    qs = qfi_mixed(lambda a: out(a).system(), alpha0, step).value
    qj = qfi_mixed(lambda a: out(a).joint, alpha0, step).value
    return ControlReadout(qc, qs, qj)
