"""Classical and quantum Fisher information by finite differences.

Every routine evaluates a user-supplied family at a single point ``alpha0``.
Families are plain callables; they must be re-entrant because the
derivative stencils call them several times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import DensityOperator, HermitianOperator, StateVector

PROB_FLOOR = 1e-12
SLD_CUTOFF = 1e-10
NEG_PROB_TOL = 1e-12

SCHEMES = ("central", "central5", "forward", "backward")


@dataclass(frozen=True)
class FiResult:
    value: float
    alpha0: float
    method: str

    def __post_init__(self):
        if self.value < -1e-9:
            raise ValueError(f"negative Fisher information {self.value!r}")
        object.__setattr__(self, "value", max(float(self.value), 0.0))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class ParamDistribution:
    """Parameter-dependent outcome distribution ``alpha -> p``."""

    fn: Callable[[float], Sequence[float]]
    labels: tuple | None = None

    def __call__(self, alpha: float) -> np.ndarray:
        p = np.asarray(self.fn(alpha), dtype=float).reshape(-1)
        if np.any(p < -NEG_PROB_TOL):
            raise ValueError(f"evaluator returned negative probabilities at alpha={alpha}: {p.min()!r}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities at alpha={alpha} sum to {p.sum()!r}")
        return np.clip(p, 0.0, None)


def default_step(alpha0: float) -> float:
    return 1e-4 * max(1.0, abs(alpha0))


def derivative(f: Callable[[float], np.ndarray], alpha0: float, step: float | None = None,
               scheme: str = "central") -> tuple[np.ndarray, np.ndarray]:
    """Value and finite-difference derivative of ``f`` at ``alpha0``.

    ``central`` is second order. ``central5`` is the fourth-order five-point
    stencil, for comparisons that need the truncation error well below the
    default step squared. ``forward``/``backward`` use the three-point
    one-sided stencils so that families defined only on a closed interval
    can be differentiated at its ends.
    """
    h = default_step(alpha0) if step is None else float(step)
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    f0 = np.asarray(f(alpha0))
    if scheme == "central":
        d = (np.asarray(f(alpha0 + h)) - np.asarray(f(alpha0 - h))) / (2 * h)
    elif scheme == "central5":
        fp1, fm1 = np.asarray(f(alpha0 + h)), np.asarray(f(alpha0 - h))
        fp2, fm2 = np.asarray(f(alpha0 + 2 * h)), np.asarray(f(alpha0 - 2 * h))
        d = (8 * (fp1 - fm1) - (fp2 - fm2)) / (12 * h)
    elif scheme == "forward":
        d = (-3 * f0 + 4 * np.asarray(f(alpha0 + h)) - np.asarray(f(alpha0 + 2 * h))) / (2 * h)
    elif scheme == "backward":
        d = (3 * f0 - 4 * np.asarray(f(alpha0 - h)) + np.asarray(f(alpha0 - 2 * h))) / (2 * h)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return f0, d


def scheme_within(alpha0: float, lo: float, hi: float, step: float | None = None) -> str:
    """Pick a stencil that stays inside ``[lo, hi]``."""
    h = default_step(alpha0) if step is None else step
    if alpha0 - h < lo:
        return "forward"
    if alpha0 + h > hi:
        return "backward"
    return "central"


def fisher_from_derivative(p: np.ndarray, dp: np.ndarray) -> float:
    mask = p >= PROB_FLOOR
    return float(np.sum(dp[mask] ** 2 / p[mask]))


def classical_fi(dist, alpha0: float, step: float | None = None, scheme: str = "central") -> FiResult:
    """Fisher information of an outcome distribution about ``alpha``.

    Outcomes with probability below ``1e-12`` at ``alpha0`` are skipped.
    """
    if not isinstance(dist, ParamDistribution):
        dist = ParamDistribution(dist)
    p, dp = derivative(dist, alpha0, step, scheme)
    return FiResult(fisher_from_derivative(p, dp), alpha0, "finite-difference")


def _amplitudes(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amplitudes
    amps = np.asarray(state, dtype=complex).reshape(-1)
    if abs(np.vdot(amps, amps).real - 1.0) > 1e-8:
        raise ValueError("pure-state evaluator returned a non-normalized vector")
    return amps


def _density(state) -> np.ndarray:
    if isinstance(state, DensityOperator):
        return state.matrix
    if isinstance(state, StateVector):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    return DensityOperator(state).matrix


def qfi_pure(state: Callable, alpha0: float, step: float | None = None,
             scheme: str = "central") -> FiResult:
    """``4(<dpsi|dpsi> - |<psi|dpsi>|^2)`` with a finite-difference ``|dpsi>``."""
    psi, dpsi = derivative(lambda a: _amplitudes(state(a)), alpha0, step, scheme)
    val = 4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2)
    return FiResult(val, alpha0, "finite-difference")


def sld_qfi(rho: np.ndarray, drho: np.ndarray, cutoff: float = SLD_CUTOFF) -> float:
    """QFI from a density matrix and its derivative, in the eigenbasis of ``rho``."""
    lam, vec = np.linalg.eigh(rho)
    lam = np.clip(lam, 0.0, None)
    d = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    mask = denom > cutoff
    return float(2 * np.sum(np.abs(d[mask]) ** 2 / denom[mask]))


def qfi_mixed(state: Callable, alpha0: float, step: float | None = None,
              scheme: str = "central") -> FiResult:
    """Symmetric-logarithmic-derivative QFI of a density-operator family."""
    rho, drho = derivative(lambda a: _density(state(a)), alpha0, step, scheme)
    return FiResult(sld_qfi(rho, drho), alpha0, "sld")


def variance(H, psi) -> float:
    h = H.matrix if isinstance(H, HermitianOperator) else np.asarray(H)
    v = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    hv = h @ v
    return float(np.vdot(hv, hv).real - np.vdot(v, hv).real ** 2)


def generator_qfi_bound(H) -> float:
    """Squared spectral gap: the largest QFI ``exp(-i alpha H)`` can imprint."""
    h = H if isinstance(H, HermitianOperator) else HermitianOperator(H)
    w = np.linalg.eigvalsh(h.matrix)
    return float((w[-1] - w[0]) ** 2)


def cramer_rao(fi, trials: int) -> float:
    """Variance lower bound ``1/(N I)`` for ``N`` independent trials."""
    value = float(fi)
    if trials < 1:
        raise ValueError("need at least one trial")
    if value <= 0:
        raise ValueError("zero Fisher information: parameter unidentifiable")
    return 1.0 / (trials * value)


def povm_distribution(povm: Sequence[np.ndarray], state: Callable) -> ParamDistribution:
    """Outcome distribution of a fixed POVM measured on ``state(alpha)``."""
    ops = [np.asarray(m, dtype=complex) for m in povm]

    def fn(alpha):
        rho = _density(state(alpha))
        return np.array([np.trace(m @ rho).real for m in ops])

    return ParamDistribution(fn)
