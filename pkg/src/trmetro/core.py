"""Dense state, operator and channel primitives.

Conventions: hbar = 1, dimensionless quadratures with [Q, P] = i, and
composite spaces ordered left to right as written in ``tensor(a, b)``.

Eigensolver ordering is the one of :func:`numpy.linalg.eigh`: ascending
eigenvalues, eigenvectors as columns. Degenerate extremal eigenvalues in
:func:`optimal_probe` resolve to the first column LAPACK returns for that
eigenvalue, which is deterministic for a given input matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-9
TAIL_TOL = 1e-6

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class TruncationError(ValueError):
    """A Fock-space state carries non-negligible weight on the top levels."""


def _dims_for(n: int, dims: Sequence[int] | None) -> tuple[int, ...]:
    if dims is None:
        return (n,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != n:
        raise ValueError(f"dims {dims} incompatible with size {n}")
    return dims


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on a (possibly composite) space."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", _dims_for(amps.size, self.dims))

    @classmethod
    def normalized(cls, amplitudes, dims=None) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amps / norm, dims)

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density operator must be square, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > NORM_TOL:
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density operator trace {tr!r} != 1")
        rho = 0.5 * (rho + rho.conj().T)
        if np.linalg.eigvalsh(rho)[0] < PSD_FLOOR:
            raise ValueError("density operator has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "dims", _dims_for(rho.shape[0], self.dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expect(self, op) -> complex:
        return np.trace(self.matrix @ as_matrix(op))


@dataclass(frozen=True)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.abs(m).max()):
            raise ValueError("operator is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by Kraus operators, ``rho -> sum_j K_j rho K_j^dag``."""

    kraus_ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must be matrices of one shape")
        completeness = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(shape[1]))) > NORM_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @classmethod
    def unitary(cls, u) -> "KrausChannel":
        return cls((as_matrix(u),))

    @classmethod
    def identity(cls, d: int) -> "KrausChannel":
        return cls((np.eye(d),))

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Channel that applies ``self`` first and ``other`` second."""
        return compose(other, self)


def as_matrix(x) -> np.ndarray:
    if isinstance(x, (HermitianOperator,)):
        return x.matrix
    if isinstance(x, DensityOperator):
        return x.matrix
    return np.asarray(x, dtype=complex)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner``: ``inner`` acts first."""
    return KrausChannel(tuple(a @ b for a in outer.kraus_ops for b in inner.kraus_ops))


def tensor(*parts):
    """Kronecker product of states, density operators or plain matrices.

    The result keeps the operand kind; subsystem dims are concatenated.
    """
    if not parts:
        raise ValueError("tensor of nothing")
    if all(isinstance(p, StateVector) for p in parts):
        amps = reduce(np.kron, (p.amplitudes for p in parts))
        return StateVector(amps, sum((p.dims for p in parts), ()))
    if all(isinstance(p, DensityOperator) for p in parts):
        mat = reduce(np.kron, (p.matrix for p in parts))
        return DensityOperator(mat, sum((p.dims for p in parts), ()))
    mats = [as_matrix(p) for p in parts]
    out = reduce(np.kron, mats)
    if all(isinstance(p, HermitianOperator) for p in parts):
        return HermitianOperator(out)
    return out


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduced state on the subsystems listed in ``keep`` (in their original order)."""
    dims = rho.dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid subsystem indices {keep} for dims {dims}")
    traced = [k for k in range(n) if k not in keep]
    t = rho.matrix.reshape(dims + dims)
    # trace out from the highest index so remaining axis numbers stay valid
    for k in reversed(traced):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    kept_dims = tuple(dims[k] for k in keep)
    d = int(np.prod(kept_dims))
    return DensityOperator(t.reshape(d, d), kept_dims)


def unitary_from_generator(H, alpha: float) -> np.ndarray:
    """``exp(-i alpha H)`` through the eigendecomposition of ``H``."""
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    w, v = H.eigh()
    return (v * np.exp(-1j * alpha * w)) @ v.conj().T


def apply_channel(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    if ch.dim != rho.dim:
        raise ValueError(f"channel acts on dimension {ch.dim}, state has {rho.dim}")
    r = rho.matrix
    out = sum(k @ r @ k.conj().T for k in ch.kraus_ops)
    return DensityOperator(out, rho.dims if out.shape == r.shape else None)


def pauli_direction(n) -> HermitianOperator:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > NORM_TOL:
        raise ValueError(f"direction must be a unit 3-vector, got {n}")
    return HermitianOperator(n[0] * SX + n[1] * SY + n[2] * SZ)


def optimal_probe(H, phi: float = 0.0) -> StateVector:
    """``(|h_min> + exp(-i phi)|h_max>)/sqrt(2)`` for the extremal eigenvectors of ``H``."""
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    if H.dim < 2:
        raise ValueError("optimal probe needs dimension >= 2")
    w, v = H.eigh()
    lo = v[:, 0]
    # first column carrying the largest eigenvalue
    hi = v[:, int(np.flatnonzero(np.isclose(w, w[-1], rtol=0, atol=1e-12))[0])]
    return StateVector.normalized(lo + np.exp(-1j * phi) * hi)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(d: int, rng: np.random.Generator) -> StateVector:
    return StateVector.normalized(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


# -- truncated bosonic modes --------------------------------------------------


@dataclass(frozen=True)
class FockSpace:
    """Single bosonic mode truncated to ``dim`` Fock levels."""

    dim: int

    def __post_init__(self):
        if int(self.dim) < 2:
            raise ValueError("Fock truncation must be at least 2")

    @property
    def a(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), k=1).astype(complex)

    @property
    def adag(self) -> np.ndarray:
        return self.a.conj().T

    @property
    def Q(self) -> np.ndarray:
        return (self.a + self.adag) / np.sqrt(2)

    @property
    def P(self) -> np.ndarray:
        return (self.a - self.adag) / (1j * np.sqrt(2))

    @property
    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.dim)).astype(complex)

    def vacuum(self) -> StateVector:
        return StateVector.basis(0, self.dim)


def fock_space(D: int) -> FockSpace:
    return FockSpace(int(D))


def tail_mass(psi, dims: Sequence[int] | None = None, levels: int = 2) -> float:
    """Largest weight any mode puts on its top ``levels`` Fock levels."""
    amps = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    dims = tuple(dims) if dims is not None else (psi.dims if isinstance(psi, StateVector) else (amps.size,))
    probs = np.abs(amps.reshape(dims)) ** 2
    worst = 0.0
    for axis, d in enumerate(dims):
        marginal = probs.sum(axis=tuple(i for i in range(len(dims)) if i != axis))
        worst = max(worst, float(marginal[d - levels:].sum()))
    return worst


def check_truncation(psi, dims=None, tol: float = TAIL_TOL) -> None:
    mass = tail_mass(psi, dims)
    if mass >= tol:
        raise TruncationError(f"Fock tail mass {mass:.3e} exceeds {tol:g}; raise the truncation")
