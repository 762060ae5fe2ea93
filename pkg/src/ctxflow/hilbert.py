"""Complex 3-vector and 3x3 operator arithmetic over the path basis.

Amplitudes are plain ``complex`` scalars; :class:`StateVector` and
:class:`Operator3` are immutable wrappers around numpy arrays.  All
operations are pure functions of their inputs, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tolerance for unit-norm checks on physical states.
TOL_NORM = 1e-10
#: Per-entry tolerance for unitarity / operator-identity checks.
TOL_UNITARY = 1e-10
#: Threshold below which a squared magnitude counts as zero.
TOL_ZERO = 1e-12

DIM = 3


class ZeroVectorError(ValueError):
    """Normalization was requested for a (near-)zero vector."""


def _as_array(values, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite (no NaN/inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Ket over the computational path basis, paths 1, 2, 3."""

    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_array(self.amplitudes, (DIM,)))

    @classmethod
    def basis(cls, index: int) -> StateVector:
        """Basis ket for path ``index`` (1-based, matching the path numbering)."""
        if index not in (1, 2, 3):
            raise ValueError(f"path index must be 1, 2 or 3, got {index}")
        amps = np.zeros(DIM, dtype=np.complex128)
        amps[index - 1] = 1.0
        return cls(amps)

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = TOL_NORM) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def allclose(self, other: StateVector, tol: float = TOL_NORM) -> bool:
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= tol)

    def __iter__(self):
        return (complex(a) for a in self.amplitudes)


@dataclass(frozen=True, eq=False)
class Operator3:
    """3x3 operator; row = output basis index, column = input basis index."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_array(self.entries, (DIM, DIM)))

    @classmethod
    def identity(cls) -> Operator3:
        return cls(np.eye(DIM, dtype=np.complex128))

    def adjoint(self) -> Operator3:
        return Operator3(self.entries.conj().T)

    def is_unitary(self, tol: float = TOL_UNITARY) -> bool:
        gram = self.entries.conj().T @ self.entries
        return bool(np.max(np.abs(gram - np.eye(DIM))) <= tol)

    def allclose(self, other: Operator3, tol: float = TOL_UNITARY) -> bool:
        return bool(np.max(np.abs(self.entries - other.entries)) <= tol)


def inner_product(bra: StateVector, ket: StateVector) -> complex:
    """<bra|ket> = sum_k conj(bra_k) * ket_k."""
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def normalize(v: StateVector) -> StateVector:
    """Rescale to unit norm; direction unchanged.

    Raises :class:`ZeroVectorError` when the squared norm is at or below
    ``TOL_ZERO``.
    """
    n2 = v.norm_squared()
    if n2 <= TOL_ZERO:
        raise ZeroVectorError("cannot normalize a vector with (near-)zero norm")
    return StateVector(v.amplitudes / np.sqrt(n2))


def apply(op: Operator3, v: StateVector) -> StateVector:
    """Matrix-vector product ``op @ v``."""
    return StateVector(op.entries @ v.amplitudes)


def compose(a: Operator3, b: Operator3) -> Operator3:
    """Operator product ``a @ b`` (apply ``b`` first)."""
    return Operator3(a.entries @ b.entries)


def outer(ket: StateVector, bra: StateVector) -> Operator3:
    """Outer product |ket><bra|; ``outer(x, x)`` is the projector onto x."""
    return Operator3(np.outer(ket.amplitudes, bra.amplitudes.conj()))


def random_state(rng: np.random.Generator, real: bool = False) -> StateVector:
    """Normalized pseudorandom state from independent (complex) normals."""
    while True:
        z = rng.normal(size=DIM)
        if not real:
            z = z + 1j * rng.normal(size=DIM)
        n = np.linalg.norm(z)
        if n * n > TOL_ZERO:
            return StateVector(z / n)
