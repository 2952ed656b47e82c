"""Dense state-vector oracle for cross-checking the stabilizer engine.

Only intended for small systems (<= 14 qubits); everything is a plain
complex128 numpy vector indexed so that bit j of the basis index is the
computational value of qubit j.
"""
from __future__ import annotations

import random

import numpy as np

from .graphs import GraphSpec
from .pauli import PauliString

_ATOL = 1e-9


class DenseState:
    """Mutable state vector with graph-state construction and Pauli ops."""

    def __init__(self, n: int, vector: np.ndarray | None = None):
        if n < 0 or n > 20:
            raise ValueError("dense simulation supports 0..20 qubits")
        self.n = n
        if vector is None:
            vector = np.zeros(2 ** n, dtype=np.complex128)
            vector[0] = 1.0
        self.vector = np.asarray(vector, dtype=np.complex128)
        if self.vector.shape != (2 ** n,):
            raise ValueError("state vector has wrong length")

    @classmethod
    def from_graph(cls, spec: GraphSpec) -> "DenseState":
        """|+>^n followed by a CZ on every edge."""
        n = spec.n
        vec = np.full(2 ** n, 2 ** (-n / 2), dtype=np.complex128)
        idx = np.arange(2 ** n)
        for a, b in spec.edges:
            both = (((idx >> a) & 1) & ((idx >> b) & 1)).astype(bool)
            vec = np.where(both, -vec, vec)
        return cls(n, vec)

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.vector.copy())

    def apply_pauli(self, pauli: PauliString) -> None:
        if pauli.n != self.n:
            raise ValueError("Pauli length mismatch")
        idx = np.arange(2 ** self.n)
        vec = self.vector
        for q, letter in enumerate(pauli.ops):
            if letter == "I":
                continue
            bit = (idx >> q) & 1
            if letter in ("X", "Y"):
                vec = vec[idx ^ (1 << q)]
            if letter == "Z":
                vec = np.where(bit, -vec, vec)
            elif letter == "Y":
                vec = np.where(bit, 1j * vec, -1j * vec)
        self.vector = vec * pauli.phase

    def expectation(self, pauli: PauliString) -> complex:
        other = self.copy()
        other.apply_pauli(pauli)
        return complex(np.vdot(self.vector, other.vector))

    def _projections(self, qubit: int, basis: str) -> tuple[np.ndarray, np.ndarray]:
        """Unnormalized projections onto outcome 0 and 1."""
        if basis == "z":
            bit = ((np.arange(2 ** self.n) >> qubit) & 1).astype(bool)
            return np.where(bit, 0, self.vector), np.where(bit, self.vector, 0)
        x_applied = self.vector[np.arange(2 ** self.n) ^ (1 << qubit)]
        return (self.vector + x_applied) / 2, (self.vector - x_applied) / 2

    def outcome_probability(self, qubit: int, basis: str, outcome: int) -> float:
        proj = self._projections(qubit, basis)[outcome]
        return float(np.vdot(proj, proj).real)

    def measure(self, qubit: int, basis: str = "z", *,
                forced: int | None = None,
                rng: random.Random | None = None) -> int:
        """Projective X- or Z-basis measurement, renormalized in place."""
        if basis not in ("z", "x"):
            raise ValueError("basis must be 'z' or 'x'")
        if not 0 <= qubit < self.n:
            raise ValueError(f"qubit {qubit} out of range")
        proj0, proj1 = self._projections(qubit, basis)
        p0 = float(np.vdot(proj0, proj0).real)
        p1 = float(np.vdot(proj1, proj1).real)
        if forced is not None:
            outcome = int(forced)
            prob = p0 if outcome == 0 else p1
            if prob < _ATOL:
                raise ValueError(
                    f"forced outcome {outcome} has probability {prob:.3g}")
        elif rng is not None:
            outcome = 0 if rng.random() < p0 / (p0 + p1) else 1
        else:
            raise ValueError("random measurement branch needs rng or forced")
        chosen = proj0 if outcome == 0 else proj1
        self.vector = chosen / np.linalg.norm(chosen)
        return outcome

    def same_up_to_phase(self, other: "DenseState", atol: float = 1e-8) -> bool:
        if self.n != other.n:
            return False
        overlap = abs(np.vdot(self.vector, other.vector))
        return bool(abs(overlap - 1.0) < atol)


def graph_state_vector(spec: GraphSpec) -> np.ndarray:
    return DenseState.from_graph(spec).vector
