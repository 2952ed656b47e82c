"""Pauli words with phase tracking.

A Pauli word on n qubits is stored both as a character string over
``IXYZ`` (user facing) and as a pair of bitmasks (x, z) with a phase
exponent k meaning a prefactor of i**k.  The bitmask form is what the
tableau simulator manipulates; it keeps row multiplication at a handful
of integer operations regardless of qubit count.

Convention: bit j of a mask refers to qubit j.  A single-qubit letter
maps to (x, z) as I=(0,0), X=(1,0), Z=(0,1), Y=(1,1), where Y carries no
extra stored phase (it is the literal Pauli Y, not XZ).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}
_PHASE_LABEL = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def mul_phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Phase exponent (mod 4) picked up when multiplying (x1,z1)*(x2,z2).

    The result is the k in P1*P2 = i**k * P3 with P3 given by the XOR of
    the masks.  Uses the cyclic rule XY=iZ, YZ=iX, ZX=iY and its
    anti-cyclic negative counterpart.
    """
    y1 = x1 & z1
    y2 = x2 & z2
    pure_x1, pure_z1 = x1 & ~z1, z1 & ~x1
    pure_x2, pure_z2 = x2 & ~z2, z2 & ~x2
    plus = (pure_x1 & y2) | (y1 & pure_z2) | (pure_z1 & pure_x2)
    minus = (y1 & pure_x2) | (pure_z1 & y2) | (pure_x1 & pure_z2)
    return (plus.bit_count() - minus.bit_count()) % 4


def anticommutes(x1: int, z1: int, x2: int, z2: int) -> bool:
    """True when the two mask-form Paulis anticommute."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) % 2 == 1


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli word ``i**phase_exponent * ops``.

    ``ops`` is a string over IXYZ, one letter per qubit, qubit 0 first.
    """

    ops: str
    phase_exponent: int = 0

    def __post_init__(self) -> None:
        bad = set(self.ops) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli letters: {sorted(bad)}")
        object.__setattr__(self, "phase_exponent", self.phase_exponent % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for {n} qubits")
        ops = ["I"] * n
        ops[qubit] = letter
        return cls("".join(ops))

    @classmethod
    def z_on(cls, n: int, qubits: Iterable[int]) -> "PauliString":
        ops = ["I"] * n
        for q in qubits:
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for {n} qubits")
            ops[q] = "Z"
        return cls("".join(ops))

    @classmethod
    def from_masks(cls, n: int, x: int, z: int, phase_exponent: int = 0) -> "PauliString":
        ops = "".join(_BITS_TO_LETTER[((x >> j) & 1, (z >> j) & 1)] for j in range(n))
        return cls(ops, phase_exponent)

    @property
    def n(self) -> int:
        return len(self.ops)

    def masks(self) -> tuple[int, int]:
        x = z = 0
        for j, letter in enumerate(self.ops):
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << j
            z |= zb << j
        return x, z

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, c in enumerate(self.ops) if c != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase_exponent]

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("length mismatch in Pauli multiplication")
        x1, z1 = self.masks()
        x2, z2 = other.masks()
        k = (self.phase_exponent + other.phase_exponent
             + mul_phase_exponent(x1, z1, x2, z2))
        return PauliString.from_masks(self.n, x1 ^ x2, z1 ^ z2, k)

    def commutes_with(self, other: "PauliString") -> bool:
        x1, z1 = self.masks()
        x2, z2 = other.masks()
        return not anticommutes(x1, z1, x2, z2)

    def class_label(self) -> str:
        """Single-letter error class, ignoring phase (requires weight <= 1)."""
        sup = self.support
        if not sup:
            return "I"
        if len(sup) > 1:
            raise ValueError("class_label needs a weight-0 or weight-1 Pauli")
        return self.ops[sup[0]]

    def __str__(self) -> str:
        return _PHASE_LABEL[self.phase_exponent] + self.ops
