"""Stabilizer tableau simulator for graph states under Pauli errors and
X/Z measurements.

Rows are stored as integer bitmasks (one x-mask and one z-mask per
generator) with a sign bit, in the usual destabilizer/stabilizer layout:
rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers.  Measurement is
the standard O(n^2) update.  All public operations return a new tableau;
instances are never mutated after construction.

Qubits that have been measured out via the public measurement methods
are tracked in ``retired``; measuring one again raises, which catches
protocol bookkeeping bugs in the surgery routines built on top.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import GraphSpec, LossMask
from .pauli import PauliString, anticommutes, mul_phase_exponent


@dataclass(frozen=True)
class StabilizerTableau:
    n: int
    xs: tuple[int, ...]      # 2n rows; destabilizers first
    zs: tuple[int, ...]
    signs: tuple[int, ...]   # 0 -> +, 1 -> -
    retired: frozenset[int] = field(default_factory=frozenset)

    # -- construction -------------------------------------------------

    @classmethod
    def from_graph(cls, spec: GraphSpec) -> "StabilizerTableau":
        """Tableau of the graph state: stabilizer i is X_i Z_{neighbors(i)}.

        Destabilizer i is Z_i, which anticommutes with stabilizer i and
        commutes with every other row.
        """
        n = spec.n
        xs = [0] * (2 * n)
        zs = [0] * (2 * n)
        for i in range(n):
            zs[i] = 1 << i
            xs[n + i] = 1 << i
            for j in spec.neighbors(i):
                zs[n + i] |= 1 << j
        return cls(n, tuple(xs), tuple(zs), tuple([0] * (2 * n)))

    # -- internal helpers ---------------------------------------------

    def _rows(self) -> tuple[list[int], list[int], list[int]]:
        return list(self.xs), list(self.zs), list(self.signs)

    @staticmethod
    def _rowmult(xs: list[int], zs: list[int], signs: list[int],
                 target: int, source: int) -> None:
        """Row ``target`` *= row ``source`` with sign tracking."""
        k = (2 * signs[target] + 2 * signs[source]
             + mul_phase_exponent(xs[target], zs[target], xs[source], zs[source]))
        if k % 2:
            raise AssertionError("row product left an imaginary phase")
        signs[target] = (k % 4) // 2
        xs[target] ^= xs[source]
        zs[target] ^= zs[source]

    def _replace(self, xs: list[int], zs: list[int], signs: list[int],
                 retired: frozenset[int]) -> "StabilizerTableau":
        return StabilizerTableau(self.n, tuple(xs), tuple(zs), tuple(signs), retired)

    # -- generator access ----------------------------------------------

    def stabilizer(self, i: int) -> PauliString:
        return PauliString.from_masks(self.n, self.xs[self.n + i],
                                      self.zs[self.n + i],
                                      2 * self.signs[self.n + i])

    def stabilizers(self) -> list[PauliString]:
        return [self.stabilizer(i) for i in range(self.n)]

    def validate(self) -> None:
        """Check the symplectic invariants: commuting, independent rows
        paired with anticommuting destabilizers."""
        n = self.n
        for i in range(n, 2 * n):
            for j in range(i + 1, 2 * n):
                if anticommutes(self.xs[i], self.zs[i], self.xs[j], self.zs[j]):
                    raise AssertionError(f"stabilizers {i - n} and {j - n} anticommute")
        for i in range(n):
            if not anticommutes(self.xs[i], self.zs[i],
                                self.xs[n + i], self.zs[n + i]):
                raise AssertionError(f"destabilizer {i} commutes with its stabilizer")
            for j in range(n):
                if j != i and anticommutes(self.xs[i], self.zs[i],
                                           self.xs[n + j], self.zs[n + j]):
                    raise AssertionError(
                        f"destabilizer {i} anticommutes with stabilizer {j}")
        if len(canonical_rows(self._stab_pairs(), n)) != n:
            raise AssertionError("stabilizer rows are linearly dependent")

    def _stab_pairs(self) -> list[tuple[int, int]]:
        return [(self.xs[self.n + i], self.zs[self.n + i]) for i in range(self.n)]

    # -- errors ---------------------------------------------------------

    def apply_pauli(self, pauli: PauliString) -> "StabilizerTableau":
        """Apply a Pauli error: flips the sign of every anticommuting row."""
        if pauli.n != self.n:
            raise ValueError("Pauli length does not match qubit count")
        px, pz = pauli.masks()
        xs, zs, signs = self._rows()
        for r in range(2 * self.n):
            if anticommutes(px, pz, xs[r], zs[r]):
                signs[r] ^= 1
        return self._replace(xs, zs, signs, self.retired)

    # -- measurement ------------------------------------------------------

    def _check_active(self, qubit: int) -> None:
        if not 0 <= qubit < self.n:
            raise ValueError(f"qubit {qubit} out of range")
        if qubit in self.retired:
            raise ValueError(f"qubit {qubit} was already measured out")

    def measure_z(self, qubit: int, *, forced: int | None = None,
                  rng: random.Random | None = None,
                  retire: bool = True) -> tuple[int, "StabilizerTableau"]:
        """Z-measure a qubit; returns (outcome, residual tableau).

        Random branches take ``forced`` when given, else draw from
        ``rng``.  Forcing a deterministic outcome to the wrong value
        raises.
        """
        self._check_active(qubit)
        n, bit = self.n, 1 << qubit
        xs, zs, signs = self._rows()
        pivot = next((r for r in range(n, 2 * n) if xs[r] & bit), None)
        if pivot is None:
            # Deterministic: the destabilizers that anticommute with Z_q
            # index the stabilizer product equal to +-Z_q.
            acc_x, acc_z, acc_s = 0, 0, 0
            for i in range(n):
                if xs[i] & bit:
                    k = (2 * acc_s + 2 * signs[n + i]
                         + mul_phase_exponent(acc_x, acc_z, xs[n + i], zs[n + i]))
                    acc_s = (k % 4) // 2
                    acc_x ^= xs[n + i]
                    acc_z ^= zs[n + i]
            if acc_x != 0 or acc_z != bit:
                raise AssertionError("deterministic Z reduction failed")
            outcome = acc_s
            if forced is not None and forced != outcome:
                raise ValueError(
                    f"outcome of qubit {qubit} is deterministic ({outcome}); "
                    f"cannot force {forced}")
        else:
            if forced is not None:
                outcome = int(forced)
                if outcome not in (0, 1):
                    raise ValueError("forced outcome must be 0 or 1")
            elif rng is not None:
                outcome = rng.getrandbits(1)
            else:
                raise ValueError("random measurement branch needs rng or forced")
            for r in range(2 * n):
                if r != pivot and xs[r] & bit:
                    self._rowmult(xs, zs, signs, r, pivot)
            xs[pivot - n], zs[pivot - n], signs[pivot - n] = \
                xs[pivot], zs[pivot], signs[pivot]
            xs[pivot], zs[pivot], signs[pivot] = 0, bit, outcome
        retired = self.retired | {qubit} if retire else self.retired
        return outcome, self._replace(xs, zs, signs, retired)

    def _hadamard(self, qubit: int) -> "StabilizerTableau":
        bit = 1 << qubit
        xs, zs, signs = self._rows()
        for r in range(2 * self.n):
            xb, zb = xs[r] & bit, zs[r] & bit
            if xb and zb:
                signs[r] ^= 1
            xs[r] = (xs[r] & ~bit) | (bit if zb else 0)
            zs[r] = (zs[r] & ~bit) | (bit if xb else 0)
        return self._replace(xs, zs, signs, self.retired)

    def measure_x(self, qubit: int, *, forced: int | None = None,
                  rng: random.Random | None = None,
                  retire: bool = True) -> tuple[int, "StabilizerTableau"]:
        """X-measure a qubit (Hadamard conjugation of measure_z)."""
        self._check_active(qubit)
        outcome, t = self._hadamard(qubit).measure_z(
            qubit, forced=forced, rng=rng, retire=retire)
        return outcome, t._hadamard(qubit)

    # -- group queries ----------------------------------------------------

    def expectation(self, pauli: PauliString) -> int:
        """+1/-1 when +-pauli is in the stabilizer group, else 0."""
        px, pz = pauli.masks()
        if pauli.phase_exponent % 2:
            raise ValueError("expectation needs a Hermitian Pauli (+-1 phase)")
        for i in range(self.n):
            if anticommutes(px, pz, self.xs[self.n + i], self.zs[self.n + i]):
                return 0
        # A commuting Pauli is the product of the stabilizers whose
        # destabilizer partners anticommute with it; accumulate signs.
        acc_x, acc_z, acc_s = 0, 0, 0
        for i in range(self.n):
            if anticommutes(px, pz, self.xs[i], self.zs[i]):
                k = (2 * acc_s + 2 * self.signs[self.n + i]
                     + mul_phase_exponent(acc_x, acc_z,
                                          self.xs[self.n + i], self.zs[self.n + i]))
                acc_s = (k % 4) // 2
                acc_x ^= self.xs[self.n + i]
                acc_z ^= self.zs[self.n + i]
        if (acc_x, acc_z) != (px, pz):
            raise AssertionError("commuting Pauli failed to reduce to a group element")
        sign = acc_s ^ (pauli.phase_exponent // 2)
        return -1 if sign else 1

    def single_qubit_state(self, qubit: int) -> tuple[str, int]:
        """(axis, sign) for a qubit in a definite single-qubit Pauli state.

        Raises when the qubit is still entangled or undetermined in all
        three axes.
        """
        for letter in "ZXY":
            p = PauliString.single(self.n, qubit, letter)
            e = self.expectation(p)
            if e:
                return letter, e
        raise ValueError(f"qubit {qubit} has no definite single-qubit state")


def build_graph_tableau(spec: GraphSpec) -> StabilizerTableau:
    """Tableau whose i-th generator is X_i with Z on every neighbor of i."""
    return StabilizerTableau.from_graph(spec)


# -- canonical forms and group comparison -------------------------------


def canonical_rows(rows: Sequence[tuple[int, int]], n: int) -> list[tuple[int, int]]:
    """Reduced row echelon form of (x, z) rows over GF(2), signs ignored.

    Rows are combined into single integers with the x block above the z
    block, reduced to a unique basis, and returned sorted.
    """
    basis: dict[int, int] = {}     # leading bit -> combined row
    for x, z in rows:
        cur = (x << n) | z
        while cur:
            lead = cur.bit_length() - 1
            if lead in basis:
                cur ^= basis[lead]
            else:
                basis[lead] = cur
                break
    # Back substitution, small leads first so each row reduces against
    # rows that already contain only their own pivot.
    leads = sorted(basis)
    for i, li in enumerate(leads):
        for lj in leads[:i]:
            if (basis[li] >> lj) & 1:
                basis[li] ^= basis[lj]
    mask = (1 << n) - 1
    return sorted(((c >> n) & mask, c & mask) for c in basis.values())


def same_stabilizer_group(a: StabilizerTableau, b: StabilizerTableau,
                          ignore_signs: bool = True) -> bool:
    """Whether two tableaus generate the same group.

    With ``ignore_signs`` the comparison is up to local byproducts (row
    spans over GF(2) only); otherwise states must match exactly, checked
    via sign-tracked membership of every generator.
    """
    if a.n != b.n:
        return False
    if canonical_rows(a._stab_pairs(), a.n) != canonical_rows(b._stab_pairs(), b.n):
        return False
    if ignore_signs:
        return True
    return all(b.expectation(a.stabilizer(i)) == 1 for i in range(a.n))


def restricted_group(t: StabilizerTableau, qubits: Iterable[int]) -> list[tuple[int, int]]:
    """Canonical generators of the stabilizer subgroup supported on ``qubits``.

    Rows are eliminated against the complement's columns first; rows left
    with no support outside ``qubits`` span the restricted subgroup.  The
    returned masks are re-indexed to the given qubit order.
    """
    keep = list(qubits)
    keep_set = set(keep)
    if len(keep_set) != len(keep):
        raise ValueError("duplicate qubits in restriction")
    n = t.n
    drop = 0
    for q in range(n):
        if q not in keep_set:
            drop |= 1 << q
    drop_combined = (drop << n) | drop
    pivots: dict[int, int] = {}
    inside: list[int] = []
    for x, z in t._stab_pairs():
        cur = (x << n) | z
        while cur & drop_combined:
            lead = (cur & drop_combined).bit_length() - 1
            if lead in pivots:
                cur ^= pivots[lead]
            else:
                pivots[lead] = cur
                cur = 0
        if cur:
            inside.append(cur)
    mask = (1 << n) - 1
    remapped = []
    for c in inside:
        x, z = (c >> n) & mask, c & mask
        nx = nz = 0
        for i, q in enumerate(keep):
            nx |= ((x >> q) & 1) << i
            nz |= ((z >> q) & 1) << i
        remapped.append((nx, nz))
    return canonical_rows(remapped, len(keep))


# -- loss recovery ------------------------------------------------------


def recover_from_loss(spec: GraphSpec, tableau: StabilizerTableau,
                      lost: LossMask | Iterable[int],
                      rng: random.Random | None = None,
                      ) -> tuple[GraphSpec, StabilizerTableau]:
    """Recover from located qubit loss by Z-measuring every neighbor of a
    lost qubit.

    Returns the residual GraphSpec (lost and measured vertices become
    isolated; surviving entangled segments keep their edges) and the
    measured tableau.  Without an rng, random branches are forced to 0;
    outcome choice only shifts local Z byproducts.
    """
    lost_set = frozenset(lost.lost if isinstance(lost, LossMask) else lost)
    for q in lost_set:
        if not 0 <= q < spec.n:
            raise ValueError(f"lost qubit {q} out of range")
        if q in tableau.retired:
            raise ValueError(f"lost qubit {q} was already measured")
    to_measure = set()
    for q in lost_set:
        to_measure |= set(spec.neighbors(q))
    to_measure -= lost_set
    t = tableau
    for q in sorted(to_measure):
        if q in t.retired:
            continue
        if rng is None:
            _, t = t.measure_z(q, forced=0)
        else:
            _, t = t.measure_z(q, rng=rng)
    # Lost qubits are disentangled now; retire them without measuring.
    xs, zs, signs = t._rows()
    t = t._replace(xs, zs, signs, t.retired | lost_set)
    residual = spec.without_vertices(lost_set | to_measure)
    return residual, t
