"""Closed-form error propagation rules for path and complete graph states.

These are the fast per-sample rules the Monte-Carlo engines run on, with
the tableau and dense simulators serving as their independent oracles:

* a Z error on a path qubit that is X-measured (together with everything
  between it and the terminal "root" qubit) lands on the root as X when
  the error sits an odd number of steps from the root and as Z when it
  sits an even number of steps away;
* an X error rewrites as Z on the neighbors (multiplication by the
  vertex stabilizer), so interior X errors cancel pairwise and only an X
  on the far chain end leaves a net byproduct;
* Z-measuring qubits out of a complete graph turns each X error among
  the measured qubits into a correlated Z on all remaining qubits, which
  equals a Y on any single remaining qubit, so the net byproduct class is
  Y exactly when the error count is odd.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .graphs import GraphSpec
from .pauli import PauliString

_CLASS_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_CLASS = {v: k for k, v in _CLASS_BITS.items()}


def rewrite_x_error(spec: GraphSpec, qubit: int) -> PauliString:
    """State-equivalent rewrite of X on ``qubit`` as Z on its neighborhood.

    Multiplying by the vertex stabilizer X_q Z_{v(q)} turns X_q into the
    Z word on v(q) with a plus sign.
    """
    if not 0 <= qubit < spec.n:
        raise ValueError(f"qubit {qubit} out of range")
    return PauliString.z_on(spec.n, spec.neighbors(qubit))


def _compose(cls_a: str, cls_b: str) -> str:
    ax, az = _CLASS_BITS[cls_a]
    bx, bz = _CLASS_BITS[cls_b]
    return _BITS_CLASS[(ax ^ bx, az ^ bz)]


def _distance_class(distance: int) -> str:
    return "X" if distance % 2 else "Z"


def measure_x_chain(spec: GraphSpec, error_sites: Sequence[tuple[int, str]],
                    measured: Sequence[int]) -> str:
    """Byproduct class left on the root after X-measuring a chain segment.

    ``spec`` must be a path graph; ``measured`` a contiguous index range
    ending at the root's lower neighbor, with the root being the top
    endpoint of the chain (the only configuration in which every error
    reduces to a single-qubit byproduct on the root).  Errors must sit on
    measured qubits.  X and Y errors are first rewritten as Z on the
    neighbors, so they are rejected when that rewrite would escape the
    measured region.
    """
    if spec.kind != "linear":
        raise ValueError("chain measurement rule requires a linear graph")
    if not measured:
        raise ValueError("measured range is empty")
    measured = sorted(measured)
    if measured != list(range(measured[0], measured[-1] + 1)):
        raise ValueError("measured qubits must form a contiguous range")
    root = measured[-1] + 1
    if root != spec.n - 1:
        raise ValueError("measured range must end at the chain's last "
                         "interior qubit (root is the top endpoint)")
    start = measured[0]
    result = "I"
    for qubit, cls in error_sites:
        if cls not in _CLASS_BITS:
            raise ValueError(f"unknown error class {cls!r}")
        if not start <= qubit <= root - 1:
            raise ValueError(f"error on qubit {qubit} outside the measured range")
        xbit, zbit = _CLASS_BITS[cls]
        if zbit:
            result = _compose(result, _distance_class(root - qubit))
        if xbit:
            # X_q is Z on both neighbors; neighbor byproducts at equal
            # parity cancel except at the chain ends.
            lower, upper = qubit - 1, qubit + 1
            if qubit == 0:
                result = _compose(result, _distance_class(root - upper))
            else:
                if lower < start:
                    raise ValueError(
                        f"X/Y error on qubit {qubit} rewrites onto unmeasured "
                        f"qubit {lower}; byproduct is not confined to the root")
                result = _compose(result, _distance_class(root - lower))
                result = _compose(result, _distance_class(root - upper))
    return result


def measure_z_complete(n: int, error_count: int, measured: int) -> str:
    """Byproduct class on the remaining complete graph after Z-measuring
    ``measured`` qubits of which ``error_count`` carried X errors."""
    if n < 1:
        raise ValueError("complete graph needs at least one vertex")
    if measured >= n:
        raise ValueError("must leave at least one unmeasured qubit")
    if not 0 <= error_count <= measured:
        raise ValueError("error count must lie within the measured count")
    return "Y" if error_count % 2 else "I"


def chain_byproduct_distribution(length: int, p_x: float, p_y: float, p_z: float,
                                 ) -> Mapping[str, float]:
    """Exact byproduct class distribution on the root of a fully
    X-measured arm of ``length`` qubits under independent per-qubit
    Pauli noise.

    Convolves the per-qubit contribution distributions over the
    byproduct group {I, X, Z, Y}; the qubit at distance ``length`` is the
    open end whose X component rewrites onto a single neighbor.
    """
    for p in (p_x, p_y, p_z):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must be in [0, 1]")
    if p_x + p_y + p_z > 1.0 + 1e-12:
        raise ValueError("error probabilities sum above 1")
    dist = {"I": 1.0, "X": 0.0, "Y": 0.0, "Z": 0.0}
    for distance in range(1, length + 1):
        contrib = {"I": 1.0 - p_x - p_y - p_z, "X": 0.0, "Y": 0.0, "Z": 0.0}
        per_class = {
            "X": _single_error_byproduct(distance, length, "X"),
            "Y": _single_error_byproduct(distance, length, "Y"),
            "Z": _single_error_byproduct(distance, length, "Z"),
        }
        for cls, p in (("X", p_x), ("Y", p_y), ("Z", p_z)):
            contrib[per_class[cls]] += p
        new = {"I": 0.0, "X": 0.0, "Y": 0.0, "Z": 0.0}
        for a, pa in dist.items():
            if pa == 0.0:
                continue
            for b, pb in contrib.items():
                if pb == 0.0:
                    continue
                new[_compose(a, b)] += pa * pb
        dist = new
    return dist


def _single_error_byproduct(distance: int, length: int, cls: str) -> str:
    """Root byproduct of one error of class ``cls`` at ``distance`` on a
    fully measured arm (measured qubits at distances 1..length)."""
    xbit, zbit = _CLASS_BITS[cls]
    result = "I"
    if zbit:
        result = _compose(result, _distance_class(distance))
    if xbit:
        if distance == length:
            result = _compose(result, _distance_class(distance - 1))
        else:
            result = _compose(result, _distance_class(distance - 1))
            result = _compose(result, _distance_class(distance + 1))
    return result
