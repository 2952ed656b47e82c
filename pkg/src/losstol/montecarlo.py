"""Monte-Carlo protocol simulators and cross-engine differential checks.

Sampling contract: work is split into fixed-size chunks, each chunk owns
a counter-based RNG stream keyed by (seed, chunk index), and chunk
results are integer counts reduced by summation.  Results are therefore
bit-identical for a given (seed, samples, worker_count) and independent
of scheduling; worker_count only affects wall time.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Iterable, Mapping

import numpy as np

from . import graphs
from .analytic import ParityParams, TreeParams
from .model import MONTE_CARLO, ErrorModel, RateReport
from .pauli import PauliString
from .propagation import measure_x_chain, measure_z_complete
from .tableau import StabilizerTableau, build_graph_tableau, same_stabilizer_group

_CHUNK = 1 << 16
_TARGET_CELLS = 4_000_000  # per-chunk draw budget, keeps memory bounded


@dataclass(frozen=True)
class McConfig:
    """Sampling parameters shared by every simulator."""

    samples: int
    seed: int
    worker_count: int = 1
    ci_confidence: float = 0.95

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("sample count must be positive")
        if not 0 <= self.seed < 2 ** 63:
            raise ValueError("seed must fit in a non-negative 63-bit integer")
        if self.worker_count < 1:
            raise ValueError("worker count must be positive")
        if not 0.0 < self.ci_confidence < 1.0:
            raise ValueError("confidence level must be in (0, 1)")


@dataclass(frozen=True)
class ProtocolTrace:
    """Replayable per-sample event log (debugging aid)."""

    scheme: str
    seed: int
    events: tuple[tuple[dict, ...], ...]

    def to_jsonl(self) -> str:
        import json

        lines = []
        for i, sample_events in enumerate(self.events):
            for ev in sample_events:
                lines.append(json.dumps({"sample": i, **ev}, sort_keys=True))
        return "\n".join(lines)


def _chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(seed << 64) + chunk_index))


def _chunk_plan(samples: int, cells_per_sample: int) -> list[tuple[int, int]]:
    chunk = max(1024, min(_CHUNK, _TARGET_CELLS // max(cells_per_sample, 1)))
    plan = []
    start, index = 0, 0
    while start < samples:
        size = min(chunk, samples - start)
        plan.append((index, size))
        start += size
        index += 1
    return plan


def _reduce_counts(parts: Iterable[Mapping[str, int]]) -> dict[str, int]:
    total: dict[str, int] = {}
    for part in parts:
        for key, value in part.items():
            total[key] = total.get(key, 0) + int(value)
    return total


def _run_chunked(fn: Callable[..., Mapping[str, int]], args: tuple,
                 config: McConfig, cells_per_sample: int) -> dict[str, int]:
    plan = _chunk_plan(config.samples, cells_per_sample)
    jobs = [(args, config.seed, index, size) for index, size in plan]
    if config.worker_count == 1 or len(jobs) == 1:
        parts = [fn(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            parts = list(pool.map(fn, *zip(*jobs)))
    return _reduce_counts(parts)


def wilson_half_width(successes: int, trials: int,
                      confidence: float = 0.95) -> float:
    """Half-width of the Wilson score interval around the point estimate."""
    if trials <= 0:
        return 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    half = z * np.sqrt(phat * (1.0 - phat) / trials
                       + z * z / (4.0 * trials * trials)) / denom
    return float(half)


def _rate(count: int, trials: int) -> float:
    return count / trials if trials else 0.0


# -- bonded plus-cluster bonding -------------------------------------------


def _duan_draws(gen: np.random.Generator, size: int, n_l: int,
                attempts: int) -> dict[str, np.ndarray]:
    return {
        "gate": gen.random((size, attempts)),
        "pauli": gen.random((size, 2, n_l)),
    }


def _duan_eval(draws: Mapping[str, np.ndarray], p_g: float, n_l: int,
               model: ErrorModel) -> dict[str, int]:
    gate = draws["gate"]
    ok_attempt = gate < p_g
    bonded = ok_attempt.any(axis=1)
    attempt_index = ok_attempt.argmax(axis=1)       # 0-based; garbage if not bonded
    leftover = n_l - 2 * attempt_index              # measured qubits per arm

    u = draws["pauli"]
    is_x = u < model.p_x
    is_y = (u >= model.p_x) & (u < model.p_x + model.p_y)
    is_z = (u >= model.p_x + model.p_y) & (u < model.total_pauli)
    dist = np.arange(1, n_l + 1)[None, None, :]
    active = dist <= leftover[:, None, None]
    z_comp = (is_z | is_y) & active
    x_comp = (is_x | is_y) & active
    odd = (dist % 2 == 1)

    # Chain rule in vector form: a Z component at odd distance is an X on
    # the root, at even distance a Z; X components cancel pairwise in the
    # interior and only the open far end contributes, at parity of the
    # single neighbor one step closer.
    x_bit = np.bitwise_xor.reduce(z_comp & odd, axis=2)
    z_bit = np.bitwise_xor.reduce(z_comp & ~odd, axis=2)
    end_idx = np.clip(leftover - 1, 0, n_l - 1)[:, None, None]
    end_x = np.take_along_axis(x_comp, np.broadcast_to(end_idx, (u.shape[0], 2, 1)),
                               axis=2)[:, :, 0]
    end_odd = ((leftover - 1) % 2 == 1)[:, None]
    x_bit ^= end_x & end_odd
    z_bit ^= end_x & ~end_odd

    any_err = np.bitwise_or.reduce((is_x | is_y | is_z) & active, axis=2)

    mask = bonded[:, None]
    n_roots = int(2 * bonded.sum())
    counts = {
        "samples": gate.shape[0],
        "bonded": int(bonded.sum()),
        "roots": n_roots,
        "any_error": int((any_err & mask).sum()),
        "byp_x": int((x_bit & ~z_bit & mask).sum()),
        "byp_z": int((z_bit & ~x_bit & mask).sum()),
        "byp_y": int((x_bit & z_bit & mask).sum()),
        "leftover_sum": int((2 * leftover * bonded).sum()),
        "attempts_sum": int(((attempt_index + 1) * bonded).sum()),
    }
    return counts


def _duan_chunk(args: tuple, seed: int, index: int, size: int) -> dict[str, int]:
    p_g, n_l, model = args
    attempts = (n_l + 1) // 2
    gen = _chunk_generator(seed, index)
    draws = _duan_draws(gen, size, n_l, attempts)
    return _duan_eval(draws, p_g, n_l, model)


def mc_duan_bond(p_g: float, n_l: int, model: ErrorModel,
                 config: McConfig) -> RateReport:
    """Simulate bonding two plus-cluster arms of length ``n_l``.

    Each attempt succeeds with probability p_g; a failure consumes two
    qubits from each arm (the gate pair plus the recovery Z-measurement).
    On success the leftover arm qubits are measured away in the X basis
    with independent per-qubit Pauli noise, and each central node
    collects the byproduct propagated along its own arm via the chain
    rule.

    effective_loss is the bond-failure probability; effective_error is
    the per-root probability that any of its measured arm qubits erred
    (given bonding succeeded), and error_by_pauli the exact byproduct
    class rates on a root.
    """
    if not 0.0 < p_g <= 1.0:
        raise ValueError("gate success probability must be in (0, 1]")
    if n_l < 1:
        raise ValueError("arm length must be positive")
    counts = _run_chunked(_duan_chunk, (p_g, n_l, model), config,
                          cells_per_sample=2 * n_l + (n_l + 1) // 2)
    samples = counts["samples"]
    roots = counts["roots"]
    return RateReport(
        effective_loss=_rate(samples - counts["bonded"], samples),
        effective_error=_rate(counts["any_error"], roots),
        method=MONTE_CARLO,
        error_given_success=_rate(counts["any_error"], roots),
        error_by_pauli={
            "X": _rate(counts["byp_x"], roots),
            "Y": _rate(counts["byp_y"], roots),
            "Z": _rate(counts["byp_z"], roots),
        },
        ci_half_width=wilson_half_width(counts["any_error"], roots,
                                        config.ci_confidence),
        loss_ci_half_width=wilson_half_width(samples - counts["bonded"],
                                             samples, config.ci_confidence),
        seed=config.seed,
        samples=samples,
        details={
            "bond_success": _rate(counts["bonded"], samples),
            "mean_measured_per_root": (counts["leftover_sum"] / roots
                                       if roots else 0.0),
            "mean_attempts": (counts["attempts_sum"] / counts["bonded"]
                              if counts["bonded"] else 0.0),
        },
    )


def trace_duan_bond(p_g: float, n_l: int, model: ErrorModel, seed: int,
                    samples: int) -> ProtocolTrace:
    """Scalar replay of the first sampling chunk, with per-sample events."""
    attempts = (n_l + 1) // 2
    gen = _chunk_generator(seed, 0)
    draws = _duan_draws(gen, samples, n_l, attempts)
    all_events = []
    for i in range(samples):
        events: list[dict] = []
        bonded_at = None
        for a in range(attempts):
            ok = bool(draws["gate"][i, a] < p_g)
            events.append({"event": "bond-attempt", "attempt": a + 1, "ok": ok})
            if ok:
                bonded_at = a
                break
        if bonded_at is None:
            events.append({"event": "bond-exhausted"})
            all_events.append(tuple(events))
            continue
        leftover = n_l - 2 * bonded_at
        for arm in range(2):
            sites = []
            for q in range(leftover):
                u = draws["pauli"][i, arm, q]
                if u < model.p_x:
                    sites.append((q, "X"))
                elif u < model.p_x + model.p_y:
                    sites.append((q, "Y"))
                elif u < model.total_pauli:
                    sites.append((q, "Z"))
            chain = graphs.linear(leftover + 1)
            # Arm qubit at distance j from the root maps to chain index
            # leftover - j; errors listed by draw index q at distance q+1.
            mapped = [(leftover - (q + 1), cls) for q, cls in sites]
            byproduct = measure_x_chain(chain, mapped, range(leftover))
            events.append({"event": "arm-measured", "arm": arm,
                           "leftover": leftover,
                           "errors": [[q, c] for q, c in sites],
                           "byproduct": byproduct})
        all_events.append(tuple(events))
    return ProtocolTrace("duan", seed, tuple(all_events))


# -- tree-encoded indirect measurement --------------------------------------


def _tree_widths(branching: tuple[int, ...]) -> list[int]:
    widths = [1]
    for b in branching:
        widths.append(widths[-1] * b)
    return widths


def _tree_draws(gen: np.random.Generator, size: int,
                branching: tuple[int, ...]) -> dict[str, list[np.ndarray]]:
    widths = _tree_widths(branching)
    lost = [gen.random((size, w)) for w in widths]
    flip = [gen.random((size, w)) for w in widths]
    coin = [gen.random((size, w)) for w in widths[:-1]]
    return {"lost": lost, "flip": flip, "coin": coin}


def _tree_eval(draws: Mapping[str, list[np.ndarray]], params: TreeParams,
               model: ErrorModel, voting: bool, tie_policy: str,
               prefer_indirect: bool, root_lost: bool) -> dict[str, int]:
    b = params.branching
    d = params.depth
    lost = [u < model.p_loss for u in draws["lost"]]
    flip = [u < model.p_local for u in draws["flip"]]
    coin = [u < 0.5 for u in draws["coin"]]
    size = lost[0].shape[0]

    z_ok = [None] * (d + 1)
    z_wrong = [None] * (d + 1)
    z_ok[d] = ~lost[d]
    z_wrong[d] = flip[d]
    root_deliver = root_wrong = None
    for level in range(d - 1, -1, -1):
        w = lost[level].shape[1]
        if level + 1 < d:
            g = b[level + 1]
            grand_ok = z_ok[level + 2].reshape(size, -1, g).all(axis=2)
            grand_par = np.bitwise_xor.reduce(
                z_wrong[level + 2].reshape(size, -1, g), axis=2)
            attempt_ok = (~lost[level + 1]) & grand_ok
            attempt_wrong = flip[level + 1] ^ grand_par
        else:
            attempt_ok = ~lost[level + 1]
            attempt_wrong = flip[level + 1]
        attempt_ok = attempt_ok.reshape(size, w, b[level])
        attempt_wrong = attempt_wrong.reshape(size, w, b[level])

        if voting:
            m = attempt_ok.sum(axis=2)
            wrongs = (attempt_ok & attempt_wrong).sum(axis=2)
            deliver = m > 0
            wrong = 2 * wrongs > m
            tie = deliver & (m % 2 == 0) & (2 * wrongs == m)
            if tie_policy == "abstain":
                deliver = deliver & ~tie
            elif tie_policy == "coin-flip":
                wrong = wrong | (tie & coin[level])
            else:
                wrong = wrong | tie
        else:
            deliver = attempt_ok.any(axis=2)
            first = attempt_ok.argmax(axis=2)
            wrong = np.take_along_axis(attempt_wrong, first[:, :, None],
                                       axis=2)[:, :, 0]

        if level == 0:
            if root_lost:
                root_deliver, root_wrong = deliver, wrong
            else:
                present = ~lost[0]
                if prefer_indirect:
                    root_deliver = deliver | present
                    root_wrong = np.where(deliver, wrong, flip[0])
                else:
                    root_deliver = present | deliver
                    root_wrong = np.where(present, flip[0], wrong)
        else:
            present = ~lost[level]
            if prefer_indirect:
                z_ok[level] = deliver | present
                z_wrong[level] = np.where(deliver, wrong, flip[level])
            else:
                z_ok[level] = present | deliver
                z_wrong[level] = np.where(present, flip[level], wrong)

    delivered = root_deliver[:, 0]
    wrong_joint = delivered & root_wrong[:, 0]
    return {
        "samples": size,
        "delivered": int(delivered.sum()),
        "wrong": int(wrong_joint.sum()),
    }


def _tree_chunk(args: tuple, seed: int, index: int, size: int) -> dict[str, int]:
    params, model, voting, tie_policy, prefer_indirect, root_lost = args
    gen = _chunk_generator(seed, index)
    draws = _tree_draws(gen, size, params.branching)
    return _tree_eval(draws, params, model, voting, tie_policy,
                      prefer_indirect, root_lost)


def mc_tree_indirect(params: TreeParams, model: ErrorModel, config: McConfig, *,
                     voting: bool = True, tie_policy: str = "abstain",
                     prefer_indirect: bool = False,
                     root_lost: bool = True) -> RateReport:
    """Simulate indirect Z-measurement of a tree-encoded qubit.

    Loss is drawn independently on every tree qubit (the root is forced
    lost by default); each surviving branch infers the root outcome from
    one X measurement plus its children's Z outcomes, recursing into
    indirect measurement whenever a Z target is itself lost.  With
    ``voting`` all surviving branches vote; without it the first
    surviving branch is used.
    """
    from .analytic import TIE_POLICIES

    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie policy must be one of {TIE_POLICIES}")
    q_total = sum(_tree_widths(params.branching))
    counts = _run_chunked(
        _tree_chunk,
        (params, model, voting, tie_policy, prefer_indirect, root_lost),
        config, cells_per_sample=3 * q_total)
    samples = counts["samples"]
    delivered = counts["delivered"]
    return RateReport(
        effective_loss=_rate(samples - delivered, samples),
        effective_error=_rate(counts["wrong"], samples),
        method=MONTE_CARLO,
        error_given_success=_rate(counts["wrong"], delivered),
        ci_half_width=wilson_half_width(counts["wrong"], samples,
                                        config.ci_confidence),
        loss_ci_half_width=wilson_half_width(samples - delivered, samples,
                                             config.ci_confidence),
        seed=config.seed,
        samples=samples,
        details={"delivery_probability": _rate(delivered, samples)},
    )


def trace_tree_indirect(params: TreeParams, model: ErrorModel, seed: int,
                        samples: int, *, voting: bool = True,
                        tie_policy: str = "abstain",
                        prefer_indirect: bool = False,
                        root_lost: bool = True) -> ProtocolTrace:
    """Scalar replay of the first sampling chunk of mc_tree_indirect."""
    gen = _chunk_generator(seed, 0)
    draws = _tree_draws(gen, samples, params.branching)
    b = params.branching
    d = params.depth
    lost = [u < model.p_loss for u in draws["lost"]]
    flip = [u < model.p_local for u in draws["flip"]]
    coin = [u < 0.5 for u in draws["coin"]]

    def try_z(i: int, level: int, node: int, events: list[dict]
              ) -> tuple[bool, bool]:
        """(delivered, wrong) for the Z outcome of one vertex."""
        present = not lost[level][i, node]
        if level == d:
            events.append({"event": "leaf-z", "level": level, "node": node,
                           "present": present})
            return present, bool(flip[level][i, node])
        votes: list[bool] = []
        for c in range(b[level]):
            child = node * b[level] + c
            if lost[level + 1][i, child]:
                events.append({"event": "attempt", "level": level,
                               "child": child, "ok": False})
                continue
            parity = bool(flip[level + 1][i, child])
            ok = True
            if level + 1 < d:
                g = b[level + 1]
                for gc in range(g):
                    grand = child * g + gc
                    gok, gwrong = try_z(i, level + 2, grand, events)
                    if not gok:
                        ok = False
                        break
                    parity ^= gwrong
            events.append({"event": "attempt", "level": level,
                           "child": child, "ok": ok})
            if ok:
                votes.append(parity)
                if not voting:
                    break
        if votes:
            if voting:
                wrongs = sum(votes)
                m = len(votes)
                if 2 * wrongs > m:
                    deliver, wrong = True, True
                elif m % 2 == 0 and 2 * wrongs == m:
                    if tie_policy == "abstain":
                        deliver, wrong = False, False
                    elif tie_policy == "coin-flip":
                        deliver, wrong = True, bool(coin[level][i, node])
                    else:
                        deliver, wrong = True, True
                else:
                    deliver, wrong = True, False
            else:
                deliver, wrong = True, votes[0]
        else:
            deliver, wrong = False, False
        if level == 0 and root_lost:
            return deliver, wrong
        if prefer_indirect:
            if deliver:
                return True, wrong
            return present, bool(flip[level][i, node])
        if present:
            return True, bool(flip[level][i, node])
        return deliver, wrong

    all_events = []
    for i in range(samples):
        events: list[dict] = []
        delivered, wrong = try_z(i, 0, 0, events)
        events.append({"event": "root-outcome", "delivered": delivered,
                       "wrong": bool(delivered and wrong)})
        all_events.append(tuple(events))
    return ProtocolTrace("tree", seed, tuple(all_events))


# -- parity re-encoding ------------------------------------------------------


def _parity_chunk(args: tuple, seed: int, index: int, size: int) -> dict[str, int]:
    n_measured, p_any = args
    gen = _chunk_generator(seed, index)
    u = gen.random((size, n_measured))
    erred = (u < p_any).any(axis=1)
    return {"samples": size, "erred": int(erred.sum())}


def mc_parity_reencode(params: ParityParams, model: ErrorModel,
                       config: McConfig) -> RateReport:
    """Simulate one re-encoding round: the refreshed state is depolarized
    when any of the n + q - 1 measured qubits suffered a Pauli error."""
    counts = _run_chunked(_parity_chunk,
                          (params.n_measured, model.total_pauli),
                          config, cells_per_sample=params.n_measured)
    samples = counts["samples"]
    return RateReport(
        effective_loss=0.0,
        effective_error=_rate(counts["erred"], samples),
        method=MONTE_CARLO,
        error_given_success=_rate(counts["erred"], samples),
        ci_half_width=wilson_half_width(counts["erred"], samples,
                                        config.ci_confidence),
        seed=config.seed,
        samples=samples,
    )


# -- cross-engine differentials ----------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    """Result of a differential run: zero mismatches means agreement."""

    description: str
    patterns: int
    mismatches: int
    first_failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def _apply_error_sites(t: StabilizerTableau, n: int,
                       sites: list[tuple[int, str]]) -> StabilizerTableau:
    for q, cls in sites:
        t = t.apply_pauli(PauliString.single(n, q, cls))
    return t


def _chain_pattern_matches(n: int, sites: list[tuple[int, str]],
                           outcomes: list[int]) -> tuple[bool, str]:
    spec = graphs.linear(n)
    root = n - 1
    predicted = measure_x_chain(spec, sites, range(n - 1))

    def run(errors: list[tuple[int, str]]) -> StabilizerTableau:
        t = build_graph_tableau(spec)
        t = _apply_error_sites(t, n, errors)
        for q in range(n - 1):
            _, t = t.measure_x(q, forced=outcomes[q])
        return t

    erred = run(sites)
    clean = run([])
    axis, sign = clean.single_qubit_state(root)
    if predicted != "I" and predicted != axis:
        sign = -sign
    got_axis, got_sign = erred.single_qubit_state(root)
    okay = (got_axis, got_sign) == (axis, sign)
    detail = (f"chain n={n} sites={sites} outcomes={outcomes} "
              f"predicted={predicted} expected=({axis},{sign}) "
              f"got=({got_axis},{got_sign})")
    return okay, detail


def _chain_pattern_matches_dense(n: int, sites: list[tuple[int, str]],
                                 outcomes: list[int]) -> tuple[bool, str]:
    from .dense import DenseState

    spec = graphs.linear(n)
    predicted = measure_x_chain(spec, sites, range(n - 1))

    def run(errors: list[tuple[int, str]]) -> DenseState:
        state = DenseState.from_graph(spec)
        for q, cls in errors:
            state.apply_pauli(PauliString.single(n, q, cls))
        for q in range(n - 1):
            state.measure(q, "x", forced=outcomes[q])
        return state

    erred = run(sites)
    clean = run([])
    if predicted != "I":
        clean.apply_pauli(PauliString.single(n, n - 1, predicted))
    okay = erred.same_up_to_phase(clean)
    return okay, (f"dense chain n={n} sites={sites} outcomes={outcomes} "
                  f"predicted={predicted}")


def _complete_pattern_matches(n: int, erred_qubits: list[int], measured: int,
                              outcomes: list[int]) -> tuple[bool, str]:
    spec = graphs.complete(n)
    predicted = measure_z_complete(n, len(erred_qubits), measured)

    def run(errors: list[int]) -> StabilizerTableau:
        t = build_graph_tableau(spec)
        t = _apply_error_sites(t, n, [(q, "X") for q in errors])
        for q in range(measured):
            _, t = t.measure_z(q, forced=outcomes[q])
        return t

    erred = run(erred_qubits)
    clean = run([])
    if predicted == "Y":
        remaining = range(measured, n)
        clean = clean.apply_pauli(PauliString.z_on(n, remaining))
    okay = same_stabilizer_group(erred, clean, ignore_signs=False)
    detail = (f"complete n={n} errors={erred_qubits} measured={measured} "
              f"outcomes={outcomes} predicted={predicted}")
    return okay, detail


def mc_vs_tableau_differential(spec: graphs.GraphSpec, patterns: int,
                               seed: int, *, error_rate: float = 0.25,
                               dense_patterns: int = 0) -> AgreementReport:
    """Compare the closed-form byproduct rules against full tableau runs
    (and optionally dense runs) on random error patterns.

    Linear graphs exercise the X-measurement chain rule; complete graphs
    the Z-measurement Y-parity rule.  Zero mismatches is the pass
    condition.
    """
    if spec.kind not in ("linear", "complete"):
        raise ValueError("differential supports linear and complete graphs")
    if spec.n < 2:
        raise ValueError("need at least two qubits")
    rng = random.Random(seed)
    mismatches = 0
    first_failure = None
    total = patterns + dense_patterns
    for k in range(total):
        use_dense = k >= patterns
        if spec.kind == "linear":
            outcomes = [rng.getrandbits(1) for _ in range(spec.n - 1)]
            if rng.random() < 0.3:
                sites = [(rng.randrange(spec.n - 1), "Z")]
            else:
                sites = [(q, rng.choice("XYZ"))
                         for q in range(spec.n - 1) if rng.random() < error_rate]
            check = (_chain_pattern_matches_dense if use_dense
                     else _chain_pattern_matches)
            okay, detail = check(spec.n, sites, outcomes)
        else:
            measured = rng.randrange(1, spec.n - 1)
            outcomes = [rng.getrandbits(1) for _ in range(measured)]
            erred = [q for q in range(measured) if rng.random() < error_rate]
            okay, detail = _complete_pattern_matches(spec.n, erred, measured,
                                                     outcomes)
        if not okay:
            mismatches += 1
            if first_failure is None:
                first_failure = detail
    return AgreementReport(
        description=f"{spec.kind}({spec.n}) closed-form vs simulation",
        patterns=total, mismatches=mismatches, first_failure=first_failure)


def tableau_vs_dense(spec: graphs.GraphSpec, sequences: int, seed: int,
                     ops_per_sequence: int | None = None) -> AgreementReport:
    """Run random Pauli/measurement sequences on the tableau, mirroring
    them on the dense oracle, and check outcome probabilities plus every
    stabilizer expectation after each step."""
    from .dense import DenseState

    if spec.n > 14:
        raise ValueError("dense oracle limited to 14 qubits")
    rng = random.Random(seed)
    mismatches = 0
    first_failure = None
    budget = ops_per_sequence or (2 * spec.n)
    for _ in range(sequences):
        t = build_graph_tableau(spec)
        dense = DenseState.from_graph(spec)
        active = list(range(spec.n))
        for _ in range(budget):
            problem = None
            if not active or rng.random() < 0.35:
                q = rng.randrange(spec.n)
                cls = rng.choice("XYZ")
                p = PauliString.single(spec.n, q, cls)
                t = t.apply_pauli(p)
                dense.apply_pauli(p)
            else:
                q = rng.choice(active)
                basis = rng.choice("zx")
                measure = t.measure_z if basis == "z" else t.measure_x
                p_out0 = dense.outcome_probability(q, basis, 0)
                deterministic = p_out0 < 1e-9 or p_out0 > 1 - 1e-9
                outcome, t = measure(q, rng=rng)
                prob = dense.outcome_probability(q, basis, outcome)
                expected = (1.0 if deterministic else 0.5)
                if abs(prob - expected) > 1e-8:
                    problem = (f"outcome probability {prob} != {expected} "
                               f"for qubit {q} basis {basis}")
                dense.measure(q, basis, forced=outcome)
                active.remove(q)
            if problem is None:
                for i in range(spec.n):
                    e = dense.expectation(t.stabilizer(i))
                    if abs(e - 1.0) > 1e-8:
                        problem = (f"stabilizer {i} expectation {e} "
                                   f"after ops on {spec.kind}({spec.n})")
                        break
            if problem is not None:
                mismatches += 1
                if first_failure is None:
                    first_failure = problem
                break
    return AgreementReport(
        description=f"{spec.kind}({spec.n}) tableau vs dense",
        patterns=sequences, mismatches=mismatches, first_failure=first_failure)
