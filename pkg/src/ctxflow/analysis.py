"""Quantum statistics of the network.

Born-rule path probabilities per context, weak values (the conditional
currents W(i|o)), current decompositions and continuity residuals, the
noncontextuality inequality P(f) <= P(D1) + P(D2), and seeded Monte-Carlo
detection sampling.

All functions are pure; sampling carries no hidden global state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .hilbert import TOL_NORM, TOL_ZERO, StateVector, inner_product
from .network import Context, Network, PathLabel, contexts, path_state

#: Tolerance for current-conservation and decomposition identities.
TOL_CONTINUITY = 1e-9


class UndefinedPostselectionError(ValueError):
    """A weak value was requested for an outcome with (near-)zero probability."""


def nx_state() -> StateVector:
    """The preset input superposition (2|1> + 2|2> + |3>) / 3."""
    return StateVector(np.array([2 / 3, 2 / 3, 1 / 3]))


def symmetric_state() -> StateVector:
    """(|1> + |2> + |3>) / sqrt(3): the unique state (up to phase) with
    vanishing detection probability in both D1 and D2."""
    return StateVector(np.full(3, 1 / np.sqrt(3)))


def _require_normalized(state: StateVector) -> None:
    if abs(state.norm_squared() - 1.0) > TOL_NORM:
        raise ValueError("input state must be normalized to unit norm")


def path_probability(state: StateVector, net: Network, label: PathLabel) -> float:
    """Born probability |<label|state>|^2 of detecting the photon in an arm."""
    _require_normalized(state)
    return abs(inner_product(path_state(net, label), state)) ** 2


def context_probabilities(
    state: StateVector, net: Network, ctx: Context
) -> dict[PathLabel, float]:
    """Born probabilities of the three context members; they sum to one."""
    _require_normalized(state)
    return {arm: abs(inner_product(path_state(net, arm), state)) ** 2 for arm in ctx.members}


def weak_value(
    state: StateVector, net: Network, intermediate: PathLabel, outcome: PathLabel
) -> complex:
    """Conditional current W(i|o) = <o|i><i|state> / <o|state>.

    Defined only when the postselection outcome has probability above
    ``TOL_ZERO``; otherwise raises :class:`UndefinedPostselectionError`.
    """
    _require_normalized(state)
    ket_o = path_state(net, outcome)
    ket_i = path_state(net, intermediate)
    denom = inner_product(ket_o, state)
    if abs(denom) ** 2 <= TOL_ZERO:
        raise UndefinedPostselectionError(
            f"weak value conditioned on {outcome.display} is undefined: "
            "outcome probability is zero"
        )
    return inner_product(ket_o, ket_i) * inner_product(ket_i, state) / denom


@dataclass(frozen=True, eq=False)
class WeakValueRecord:
    """One conditional current W(i|o)."""

    intermediate: PathLabel
    outcome: PathLabel
    value: complex
    input_state: StateVector


def weak_value_table(state: StateVector, net: Network) -> list[WeakValueRecord]:
    """W(i|o) for every arm i and every final outcome o with nonzero probability."""
    _require_normalized(state)
    final = contexts(net)[-1]
    valid = [
        o for o in final.members
        if abs(inner_product(path_state(net, o), state)) ** 2 > TOL_ZERO
    ]
    return [
        WeakValueRecord(arm, o, weak_value(state, net, arm, o), state)
        for arm in net.arms
        for o in valid
    ]


@dataclass(frozen=True)
class CurrentTerm:
    outcome: PathLabel
    weak_value: complex
    probability: float


@dataclass(frozen=True)
class CurrentDecomposition:
    """P(i) written as sum_o W(i|o) P(o) over the outcomes of one context.

    Terms with outcome probability at or below ``TOL_ZERO`` (undefined weak
    value) and terms with vanishing weak value are omitted; neither kind
    contributes to the total.
    """

    intermediate: PathLabel
    terms: tuple[CurrentTerm, ...]
    total: complex


def current_decomposition(
    state: StateVector, net: Network, intermediate: PathLabel, ctx: Context
) -> CurrentDecomposition:
    _require_normalized(state)
    terms = []
    total = 0j
    for outcome in ctx.members:
        prob = path_probability(state, net, outcome)
        if prob <= TOL_ZERO:
            continue
        w = weak_value(state, net, intermediate, outcome)
        if abs(w) <= TOL_ZERO:
            continue
        terms.append(CurrentTerm(outcome, w, prob))
        total += w * prob
    return CurrentDecomposition(intermediate, tuple(terms), total)


@dataclass(frozen=True)
class ContinuityRecord:
    """Conditional currents through one stage for one final outcome."""

    stage_index: int
    outcome: PathLabel
    inflow: complex
    outflow: complex

    @property
    def residual(self) -> float:
        return abs(self.inflow - self.outflow)


@dataclass(frozen=True)
class ContinuityReport:
    records: tuple[ContinuityRecord, ...]

    @property
    def max_residual(self) -> float:
        return max((rec.residual for rec in self.records), default=0.0)


def continuity_check(state: StateVector, net: Network) -> ContinuityReport:
    """Current conservation across every stage, per final outcome.

    For each stage and each final outcome o with nonzero probability,
    W(in_a|o) + W(in_b|o) must equal W(out_a|o) + W(out_b|o): both sums are
    <o|Pi|state>/<o|state> for the same two-dimensional projector Pi.
    """
    _require_normalized(state)
    final = contexts(net)[-1]
    records = []
    for st in net.stages:
        for outcome in final.members:
            if path_probability(state, net, outcome) <= TOL_ZERO:
                continue
            inflow = weak_value(state, net, st.in_a, outcome) + weak_value(
                state, net, st.in_b, outcome
            )
            outflow = weak_value(state, net, st.out_a, outcome) + weak_value(
                state, net, st.out_b, outcome
            )
            records.append(ContinuityRecord(st.stage_index, outcome, inflow, outflow))
    return ContinuityReport(tuple(records))


@dataclass(frozen=True)
class InequalityReport:
    """The three probabilities entering P(f) <= P(D1) + P(D2)."""

    p_f: float
    p_d1: float
    p_d2: float
    violation: float
    violated: bool


def ks_inequality(state: StateVector, net: Network) -> InequalityReport:
    """Evaluate the noncontextuality inequality P(f) <= P(D1) + P(D2)."""
    _require_normalized(state)
    p_f = path_probability(state, net, PathLabel.F)
    p_d1 = path_probability(state, net, PathLabel.D1)
    p_d2 = path_probability(state, net, PathLabel.D2)
    violation = p_f - p_d1 - p_d2
    return InequalityReport(p_f, p_d1, p_d2, violation, violation > TOL_ZERO)


@dataclass(frozen=True, eq=False)
class DetectionSample:
    """Counts from repeated single-photon detections in one context."""

    context: Context
    shots: int
    seed: int
    counts: Mapping[PathLabel, int]


def sample_detections(
    state: StateVector, net: Network, ctx: Context, shots: int, seed: int
) -> DetectionSample:
    """Draw ``shots`` categorical detections from the context probabilities.

    Inverse-CDF sampling with a counter-based generator (Philox): identical
    (state, ctx, shots, seed) inputs yield identical counts.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = context_probabilities(state, net, ctx)
    p = np.array([probs[arm] for arm in ctx.members], dtype=np.float64)
    cum = np.cumsum(p / p.sum())
    cum[-1] = 1.0
    rng = np.random.Generator(np.random.Philox(key=seed))
    draws = np.searchsorted(cum, rng.random(shots), side="right")
    tallies = np.bincount(draws, minlength=len(ctx.members))
    counts = {arm: int(n) for arm, n in zip(ctx.members, tallies)}
    return DetectionSample(ctx, shots, seed, counts)
