"""The three-path interferometer as data: arms, stages, contexts, unitaries.

Conventions
-----------
* A beam splitter of reflectivity R mixing inputs ``(in_a, in_b)`` into
  outputs ``(out_a, out_b)`` transfers amplitudes all-real as::

      out_a <-  sqrt(R)   * in_a + sqrt(1-R) * in_b
      out_b <-  sqrt(1-R) * in_a - sqrt(R)   * in_b

  The ordering of the input and output pairs per stage is part of the
  canonical network's contract; this is the convention that reproduces the
  standard path kets of the five-context interferometer.
* Arm kets: input arms are the computational basis states (times any arm
  phase), and every later arm's ket is built recursively from its parents
  with the same coefficients.  Detection probability in arm x is then
  |<x|psi>|^2 for the *input* state psi, at any time slice.
* Phase shifters: an optional phase per arm, applied where the arm is
  created.  A phase phi on arm x multiplies the physical amplitude in x by
  exp(i*phi); the arm ket therefore carries exp(-i*phi).
* Coordinates used by :func:`stage_unitary`: each time slice assigns its
  three live arms to vector slots.  Arms named ``IN_k`` / ``OUT_k`` occupy
  slot k; the remaining arms fill the free slots in order of creation
  (reflected output before transmitted).  A stage unitary maps slice
  coordinates to next-slice coordinates, so the product of the five stage
  unitaries of the zero-phase canonical network is the identity matrix and
  the slot amplitude of arm x after stage-by-stage propagation equals
  <x|psi>.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .formatting import canonical_dumps
from .hilbert import DIM, Operator3, StateVector

N_STAGES = 5


class UnknownPathError(ValueError):
    """A path label could not be parsed or is not an arm of the network."""


class BadStageError(IndexError):
    """Stage index outside 1..5."""


class PathLabel(enum.Enum):
    """Closed set of arm labels of the three-path interferometer."""

    IN1 = "IN1"
    IN2 = "IN2"
    IN3 = "IN3"
    S1 = "S1"
    D1 = "D1"
    F = "F"
    P1 = "P1"
    S2 = "S2"
    P2 = "P2"
    D2 = "D2"
    OUT1 = "OUT1"
    OUT2 = "OUT2"
    OUT3 = "OUT3"

    @property
    def display(self) -> str:
        """Display name: numbered ports show their digit, F shows as 'f'."""
        return _DISPLAY[self]

    @property
    def port_index(self) -> int | None:
        """1-based port number for IN/OUT arms, None for inner arms."""
        return _PORT.get(self)

    @classmethod
    def parse(cls, text: str) -> PathLabel:
        name = text.strip()
        if name == "f":
            return cls.F
        try:
            return cls(name)
        except ValueError:
            raise UnknownPathError(f"unknown path label {text!r}") from None


_DISPLAY = {
    PathLabel.IN1: "1",
    PathLabel.IN2: "2",
    PathLabel.IN3: "3",
    PathLabel.F: "f",
    PathLabel.OUT1: "1",
    PathLabel.OUT2: "2",
    PathLabel.OUT3: "3",
}
_DISPLAY.update({lab: lab.value for lab in PathLabel if lab not in _DISPLAY})

_PORT = {
    PathLabel.IN1: 1,
    PathLabel.IN2: 2,
    PathLabel.IN3: 3,
    PathLabel.OUT1: 1,
    PathLabel.OUT2: 2,
    PathLabel.OUT3: 3,
}

_INPUT_ARMS = (PathLabel.IN1, PathLabel.IN2, PathLabel.IN3)


@dataclass(frozen=True)
class BeamSplitterStage:
    """One beam splitter: two named inputs, two named outputs, a reflectivity."""

    in_a: PathLabel
    in_b: PathLabel
    out_a: PathLabel
    out_b: PathLabel
    reflectivity: float
    stage_index: int

    def __post_init__(self):
        if self.in_a == self.in_b:
            raise ValueError(f"stage {self.stage_index}: input arms must differ")
        if self.out_a == self.out_b:
            raise ValueError(f"stage {self.stage_index}: output arms must differ")
        if not (0.0 < self.reflectivity < 1.0):
            raise ValueError(
                f"stage {self.stage_index}: reflectivity must lie strictly in (0, 1), "
                f"got {self.reflectivity}"
            )
        if not 1 <= self.stage_index <= N_STAGES:
            raise ValueError(f"stage index must be 1..{N_STAGES}, got {self.stage_index}")

    @property
    def r(self) -> float:
        """Reflected amplitude sqrt(R)."""
        return float(np.sqrt(self.reflectivity))

    @property
    def t(self) -> float:
        """Transmitted amplitude sqrt(1-R)."""
        return float(np.sqrt(1.0 - self.reflectivity))


@dataclass(frozen=True)
class Context:
    """A set of three mutually orthogonal arm states measurable together."""

    name: str
    members: tuple[PathLabel, PathLabel, PathLabel]

    @property
    def member_set(self) -> frozenset[PathLabel]:
        return frozenset(self.members)


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable five-stage interferometer; derived data is computed once.

    ``phases`` maps arm labels to phase-shifter angles in radians (missing
    arms default to zero).
    """

    stages: tuple[BeamSplitterStage, ...]
    phases: Mapping[PathLabel, float] = field(default_factory=dict)

    def __post_init__(self):
        stages = tuple(self.stages)
        if len(stages) != N_STAGES:
            raise ValueError(f"network must have exactly {N_STAGES} stages, got {len(stages)}")
        for pos, st in enumerate(stages, start=1):
            if st.stage_index != pos:
                raise ValueError(f"stage at position {pos} carries index {st.stage_index}")
        object.__setattr__(self, "stages", stages)

        creation: dict[PathLabel, int] = {arm: i for i, arm in enumerate(_INPUT_ARMS)}
        live = set(_INPUT_ARMS)
        parallel: list[PathLabel] = []
        slice_sets: list[set[PathLabel]] = [set(live)]
        for st in stages:
            if st.in_a not in live or st.in_b not in live:
                raise ValueError(
                    f"stage {st.stage_index}: inputs {st.in_a.value}, {st.in_b.value} "
                    "must both be live in the preceding slice"
                )
            for out in (st.out_a, st.out_b):
                if out in creation:
                    raise ValueError(
                        f"stage {st.stage_index}: output arm {out.value} already exists"
                    )
            (through,) = live - {st.in_a, st.in_b}
            parallel.append(through)
            creation[st.out_a] = len(creation)
            creation[st.out_b] = len(creation)
            live = {through, st.out_a, st.out_b}
            slice_sets.append(set(live))

        phases = dict(self.phases)
        for arm, phi in phases.items():
            if not isinstance(arm, PathLabel):
                raise TypeError("phase keys must be PathLabel values")
            if arm not in creation:
                raise ValueError(f"phase given for {arm.value}, which is not an arm of this network")
            if not np.isfinite(phi):
                raise ValueError(f"phase for {arm.value} must be finite")
        object.__setattr__(self, "phases", phases)

        slices = tuple(_assign_slots(s, creation) for s in slice_sets)
        object.__setattr__(self, "_slices", slices)
        object.__setattr__(self, "_parallel", tuple(parallel))
        object.__setattr__(self, "_creation", creation)
        object.__setattr__(self, "_states", self._build_states())

    def _phase_factor(self, arm: PathLabel) -> complex:
        return complex(np.exp(-1j * self.phases.get(arm, 0.0)))

    def _build_states(self) -> dict[PathLabel, np.ndarray]:
        states: dict[PathLabel, np.ndarray] = {}
        for k, arm in enumerate(_INPUT_ARMS):
            ket = np.zeros(DIM, dtype=np.complex128)
            ket[k] = self._phase_factor(arm)
            states[arm] = ket
        for st in self.stages:
            a, b = states[st.in_a], states[st.in_b]
            states[st.out_a] = self._phase_factor(st.out_a) * (st.r * a + st.t * b)
            states[st.out_b] = self._phase_factor(st.out_b) * (st.t * a - st.r * b)
        for ket in states.values():
            ket.setflags(write=False)
        return states

    @property
    def arm_layout(self) -> tuple[frozenset[PathLabel], ...]:
        """Live arms per time slice (slice 0 = before stage 1)."""
        return tuple(frozenset(s) for s in self._slices)

    @property
    def arms(self) -> tuple[PathLabel, ...]:
        """All 13 arms in order of creation."""
        return tuple(sorted(self._creation, key=self._creation.get))

    @property
    def is_zero_phase(self) -> bool:
        return all(phi == 0.0 for phi in self.phases.values())

    def slice_order(self, index: int) -> tuple[PathLabel, ...]:
        """Slot order of the live arms at time slice ``index`` (0..5)."""
        return self._slices[index]

    def has_arm(self, label: PathLabel) -> bool:
        return label in self._creation


def _assign_slots(
    arms: Iterable[PathLabel], creation: Mapping[PathLabel, int]
) -> tuple[PathLabel, ...]:
    ordered = sorted(arms, key=creation.get)
    slots: list[PathLabel | None] = [None] * DIM
    rest: list[PathLabel] = []
    for arm in ordered:
        port = arm.port_index
        if port is not None and slots[port - 1] is None:
            slots[port - 1] = arm
        else:
            rest.append(arm)
    free = iter(i for i in range(DIM) if slots[i] is None)
    for arm in rest:
        slots[next(free)] = arm
    return tuple(slots)  # type: ignore[arg-type]


def canonical_network(phases: Mapping[PathLabel, float] | None = None) -> Network:
    """The fixed five-stage network with reflectivities 1/2, 1/3, 1/4, 1/3, 1/2."""
    L = PathLabel
    stages = (
        BeamSplitterStage(L.IN2, L.IN3, L.S1, L.D1, 1 / 2, 1),
        BeamSplitterStage(L.IN1, L.D1, L.F, L.P1, 1 / 3, 2),
        BeamSplitterStage(L.S1, L.P1, L.S2, L.P2, 1 / 4, 3),
        BeamSplitterStage(L.F, L.P2, L.OUT2, L.D2, 1 / 3, 4),
        BeamSplitterStage(L.S2, L.D2, L.OUT1, L.OUT3, 1 / 2, 5),
    )
    return Network(stages, dict(phases) if phases else {})


def path_state(net: Network, label: PathLabel) -> StateVector:
    """The arm's ket expressed in the computational basis."""
    try:
        return StateVector(net._states[label])
    except KeyError:
        raise UnknownPathError(f"{label.value} is not an arm of this network") from None


def parallel_arm(net: Network, stage_index: int) -> PathLabel:
    """The arm that passes stage ``stage_index`` untouched."""
    _check_stage(stage_index)
    return net._parallel[stage_index - 1]


def _check_stage(stage_index: int) -> None:
    if not 1 <= stage_index <= N_STAGES:
        raise BadStageError(f"stage index must be 1..{N_STAGES}, got {stage_index}")


def stage_unitary(net: Network, stage_index: int) -> Operator3:
    """Transfer matrix of one stage in slice coordinates.

    Entry (i, j) is <x_i|y_j> for slot-i arm x of the slice after the stage
    and slot-j arm y of the slice before it.  Identity on the parallel
    arm's amplitude; the two fresh arms receive their inputs with the
    beam-splitter coefficients and any arm phases as diagonal factors.
    """
    _check_stage(stage_index)
    before = net._slices[stage_index - 1]
    after = net._slices[stage_index]
    m = np.empty((DIM, DIM), dtype=np.complex128)
    for i, x in enumerate(after):
        for j, y in enumerate(before):
            m[i, j] = np.vdot(net._states[x], net._states[y])
    return Operator3(m)


def full_unitary(net: Network) -> Operator3:
    """Product of the five stage unitaries (stage 1 applied first)."""
    total = Operator3.identity()
    for k in range(1, N_STAGES + 1):
        total = Operator3(stage_unitary(net, k).entries @ total.entries)
    return total


def contexts(net: Network) -> list[Context]:
    """The six ordered measurement contexts, one per time slice.

    Consecutive contexts share exactly one member; the first is the input
    context and the last the output context.
    """
    result = []
    last = len(net._slices) - 1
    for idx, members in enumerate(net._slices):
        if idx == 0:
            name = "input"
        elif idx == last:
            name = "output"
        else:
            name = "-".join(arm.display for arm in members)
        result.append(Context(name, members))
    return result


def find_context(net: Network, name: str) -> Context:
    """Resolve ``name`` to a context: 'input', 'output', a 1-based index,
    or a hyphenated member list in any order (e.g. 'S1-f-P1')."""
    ctxs = contexts(net)
    text = name.strip()
    for ctx in ctxs:
        if ctx.name == text:
            return ctx
    if text.isdigit():
        idx = int(text)
        if 1 <= idx <= len(ctxs):
            return ctxs[idx - 1]
        raise UnknownPathError(f"context index must be 1..{len(ctxs)}, got {text}")
    parts = [p for p in text.split("-") if p]
    if len(parts) == DIM:
        wanted = sorted(p.lower() for p in parts)
        for ctx in ctxs:
            if sorted(arm.display.lower() for arm in ctx.members) == wanted:
                return ctx
    raise UnknownPathError(f"unknown context {name!r}")


def propagate(net: Network, state: StateVector) -> list[dict[PathLabel, complex]]:
    """Arm amplitudes per time slice via the beam-splitter recurrence.

    Purely amplitude-based (no arm kets, no stage matrices); serves as an
    independent cross-check of the inner-product probabilities.
    """
    amps: dict[PathLabel, complex] = {}
    for k, arm in enumerate(_INPUT_ARMS):
        amps[arm] = complex(np.exp(1j * net.phases.get(arm, 0.0))) * complex(
            state.amplitudes[k]
        )
    slices = [dict(amps)]
    for st in net.stages:
        a, b = amps[st.in_a], amps[st.in_b]
        through = parallel_arm(net, st.stage_index)
        amps = {
            through: amps[through],
            st.out_a: complex(np.exp(1j * net.phases.get(st.out_a, 0.0))) * (st.r * a + st.t * b),
            st.out_b: complex(np.exp(1j * net.phases.get(st.out_b, 0.0))) * (st.t * a - st.r * b),
        }
        slices.append(dict(amps))
    return slices


def network_to_json(net: Network) -> dict:
    """JSON document form: ``{"stages": [{"in": [...], "out": [...], "R": ...}], "phases": {...}}``."""
    return {
        "stages": [
            {
                "in": [st.in_a.value, st.in_b.value],
                "out": [st.out_a.value, st.out_b.value],
                "R": float(st.reflectivity),
            }
            for st in net.stages
        ],
        "phases": {arm.value: float(phi) for arm, phi in sorted(net.phases.items(), key=lambda kv: kv[0].value) if phi != 0.0},
    }


def network_from_json(doc: Mapping) -> Network:
    """Inverse of :func:`network_to_json`; raises ValueError on malformed input."""
    try:
        raw_stages = doc["stages"]
    except (TypeError, KeyError):
        raise ValueError("network document must contain a 'stages' list") from None
    stages = []
    for pos, entry in enumerate(raw_stages, start=1):
        try:
            in_a, in_b = (PathLabel.parse(s) for s in entry["in"])
            out_a, out_b = (PathLabel.parse(s) for s in entry["out"])
            refl = float(entry["R"])
        except (TypeError, KeyError, ValueError) as exc:
            if isinstance(exc, UnknownPathError):
                raise
            raise ValueError(f"malformed stage entry at position {pos}: {entry!r}") from None
        stages.append(BeamSplitterStage(in_a, in_b, out_a, out_b, refl, pos))
    phases = {
        PathLabel.parse(key): float(val) for key, val in dict(doc.get("phases") or {}).items()
    }
    return Network(tuple(stages), phases)


def load_network(path: str) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_json(json.load(fh))


def network_hash(net: Network) -> str:
    """Stable sha256 over the canonical JSON form of the network."""
    blob = canonical_dumps(network_to_json(net)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
