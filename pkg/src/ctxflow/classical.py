"""Hidden-variable oracle: exhaustive classical trajectories through the arms.

A classical particle occupies exactly one arm per time slice.  At a beam
splitter that consumes its arm it exits through exactly one of the two
output arms; otherwise it passes through unchanged.  The state space is
tiny, so trajectories are enumerated exhaustively rather than sampled.

This module deliberately shares nothing with the quantum machinery beyond
the :class:`~ctxflow.network.Network` data type: it is the independent
check of the combinatorial premise behind the inequality
P(f) <= P(D1) + P(D2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import Network, PathLabel

#: The hidden-variable premise mechanized here: each particle follows a
#: single definite route and always exits the output port matching its
#: input port.  The premise is documented, not justified.
PORT_ASSUMPTION = (
    "each particle follows one definite sequence of arms and exits the "
    "output port with the same index as its input port"
)


@dataclass(frozen=True)
class Trajectory:
    """One definite route: the arm occupied at each of the six time slices."""

    input: PathLabel
    arms: tuple[PathLabel, ...]
    output: PathLabel

    def visits(self, label: PathLabel) -> bool:
        return label in self.arms

    @property
    def matching_port(self) -> bool:
        ins, outs = self.input.port_index, self.output.port_index
        return ins is not None and ins == outs

    @property
    def route(self) -> str:
        """Hyphenated display form with repeats collapsed, e.g. ``1-f-D2-1``."""
        hops: list[PathLabel] = []
        for arm in self.arms:
            if not hops or hops[-1] != arm:
                hops.append(arm)
        return "-".join(arm.display for arm in hops)


def enumerate_trajectories(net: Network) -> list[Trajectory]:
    """Every route reachable by binary choices at the beam splitters.

    Deterministic order: inputs in slot order, reflected branch before
    transmitted at every splitter.
    """
    result: list[Trajectory] = []

    def walk(path: list[PathLabel], depth: int) -> None:
        if depth == len(net.stages):
            result.append(Trajectory(path[0], tuple(path), path[-1]))
            return
        st = net.stages[depth]
        arm = path[-1]
        if arm in (st.in_a, st.in_b):
            for branch in (st.out_a, st.out_b):
                walk(path + [branch], depth + 1)
        else:
            walk(path + [arm], depth + 1)

    for start in net.slice_order(0):
        walk([start], 0)
    return result


@dataclass(frozen=True)
class TrajectoryReport:
    """Trajectory census plus the matching-port-via-f claim."""

    all_trajectories: tuple[Trajectory, ...]
    via_f_same_port: tuple[Trajectory, ...]
    claim_holds: bool
    assumption: str = PORT_ASSUMPTION


def verify_classical_claim(net: Network) -> TrajectoryReport:
    """Check that every matching-port trajectory through f passes D1 or D2.

    If that holds, any assignment of nonnegative trajectory weights that
    sends every particle to its matching port forces
    P(f) <= P(D1) + P(D2).
    """
    trajectories = tuple(enumerate_trajectories(net))
    via_f = tuple(
        t for t in trajectories if t.matching_port and t.visits(PathLabel.F)
    )
    holds = all(t.visits(PathLabel.D1) or t.visits(PathLabel.D2) for t in via_f)
    return TrajectoryReport(trajectories, via_f, holds)
