"""Command-line surface.

Subcommands: paths, probs, weak-values, inequality, continuity, classical,
sample, verify.  Exit status 0 on success, 1 on verification failure,
2 on usage errors.

JSON reports share one envelope: ``{"command", "state", "network_hash",
"result"}`` with canonical key order and floats at 12 significant digits,
so emitted JSON round-trips byte-identically through a parser.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

import click
import numpy as np

from . import analysis, classical, verification
from .formatting import (
    canonical_dumps,
    complex_pair,
    csv_complex,
    csv_text,
    format_complex,
    format_real,
    render_table,
)
from .hilbert import TOL_ZERO, StateVector, ZeroVectorError, normalize
from .network import (
    Network,
    UnknownPathError,
    canonical_network,
    contexts,
    find_context,
    load_network,
    network_hash,
)

#: Inline states may deviate from unit norm by at most this much unless
#: --normalize is passed.
NORM_GATE = 1e-6


class StateParseError(ValueError):
    """Malformed state specification."""


class NotNormalizedError(ValueError):
    """Inline state norm deviates from 1 beyond the gate without --normalize."""


# ----------------------------------------------------------------- parsing


def _parse_real(text: str) -> float:
    t = text.strip()
    if not t:
        raise StateParseError("empty number")
    try:
        if "/" in t:
            num, _, den = t.partition("/")
            return float(Fraction(num) / Fraction(den))
        return float(t)
    except (ValueError, ZeroDivisionError):
        raise StateParseError(f"cannot parse number {text!r}") from None


def _parse_imag_body(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return _parse_real(text)


def parse_complex(token: str) -> complex:
    """Parse one amplitude: 'a+bi' with fraction ('p/q') or decimal parts."""
    t = token.strip().replace(" ", "")
    if not t:
        raise StateParseError("empty amplitude")
    if t[-1] not in "ij":
        return complex(_parse_real(t), 0.0)
    body = t[:-1]
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE/":
            return complex(_parse_real(body[:k]), _parse_imag_body(body[k:]))
    return complex(0.0, _parse_imag_body(body))


def _state_from_values(values, allow_unnormalized: bool) -> StateVector:
    try:
        vec = StateVector(np.array(values, dtype=complex))
    except (ValueError, TypeError) as exc:
        raise StateParseError(f"bad state amplitudes: {exc}") from None
    if vec.norm_squared() <= TOL_ZERO:
        raise ZeroVectorError("state amplitudes are all (near-)zero")
    if not allow_unnormalized and abs(vec.norm() - 1.0) > NORM_GATE:
        raise NotNormalizedError(
            f"state norm {vec.norm():.9g} deviates from 1 by more than {NORM_GATE:g}; "
            "pass --normalize to rescale"
        )
    return normalize(vec)


def _json_entry_to_complex(entry) -> complex:
    if isinstance(entry, str):
        return parse_complex(entry)
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, list) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise StateParseError(f"bad amplitude entry {entry!r} (use a literal string or [re, im])")


def parse_state(spec: str, allow_unnormalized: bool = False) -> StateVector:
    """Resolve a state source: preset name, inline amplitude list, or JSON file.

    Presets: ``nx`` and ``symmetric``.  Inline: three comma-separated
    complex literals.  File: JSON with an ``amplitudes`` list of three
    entries (literal strings or [re, im] pairs).  The returned state is
    always normalized.
    """
    text = spec.strip()
    if text == "nx":
        return analysis.nx_state()
    if text == "symmetric":
        return analysis.symmetric_state()
    if "," in text:
        parts = text.split(",")
        if len(parts) != 3:
            raise StateParseError(f"expected 3 amplitudes, got {len(parts)}")
        return _state_from_values([parse_complex(p) for p in parts], allow_unnormalized)
    if os.path.exists(text):
        try:
            with open(text, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            entries = doc["amplitudes"]
        except (OSError, json.JSONDecodeError, TypeError, KeyError) as exc:
            raise StateParseError(f"cannot read state file {text!r}: {exc}") from None
        if not isinstance(entries, list) or len(entries) != 3:
            raise StateParseError("state file must hold an 'amplitudes' list of 3 entries")
        return _state_from_values(
            [_json_entry_to_complex(e) for e in entries], allow_unnormalized
        )
    raise StateParseError(
        f"cannot interpret state {spec!r}: not a preset (nx, symmetric), "
        "an inline amplitude list, or an existing file"
    )


# ----------------------------------------------------------------- plumbing


def _network_option(f):
    return click.option(
        "--network",
        "network_path",
        type=click.Path(exists=True, dir_okay=False),
        envvar="CTXFLOW_NETWORK",
        default=None,
        help="JSON network file (default: the built-in canonical network; "
        "CTXFLOW_NETWORK is honored).",
    )(f)


def _format_option(f):
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(["text", "json", "csv"]),
        default="text",
        show_default=True,
        help="Output format.",
    )(f)


def _state_options(f):
    f = click.option("--normalize", "do_normalize", is_flag=True,
                     help="Rescale a non-unit input state.")(f)
    return click.option(
        "--state",
        "state_spec",
        required=True,
        help="Preset (nx, symmetric), inline amplitudes like '2/3,2/3,1/3' or "
        "'0.5+0.5i,0.5-0.5i,0', or a JSON file.",
    )(f)


def _load_net(network_path: str | None) -> Network:
    if network_path is None:
        return canonical_network()
    try:
        return load_network(network_path)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot load network {network_path!r}: {exc}") from None


def _resolve_state(spec: str, do_normalize: bool) -> StateVector:
    try:
        return parse_state(spec, allow_unnormalized=do_normalize)
    except (StateParseError, NotNormalizedError, ZeroVectorError) as exc:
        raise click.UsageError(str(exc)) from None


def _resolve_context(net: Network, name: str):
    try:
        return find_context(net, name)
    except UnknownPathError as exc:
        raise click.UsageError(str(exc)) from None


def _state_json(state: StateVector | None):
    if state is None:
        return None
    return {"amplitudes": [complex_pair(a) for a in state]}


def _emit(fmt, command, state, net, result, text_fn, csv_fn) -> None:
    if fmt == "json":
        report = {
            "command": command,
            "state": _state_json(state),
            "network_hash": network_hash(net),
            "result": result,
        }
        click.echo(canonical_dumps(report))
    elif fmt == "csv":
        click.echo(csv_text(*csv_fn()))
    else:
        click.echo(text_fn())


def _segment(net: Network, arm) -> str:
    if arm in net.slice_order(0):
        return "in"
    if arm in net.slice_order(len(net.stages)):
        return "out"
    return "inner"


def _arms_by_segment(net: Network):
    inner = [a for a in net.arms if _segment(net, a) == "inner"]
    return list(net.slice_order(0)), inner, list(net.slice_order(len(net.stages)))


# ----------------------------------------------------------------- commands


@click.group()
@click.version_option(package_name="ctxflow")
def main():
    """Three-path interferometer simulator and analysis toolkit."""


@main.command("paths")
@_network_option
@_format_option
def paths_cmd(network_path, fmt):
    """Show the stages and every arm's ket in the computational basis."""
    from .network import path_state

    net = _load_net(network_path)
    stages = [
        {
            "index": st.stage_index,
            "in": [st.in_a.value, st.in_b.value],
            "out": [st.out_a.value, st.out_b.value],
            "reflectivity": st.reflectivity,
        }
        for st in net.stages
    ]
    kets = {
        arm.value: [complex_pair(a) for a in path_state(net, arm)] for arm in net.arms
    }
    result = {"stages": stages, "path_states": kets}

    def as_text():
        lines = ["stages:"]
        for st in net.stages:
            lines.append(
                f"  {st.stage_index}: {st.in_a.display} + {st.in_b.display} -> "
                f"{st.out_a.display} + {st.out_b.display}   R = {format_real(st.reflectivity)}"
            )
        rows = []
        for seg_name, arms in zip(("in", "inner", "out"), _arms_by_segment(net)):
            for arm in arms:
                comps = [format_complex(a) for a in path_state(net, arm)]
                rows.append([arm.display, seg_name] + comps)
        lines.append("")
        lines.append(render_table(["arm", "segment", "|1>", "|2>", "|3>"], rows))
        return "\n".join(lines)

    def as_csv():
        rows = []
        for seg_name, arms in zip(("in", "inner", "out"), _arms_by_segment(net)):
            for arm in arms:
                rows.append(
                    [arm.display, seg_name] + [csv_complex(a) for a in path_state(net, arm)]
                )
        return ["arm", "segment", "c1", "c2", "c3"], rows

    _emit(fmt, "paths", None, net, result, as_text, as_csv)


@main.command("probs")
@_state_options
@_network_option
@_format_option
@click.option("--context", "context_name", default=None,
              help="Restrict to one context (name, members like 'S1-f-P1', or index 1-6).")
def probs_cmd(state_spec, do_normalize, network_path, fmt, context_name):
    """Detection probabilities per measurement context."""
    net = _load_net(network_path)
    state = _resolve_state(state_spec, do_normalize)
    ctxs = [(_resolve_context(net, context_name))] if context_name else contexts(net)
    tables = [
        {
            "name": ctx.name,
            "probabilities": {
                arm.display: p
                for arm, p in analysis.context_probabilities(state, net, ctx).items()
            },
        }
        for ctx in ctxs
    ]
    result = {"contexts": tables}

    def as_text():
        blocks = []
        for ctx in ctxs:
            probs = analysis.context_probabilities(state, net, ctx)
            rows = [[arm.display, format_real(probs[arm])] for arm in ctx.members]
            blocks.append(f"context {ctx.name}\n" + render_table(["path", "P"], rows))
        return "\n\n".join(blocks)

    def as_csv():
        rows = []
        for ctx in ctxs:
            probs = analysis.context_probabilities(state, net, ctx)
            rows += [[ctx.name, arm.display, f"{probs[arm]:.12g}"] for arm in ctx.members]
        return ["context", "path", "probability"], rows

    _emit(fmt, "probs", state, net, result, as_text, as_csv)


@main.command("weak-values")
@_state_options
@_network_option
@_format_option
def weak_values_cmd(state_spec, do_normalize, network_path, fmt):
    """Conditional currents W(i|o) for every arm and final outcome."""
    net = _load_net(network_path)
    state = _resolve_state(state_spec, do_normalize)
    records = analysis.weak_value_table(state, net)
    outcomes = []
    for rec in records:
        if rec.outcome not in outcomes:
            outcomes.append(rec.outcome)
    values = {(rec.intermediate, rec.outcome): rec.value for rec in records}

    rows_json = []
    for seg_name, arms in zip(("in", "inner", "out"), _arms_by_segment(net)):
        for arm in arms:
            rows_json.append(
                {
                    "arm": arm.display,
                    "segment": seg_name,
                    "values": {o.display: complex_pair(values[(arm, o)]) for o in outcomes},
                }
            )
    result = {"outcomes": [o.display for o in outcomes], "rows": rows_json}

    def as_text():
        header = ["arm", "segment"] + [f"W(.|{o.display})" for o in outcomes]
        rows = []
        for seg_name, arms in zip(("in", "inner", "out"), _arms_by_segment(net)):
            for arm in arms:
                rows.append(
                    [arm.display, seg_name]
                    + [format_complex(values[(arm, o)]) for o in outcomes]
                )
        return render_table(header, rows)

    def as_csv():
        # rows restricted to the inner arms: the conditional currents proper
        _, inner, _ = _arms_by_segment(net)
        rows = [
            [arm.display] + [csv_complex(values[(arm, o)]) for o in outcomes]
            for arm in inner
        ]
        return ["arm"] + [o.display for o in outcomes], rows

    _emit(fmt, "weak-values", state, net, result, as_text, as_csv)


@main.command("inequality")
@_state_options
@_network_option
@_format_option
def inequality_cmd(state_spec, do_normalize, network_path, fmt):
    """Evaluate the noncontextuality inequality P(f) <= P(D1) + P(D2)."""
    net = _load_net(network_path)
    state = _resolve_state(state_spec, do_normalize)
    rep = analysis.ks_inequality(state, net)
    result = {
        "p_f": rep.p_f,
        "p_d1": rep.p_d1,
        "p_d2": rep.p_d2,
        "violation": rep.violation,
        "violated": rep.violated,
    }

    def as_text():
        return "\n".join(
            [
                f"P(f)  = {format_real(rep.p_f)}",
                f"P(D1) = {format_real(rep.p_d1)}",
                f"P(D2) = {format_real(rep.p_d2)}",
                f"violation = P(f) - P(D1) - P(D2) = {format_real(rep.violation)}",
                f"violated  = {'yes' if rep.violated else 'no'}",
            ]
        )

    def as_csv():
        row = [
            f"{rep.p_f:.12g}",
            f"{rep.p_d1:.12g}",
            f"{rep.p_d2:.12g}",
            f"{rep.violation:.12g}",
            str(rep.violated).lower(),
        ]
        return ["p_f", "p_d1", "p_d2", "violation", "violated"], [row]

    _emit(fmt, "inequality", state, net, result, as_text, as_csv)


@main.command("continuity")
@_state_options
@_network_option
@_format_option
def continuity_cmd(state_spec, do_normalize, network_path, fmt):
    """Current conservation across every stage, per final outcome."""
    net = _load_net(network_path)
    state = _resolve_state(state_spec, do_normalize)
    rep = analysis.continuity_check(state, net)
    result = {
        "records": [
            {
                "stage": rec.stage_index,
                "outcome": rec.outcome.display,
                "inflow": complex_pair(rec.inflow),
                "outflow": complex_pair(rec.outflow),
                "residual": rec.residual,
            }
            for rec in rep.records
        ],
        "max_residual": rep.max_residual,
    }

    def as_text():
        rows = [
            [
                str(rec.stage_index),
                rec.outcome.display,
                format_complex(rec.inflow),
                format_complex(rec.outflow),
                f"{rec.residual:.3g}",
            ]
            for rec in rep.records
        ]
        table = render_table(["stage", "outcome", "inflow", "outflow", "residual"], rows)
        return table + f"\n\nmax residual = {rep.max_residual:.3g}"

    def as_csv():
        rows = [
            [
                str(rec.stage_index),
                rec.outcome.display,
                f"{rec.inflow.real:.12g}",
                f"{rec.inflow.imag:.12g}",
                f"{rec.outflow.real:.12g}",
                f"{rec.outflow.imag:.12g}",
                f"{rec.residual:.12g}",
            ]
            for rec in rep.records
        ]
        header = ["stage", "outcome", "inflow_re", "inflow_im", "outflow_re", "outflow_im", "residual"]
        return header, rows

    _emit(fmt, "continuity", state, net, result, as_text, as_csv)


@main.command("classical")
@_network_option
@_format_option
def classical_cmd(network_path, fmt):
    """Enumerate classical trajectories and check the route-counting claim."""
    net = _load_net(network_path)
    rep = classical.verify_classical_claim(net)
    per_input: dict[str, int] = {}
    for traj in rep.all_trajectories:
        per_input[traj.input.display] = per_input.get(traj.input.display, 0) + 1
    result = {
        "trajectory_count": len(rep.all_trajectories),
        "per_input": per_input,
        "routes": [t.route for t in rep.all_trajectories],
        "via_f_same_port": [t.route for t in rep.via_f_same_port],
        "claim_holds": rep.claim_holds,
        "assumption": rep.assumption,
    }

    def as_text():
        counts = ", ".join(f"{n} via input {k}" for k, n in sorted(per_input.items()))
        lines = [
            f"{len(rep.all_trajectories)} classical trajectories ({counts})",
            "",
            "matching-port routes through f:",
        ]
        for traj in rep.via_f_same_port:
            tags = [d.value for d in (classical.PathLabel.D1, classical.PathLabel.D2) if traj.visits(d)]
            lines.append(f"  {traj.route}   (includes {', '.join(tags) or 'neither D1 nor D2'})")
        lines.append("")
        lines.append(
            "claim (every such route passes D1 or D2): "
            + ("HOLDS" if rep.claim_holds else "FAILS")
        )
        lines.append(f"assumption: {rep.assumption}")
        return "\n".join(lines)

    def as_csv():
        rows = [
            [
                t.route,
                t.input.display,
                t.output.display,
                str(t.visits(classical.PathLabel.F)).lower(),
                str(t.matching_port).lower(),
                str(t.visits(classical.PathLabel.D1)).lower(),
                str(t.visits(classical.PathLabel.D2)).lower(),
            ]
            for t in rep.all_trajectories
        ]
        header = ["route", "input", "output", "via_f", "matching_port", "has_D1", "has_D2"]
        return header, rows

    _emit(fmt, "classical", None, net, result, as_text, as_csv)


@main.command("sample")
@_state_options
@_network_option
@_format_option
@click.option("--context", "context_name", default="output", show_default=True,
              help="Context to detect in (name, members, or index 1-6).")
@click.option("--shots", type=click.IntRange(min=1), default=100000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def sample_cmd(state_spec, do_normalize, network_path, fmt, context_name, shots, seed):
    """Seeded Monte-Carlo detection counts in one context."""
    net = _load_net(network_path)
    state = _resolve_state(state_spec, do_normalize)
    ctx = _resolve_context(net, context_name)
    sample = analysis.sample_detections(state, net, ctx, shots, seed)
    result = {
        "context": ctx.name,
        "shots": shots,
        "seed": seed,
        "counts": {arm.display: sample.counts[arm] for arm in ctx.members},
        "frequencies": {arm.display: sample.counts[arm] / shots for arm in ctx.members},
    }

    def as_text():
        rows = [
            [arm.display, str(sample.counts[arm]), f"{sample.counts[arm] / shots:.6f}"]
            for arm in ctx.members
        ]
        head = f"context {ctx.name}, shots = {shots}, seed = {seed}"
        return head + "\n" + render_table(["path", "count", "frequency"], rows)

    def as_csv():
        rows = [
            [arm.display, str(sample.counts[arm]), f"{sample.counts[arm] / shots:.12g}"]
            for arm in ctx.members
        ]
        return ["path", "count", "frequency"], rows

    _emit(fmt, "sample", state, net, result, as_text, as_csv)


@main.command("verify")
@_network_option
@_format_option
@click.option("--samples", type=click.IntRange(min=1), default=200, show_default=True,
              help="Random states per statistical check.")
def verify_cmd(network_path, fmt, samples):
    """Run the full invariant suite; exit nonzero on any failure."""
    net = _load_net(network_path)
    results = verification.run_checks(net, samples=samples)
    ok = verification.all_passed(results)
    result = {
        "checks": [
            {"name": res.name, "status": res.status, "detail": res.detail}
            for res in results
        ],
        "passed": ok,
    }

    def as_text():
        lines = [
            f"{res.status.upper():4s} {res.name} — {res.detail}" for res in results
        ]
        n_fail = sum(1 for r in results if r.passed is False)
        n_skip = sum(1 for r in results if r.passed is None)
        lines.append("")
        lines.append(
            f"{len(results) - n_fail - n_skip} passed, {n_fail} failed, {n_skip} skipped"
        )
        return "\n".join(lines)

    def as_csv():
        rows = [[res.name, res.status, res.detail] for res in results]
        return ["check", "status", "detail"], rows

    _emit(fmt, "verify", None, net, result, as_text, as_csv)
    if not ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
