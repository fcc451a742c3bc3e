"""Command line front end: simulate netlists, canned scenarios, sweeps.

Every command writes its outputs plus a manifest.json that records the
exact inputs needed to reproduce the run.  Output CSVs are deterministic:
the same inputs give byte-identical files.

Exit codes: 0 success, 2 input error (parse/elaboration/usage),
3 convergence failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import DetectorConfig, detect_pulses, export_csv
from .devices import damping_parameter
from .engine import ConvergenceError, EngineError, SolverConfig, tran
from .netlist import NetlistError, elaborate, parse_netlist
from .templates import (NetworkSpec, NeuronParams, SynapseBinaryParams,
                        SynapseMultiParams, binary_synapse_netlist,
                        build_binary_synapse, build_multistate_synapse,
                        build_network, build_neuron, multistate_synapse_netlist,
                        network_netlist, neuron_netlist)
from .units import TWO_E

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3

OUT_DIR_ENV = "QPSJSIM_OUT"

_FIRING_QUANTA = 4.0  # events above this many 2e count as neuron firings


@dataclasses.dataclass
class RunManifest:
    command: str
    params: dict
    solver: dict
    outputs: list
    deterministic: bool = True
    wall_time_s: float = 0.0
    version: str = __version__

    def write(self, directory):
        path = Path(directory) / "manifest.json"
        with open(path, "w") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _out_dir(args):
    base = args.out or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_spikes(path, trains):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["channel", "t_peak_ps", "charge_ac", "width_ps"])
        for train in trains:
            for e in train.events:
                writer.writerow([train.source, repr(e.t_peak),
                                 repr(e.charge), repr(e.width)])


def _detect_all(waves):
    """Pulse trains for every saved current channel that has activity."""
    trains = []
    for name in waves.channels:
        if not name.startswith("i("):
            continue
        values = waves.channels[name]
        if np.max(np.abs(values)) == 0.0:
            continue
        trains.append(detect_pulses(waves.time, values, source=name))
    return trains


def cmd_sim(args):
    out = _out_dir(args)
    t0 = time.perf_counter()
    try:
        text = Path(args.netlist).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        circuit = elaborate(parse_netlist(text))
    except NetlistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        waves = tran(circuit, tstep=args.tstep, tstop=args.tstop)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    wave_path = out / "waveforms.csv"
    spike_path = out / "spikes.csv"
    export_csv(waves, wave_path)
    _write_spikes(spike_path, _detect_all(waves))
    manifest = RunManifest(
        command="sim",
        params={"netlist": str(args.netlist), "tstep_ps": args.tstep,
                "tstop_ps": args.tstop},
        solver=dataclasses.asdict(SolverConfig()),
        outputs=[wave_path.name, spike_path.name],
        wall_time_s=round(time.perf_counter() - t0, 3),
    )
    manifest.write(out)
    print(f"wrote {wave_path} ({len(waves.time)} samples)")
    return EXIT_OK


def _neuron_summary(waves, load="i(rload)", per_junction="i(q1)"):
    firings = [e for e in detect_pulses(waves.time, waves.channel(load)).events
               if e.charge / TWO_E > _FIRING_QUANTA]
    lines = [f"firings: {len(firings)}"]
    for e in firings:
        lines.append(f"  t={e.t_peak:.1f} ps  charge={e.charge / TWO_E:.2f} x 2e")
    return firings, lines


def _count_quanta(waves, channel):
    train = detect_pulses(waves.time, waves.channel(channel))
    return sum(round(e.charge / TWO_E) for e in train.events
               if round(e.charge / TWO_E) >= 1)


def _figure_fig2(out):
    p = NeuronParams(n_pulses=22)
    netlist = neuron_netlist(p)
    waves = tran(elaborate(build_neuron(p)))
    firings, lines = _neuron_summary(waves)
    if firings:
        gaps = np.diff([e.t_peak for e in firings])
        periods = gaps / (p.pulse_period * 1e12)
        lines.append(f"firing interval: {', '.join(f'{x:.1f}' for x in periods)}"
                     " input periods")
    lines.insert(0, "integrate-and-fire neuron, threshold 10: expect one"
                    " firing per 10 inputs carrying 20e")
    return netlist, waves, lines


def _figure_fig4(out, state):
    p = SynapseBinaryParams(state=state)
    netlist = binary_synapse_netlist(p)
    waves = tran(elaborate(build_binary_synapse(p)))
    n = _count_quanta(waves, "i(q1)")
    lines = [f"binary synapse, Ic={p.ic_states[state] * 1e6:.0f} uA"
             f" (weight {1 - state})",
             f"output pulses over {p.n_pulses} inputs: {n}"]
    return netlist, waves, lines


def _figure_fig6(out, state):
    p = SynapseMultiParams(state=state)
    netlist = multistate_synapse_netlist(p)
    waves = tran(elaborate(build_multistate_synapse(p)))
    n = _count_quanta(waves, "i(q1)")
    lines = [f"multi-state synapse, Ic={p.ic_j2_states[state] * 1e6:.0f} uA",
             f"output pulses over {p.n_pulses} inputs: {n}"]
    return netlist, waves, lines


_NETWORK_WEIGHTS = {
    "fig8": ((1, 1, 1), (0, 1, 1)),
    "fig9": ((1, 0, 1), (0, 0, 1)),
}


def _figure_network(out, fig):
    spec = NetworkSpec(weights=_NETWORK_WEIGHTS[fig],
                       input_periods=(60e-12, 90e-12, 120e-12))
    netlist = network_netlist(spec)
    waves = tran(elaborate(build_network(spec)))
    lines = [f"3x2 network, weights {list(map(list, spec.weights))}"]
    for y in range(spec.n_outputs):
        firings = [e for e in
                   detect_pulses(waves.time,
                                 waves.channel(f"i(rloadn{y})")).events
                   if e.charge / TWO_E > _FIRING_QUANTA]
        lines.append(f"output neuron {y}: {len(firings)} firings at "
                     + ", ".join(f"{e.t_peak:.0f} ps" for e in firings))
    return netlist, waves, lines


def cmd_figure(args):
    out = _out_dir(args)
    t0 = time.perf_counter()
    fig = args.id
    try:
        if fig == "fig2":
            netlist, waves, lines = _figure_fig2(out)
        elif fig in ("fig4a", "fig4b"):
            netlist, waves, lines = _figure_fig4(out, {"fig4a": 0, "fig4b": 1}[fig])
        elif fig in ("fig6a", "fig6b", "fig6c", "fig6d"):
            netlist, waves, lines = _figure_fig6(out, "abcd".index(fig[-1]))
        elif fig in _NETWORK_WEIGHTS:
            netlist, waves, lines = _figure_network(out, fig)
        else:
            print(f"error: unknown figure id {fig!r}", file=sys.stderr)
            return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    net_path = out / f"{fig}.cir"
    net_path.write_text(netlist)
    wave_path = out / "waveforms.csv"
    export_csv(waves, wave_path)
    spike_path = out / "spikes.csv"
    _write_spikes(spike_path, _detect_all(waves))
    manifest = RunManifest(
        command="figure",
        params={"id": fig},
        solver=dataclasses.asdict(SolverConfig()),
        outputs=[net_path.name, wave_path.name, spike_path.name],
        wall_time_s=round(time.perf_counter() - t0, 3),
    )
    manifest.write(out)
    for line in lines:
        print(line)
    return EXIT_OK


def _sweep_neuron(value):
    n = int(value)
    p = NeuronParams(n_threshold=n, n_pulses=max(12, 3 * n))
    waves = tran(elaborate(build_neuron(p)))
    firings, _ = _neuron_summary(waves)
    if len(firings) >= 2:
        period = float(np.mean(np.diff([e.t_peak for e in firings])))
    elif firings:
        period = float("nan")
    else:
        period = float("inf")
    return {"firings": len(firings), "firing_period_ps": period}


def _sweep_synapse(value):
    ic = float(value)
    p = SynapseBinaryParams()
    state = 0 if abs(ic - p.ic_states[0]) <= abs(ic - p.ic_states[1]) else 1
    p = SynapseBinaryParams(state=state)
    waves = tran(elaborate(build_binary_synapse(p)))
    n = _count_quanta(waves, "i(q1)")
    return {"output_pulses": n, "pulses_per_input": n / p.n_pulses}


def _sweep_damping(value):
    l = float(value)
    return {"beta_l": damping_parameter(0.7e-3, l, 10e3)}


_SWEEPS = {
    ("neuron", "n_threshold"): _sweep_neuron,
    ("synapse", "ic"): _sweep_synapse,
    ("damping", "l"): _sweep_damping,
}


def cmd_sweep(args):
    out = _out_dir(args)
    t0 = time.perf_counter()
    key = (args.template, args.param)
    if key not in _SWEEPS:
        known = ", ".join(f"{t}/{p}" for t, p in sorted(_SWEEPS))
        print(f"error: no sweep for {args.template}/{args.param}"
              f" (available: {known})", file=sys.stderr)
        return EXIT_INPUT
    values = [v for v in args.values.split(",") if v]
    if not values:
        print("error: empty value list", file=sys.stderr)
        return EXIT_INPUT
    fn = _SWEEPS[key]

    def point(v):
        try:
            return {"value": v, "status": "ok", **fn(v)}
        except (EngineError, NetlistError, ValueError) as exc:
            return {"value": v, "status": f"failed: {exc}"}

    with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
        rows = list(pool.map(point, values))

    fields = ["value", "status"]
    for row in rows:
        for k in row:
            if k not in fields:
                fields.append(k)
    sweep_path = out / "sweep.csv"
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    manifest = RunManifest(
        command="sweep",
        params={"template": args.template, "param": args.param,
                "values": values},
        solver=dataclasses.asdict(SolverConfig()),
        outputs=[sweep_path.name],
        wall_time_s=round(time.perf_counter() - t0, 3),
    )
    manifest.write(out)
    for row in rows:
        print(row)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qpsjsim",
        description="transient simulation of quantum phase-slip circuits")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_sim = sub.add_parser("sim", help="simulate a netlist file")
    p_sim.add_argument("netlist")
    p_sim.add_argument("--tstep", type=float, default=None,
                       help="override timestep (ps)")
    p_sim.add_argument("--tstop", type=float, default=None,
                       help="override stop time (ps)")
    p_sim.add_argument("--out", default=None, help="output directory")
    p_sim.set_defaults(func=cmd_sim)

    p_fig = sub.add_parser("figure", help="run a canned scenario")
    p_fig.add_argument("id", help="fig2, fig4a, fig4b, fig6a..fig6d,"
                                  " fig8 or fig9")
    p_fig.add_argument("--out", default=None)
    p_fig.set_defaults(func=cmd_figure)

    p_sweep = sub.add_parser("sweep", help="sweep a template parameter")
    p_sweep.add_argument("template", help="neuron, synapse or damping")
    p_sweep.add_argument("param", help="parameter name")
    p_sweep.add_argument("values", help="comma separated grid values")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
