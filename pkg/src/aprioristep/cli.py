"""Command-line experiment runner for the 1D benchmark problem.

Writes ``steps.csv``, ``probe.csv`` and ``summary.json`` into the output
directory. With several ``--delta`` (or ``--uniform-tau``) values each run
goes to its own subdirectory and ``convergence.csv`` compares the probe
curves against the finest run.

Exit codes: 0 success, 1 invalid arguments, 2 divergence or failed solve,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .controller import ControllerConfig, Variant
from .heat1d import Case, paper_problem
from .linalg import SingularSystemError
from .stepper import DivergenceError, RunHistory, StabilityError, run, run_uniform

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

STEP_COLUMNS = ("n", "t_n", "tau_n", "s1", "s2", "s3", "gamma_corr")
PROBE_COLUMNS = ("t_n", "u_probe")

_BASE = dict(delta=0.1, gamma=1.5, tau0=1e-6, tau1=1e-6, M=100, probe_x=0.5)

PRESETS = {
    "fig1": dict(_BASE, ic="sine"),
    "fig2": dict(_BASE, ic="sine"),
    "fig3": dict(_BASE, ic="sine", deltas=[0.1, 0.01, 0.001]),
    "fig3a": dict(_BASE, ic="sine", uniform_taus=[1e-2, 1e-3, 1e-4]),
    "fig4": dict(_BASE, ic="hat"),
    "fig5": dict(_BASE, ic="hat"),
    "fig6": dict(_BASE, ic="const"),
}


class UsageError(Exception):
    pass


@dataclass
class ExperimentSpec:
    case: Case = Case.SINE
    cfg: ControllerConfig = field(default_factory=ControllerConfig)
    M: int = 100
    probe_x: float = 0.5
    output_dir: Path = Path("out")
    mode: str = "adaptive"  # adaptive | uniform | sweep
    deltas: list[float] = field(default_factory=list)
    taus: list[float] = field(default_factory=list)

    def validate(self) -> None:
        if self.M < 2:
            raise UsageError(f"M must be at least 2, got {self.M}")
        if self.mode == "sweep":
            if not self.deltas:
                raise UsageError("delta sweep needs at least one value")
            if any(a <= b for a, b in zip(self.deltas, self.deltas[1:])):
                raise UsageError("delta sweep values must be strictly descending")
        if self.mode == "uniform":
            if not self.taus or any(not tau > 0 for tau in self.taus):
                raise UsageError("uniform steps must be positive")
            if any(a <= b for a, b in zip(self.taus, self.taus[1:])):
                raise UsageError("uniform steps must be strictly descending")
        try:
            paper_problem(self.case, self.M).node_index(self.probe_x)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_steps_csv(history: RunHistory, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STEP_COLUMNS)
        for r in history.records:
            w.writerow([_fmt(v) for v in (r.n, r.t_n, r.tau_n, r.s1, r.s2, r.s3, r.gamma_corr)])


def write_probe_csv(history: RunHistory, path: Path) -> None:
    t, u = history.probe_series()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROBE_COLUMNS)
        for ti, ui in zip(t, u):
            w.writerow([_fmt(ti), _fmt(ui)])


def read_csv(path: Path) -> dict[str, np.ndarray]:
    """Load one of the CSV outputs as a dict of float columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: np.array([float(row[i]) for row in body]) for i, name in enumerate(header)}


def probe_deviation(history: RunHistory, reference: RunHistory) -> float:
    """Max |probe - probe_ref| with the probe interpolated onto the reference times."""
    t, u = history.probe_series()
    t_ref, u_ref = reference.probe_series()
    return float(np.max(np.abs(np.interp(t_ref, t, u) - u_ref)))


def _config_echo(spec: ExperimentSpec) -> dict:
    cfg = asdict(spec.cfg)
    cfg["variant"] = spec.cfg.variant.value
    return {
        "case": spec.case.value,
        "M": spec.M,
        "probe_x": spec.probe_x,
        "T": paper_problem(spec.case, spec.M).horizon(),
        "mode": spec.mode,
        **cfg,
    }


def _write_run(history: RunHistory, directory: Path, summary: dict) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_steps_csv(history, directory / "steps.csv")
    write_probe_csv(history, directory / "probe.csv")
    with open(directory / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _single(spec: ExperimentSpec, directory: Path, tau: float | None = None) -> RunHistory:
    problem = paper_problem(spec.case, spec.M)
    start = time.perf_counter()
    if tau is None:
        history = run(problem, spec.cfg, spec.probe_x)
    else:
        history = run_uniform(problem, tau, spec.probe_x)
    wall = time.perf_counter() - start
    summary = {
        "total_steps": history.total_steps,
        "final_time": history.records[-1].t_n,
        "wall_time": wall,
        "config": _config_echo(spec),
    }
    if tau is not None:
        summary["config"]["uniform_tau"] = tau
    _write_run(history, directory, summary)
    log.info("%s: %d steps in %.3f s", directory, history.total_steps, wall)
    return history


def _write_convergence(path: Path, label: str, values, histories) -> list[dict]:
    reference = histories[-1]
    rows = [
        {label: v, "total_steps": h.total_steps, "max_probe_deviation": probe_deviation(h, reference)}
        for v, h in zip(values, histories)
    ]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((label, "total_steps", "max_probe_deviation"))
        for row in rows:
            w.writerow([_fmt(row[label]), _fmt(row["total_steps"]), _fmt(row["max_probe_deviation"])])
    return rows


def run_experiment(spec: ExperimentSpec) -> int:
    """Run the experiment described by ``spec`` and write its outputs; return an exit code."""
    try:
        spec.validate()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(spec.output_dir)
    try:
        if spec.mode == "adaptive" or (spec.mode == "sweep" and len(spec.deltas) == 1):
            cfg = spec.cfg if spec.mode == "adaptive" else replace(spec.cfg, delta=spec.deltas[0])
            _single(replace(spec, cfg=cfg, mode="adaptive"), out)
        elif spec.mode == "uniform" and len(spec.taus) == 1:
            _single(spec, out, tau=spec.taus[0])
        elif spec.mode == "sweep":
            return delta_sweep(spec)
        elif spec.mode == "uniform":
            histories = [_single(spec, out / f"tau_{tau!r}", tau=tau) for tau in spec.taus]
            _write_convergence(out / "convergence.csv", "tau", spec.taus, histories)
        else:
            print(f"error: unknown mode {spec.mode!r}", file=sys.stderr)
            return EXIT_USAGE
    except (DivergenceError, StabilityError, SingularSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def delta_sweep(spec: ExperimentSpec) -> int:
    """Adaptive runs for each delta plus ``convergence.csv`` against the finest delta."""
    try:
        spec.validate()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(spec.deltas) == 1:
        return run_experiment(spec)
    out = Path(spec.output_dir)
    try:
        histories = []
        for delta in spec.deltas:
            sub = replace(spec, cfg=replace(spec.cfg, delta=delta), mode="adaptive")
            histories.append(_single(sub, out / f"delta_{delta!r}"))
        rows = _write_convergence(out / "convergence.csv", "delta", spec.deltas, histories)
        with open(out / "summary.json", "w") as fh:
            json.dump({"runs": rows, "config": _config_echo(spec)}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except (DivergenceError, StabilityError, SingularSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aprioristep", description="Backward Euler with a-priori step selection on the 1D benchmark.")
    p.add_argument("--preset", choices=sorted(PRESETS), help="parameter set of one of the published figures")
    p.add_argument("--delta", type=float, nargs="+", help="error level; several values run a sweep")
    p.add_argument("--gamma", type=float, help="maximal step growth factor (> 1)")
    p.add_argument("--tau0", type=float, help="minimal step")
    p.add_argument("--tau1", type=float, help="first step")
    p.add_argument("--M", type=int, help="number of mesh cells")
    p.add_argument("--ic", choices=[c.value for c in Case], help="initial condition")
    p.add_argument("--variant", choices=[v.value for v in Variant], default=None, help="step law variant")
    p.add_argument("--uniform-tau", type=float, nargs="+", help="fixed step(s) instead of adaptive stepping")
    p.add_argument("--probe-x", type=float, help="grid node recorded in probe.csv")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    params = dict(PRESETS[args.preset] if args.preset else PRESETS["fig1"])
    for name in ("gamma", "tau0", "tau1", "M", "ic", "probe_x"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.delta is not None:
        params.pop("uniform_taus", None)
        if len(args.delta) == 1:
            params["delta"] = args.delta[0]
            params.pop("deltas", None)
        else:
            params["deltas"] = args.delta
    if args.uniform_tau is not None:
        params.pop("deltas", None)
        params["uniform_taus"] = args.uniform_tau
    try:
        cfg = ControllerConfig(
            delta=params["deltas"][0] if "deltas" in params else params["delta"],
            gamma=params["gamma"],
            tau0=params["tau0"],
            tau1=params["tau1"],
            variant=Variant(args.variant or "fb"),
        )
        for d in params.get("deltas", []):  # validate every sweep value
            replace(cfg, delta=d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if "uniform_taus" in params:
        mode = "uniform"
    elif "deltas" in params:
        mode = "sweep"
    else:
        mode = "adaptive"
    return ExperimentSpec(
        case=Case(params["ic"]),
        cfg=cfg,
        M=params["M"],
        probe_x=params["probe_x"],
        output_dir=args.out,
        mode=mode,
        deltas=list(params.get("deltas", [])),
        taus=list(params.get("uniform_taus", [])),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = spec_from_args(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if spec.mode == "sweep":
        return delta_sweep(spec)
    return run_experiment(spec)


if __name__ == "__main__":
    sys.exit(main())
