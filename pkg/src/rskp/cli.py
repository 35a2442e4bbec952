"""Command line interface.

Commands:
    init     create a state file (explicit coordinates or seeded random)
    evolve   integrate flows, exporting a trajectory CSV and a final state
    tau      evaluate tau on an integer grid and report its roots
    wave     expand the wave function at integer sites
    verify   run named verification suites and emit a JSON report

Exit codes: 0 success / all checks pass, 1 verification failure, 2 input
or parse error, 3 collision abort.  States and reports are JSON; grids
and trajectories are CSV (tau and wave honor --format).  All floats are
written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from .dynamics import PhasePoint, hamiltonian
from .errors import CollisionError, RskpError
from .integrator import integrate_flow
from .statefile import (
    csv_line,
    dumps_json,
    load_state,
    state_to_dict,
    trajectory_header,
)
from .tau import TauData, a_matrix, tau_det, tau_roots
from .times import TimeVector
from .verify import SUITES, VerifyConfig, run_suite
from .waves import wave_series_coeffs, wave_value

_FLOW_KEY = re.compile(r"^t([1-9][0-9]*)$")


class _InputError(RskpError):
    """User-facing input problem; mapped to exit code 2."""


def _parse_flow_spec(text: str) -> TimeVector:
    """'t1=0.3,t2=-0.1' -> TimeVector; empty text means zero."""
    entries = {}
    if text and text.strip():
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise _InputError(f"flow spec entry {part!r} is not of the form tK=value")
            key, _, val = part.partition("=")
            m = _FLOW_KEY.match(key.strip())
            if not m:
                raise _InputError(f"flow key {key.strip()!r} must look like t1, t2, ...")
            k = int(m.group(1))
            if k in entries:
                raise _InputError(f"flow key t{k} given twice")
            try:
                entries[k] = float(val)
            except ValueError:
                raise _InputError(f"flow value {val!r} is not a number") from None
    return TimeVector.from_dict(entries)


def _parse_range(text: str):
    """'a..b' -> inclusive integer pair."""
    m = re.match(r"^(-?\d+)\.\.(-?\d+)$", text.strip())
    if not m:
        raise _InputError(f"range {text!r} must look like a..b with integers")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise _InputError(f"range {text!r} is empty")
    return lo, hi


def _load_state_arg(args):
    if not args.state:
        raise _InputError("--state is required for this command")
    try:
        return load_state(args.state, eps_collision=args.epsilon_collision)
    except CollisionError as e:
        # invariant gate at load time is an input error, not a flow abort
        raise _InputError(f"state file violates invariants: {e}") from e
    except (ValueError, OSError) as e:
        raise _InputError(str(e)) from e


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _time_label(t: TimeVector) -> str:
    d = t.to_dict()
    if not d:
        return "t=0"
    return ";".join(f"t{k}={v:g}" for k, v in sorted(d.items()))


# -- commands ----------------------------------------------------------------

def cmd_init(args) -> int:
    if args.random:
        if args.n_particles is None:
            raise _InputError("--random requires --n-particles")
        if args.n_particles < 1:
            raise _InputError("--n-particles must be >= 1")
        rng = np.random.default_rng(args.seed)
        p = None
        for _ in range(1000):
            gaps = []
            while len(gaps) < args.n_particles - 1:
                g = float(rng.uniform(0.3, 3.0))
                if 0.95 < g < 1.05:
                    continue
                gaps.append(g)
            x0 = float(rng.uniform(-1.0, 1.0))
            x = np.concatenate([[x0], x0 + np.cumsum(gaps)]) if gaps else np.array([x0])
            y = rng.uniform(-1.0, 1.0, args.n_particles)
            try:
                # draw with a margin, then keep the caller's epsilon
                PhasePoint(x, y, TimeVector.zero(), max(args.epsilon_collision, 0.05))
            except (CollisionError, ValueError):
                continue
            p = PhasePoint(x, y, TimeVector.zero(), args.epsilon_collision)
            break
        if p is None:
            raise _InputError("could not draw a gap-valid configuration in 1000 attempts")
        prov = {"generator": "init-random", "seed": args.seed}
    else:
        if args.x is None or args.y is None:
            raise _InputError("provide --x and --y, or use --random")
        if len(args.x) != len(args.y):
            raise _InputError(f"--x has {len(args.x)} entries but --y has {len(args.y)}")
        try:
            p = PhasePoint(
                np.array(args.x, dtype=float),
                np.array(args.y, dtype=float),
                TimeVector.zero(),
                args.epsilon_collision,
            )
        except (CollisionError, ValueError) as e:
            raise _InputError(f"invalid state: {e}") from e
        prov = {"generator": "init-explicit"}
    _emit(args, dumps_json(state_to_dict(p, provenance=prov)) + "\n")
    return 0


def cmd_evolve(args) -> int:
    p, _ = _load_state_arg(args)
    target = _parse_flow_spec(args.flow)
    lines = [",".join(trajectory_header(p.n_particles))]
    idx = 0

    def emit(k: int, q: PhasePoint):
        nonlocal idx
        row = (
            [idx, k, q.t.get(k)]
            + [float(v) for v in q.x]
            + [float(v) for v in q.y]
            + [hamiltonian(q, m) for m in range(1, 5)]
        )
        lines.append(csv_line(row))
        idx += 1

    legs = [(k, v) for k, v in sorted(target.to_dict().items()) if v != 0.0]
    truncated = False
    if not legs:
        emit(0, p)
    else:
        try:
            for k, duration in legs:
                traj = integrate_flow(p, k, duration, args.tol)
                for _, q in traj.samples:
                    emit(k, q)
                p = traj.final
        except CollisionError as e:
            partial = getattr(e, "trajectory", None)
            if partial is not None:
                for _, q in partial.samples:
                    emit(partial.flow_index, q)
            lines.append("# truncated")
            truncated = True
            print(f"collision: {e}", file=sys.stderr)

    _emit(args, "\n".join(lines) + "\n")
    if truncated:
        return 3

    state_text = dumps_json(state_to_dict(p, provenance={"generator": "evolve"})) + "\n"
    if args.out_state:
        with open(args.out_state, "w", encoding="utf-8") as fh:
            fh.write(state_text)
    elif args.out:
        # CSV went to a file; the final state goes to stdout
        sys.stdout.write(state_text)
    return 0


def _tau_complex_abs(td: TauData, r: complex, t: TimeVector) -> float:
    a = a_matrix(td, t).astype(complex)
    return float(abs(np.linalg.det(r * np.eye(td.n) - a)))


def cmd_tau(args) -> int:
    p, extras = _load_state_arg(args)
    y0 = extras.get("y0_matrix")
    td = TauData(p.x.copy(), y0) if y0 is not None else TauData.from_phase(p)
    lo, hi = _parse_range(args.n_range or "-5..5")
    specs = [s for s in (args.times.split(";") if args.times else [""])]
    times = [_parse_flow_spec(s) for s in specs]

    evaluations = []
    saw_complex = False
    for t in times:
        roots = tau_roots(td, t, allow_complex=True)
        root_rows = []
        for r in np.atleast_1d(roots):
            r = complex(r)
            is_cplx = abs(r.imag) > 1e-9 * max(1.0, abs(r.real))
            saw_complex = saw_complex or is_cplx
            root_rows.append(
                {
                    "re": float(r.real),
                    "im": float(r.imag),
                    "complex": bool(is_cplx),
                    "tau_abs": _tau_complex_abs(td, r, t),
                }
            )
        evaluations.append(
            {
                "t": {str(k): v for k, v in t.to_dict().items()},
                "label": _time_label(t),
                "n": list(range(lo, hi + 1)),
                "tau": [tau_det(td, n, t) for n in range(lo, hi + 1)],
                "roots": root_rows,
            }
        )

    if saw_complex:
        print("warning: complex roots encountered; flagged in output", file=sys.stderr)

    if args.format == "csv":
        lines = ["record,t,index,value_a,value_b,is_complex,root_tau_abs"]
        for ev in evaluations:
            for n, v in zip(ev["n"], ev["tau"]):
                lines.append(csv_line(["tau", ev["label"], n, float(v), 0.0, 0, 0.0]))
            for i, rr in enumerate(ev["roots"]):
                lines.append(
                    csv_line(
                        [
                            "root",
                            ev["label"],
                            i,
                            rr["re"],
                            rr["im"],
                            int(rr["complex"]),
                            rr["tau_abs"],
                        ]
                    )
                )
        _emit(args, "\n".join(lines) + "\n")
    else:
        doc = {
            "schema_version": "rskp-tau-1",
            "n_range": [lo, hi],
            "evaluations": evaluations,
            "complex_roots": saw_complex,
        }
        _emit(args, dumps_json(doc) + "\n")
    return 0


def cmd_wave(args) -> int:
    p, _ = _load_state_arg(args)
    td = TauData.from_phase(p)
    lo, hi = _parse_range(args.n_range or "1..4")
    t0 = TimeVector.zero()
    sites = []
    for n in range(lo, hi + 1):
        entry = {"n": n}
        try:
            entry["coeffs"] = [
                float(c) for c in wave_series_coeffs(td, n, t0, args.depth, kind=args.kind)
            ]
        except RskpError as e:
            raise _InputError(f"site n={n}: {e}") from e
        if args.z is not None:
            entry["value"] = wave_value(td, n, t0, args.z, args.kind).value
        sites.append(entry)

    if args.format == "csv":
        header = ["n"] + [f"w_{k}" for k in range(args.depth + 1)]
        if args.z is not None:
            header.append("value")
        lines = [",".join(header)]
        for entry in sites:
            row = [entry["n"]] + entry["coeffs"]
            if args.z is not None:
                row.append(entry["value"])
            lines.append(csv_line(row))
        _emit(args, "\n".join(lines) + "\n")
    else:
        doc = {
            "schema_version": "rskp-wave-1",
            "kind": args.kind,
            "depth": args.depth,
            "z": args.z,
            "sites": sites,
        }
        _emit(args, dumps_json(doc) + "\n")
    return 0


def cmd_verify(args) -> int:
    p, extras = _load_state_arg(args)
    cfg = VerifyConfig(
        K=args.K,
        h=args.h,
        tol=args.tol,
        seed=args.seed,
        eps_collision=args.epsilon_collision,
    )
    report = run_suite(p, args.suite, cfg, y0_override=extras.get("y0_matrix"))
    text = dumps_json(report.to_dict()) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.overall_pass else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--state", help="input state JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized draws")
    common.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    common.add_argument("--h", type=float, default=1e-4, help="finite-difference step")
    common.add_argument("--K", type=int, default=8, help="operator truncation depth")
    common.add_argument(
        "--epsilon-collision", type=float, default=1e-6,
        help="minimum allowed distance of pairwise gaps from 0 and +-1",
    )
    common.add_argument(
        "--format", choices=("json", "csv"), default="json",
        help="output format where both are supported",
    )

    ap = argparse.ArgumentParser(
        prog="rskp",
        description="Particle flows, tau polynomials, and difference-operator checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init", parents=[common], help="create a state file")
    sp.add_argument("--x", type=float, nargs="+", help="positions")
    sp.add_argument("--y", type=float, nargs="+", help="rapidities")
    sp.add_argument("--random", action="store_true", help="draw a random valid state")
    sp.add_argument("--n-particles", type=int, help="particle count for --random")
    sp.set_defaults(func=cmd_init)

    sp = sub.add_parser("evolve", parents=[common], help="integrate flows")
    sp.add_argument("--flow", required=True, help="relative durations, e.g. t1=0.3,t2=-0.1")
    sp.add_argument("--out-state", help="file for the final state JSON")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("tau", parents=[common], help="tau values and roots")
    sp.add_argument("--n-range", help="integer grid a..b (default -5..5)")
    sp.add_argument("--times", help="semicolon-separated flow specs, e.g. 't1=0.1;t1=0.2'")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("wave", parents=[common], help="wave expansion coefficients")
    sp.add_argument("--n-range", help="integer sites a..b (default 1..4)")
    sp.add_argument("--depth", type=int, default=6, help="expansion depth")
    sp.add_argument("--kind", choices=("wave", "adjoint"), default="wave")
    sp.add_argument("--z", type=float, help="also evaluate the wave value at this z")
    sp.set_defaults(func=cmd_wave)

    sp = sub.add_parser("verify", parents=[common], help="run verification suites")
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CollisionError as e:
        print(f"collision: {e}", file=sys.stderr)
        return 3
    except RskpError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
