"""Command-line entry point.

Subcommands: `synth` generates demo CSVs, `build` turns demos into a
canal file, `frames` dumps correction and Bishop axes for plotting,
`reproduce` emits an autonomous trajectory trace, and `serve` exposes a
live session over websockets.

Exit codes: 0 ok, 1 usage, 2 data error, 3 internal.
"""

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from . import framing, repro, server, synth, trajio
from .canal import CanalModel, build_canal
from .config import Config
from .errors import CanalPilotError
from .session import seed_session


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file; flags override it")
    p.add_argument("--n-f", type=int, help="resampled demo length (default 200)")
    p.add_argument("--r-min", type=float, help="disk radius floor in m (default 1e-4)")
    p.add_argument("--epsilon", type=float, help="Slerp degenerate threshold (default 1e-10)")
    p.add_argument("--lambda", dest="lam", type=float, help="ratio decay constant (default 5e-4)")
    p.add_argument("--w-p", type=float, help="position cost weight (default 100)")
    p.add_argument("--alpha", type=float, help="orientation weight steepness (default 9)")
    p.add_argument("--beta", type=float, help="orientation weight midpoint in rad (default 0.3)")
    p.add_argument("--cap", type=float, help="orientation weight ceiling (default 15)")
    p.add_argument("--delta", type=float, help="correction sensitivity divisor (default 150)")
    p.add_argument("--window", type=int, help="y-axis stabilization history (default 10)")
    p.add_argument("--hz", dest="tick_hz", type=float, help="session tick rate (default 20)")


def _load_config(args) -> Config:
    cfg = Config.from_file(args.config) if args.config else Config()
    for name in ("n_f", "r_min", "epsilon", "lam", "w_p", "alpha", "beta",
                 "cap", "delta", "window", "tick_hz"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def cmd_synth(args) -> int:
    demos = synth.demo_set(kind=args.kind, n_demos=args.demos, n_base=args.samples,
                           spread=args.spread, tilt=args.tilt, noise=args.noise,
                           seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for demo in demos:
        path = args.out_dir / f"{demo.id}.csv"
        trajio.save_demonstration(demo, path)
        print(f"wrote {path} ({len(demo)} samples)")
    return 0


def cmd_build(args) -> int:
    cfg = _load_config(args)
    demos = trajio.load_demonstrations(args.demo_files)
    dataset = trajio.preprocess(demos, n_f=cfg.n_f)
    canal = build_canal(dataset, r_min=cfg.r_min, params=cfg.frame_params(),
                        support_planes=cfg.support_planes)
    canal.save(args.out)
    radii = canal.radii
    print(f"canal: N_f={canal.n_f} n={dataset.n} "
          f"radius min/mean/max={radii.min():.4g}/{radii.mean():.4g}/{radii.max():.4g} "
          f"mean sigma_q={canal.sigma_q.mean():.4g} rad -> {args.out}")
    return 0


def cmd_frames(args) -> int:
    canal = CanalModel.load(args.canal)
    bishop = framing.bishop_frames(canal.directrix)
    rows = framing.frame_rows(canal.frames, bishop)
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} frame rows -> {args.out}")
    return 0


def cmd_reproduce(args) -> int:
    canal = CanalModel.load(args.canal)
    if args.direction == "backward":
        start = canal.n_f
    else:
        start = 1
    frame0 = canal.frames[start - 1]
    offset = args.eta0 * float(canal.radii[start - 1]) * frame0.x_axis
    state = repro.initial_state(canal, start, offset, direction=args.direction)
    kind = "decay" if (args.etaf is not None or args.lam is not None) else "fixed"
    strategy = repro.RatioStrategy(
        kind=kind,
        eta_0=args.eta0,
        eta_f=args.etaf if args.etaf is not None else 0.0,
        lam=args.lam if args.lam is not None else 5e-4,
    )
    corrections = {}
    if args.script:
        for step_idx, kx, ky in json.loads(Path(args.script).read_text(encoding="utf-8")):
            corrections.setdefault(int(step_idx), []).append((float(kx), float(ky)))
    delta = args.delta if args.delta is not None else 150.0

    rows = []

    def emit(st):
        p = canal.directrix[st.s - 1] + st.offset
        q = canal.mean_q[st.s - 1]
        rows.append([st.s, st.d, *p.tolist(), *q.tolist()])

    emit(state)
    for k in range(canal.n_f - 1):
        if k in corrections:
            for kx, ky in corrections[k]:
                state = repro.apply_correction(
                    state, repro.CorrectionInput(k_x=kx, k_y=ky, delta=delta), canal)
            # continue the trajectory from the corrected point
            strategy = dataclasses.replace(strategy, eta_0=min(1.0, state.eta))
            state = dataclasses.replace(state, leg_step=1)
        state = repro.step(state, canal, strategy)
        emit(state)
    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["s", "d", "x", "y", "z", "qw", "qx", "qy", "qz"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} trace rows (final eta={state.eta:.4g}) -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    cfg = _load_config(args)
    canal = CanalModel.load(args.canal)
    state = seed_session(canal, tick_hz=cfg.tick_hz, delta=cfg.delta, lam=cfg.lam,
                         weights=cfg.weight_params(), require_resume=args.require_resume)
    print(f"serving canal ({canal.n_f} disks) on {args.bind} at {cfg.tick_hz} Hz")
    server.serve(state, args.bind)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="canalpilot", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic demo CSVs")
    p.add_argument("--kind", choices=synth.KINDS, default="arc")
    p.add_argument("--demos", type=int, default=2)
    p.add_argument("--samples", type=int, default=120)
    p.add_argument("--spread", type=float, default=0.05, help="lateral demo spread (m)")
    p.add_argument("--tilt", type=float, default=0.1, help="orientation spread (rad)")
    p.add_argument("--noise", type=float, default=0.0, help="position jitter sigma (m)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("demos"))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build", help="build a canal file from demo CSVs")
    p.add_argument("demo_files", nargs="+", type=Path)
    p.add_argument("--out", type=Path, default=Path("canal.json"))
    _add_config_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("frames", help="dump correction + Bishop frame axes as CSV")
    p.add_argument("--canal", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("frames.csv"))
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("reproduce", help="emit an autonomous trajectory trace as CSV")
    p.add_argument("--canal", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("trace.csv"))
    p.add_argument("--direction", choices=["forward", "backward"], default="forward")
    p.add_argument("--eta0", type=float, default=0.5)
    p.add_argument("--etaf", type=float, help="decay target ratio (selects decay strategy)")
    p.add_argument("--lambda", dest="lam", type=float, help="decay constant (selects decay strategy)")
    p.add_argument("--delta", type=float, help="correction sensitivity divisor (default 150)")
    p.add_argument("--script", type=Path, help="JSON [[step,kx,ky],...] corrections")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("serve", help="stream a live session over websockets")
    p.add_argument("--canal", type=Path, required=True)
    p.add_argument("--bind", default="127.0.0.1:8765")
    p.add_argument("--require-resume", action="store_true",
                   help="dwell at pick/place/home until a resume or grip command")
    _add_config_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:  # --help
            raise
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CanalPilotError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 0
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
