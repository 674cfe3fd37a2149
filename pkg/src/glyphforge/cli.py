"""Command-line toolkit.

Subcommands: validate, rasterize, udf, loss, snap, annotate, metrics,
gmm-eval, gradcheck.  Shared numeric options resolve with precedence
CLI flag > config file > built-in default; the config file is
``key=value`` text with ``#`` comments.  Batch subcommands fan out over
a thread pool capped by the GLYPHFORGE_THREADS environment variable,
and every output file is written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import gradcheck as gradcheck_mod
from .annotate import DEFAULT_THRESHOLD, AnnotateConfig, pseudo_annotate
from .errors import GlyphforgeError
from .format6 import parse_trajectory, serialize_trajectory
from .gmm import activate_sequence, loss_point
from .losses import LossWeights
from .metrics import dtw, mae
from .pgm import dump_field_ascii, quantize, read_pgm
from .rasterizer import (
    DEFAULT_THETA,
    DEFAULT_WIDTH_PX,
    Grid,
    RenderParams,
    loss_diff,
    render,
    snap_fit,
    udf,
)
from .reprlearn import DEFAULT_TAU
from .textio import parse_raw_gmm


@dataclass(frozen=True)
class RunConfig:
    """Resolved numeric options shared by the subcommands."""

    grid_height: int = 128
    grid_width: int = 128
    theta: float = DEFAULT_THETA
    line_width_px: float = DEFAULT_WIDTH_PX
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0
    lambda4: float = 1.0
    lambda5: float = 1.0
    tau: float = DEFAULT_TAU
    threshold: float = DEFAULT_THRESHOLD
    include_connections: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.grid_height < 1 or self.grid_width < 1:
            raise ValueError("grid dimensions must be positive")
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.line_width_px < 0:
            raise ValueError("line width must be nonnegative")
        for k in range(1, 6):
            if getattr(self, f"lambda{k}") < 0:
                raise ValueError(f"lambda{k} must be nonnegative")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")

    def grid(self) -> Grid:
        return Grid(self.grid_height, self.grid_width)

    def render_params(self) -> RenderParams:
        return RenderParams.for_grid(self.grid(), theta=self.theta,
                                     width_px=self.line_width_px)

    def loss_weights(self) -> LossWeights:
        return LossWeights(self.lambda1, self.lambda2, self.lambda3,
                           self.lambda4, self.lambda5)


_BOOL_KEYS = {"include_connections"}
_INT_KEYS = {"grid_height", "grid_width", "seed"}


def read_config_file(path) -> dict:
    """Parse a key=value config file into typed RunConfig fields."""
    known = {f.name for f in fields(RunConfig)}
    out: dict = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise GlyphforgeError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise GlyphforgeError(f"{path}:{line_no}: unknown key {key!r}")
            try:
                if key in _BOOL_KEYS:
                    if value.lower() not in ("true", "false", "1", "0"):
                        raise ValueError(value)
                    out[key] = value.lower() in ("true", "1")
                elif key in _INT_KEYS:
                    out[key] = int(value)
                else:
                    out[key] = float(value)
            except ValueError:
                raise GlyphforgeError(
                    f"{path}:{line_no}: bad value {value!r} for {key!r}"
                ) from None
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return RunConfig(**values)


def _n_workers() -> int:
    cap = os.environ.get("GLYPHFORGE_THREADS")
    if cap is not None:
        return max(1, int(cap))
    return min(8, os.cpu_count() or 1)


def _pool_map(fn, items):
    items = list(items)
    if len(items) <= 1 or _n_workers() == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=_n_workers()) as pool:
        return list(pool.map(fn, items))


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.chmod(tmp, 0o644)  # mkstemp defaults to 0600
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _read_text(path) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _load_trajectory(path):
    return parse_trajectory(_read_text(path))


def _traj_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.is_file())
    return [path]


# --- subcommands ---

def cmd_validate(args, cfg: RunConfig) -> int:
    paths = [p for arg in args.paths for p in _traj_files(Path(arg))]

    def check(p: Path):
        try:
            _load_trajectory(p)
            return (p, None)
        except (GlyphforgeError, OSError) as e:
            return (p, str(e))

    results = _pool_map(check, paths)
    bad = 0
    for p, err in results:
        if err is None:
            print(f"OK {p}")
        else:
            bad += 1
            print(f"ERROR {p}: {err}")
    return 0 if bad == 0 else 1


def _rasterize(cfg: RunConfig, traj_path) -> np.ndarray:
    traj = _load_trajectory(traj_path)
    field = udf(traj, cfg.grid(), cfg.include_connections)
    return render(field, cfg.render_params())


def cmd_rasterize(args, cfg: RunConfig) -> int:
    img = _rasterize(cfg, args.trajectory)
    v = quantize(img)
    h, w = v.shape
    if args.ascii:
        text = f"P2\n{w} {h}\n255\n" + "".join(
            " ".join(str(int(x)) for x in row) + "\n" for row in v
        )
        atomic_write_text(args.out, text)
    else:
        atomic_write_bytes(args.out, f"P5\n{w} {h}\n255\n".encode("ascii") + v.tobytes())
    return 0


def cmd_udf(args, cfg: RunConfig) -> int:
    traj = _load_trajectory(args.trajectory)
    field = udf(traj, cfg.grid(), cfg.include_connections)
    atomic_write_text(args.out, dump_field_ascii(field))
    return 0


def cmd_loss(args, cfg: RunConfig) -> int:
    traj = _load_trajectory(args.trajectory)
    target = read_pgm(args.target)
    value, grad = loss_diff(traj, target, cfg.grid(), cfg.render_params(),
                            cfg.include_connections)
    print(f"{value:.12g}")
    if args.grad_out:
        lines = "".join(f"{float(gx)!r} {float(gy)!r}\n" for gx, gy in grad)
        atomic_write_text(args.grad_out, lines)
    return 0


def cmd_snap(args, cfg: RunConfig) -> int:
    traj = _load_trajectory(args.trajectory)
    target = read_pgm(args.target)
    fitted, trace = snap_fit(traj, target, cfg.grid(), cfg.render_params(),
                             steps=args.steps, step_size=args.step_size,
                             include_connections=cfg.include_connections)
    atomic_write_text(args.out, serialize_trajectory(fitted))
    if args.trace_out:
        csv = "step,loss\n" + "".join(f"{k},{v:.12g}\n" for k, v in enumerate(trace))
        atomic_write_text(args.trace_out, csv)
    print(f"initial {trace[0]:.12g} final {trace[-1]:.12g}")
    return 0


def cmd_annotate(args, cfg: RunConfig) -> int:
    traj_dir, mean_dir, out_dir = Path(args.traj_dir), Path(args.mean_dir), Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = sorted(p.name for p in traj_dir.iterdir() if p.is_file())
    acfg = AnnotateConfig(threshold=cfg.threshold)

    def work(name: str):
        traj = _load_trajectory(traj_dir / name)
        mean_ref = _load_trajectory(mean_dir / name)
        out = pseudo_annotate(traj, mean_ref, acfg)
        atomic_write_text(out_dir / name, serialize_trajectory(out))

    _pool_map(work, names)
    print(f"annotated {len(names)} files")
    return 0


def cmd_metrics(args, cfg: RunConfig) -> int:
    rows = []
    with open(args.manifest, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 5:
                raise GlyphforgeError(
                    f"{args.manifest}:{line_no}: expected "
                    f"'id gt_image fake_image gt_traj fake_traj'"
                )
            rows.append(parts)

    def work(row):
        pair_id, gt_img, fake_img, gt_traj, fake_traj = row
        value_mae = mae(read_pgm(gt_img), read_pgm(fake_img))
        result = dtw(_load_trajectory(gt_traj), _load_trajectory(fake_traj))
        return f"{pair_id},{value_mae:.12g},{result.cost:.12g},{result.normalized:.12g}"

    lines = ["id,mae,dtw,dtw_normalized"] + _pool_map(work, rows)
    csv = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, csv)
    else:
        sys.stdout.write(csv)
    return 0


def cmd_gmm_eval(args, cfg: RunConfig) -> int:
    raw = parse_raw_gmm(_read_text(args.params))
    traj = _load_trajectory(args.trajectory)
    value = loss_point(activate_sequence(raw), traj)
    print(f"{value:.12g}")
    return 0


def cmd_gradcheck(args, cfg: RunConfig) -> int:
    reports = gradcheck_mod.run_suites(
        selector=args.suite, seed=cfg.seed, instances=args.instances,
        corrupt=args.corrupt,
    )
    ok = True
    for rep in reports:
        print(rep.line())
        ok = ok and rep.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options (flag > config file > default)")
    g.add_argument("--config", metavar="FILE", help="key=value config file")
    g.add_argument("--grid-height", dest="grid_height", type=int)
    g.add_argument("--grid-width", dest="grid_width", type=int)
    g.add_argument("--theta", type=float, help="render sharpness (default 100)")
    g.add_argument("--line-width", dest="line_width_px", type=float,
                   help="line half-width in pixels (default 2)")
    for k in range(1, 6):
        g.add_argument(f"--lambda{k}", dest=f"lambda{k}", type=float)
    g.add_argument("--tau", type=float, help="contrastive temperature (default 10)")
    g.add_argument("--threshold", type=float,
                   help="connected-stroke distance threshold (default 0.1)")
    g.add_argument("--include-connections", dest="include_connections",
                   action=argparse.BooleanOptionalAction,
                   help="render connected-stroke links as visible segments")
    g.add_argument("--seed", type=int, help="base seed for randomized commands")

    parser = argparse.ArgumentParser(
        prog="glyphforge",
        description="Trajectory rasterization, mixture heads, and glyph metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="parse trajectory files and report per-file status")
    p.add_argument("paths", nargs="+", help="trajectory files or directories")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rasterize", parents=[common],
                       help="render a trajectory to a PGM image")
    p.add_argument("trajectory")
    p.add_argument("out", help="output PGM path")
    p.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("udf", parents=[common],
                       help="export the distance field as an ASCII grid")
    p.add_argument("trajectory")
    p.add_argument("out")
    p.set_defaults(func=cmd_udf)

    p = sub.add_parser("loss", parents=[common],
                       help="out-of-glyph penalty of a trajectory against a target image")
    p.add_argument("trajectory")
    p.add_argument("target", help="target PGM image")
    p.add_argument("--grad-out", dest="grad_out", metavar="FILE",
                   help="also dump the coordinate gradient")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("snap", parents=[common],
                       help="gradient-descend point coordinates onto a target image")
    p.add_argument("trajectory")
    p.add_argument("target")
    p.add_argument("out", help="fitted trajectory path")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--step-size", dest="step_size", type=float, default=1e-3)
    p.add_argument("--trace-out", dest="trace_out", metavar="FILE",
                   help="write the per-step loss trace as CSV")
    p.set_defaults(func=cmd_snap)

    p = sub.add_parser("annotate", parents=[common],
                       help="relabel stroke ends as connected using mean references")
    p.add_argument("traj_dir")
    p.add_argument("mean_dir")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("metrics", parents=[common],
                       help="emit id,mae,dtw,dtw_normalized CSV for a pairs manifest")
    p.add_argument("manifest",
                   help="lines of: id gt_image fake_image gt_traj fake_traj")
    p.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gmm-eval", parents=[common],
                       help="mean negative log-likelihood of raw mixture outputs")
    p.add_argument("params", help="#glyphforge-gmm v1 file, one step per line")
    p.add_argument("trajectory", help="target trajectory (one point per step)")
    p.set_defaults(func=cmd_gmm_eval)

    p = sub.add_parser("gradcheck", parents=[common],
                       help="finite-difference verification of analytic gradients")
    p.add_argument("suite", nargs="?", default="all",
                   choices=("all",) + gradcheck_mod.SUITES)
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--corrupt", action="store_true",
                   help="negative control: corrupt gradients so every suite fails")
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except (GlyphforgeError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
