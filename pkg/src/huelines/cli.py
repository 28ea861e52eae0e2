"""Command-line front-end: render, synth, eval, and serve.

`render` drives the whole batch pipeline and writes four artifacts;
`synth` emits benchmark datasets with ground truth; `eval` scores an
assignment CSV against labels; `serve` starts the HTTP session service.
Exit codes: 0 success, 1 pipeline error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .assignment import write_line_assignment_csv
from .config import PipelineConfig, load_config
from .evaluate import accuracy_report
from .features import dataset_fingerprint, load_feature_grid, save_feature_grid
from .io import ParseError, parse_timeseries, parse_trajectories, read_labels_csv, write_labels_csv, write_trajectory_csv
from .model import LineSet, fit_grid
from .pipeline import derive, params_from_config, preprocess
from .render import render_density, save_png, write_legend_json
from .synthetic import gen_continuation, gen_disconnected, gen_illusory

_ARTIFACTS = ("render.png", "legend.json", "lines.csv", "dendrogram.json")
_CACHE_NAME = "features.bin"


def _parse_bins(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected WxH, e.g. 512x256, got {text!r}") from None


def _detect_and_parse(text: str, kind: str) -> LineSet:
    """Route input to the right parser.

    auto: JSON and 3-column CSV read as trajectories, anything else as
    wide time-series rows.
    """
    if kind == "trajectory":
        return parse_trajectories(text)[0]
    if kind == "timeseries":
        return parse_timeseries(text)[0]
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return parse_trajectories(text)[0]
    first = next(csv.reader(_io.StringIO(text)), [])
    if len(first) == 3:
        return parse_trajectories(text)[0]
    return parse_timeseries(text)[0]


def _config_from_args(args) -> PipelineConfig:
    # config file first, explicit flags override it
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides: dict = {}
    if args.bins is not None:
        overrides["width"], overrides["height"] = args.bins
    for flag, field in (
        ("radius", "radius"), ("min_density", "min_density"),
        ("sample", "max_samples"), ("metric", "metric"), ("k", "k"),
        ("seed", "seed"), ("template", "template"),
        ("log_scale", "log_scale"), ("scale", "scale"), ("out", "out_dir"),
    ):
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    return replace(cfg, **overrides)


def cmd_render(args) -> int:
    cfg = _config_from_args(args)
    raw = Path(args.input).read_bytes()
    ls = _detect_and_parse(raw.decode("utf-8"), args.kind)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rcfg = cfg.resolve(ls.kind)
    spec = fit_grid(ls, rcfg.width, rcfg.height)
    fingerprint = dataset_fingerprint(raw, spec, rcfg.radius)
    cache_path = out / _CACHE_NAME
    fg = load_feature_grid(str(cache_path), fingerprint)
    cached = fg is not None

    pre = preprocess(ls, cfg, fg=fg)
    if not cached:
        save_feature_grid(pre.fg, str(cache_path), fingerprint)
    params = params_from_config(cfg, ls.kind)
    state = derive(pre, params, cfg)

    # stage everything under temp names so a failure never leaves a
    # partial artifact set behind
    tmp = {name: out / (name + ".tmp") for name in _ARTIFACTS}
    try:
        image = render_density(
            pre.dg, state.cmap, state.hues, scale=rcfg.scale,
            log_scale=params.log_scale, ramp=state.ramp)
        save_png(image, str(tmp["render.png"]))
        write_legend_json(
            state.hues, state.la, str(tmp["legend.json"]),
            degrees=state.hue_degrees())
        write_line_assignment_csv(state.la, str(tmp["lines.csv"]))
        with open(tmp["dendrogram.json"], "w") as fh:
            json.dump(pre.dendro.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        for path in tmp.values():
            path.unlink(missing_ok=True)
        raise
    for name, path in tmp.items():
        os.replace(path, out / name)
    for name in _ARTIFACTS:
        print(out / name)
    return 0


def cmd_synth(args) -> int:
    if args.kind == "illusory":
        ds = gen_illusory(args.n_pattern, args.n_noise, args.fanout, args.seed)
    elif args.kind == "continuation":
        ds = gen_continuation(args.n_per_trend, args.mode, args.seed)
    else:
        ds = gen_disconnected(args.n_per_trend, args.separation, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / "lines.csv"
    labels_path = out / "labels.csv"
    write_trajectory_csv(ds.lineset, str(data_path))
    write_labels_csv(ds.labels, str(labels_path))
    print(data_path)
    print(labels_path)
    return 0


def cmd_eval(args) -> int:
    predicted = read_labels_csv(args.assignment)
    truth = read_labels_csv(args.labels)
    if set(predicted) != set(truth):
        extra = sorted(set(predicted) ^ set(truth))[:5]
        raise ValueError(
            f"line ids differ between assignment and labels (e.g. {extra})")
    order = sorted(truth)
    report = accuracy_report(
        [predicted[i] for i in order],
        [truth[i] for i in order],
        ignore_labels=tuple(args.ignore_label),
    )
    print(f"accuracy {report['accuracy']:.4f} over {report['n_lines']} lines"
          f" ({report['n_unassigned']} unassigned)")
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.json:
        Path(args.json).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port if args.port is not None else int(os.environ.get("PORT", "8000"))
    uvicorn.run(create_app(), host=args.host, port=port)
    return 0


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="trajectory or time-series file (CSV or JSON)")
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--bins", type=_parse_bins, metavar="WxH",
                   help="grid resolution (default 512x256 series, 512x512 trajectories)")
    p.add_argument("--radius", type=float, help="stroke radius in bins")
    p.add_argument("--min-density", type=int, dest="min_density",
                   help="bins below this line count stay uncolored")
    p.add_argument("--sample", type=int, help="max bins clustered")
    p.add_argument("--metric", choices=("overlap", "jaccard", "dice"))
    p.add_argument("--k", type=int, help="cluster count")
    p.add_argument("--seed", type=int)
    p.add_argument("--template", choices=tuple("iVLITYXN"),
                   help="hue wheel template (N = unconstrained)")
    p.add_argument("--log-scale", action=argparse.BooleanOptionalAction,
                   dest="log_scale", default=None,
                   help="logarithmic density ramp (default: on for trajectories)")
    p.add_argument("--scale", type=int, metavar="PX", help="pixels per bin")
    p.add_argument("--out", help="artifact directory (default out)")
    p.add_argument("--kind", choices=("auto", "trajectory", "timeseries"),
                   default="auto", help="input layout (default: detect)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="huelines",
        description="Colorized density plots for dense line charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="run the pipeline, write artifacts")
    _add_render_flags(render)
    render.set_defaults(func=cmd_render)

    synth = sub.add_parser("synth", help="generate a benchmark dataset")
    kinds = synth.add_subparsers(dest="kind", required=True)
    ill = kinds.add_parser("illusory", help="two halves faking one trend")
    ill.add_argument("--n-pattern", type=int, default=400)
    ill.add_argument("--n-noise", type=int, default=100)
    ill.add_argument("--fanout", type=float, default=0.5)
    cont = kinds.add_parser("continuation", help="ambiguous crossing bundles")
    cont.add_argument("--n-per-trend", type=int, default=200)
    cont.add_argument("--mode", choices=("crossing", "touching"),
                      default="crossing")
    disc = kinds.add_parser("disconnected", help="two separate bundles")
    disc.add_argument("--n-per-trend", type=int, default=200)
    disc.add_argument("--separation", type=float, default=0.5)
    for p in (ill, cont, disc):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=".", help="output directory")
        p.set_defaults(func=cmd_synth)

    ev = sub.add_parser("eval", help="score an assignment against labels")
    ev.add_argument("assignment", help="line assignment CSV (from render)")
    ev.add_argument("labels", help="ground-truth line_id,label CSV")
    ev.add_argument("--ignore-label", type=int, action="append", default=[],
                    help="drop lines with this truth label (repeatable)")
    ev.add_argument("--json", help="write the JSON report here instead of stdout")
    ev.set_defaults(func=cmd_eval)

    serve = sub.add_parser("serve", help="start the HTTP session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=None,
                       help="default: PORT environment variable, else 8000")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
