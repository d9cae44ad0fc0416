"""Command line driver.

    risesim generate A_corner_30m -o a30.json
    risesim run --scenario a30.json --structure es --mode dynamic --map out.csv --cdf cdf.csv
    risesim run --scenario a30.json --compare ss1,ss2,es,dee --mode fixed
    risesim compare --scenario a30.json --mode fixed
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from risesim import export, stats
from risesim.engine import (
    STRATEGIES,
    Dynamic,
    Fixed,
    StructureSummary,
    compare_structures,
    evaluate_region,
    parse_mode,
    resolve_beam,
    summarize,
)
from risesim.scenario import CANONICAL_SCENES, ScenarioFile, generate_canonical, load_scenario


class CliError(Exception):
    pass


def _db(v: float) -> str:
    return f"{v:8.2f}" if math.isfinite(v) else f"{'inf':>8}"


def format_summary(rows: Sequence[StructureSummary], mode: str) -> str:
    head = f"{'structure':<10} {'kind':<18} {'mode':<7} {'median':>8} {'p5':>8} {'p95':>8} {'reach':>6} {'cells':>6} {'beam':>7}"
    out = [head, "-" * len(head)]
    for r in rows:
        beam = "-" if r.beam_deg is None else f"{r.beam_deg:7.1f}"
        out.append(
            f"{r.name:<10} {r.kind:<18} {mode:<7} {_db(r.median_db)} {_db(r.p5_db)} {_db(r.p95_db)} "
            f"{r.reachable_fraction:6.3f} {r.cells:>6d} {beam:>7}"
        )
    out.append("attenuation in dB; beam = fixed beam angle from the structure normal in degrees")
    return "\n".join(out)


def _settings(args, scenario: ScenarioFile):
    opts = scenario.options
    mode = args.mode or opts.beam_mode
    strategy = args.beam_strategy or opts.beam_strategy
    shadow_only = opts.shadow_only if args.shadow_only is None else args.shadow_only
    return parse_mode(mode, strategy), mode, shadow_only


def _names(spec: Optional[str], scenario: ScenarioFile) -> list[str]:
    if spec is None:
        return list(scenario.scene.structures)
    names = [n.strip() for n in spec.split(",") if n.strip()]
    if not names:
        raise CliError("--compare needs at least one structure name")
    for n in names:
        scenario.scene.structure(n)
    return names


def _compare(args, scenario: ScenarioFile, names: list[str]) -> int:
    mode, label, shadow_only = _settings(args, scenario)
    rows = compare_structures(scenario.scene, names, mode, shadow_only=shadow_only, workers=args.workers)
    print(format_summary(rows, label))
    return 0


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if (args.structure is None) == (args.compare is None):
        raise CliError("give exactly one of --structure or --compare")
    if args.compare is not None:
        if args.map or args.cdf or args.heatmap:
            raise CliError("--map, --cdf and --heatmap need a single --structure")
        return _compare(args, scenario, _names(args.compare, scenario))

    scene = scenario.scene
    structure = scene.structure(args.structure)
    mode, label, shadow_only = _settings(args, scenario)
    beam = resolve_beam(scene, args.structure, mode, shadow_only)
    pmap = evaluate_region(
        scene, args.structure, Dynamic() if beam is None else Fixed(beam), shadow_only=shadow_only, workers=args.workers
    )
    if args.map:
        export.write_map_csv(pmap, args.map)
    if args.cdf:
        if not pmap.reachable.any():
            raise CliError(f"structure {args.structure!r} reaches no cell; no CDF to write")
        export.write_cdf_csv(stats.cdf(pmap), args.cdf)
    if args.heatmap:
        export.write_pgm(pmap, args.heatmap)
    print(format_summary([summarize(args.structure, structure, pmap, beam)], label))
    return 0


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    return _compare(args, scenario, _names(args.compare, scenario))


def cmd_generate(args) -> int:
    text = generate_canonical(args.scene_id).dumps()
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _eval_options(p: argparse.ArgumentParser):
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--mode", choices=("dynamic", "fixed"), help="beam mode (default: from the scenario)")
    p.add_argument("--beam-strategy", choices=STRATEGIES, help="fixed-beam selection (default: from the scenario)")
    p.add_argument(
        "--shadow-only",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="evaluate only cells shadowed from the base station (default: from the scenario)",
    )
    p.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risesim", description="Metasurface coverage simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate one structure over the region, or compare several")
    _eval_options(run)
    run.add_argument("--structure", help="structure name")
    run.add_argument("--compare", metavar="A,B,...", help="comma-separated structures to summarise")
    run.add_argument("--map", metavar="CSV", help="write the pathloss map (x,y,attenuation_db)")
    run.add_argument("--cdf", metavar="CSV", help="write the CDF (attenuation_db,cdf)")
    run.add_argument("--heatmap", metavar="PGM", help="write a grayscale P2 heatmap")
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="summary table for several structures")
    _eval_options(cmp_)
    cmp_.add_argument("--compare", metavar="A,B,...", help="structures to include (default: all)")
    cmp_.set_defaults(func=cmd_compare)

    gen = sub.add_parser("generate", help="write a canonical scenario file")
    gen.add_argument("scene_id", choices=CANONICAL_SCENES)
    gen.add_argument("-o", "--output", help="output path (default: stdout)")
    gen.set_defaults(func=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
