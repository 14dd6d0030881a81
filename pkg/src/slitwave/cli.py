"""
Command-line interface: run scenarios, evaluate single closed-form
quantities and run the cross-check suite.

Exit codes: 0 success, 1 failed validation, 2 usage or configuration error.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import analytic
from .analytic import SpaceSlitConfig, TimeSlitConfig
from .errors import DimensionError, SlitwaveError
from .registry import ScenarioRegistry, load_spec_file
from .reports import render_template
from .scenarios import NumericSettings, ScenarioSpec, apply_overrides, run_scenario
from .series import OutputRecord, tool_version
from .units import ELECTRON_MASS_EV, Dimension, Particle, convert, derived_kinematics, parse_quantity
from .validation import render_report, run_cross_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2


def _quantity(dimension: Dimension, unit: str) -> Callable[[str], float]:
    """argparse type converting a suffixed quantity to ``unit``."""

    def parse(text: str) -> float:
        try:
            value, given = parse_quantity(text, dimension)
        except DimensionError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
        return float(convert(value, given, unit))

    parse.__name__ = f"{dimension.value} ({unit})"
    return parse


ENERGY = _quantity(Dimension.ENERGY, "eV")
MASS = _quantity(Dimension.MASS, "eV/c^2")
TIME = _quantity(Dimension.TIME, "fs")
LENGTH = _quantity(Dimension.LENGTH, "nm")
PHASE = _quantity(Dimension.DIMENSIONLESS, "rad")


def _particle(args: argparse.Namespace) -> Particle:
    return Particle.from_energy(args.energy, args.mass)


def _energy_unit(value_ev: float) -> Tuple[float, str]:
    if abs(value_ev) < 1.0:
        return value_ev * 1e3, "meV"
    return value_ev, "eV"


# eval operations: each returns a list of (name, value, unit)

Result = List[Tuple[str, float, str]]


def _eval_kinematics(args: argparse.Namespace) -> Result:
    kin = derived_kinematics(_particle(args))
    return [("v0", kin.v0, "nm/fs"), ("lambda_b", kin.lambda_b, "nm"), ("energy", kin.energy, "eV")]


def _eval_displacement(args: argparse.Namespace) -> Result:
    return [("z", float(analytic.classical_displacement(args.t, _particle(args))), "nm")]


def _eval_peak_spacing(args: argparse.Namespace) -> Result:
    value, unit = _energy_unit(analytic.energy_peak_spacing(TimeSlitConfig(tau=args.tau)))
    return [("peak_spacing", value, unit)]


def _eval_peak_energy(args: argparse.Namespace) -> Result:
    cfg = TimeSlitConfig(tau=args.tau, phi=args.phi)
    return [("peak_energy", analytic.time_slit_peak_energies(args.order, cfg, _particle(args)), "eV")]


def _eval_visibility(args: argparse.Namespace) -> Result:
    if not 0.0 <= args.alpha <= 1.0:
        raise SlitwaveError(f"alpha must lie in [0, 1], got {args.alpha}")
    return [("visibility", analytic.fringe_visibility(args.alpha), "1")]


def _eval_period(args: argparse.Namespace) -> Result:
    particle = _particle(args)
    t = args.t if args.t is not None else derived_kinematics(particle).arrival_time(args.z)
    cfg = TimeSlitConfig(tau=args.tau, phi=args.phi)
    return [("period", float(analytic.time_slit_period(args.z, t, cfg, particle)), "fs")]


def _eval_space_period(args: argparse.Namespace) -> Result:
    cfg = SpaceSlitConfig(a=args.a, phi=args.phi)
    return [("period", float(analytic.space_slit_period(args.y, args.t, cfg, _particle(args))), "fs")]


def _eval_maxima_angle(args: argparse.Namespace) -> Result:
    cfg = SpaceSlitConfig(a=args.a, phi=args.phi)
    theta = analytic.space_slit_maxima_angles(args.order, cfg, _particle(args))
    return [("theta", theta, "rad"), ("theta_deg", math.degrees(theta), "deg")]


def _eval_shutter_ratio(args: argparse.Namespace) -> Result:
    particle = _particle(args)
    return [
        ("ratio", float(analytic.shutter_current_ratio(args.z, args.t, particle)), "1"),
        ("flux_ratio", float(analytic.shutter_flux_ratio(args.z, args.t, particle)), "1"),
        ("fresnel_argument", float(analytic.shutter_fresnel_argument(args.z, args.t, particle)), "1"),
    ]


def _add_particle_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--energy", type=ENERGY, required=True, help="kinetic energy, e.g. 0.3eV")
    parser.add_argument(
        "--mass", type=MASS, default=ELECTRON_MASS_EV, help="rest energy, e.g. 938272088eV/c^2 (default: electron)"
    )


def _build_eval_parsers(subparsers: Any) -> None:
    def op(name: str, handler: Callable[[argparse.Namespace], Result], help_text: str, particle: bool = True) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(name, help=help_text, description=help_text)
        if particle:
            _add_particle_args(parser)
        parser.add_argument("--json", action="store_true", help="print a JSON object instead of text")
        parser.set_defaults(evaluate=handler)
        return parser

    op("kinematics", _eval_kinematics, "velocity, de Broglie wavelength and energy")

    p = op("displacement", _eval_displacement, "classical wavefront displacement z = v0 t")
    p.add_argument("--t", type=TIME, required=True, help="elapsed time, e.g. 900fs")

    p = op("peak-spacing", _eval_peak_spacing, "leading-order energy fringe spacing h/tau", particle=False)
    p.add_argument("--tau", type=TIME, required=True, help="pulse delay, e.g. 96fs")

    p = op("peak-energy", _eval_peak_energy, "energy of the n-th time-slit spectral peak")
    p.add_argument("--tau", type=TIME, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--phi", type=PHASE, default=0.0, help="relative phase in rad")

    p = op("visibility", _eval_visibility, "fringe visibility of weighted slits", particle=False)
    p.add_argument("--alpha", type=float, required=True, help="slit weight in [0, 1]")

    p = op("period", _eval_period, "time double-slit transient period at a detector")
    p.add_argument("--tau", type=TIME, required=True)
    p.add_argument("--z", type=LENGTH, required=True, help="detector distance, e.g. 1626nm")
    p.add_argument("--t", type=TIME, default=None, help="time (default: classical arrival time)")
    p.add_argument("--phi", type=PHASE, default=0.0)

    p = op("space-period", _eval_space_period, "space double-slit transient period at a screen position")
    p.add_argument("--a", type=LENGTH, required=True, help="slit separation, e.g. 1um")
    p.add_argument("--y", type=LENGTH, required=True, help="screen position")
    p.add_argument("--t", type=TIME, required=True)
    p.add_argument("--phi", type=PHASE, default=0.0)

    p = op("maxima-angle", _eval_maxima_angle, "angle of the n-th space double-slit maximum")
    p.add_argument("--a", type=LENGTH, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--phi", type=PHASE, default=0.0)

    p = op("shutter-ratio", _eval_shutter_ratio, "shutter transient-to-stationary current ratio")
    p.add_argument("--z", type=LENGTH, required=True)
    p.add_argument("--t", type=TIME, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slitwave",
        description="Free-particle double slits in space and time: closed-form series and a spectral oracle",
        epilog="""
Examples:
  %(prog)s list
  %(prog)s scenario fig1_shutter --format csv
  %(prog)s scenario fig2_time_slit --set config.tau=96fs --numeric --out fig2.json --format json
  %(prog)s eval peak-spacing --tau 96fs
  %(prog)s validate --json
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging threshold (default: WARNING)",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="shorthand for --log-level DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("list", help="list the scenario catalog")
    p.add_argument("--catalog", action="append", type=Path, default=[], metavar="DIR", help="extra scenario directory")
    p.add_argument("--json", action="store_true", help="print the catalog as JSON")

    p = commands.add_parser("scenario", help="run a scenario and write its series")
    p.add_argument("name", nargs="?", help="builtin or catalog scenario name")
    p.add_argument("--spec", type=Path, help="scenario JSON file, or a CSV/JSON output to regenerate")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE",
        help="override a field, e.g. config.tau=96fs (repeatable)",
    )
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument(
        "--numeric", action=argparse.BooleanOptionalAction, default=None,
        help="add (or drop) the numeric oracle series",
    )
    p.add_argument("--catalog", action="append", type=Path, default=[], metavar="DIR", help="extra scenario directory")

    p = commands.add_parser("eval", help="evaluate one closed-form quantity")
    _build_eval_parsers(p.add_subparsers(dest="operation", required=True, metavar="OPERATION"))

    p = commands.add_parser("validate", help="run the analytic-vs-numeric cross-checks")
    p.add_argument("--json", action="store_true", help="print a machine-readable report")
    p.add_argument(
        "--coarse-grid", action="store_true",
        help="force grid spacings below the resolution rule (momentum-window checks must fail)",
    )
    return parser


def _resolve_spec(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ScenarioSpec:
    if (args.name is None) == (args.spec is None):
        parser.error("scenario needs exactly one of NAME or --spec FILE")
    if args.spec is not None:
        spec = load_spec_file(args.spec)
    else:
        spec = ScenarioRegistry(extra_dirs=args.catalog).get_scenario(args.name)
    if args.overrides:
        spec = apply_overrides(spec, args.overrides)
    if args.numeric is True and spec.numeric is None:
        spec = spec.model_copy(update={"numeric": NumericSettings()})
    elif args.numeric is False:
        spec = spec.model_copy(update={"numeric": None})
    return spec


def cmd_scenario(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _resolve_spec(args, parser)
    logger.info(f"Running scenario '{spec.name}'")
    record = OutputRecord.from_result(run_scenario(spec))
    text = record.to_csv() if args.format == "csv" else record.to_json() + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {len(record.rows)} rows to {args.out}")
    return EXIT_OK


def cmd_list(args: argparse.Namespace) -> int:
    registry = ScenarioRegistry(extra_dirs=args.catalog)
    items = [registry.get_scenario_metadata(name) for name in registry.list_scenarios()]
    if args.json:
        print(json.dumps(items, indent=2))
    else:
        sys.stdout.write(render_template("scenario_list.txt.j2", scenarios=items))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    results = args.evaluate(args)
    if args.json:
        payload: Dict[str, Any] = {"operation": args.operation}
        payload.update({name: {"value": value, "unit": unit} for name, value, unit in results})
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    if len(results) == 1:
        _, value, unit = results[0]
        print(f"{value:.10g} {unit}")
    else:
        for name, value, unit in results:
            print(f"{name} = {value:.10g} {unit}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = run_cross_checks(coarse_grid=args.coarse_grid)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, default=float))
    else:
        sys.stdout.write(render_report(report))
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "scenario":
            return cmd_scenario(args, parser)
        if args.command == "list":
            return cmd_list(args)
        if args.command == "eval":
            return cmd_eval(args)
        return cmd_validate(args)
    except SlitwaveError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # pydantic validation of eval parameters (e.g. a negative tau)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
