"""
Command-line front end: inspect codes, plan surgery, verify, simulate and check fault distance.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .config import Settings, get_settings
from .exceptions import SurgeryError
from .models.codes import CssCode
from .models.manifest import Manifest, PlanFile, Report, RequestModel
from .models.plan import MeasurementRequest, SurgeryPlan
from .services import spacetime
from .services.css_codes import distance, validate
from .services.logical_basis import basis_from_json
from .services.surgery_planner import plan, plan_to_json
from .services.surgery_runner import run_surgery, transcript_to_json
from .utils.gf2 import read_matrix

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Outcome = Tuple[int, Dict[str, Any]]


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    level = logging.INFO if verbose else getattr(logging, settings.log_level)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def effective_settings(args: argparse.Namespace, base: Optional[Settings] = None) -> Settings:
    """Settings with the command-line overrides applied (and validated)."""
    values = (base or get_settings()).model_dump()
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    if getattr(args, "sigma", None) is not None:
        values["sigma"] = args.sigma
    if getattr(args, "cap", None) is not None:
        values["distance_cap" if args.command == "inspect" else "fault_cap"] = args.cap
    if getattr(args, "experimental_single_window", False):
        values["experimental_single_window"] = True
    return Settings(**values)


def load_code(manifest: Manifest) -> CssCode:
    code = CssCode(read_matrix(manifest.hx), read_matrix(manifest.hz), name=manifest.name)
    validate(code, manifest.sigma)
    return code


def _report(command: str, status: str, **data) -> Dict[str, Any]:
    return Report(command=command, status=status, data=data).dump()


# commands

def cmd_inspect(manifest_path: str, settings: Settings) -> Outcome:
    """n, k, the weight audit and the certified distance when it is within the cap."""
    manifest = Manifest.load(manifest_path)
    code = load_code(manifest)
    report = validate(code, manifest.sigma or settings.sigma)
    result = distance(code, settings=settings)
    data = {
        "name": code.name,
        "n": report["n"],
        "k": report["k"],
        "audit": dict(report["audit"]),
        "distance": result["distance"] if result["certified"] else None,
        "distance_certified": result["certified"],
        "exceeds_cap": result["exceeds_cap"],
        "cap": settings.distance_cap,
    }
    passed = report["audit"]["passed"] is not False
    return (EXIT_OK if passed else EXIT_FAILED), _report("inspect", "pass" if passed else "fail", **data)


def rebuild_plan(plan_file: PlanFile, settings: Optional[Settings] = None) -> SurgeryPlan:
    """Re-run synthesis from the recorded manifest, request, seed and settings."""
    settings = settings or Settings(**plan_file.settings)
    manifest = Manifest.load(plan_file.manifest)
    code = load_code(manifest)
    basis = None
    if manifest.basis is not None:
        basis = basis_from_json(json.loads(Path(manifest.basis).read_text()), code)
    request = MeasurementRequest(tuple(plan_file.request.parsed_products()), plan_file.request.mode)
    return plan(code, request, settings=settings, seed=plan_file.seed,
                force_branch=plan_file.force_branch, basis=basis)


def cmd_plan(manifest_path: str, request_path: str, settings: Settings, mode: Optional[str] = None,
             force_branch: bool = False) -> Outcome:
    request = RequestModel.load(request_path)
    if mode is not None:
        request = RequestModel(products=request.products, mode=mode, spec=request.spec)
    plan_file = PlanFile(
        manifest=str(Path(manifest_path).resolve()),
        request=request,
        seed=settings.seed,
        force_branch=force_branch,
        settings=settings.model_dump(),
    )
    result = rebuild_plan(plan_file, settings)
    plan_file.report = _report("plan", "pass" if result.certified else "fail", **plan_to_json(result))
    logger.info(f"Planned {len(result.products)} products on {result.code.name}")
    return (EXIT_OK if result.certified else EXIT_FAILED), plan_file.dump()


def cmd_verify(plan_path: str) -> Outcome:
    """Rebuild the plan and report each certification; inconclusive ones are flagged, not failed."""
    result = rebuild_plan(PlanFile.load(plan_path))
    certifications = {name: c.to_json() for name, c in result.certifications.items()}
    failed = result.failed_certifications()
    inconclusive = sorted(n for n, c in result.certifications.items() if not c.conclusive)
    status = "fail" if failed else ("inconclusive" if inconclusive else "pass")
    data = {"certifications": certifications, "failed": failed, "inconclusive": inconclusive}
    if result.stages:
        data["stages"] = [
            {"label": label, "certified": stage.certified, "failed": stage.failed_certifications()}
            for label, stage in zip(result.stage_labels, result.stages)
        ]
    return (EXIT_FAILED if failed else EXIT_OK), _report("verify", status, **data)


def cmd_simulate(plan_path: str, seed: int, spec_path: Optional[str] = None,
                 rounds: Optional[int] = None) -> Outcome:
    plan_file = PlanFile.load(plan_path)
    spec = json.loads(Path(spec_path).read_text()) if spec_path else plan_file.request.spec
    result = rebuild_plan(plan_file)
    transcript = run_surgery(result, spec, seed=seed, rounds=rounds)
    data = transcript_to_json(transcript)
    restored = transcript.get("restored", True)
    return (EXIT_OK if restored else EXIT_FAILED), _report("simulate", "pass" if restored else "fail", **data)


def cmd_faultcheck(plan_path: str, window: str, settings: Settings, rounds: Optional[int] = None,
                   search: str = "full", export: Optional[str] = None) -> Outcome:
    result = rebuild_plan(PlanFile.load(plan_path))
    model = spacetime.window_model(result, window, rounds)
    if export:
        Path(export).write_text(spacetime.export_model(model))
    determinism = spacetime.audit_determinism(model, seed=settings.seed)
    stabilizers = spacetime.audit_stabilizers(model)
    found = spacetime.fault_distance(model, settings.fault_cap, search, settings)
    status = found["status"]
    if not (determinism["passed"] and stabilizers["passed"]):
        status = "fail"
    data = {
        "window": window,
        "model": spacetime.model_report(model),
        "determinism": dict(determinism),
        "stabilizers": dict(stabilizers),
        "fault_distance": dict(found),
    }
    return (EXIT_FAILED if status == "fail" else EXIT_OK), _report("faultcheck", status, **data)


# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psurgery",
        description="Synthesize and verify parallel code-surgery measurements on CSS LDPC codes.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr.")
    parser.add_argument("--out", default=None, help="Write the JSON report here instead of stdout.")
    sub = parser.add_subparsers(dest="command", required=True)

    inspect = sub.add_parser("inspect", help="Validate a code and certify its distance.")
    inspect.add_argument("manifest")
    inspect.add_argument("--cap", type=int, default=None, help="Largest distance to search.")
    inspect.add_argument("--sigma", type=int, default=None, help="Weight bound of the LDPC audit.")

    plan_cmd = sub.add_parser("plan", help="Synthesize a surgery plan for a request.")
    plan_cmd.add_argument("manifest")
    plan_cmd.add_argument("request")
    plan_cmd.add_argument("--seed", type=int, default=None)
    plan_cmd.add_argument("--sigma", type=int, default=None)
    plan_cmd.add_argument("--mode", choices=["disjoint", "same-or-identity", "commuting"], default=None,
                          help="Override the request's measurement mode.")
    plan_cmd.add_argument("--force-branch", action="store_true",
                          help="Branch representatives even when nothing overlaps.")
    plan_cmd.add_argument("--experimental-single-window", action="store_true",
                          help="Merge the branch and measure windows.")

    verify = sub.add_parser("verify", help="Recompute the certifications of a plan file.")
    verify.add_argument("plan")

    simulate = sub.add_parser("simulate", help="Run a plan on the stabilizer simulator.")
    simulate.add_argument("plan")
    simulate.add_argument("--spec", default=None, help="JSON file of logical eigenvalues of the input.")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--rounds", type=int, default=None)

    faultcheck = sub.add_parser("faultcheck", help="Certify the fault distance of one window.")
    faultcheck.add_argument("plan")
    faultcheck.add_argument("--window", choices=["branch", "measure", "unbranch"], default="branch")
    faultcheck.add_argument("--cap", type=int, default=None)
    faultcheck.add_argument("--rounds", type=int, default=None)
    faultcheck.add_argument("--search", choices=["full", "time-only"], default="full")
    faultcheck.add_argument("--export", default=None, help="Write the detector model in line format.")
    return parser


def _dispatch(args: argparse.Namespace, settings: Settings) -> Outcome:
    handlers: Dict[str, Callable[[], Outcome]] = {
        "inspect": lambda: cmd_inspect(args.manifest, settings),
        "plan": lambda: cmd_plan(args.manifest, args.request, settings, args.mode, args.force_branch),
        "verify": lambda: cmd_verify(args.plan),
        "simulate": lambda: cmd_simulate(args.plan, settings.seed, args.spec, args.rounds),
        "faultcheck": lambda: cmd_faultcheck(args.plan, args.window, settings, args.rounds, args.search,
                                             args.export),
    }
    return handlers[args.command]()


def _emit(report: Dict[str, Any], out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        0 on success, 1 on a certification failure, 2 on a usage or parse error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        settings = effective_settings(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(settings, args.verbose)

    try:
        code, report = _dispatch(args, settings)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        _emit(_report(args.command, "error", error=str(e)), args.out)
        return EXIT_USAGE
    except (SurgeryError, ValueError, OSError, json.JSONDecodeError) as e:
        usage = isinstance(e, (ValueError, OSError))
        logger.error(f"{args.command} failed: {e}")
        _emit(_report(args.command, "error", error=str(e), kind=type(e).__name__), args.out)
        return EXIT_USAGE if usage else EXIT_FAILED

    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
