import argparse
import logging
import time
from dataclasses import asdict
from pathlib import Path

from fluxmech.core import config
from fluxmech.core.runconfig import payload_hash
from fluxmech.models.results import RunManifest
from fluxmech.repositories import ManifestRepository
from fluxmech.repositories.base import write_json
from fluxmech.services.acceptance import CRITERIA, run_acceptance

logger = logging.getLogger(__name__)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("selftest", parents=[common], help="Run the numbered acceptance checks")
    parser.add_argument("--quick", action="store_true", help="Smaller grids and fewer cases")
    parser.add_argument("--only", type=int, action="append", choices=sorted(CRITERIA), help="Run only this check (repeatable)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    options = {"version": config.VERSION, "quick": bool(args.quick), "only": sorted(set(args.only or [])) or None}
    digest = payload_hash(options)
    tag = digest[:12]
    output_dir = Path(args.output_dir or config.OUTPUT_DIR)
    logger.info(f"[selftest] options hash {tag}, output to {output_dir}")

    results = run_acceptance(quick=args.quick, only=set(options["only"] or []) or None)
    passed = all(r.passed for r in results)
    report = {
        "version": config.VERSION,
        "config_hash": digest,
        "quick": args.quick,
        "passed": passed,
        "criteria": [asdict(r) for r in results],
    }
    path = write_json(report, output_dir / f"selftest-report-{tag}.json")
    manifest = RunManifest(
        command="selftest",
        version=config.VERSION,
        config_hash=digest,
        config=options,
        wall_time=round(time.perf_counter() - started, 3),
        outputs=[path.name],
        status="ok" if passed else "failed",
        summary={"passed": passed, "failed": [r.number for r in results if not r.passed]},
    )
    manifest_path = ManifestRepository(output_dir, "selftest").save(manifest, tag)
    for r in results:
        print(f"{r.number:>2}. {'PASS' if r.passed else 'FAIL'}  {r.name} ({r.seconds:.1f}s)")
    logger.info(f"[selftest] report {path}, manifest {manifest_path}")
    return 0 if passed else 3
