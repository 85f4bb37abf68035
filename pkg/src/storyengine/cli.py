"""Command-line entry points: run, validate, export-fabula, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .scenario import load_story_elements, validate_scenario
from .session import ScriptedPolicy, policy_from_file, run_session, storify


def _cmd_run(args) -> int:
    policy = policy_from_file(args.policy, args.seed) if args.policy else ScriptedPolicy([])
    log = run_session(args.scenario, policy, args.seed)
    payload = json.dumps(log, indent=2, sort_keys=True)
    if args.log:
        Path(args.log).write_text(payload)
    else:
        print(payload)
    if args.story:
        for line in storify(log["fabula"]):
            print(line, file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    elements = load_story_elements(args.scenario)
    report = validate_scenario(elements)
    if report:
        for entry in report:
            print(f"warning: {entry}")
        return 1
    print(f"{elements.name}: ok ({len(elements.library)} cases, "
          f"{len(elements.agents)} NPCs, VC={elements.vc})")
    return 0


def _cmd_export_fabula(args) -> int:
    log = json.loads(Path(args.log).read_text())
    payload = json.dumps(log["fabula"], indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload)
    else:
        print(payload)
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.scenario, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storyengine")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play a scenario headless and emit the run log")
    run.add_argument("scenario")
    run.add_argument("--policy", help="scripted player policy file (JSON)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--log", help="write the run log here instead of stdout")
    run.add_argument("--story", action="store_true", help="print the storified log to stderr")
    run.set_defaults(func=_cmd_run)

    validate = sub.add_parser("validate", help="lint a scenario file")
    validate.add_argument("scenario")
    validate.set_defaults(func=_cmd_validate)

    export = sub.add_parser("export-fabula", help="extract the fabula from a run log")
    export.add_argument("log")
    export.add_argument("--out")
    export.set_defaults(func=_cmd_export_fabula)

    serve_p = sub.add_parser("serve", help="host the interactive session service")
    serve_p.add_argument("scenario")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
