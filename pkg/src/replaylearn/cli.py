"""Command line: ``replaylearn dims | game | experiment``.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 invalid transcript.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adversaries import ADVERSARIES, make_adversary
from .dimensions import ALL_DIMENSIONS, dimension_report
from .engine import run_game
from .experiments import (
    TABLE1_ROWS,
    ExperimentConfig,
    InvalidTranscriptError,
    convex_scaling,
    overall_status,
    reproduce_table1,
    separation_demo,
    trial_rng,
    write_rows,
)
from .hypotheses import class_from_spec
from .learners import LEARNERS, make_learner

EXIT = {"pass": 0, "fail": 1, "inconclusive": 2, "invalid": 3}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="replaylearn", description="Online learning against replay adversaries.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dims", help="dimensions of a hypothesis class")
    d.add_argument("--class", dest="cls", required=True, help="generator spec like thresholds:8, or a JSON file")
    d.add_argument("--which", default=",".join(ALL_DIMENSIONS), help="comma list from " + ",".join(ALL_DIMENSIONS))

    g = sub.add_parser("game", help="play one game and print its transcript summary")
    g.add_argument("--class", dest="cls", required=True)
    g.add_argument("--learner", required=True, choices=sorted(LEARNERS))
    g.add_argument("--adversary", required=True, choices=ADVERSARIES)
    g.add_argument("--rounds", type=int, default=50)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="write the transcript JSON here")

    e = sub.add_parser("experiment", help="run a named experiment")
    esub = e.add_subparsers(dest="experiment", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int)
    common.add_argument("--rounds", type=int)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    t1 = esub.add_parser("table1", parents=[common])
    t1.add_argument("--row", required=True, choices=TABLE1_ROWS)
    t1.add_argument("--class", dest="cls")
    sep = esub.add_parser("separation", parents=[common])
    sep.add_argument("--n", type=int, default=12, help="grid size of the two-interval class")
    cv = esub.add_parser("convex", parents=[common])
    cv.add_argument("--d", type=int, required=True, choices=(1, 2, 3))
    return p


def _dims(args) -> int:
    H = class_from_spec(args.cls)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    print(json.dumps(dimension_report(H, which).to_json(), indent=1, sort_keys=True))
    return 0


def _game(args) -> int:
    H = class_from_spec(args.cls)
    rng = trial_rng(args.seed, 0)
    learner = make_learner(args.learner, H)
    adversary = make_adversary(args.adversary, H, rng=rng)
    transcript = run_game(learner, adversary, H, args.rounds)
    if args.out:
        transcript.save(args.out)
    summary = {
        "class": H.name,
        "learner": args.learner,
        "adversary": args.adversary,
        "rounds": transcript.T,
        "mistakes": transcript.mistakes,
        "reliable_rounds": len(transcript.state.reliable_indices),
        "valid": transcript.valid,
        "violation": transcript.violation,
    }
    print(json.dumps(summary, sort_keys=True))
    return 0 if transcript.valid else EXIT["invalid"]


def _experiment(args) -> int:
    config = ExperimentConfig(args.experiment, getattr(args, "cls", None), rounds=args.rounds,
                              trials=args.trials or 1, seed=args.seed, out=args.out, format=args.format)
    try:
        if args.experiment == "table1":
            rows = reproduce_table1(args.row, spec=config.class_spec, T=args.rounds, trials=args.trials,
                                    seed=args.seed)
        elif args.experiment == "separation":
            rows = separation_demo(args.n, args.rounds or 200, seed=args.seed)
        else:
            kwargs = {"trials": args.trials} if args.trials else {}
            rows = convex_scaling(args.d, seed=args.seed, **kwargs)
    except InvalidTranscriptError as exc:
        print(f"invalid transcript: {exc}", file=sys.stderr)
        return EXIT["invalid"]
    text = write_rows(rows, config.out, config.format)
    if not config.out:
        sys.stdout.write(text)
    for r in rows:
        print(r.summary(), file=sys.stderr)
    return EXIT[overall_status(rows)]


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"dims": _dims, "game": _game, "experiment": _experiment}[args.command]
    try:
        return handler(args)
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
