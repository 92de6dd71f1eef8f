"""Command-line front end.

Subcommands:

* ``play``       -- run a refereed match between named strategies, write the
                    trace and a one-line CSV summary;
* ``construct``  -- build and exactly verify a combinatorial family;
* ``verify``     -- re-check a trace or family file offline;
* ``demo``       -- edge-coloring and allocator walkthroughs, ball-count CSV.

Exit codes: 0 ok, 1 assertion/verification failure, 2 configuration error.
Dyadic flags accept "a/2^b" or power-of-two denominators like "1/128".
Relative output paths land in $CANTORGAMES_OUTDIR when that is set.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import alice as alice_mod
from . import bobs, constructions, families, restricted
from .dyadic import Dyadic
from .referee import GameConfig, run_match, verify_trace, write_trace

OUTDIR_ENV = "CANTORGAMES_OUTDIR"


class ConfigError(Exception):
    pass


def _outpath(path: str) -> str:
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _dyadic(text: str) -> Dyadic:
    try:
        return Dyadic.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def default_static_plan(sizes: list[Dyadic]) -> dict[Dyadic, Dyadic]:
    """Roughly uniform dyadic shares over the given sizes, smaller sizes first."""
    k = len(sizes)
    if k == 0:
        raise ConfigError("no sizes to plan regions for")
    base_exp = (k - 1).bit_length()  # 2^base_exp >= k
    shares = [Dyadic(1, base_exp)] * k
    leftover = Dyadic(1) - Dyadic(1, base_exp).scaled(k)
    i = 0
    while leftover:
        step = Dyadic(1, base_exp)
        if step > leftover:
            step = leftover
        shares[i] = shares[i] + step
        leftover = leftover - step
        i = (i + 1) % k
    return dict(zip(sizes, shares))


def _build_alice(args, config: GameConfig):
    name = args.alice
    if name == "stages":
        cfg = alice_mod.StageAliceConfig(
            d=config.d,
            vertex_budget=config.vertex_budget,
            harvest_target=args.harvest_target,
            bipartite=config.kind == "bipartite",
            allow_full_budget=config.d == Dyadic(1),
        )
        return alice_mod.StageAlice(cfg)
    if name == "random-legal":
        if config.kind != "restricted":
            raise ConfigError("random-legal plays the restricted game")
        return restricted.RandomRestrictedAlice(
            config.n, config.p, config.d, args.requests, args.seed
        )
    if name == "pass":
        return bobs.PassAlice()
    raise ConfigError(f"unknown alice strategy {name!r}")


def _stage_sizes(config: GameConfig) -> list[Dyadic]:
    sched = alice_mod.eps_schedule(config.d, allow_full_budget=config.d == Dyadic(1))
    return list(sched.eps)  # eps[N] doubles as the final request size


def _build_bob(args, config: GameConfig):
    name = args.bob
    if name == "greedy-fixed":
        return bobs.GreedyFixed()
    if name == "regions-static":
        return bobs.RegionsStatic(default_static_plan(_stage_sizes(config)))
    if name == "regions-dynamic":
        s = args.s if args.s else len(_stage_sizes(config))
        return bobs.RegionsDynamic(s)
    if name == "restricted":
        rcfg = restricted.RestrictedBobConfig(
            n=config.n, p=config.p, d=config.d, seed=args.seed
        )
        return restricted.RestrictedBob(rcfg)
    if name == "pass":
        return bobs.PassBob()
    raise ConfigError(f"unknown bob strategy {name!r}")


def cmd_play(args) -> int:
    d = _dyadic(args.d)
    config = GameConfig(
        kind=args.kind,
        d=d,
        c=_dyadic(args.c),
        n=args.n,
        p=args.p,
        max_moves=args.max_moves,
        vertex_budget=args.vertex_budget,
    )
    alice = _build_alice(args, config)
    bob = _build_bob(args, config)
    result = run_match(config, alice, bob)
    if args.out:
        write_trace(_outpath(args.out), config, result)
    if args.summary:
        _write_summary_csv(_outpath(args.summary), result)
    print(f"winner={result.winner} reason={result.reason} moves={result.moves}")
    for key, value in sorted(result.summary.items()):
        if key not in ("winner", "reason", "moves"):
            print(f"  {key}={value}")
    if args.expect and args.expect != result.winner:
        print(f"expected winner {args.expect}, got {result.winner}", file=sys.stderr)
        return 1
    return 0


def _write_summary_csv(path: str, result) -> None:
    import csv

    flat = {
        "winner": result.winner,
        "reason": result.reason,
        "moves": result.moves,
        "edges": result.summary["edges"],
        "max_vertex_load": result.summary["max_vertex_load"],
        "digest": result.final_digest,
    }
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(flat))
        writer.writeheader()
        writer.writerow(flat)


def cmd_construct(args) -> int:
    if args.what == "coloring":
        params = families.ColoringFamilyParams(
            members=args.members, r=args.r, ell=args.ell
        )
        fam = families.build_coloring_family(params, args.seed)
        cert = families.coloring_certificate(params)
        hyps = families.coloring_hypotheses(params)
        if args.out:
            families.save_coloring_family(_outpath(args.out), fam)
        print(f"coloring family: {params}")
    else:
        params = families.DominanceFamilyParams(members=args.members, s=args.s)
        fam = families.build_dominance_family(params, args.seed)
        cert = families.dominance_certificate(params)
        hyps = families.dominance_hypotheses(params)
        if args.out:
            families.save_dominance_family(_outpath(args.out), fam)
        print(f"dominance family: {params}")
    print(f"certificate: {cert}")
    print(f"hypotheses: {hyps}")
    return 0


def cmd_verify(args) -> int:
    try:
        if args.what == "trace":
            report = verify_trace(args.path)
            print(f"trace ok: {report}")
        elif args.what == "coloring":
            fam = families.load_coloring_family(args.path)
            bad = families.coloring_first_condition_violation(fam)
            if bad:
                print(f"coloring family INVALID: {bad}", file=sys.stderr)
                return 1
            print(f"coloring family ok: {fam.params}")
        else:
            fam = families.load_dominance_family(args.path)
            bad = families.dominance_violation(fam)
            if bad:
                print(f"dominance family INVALID: {bad}", file=sys.stderr)
                return 1
            print(f"dominance family ok: {fam.params}")
    except (ValueError, AssertionError, KeyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_demo(args) -> int:
    if args.what == "edge-coloring":
        rng = random.Random(args.seed)
        coloring = constructions.EdgeColoring()
        n = 3
        edges = []
        while len(edges) < 12:
            u = f"s{rng.randrange(8)}"
            v = f"s{rng.randrange(8)}"
            if u != v and (u, v) not in edges and (v, u) not in edges:
                edges.append((u, v))
        print(f"online (n+1)-bit edge coloring at level n={n}:")
        for u, v in edges:
            print(f"  edge {u}--{v} -> color {coloring.add_edge(n, u, v)}")
    elif args.what == "allocator":
        alloc = constructions.PairAllocator()
        steps = [
            ("x", "y", Dyadic(1, 1)),
            ("x", "z", Dyadic(1, 2)),
            ("y", "z", Dyadic(1, 2)),
            ("x", "y", Dyadic(1, 2)),
        ]
        print("semimeasure allocator walkthrough (each step carves r/2):")
        for x, y, r in steps:
            pieces = alloc.step(x, y, r)
            print(
                f"  +{r} on ({x},{y}): added {list(pieces.intervals)}, "
                f"measure now {alloc.set_of(x, y).measure()}"
            )
        alloc.check_invariants()
        print("  invariants check out")
    else:  # balls
        n = args.n
        lines = ["n,m,count"]
        for m in range(0, n // 2 + 1):
            count = constructions.prefix_suffix_ball("0" * n, m)
            lines.append(f"{n},{m},{count}")
        text = "\n".join(lines)
        if args.out:
            with open(_outpath(args.out), "w") as fh:
                fh.write(text + "\n")
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantorgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="run a refereed match")
    play.add_argument("--kind", choices=("nonbipartite", "bipartite", "restricted"),
                      default="nonbipartite")
    play.add_argument("--d", default="1/2")
    play.add_argument("--c", default="1")
    play.add_argument("--n", type=int, default=None)
    play.add_argument("--p", type=int, default=None)
    play.add_argument("--alice", default="stages")
    play.add_argument("--bob", default="greedy-fixed")
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--max-moves", type=int, default=200_000)
    play.add_argument("--vertex-budget", type=int, default=None)
    play.add_argument("--harvest-target", type=int, default=None)
    play.add_argument("--requests", type=int, default=1000)
    play.add_argument("--s", type=int, default=0, help="regions-dynamic size count")
    play.add_argument("--out", default=None, help="trace file")
    play.add_argument("--summary", default=None, help="summary CSV")
    play.add_argument("--expect", choices=("alice", "bob"), default=None)
    play.set_defaults(func=cmd_play)

    construct = sub.add_parser("construct", help="build + verify a family")
    construct.add_argument("what", choices=("coloring", "dominance"))
    construct.add_argument("--members", type=int, required=True)
    construct.add_argument("--r", type=int, default=8)
    construct.add_argument("--ell", type=int, default=4096)
    construct.add_argument("--s", type=int, default=256)
    construct.add_argument("--seed", type=int, default=0)
    construct.add_argument("--out", default=None)
    construct.set_defaults(func=cmd_construct)

    verify = sub.add_parser("verify", help="re-check a trace or family file")
    verify.add_argument("what", choices=("trace", "coloring", "dominance"))
    verify.add_argument("path")
    verify.set_defaults(func=cmd_verify)

    demo = sub.add_parser("demo", help="walkthroughs and CSV emitters")
    demo.add_argument("what", choices=("edge-coloring", "allocator", "balls"))
    demo.add_argument("--n", type=int, default=24)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--out", default=None)
    demo.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
