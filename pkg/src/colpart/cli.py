"""``colpart`` command line: dim, compose, verify, homology, stability.

Exit codes: 0 all assertions passed, 1 an assertion failed, 2 usage or
configuration error, 3 budget exceeded. Reports are JSON with sorted keys, so an
identical configuration gives byte-identical output whatever ``--threads`` is.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .algebra import AlgebraContext, element_from_json, element_to_json, multiply
from .diagrams import count_diagrams
from .errors import BudgetExceeded, ColpartError, UsageError, VerificationFailed
from .groups import FiniteGroup, parse_group, wreath_product
from .homology.bar import DEFAULT_BUDGET_MB
from .homology.tor import HomologyResult, compare_stability, tor_of_algebra, tor_of_group
from .rings import Ring, parse_ring
from .verify import SUITES, run_suite


@dataclass
class RunConfig:
    command: str
    n: int | None
    group: str
    delta: str
    coeff: str
    max_q: int | None = None
    height: int | None = None
    seed: int = 0
    budget_mb: int = DEFAULT_BUDGET_MB
    suite: str | None = None
    side: str | None = None

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class Resolved:
    config: RunConfig
    group: FiniteGroup
    ring: Ring
    delta: object
    threads: int


def _resolve(args: argparse.Namespace) -> Resolved:
    """Parse and validate every flag before any computation starts."""
    group = parse_group(args.group)
    ring = parse_ring(args.coeff)
    delta = ring.parse(args.delta)
    n = getattr(args, "n", None)
    if n is not None and n < 1:
        raise UsageError("--n must be positive")
    max_q = getattr(args, "max_q", None)
    if max_q is None and args.command in ("homology", "stability"):
        max_q = max(n - 1, 0)
    if max_q is not None and max_q < 0:
        raise UsageError("--max-q must be >= 0")
    height = getattr(args, "height", None)
    if args.command == "verify" and args.suite == "cover":
        if height is None:
            height = max(n - 1, 0)
        if not 0 <= height <= max(n - 1, 0):
            raise UsageError(f"--height must lie in 0..{max(n - 1, 0)}")
    else:
        height = None
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.budget_mb <= 0:
        raise UsageError("--budget-mb must be positive")
    if args.seed < 0 or args.seed >= 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    cfg = RunConfig(
        command=args.command,
        n=n,
        group=args.group,
        delta=ring.format(delta),
        coeff=str(ring),
        max_q=max_q,
        height=height,
        seed=args.seed,
        budget_mb=args.budget_mb,
        suite=getattr(args, "suite", None),
        side=getattr(args, "side", None),
    )
    return Resolved(cfg, group, ring, delta, args.threads)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, default=str) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _side_report(side: str, result: HomologyResult, res: Resolved, asserted: int) -> dict:
    rep = {
        "side": side,
        "ring": str(res.ring),
        "delta": res.config.delta if side == "algebra" else None,
        "betti": result.payload(),
        "asserted_range": asserted,
        "d_squared_zero": result.d_squared_zero,
    }
    if result.notes:
        rep["notes"] = result.notes
    return rep


# ---------------------------------------------------------------- commands


def cmd_dim(res: Resolved, args) -> tuple[dict, int]:
    n, order = res.config.n, res.group.order
    dim = count_diagrams(n, order)
    perm = order**n * math.factorial(n)
    return {"dim": dim, "permutation": perm, "ideal": dim - perm, "config": res.config.to_json()}, 0


def _file_n(data: dict) -> int | None:
    if "n" in data:
        return int(data["n"])
    terms = data.get("terms") or []
    return int(terms[0]["diagram"]["n"]) if terms else None


def cmd_compose(res: Resolved, args) -> tuple[dict, int]:
    docs = []
    for f in args.files:
        try:
            docs.append(json.loads(Path(f).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {f}: {exc}") from None
    sizes = {m for m in (_file_n(d) for d in docs) if m is not None}
    if res.config.n is not None:
        sizes.add(res.config.n)
    if len(sizes) != 1:
        raise UsageError("cannot determine a single n from the inputs; pass --n")
    (n,) = sizes
    ctx = AlgebraContext(n, res.group, res.delta, res.ring)
    product = ctx.one
    for d in docs:
        product = multiply(ctx, product, element_from_json(ctx, d))
    return element_to_json(product), 0


def cmd_verify(res: Resolved, args) -> tuple[dict, int]:
    ctx = AlgebraContext(res.config.n, res.group, res.delta, res.ring)
    rep = run_suite(args.suite, ctx, seed=res.config.seed, height=res.config.height)
    rep["config"] = res.config.to_json()
    return rep, 0 if rep["pass"] else 1


def cmd_homology(res: Resolved, args) -> tuple[dict, int]:
    cfg = res.config
    asserted = min(cfg.max_q, cfg.n - 1)
    if args.side == "algebra":
        ctx = AlgebraContext(cfg.n, res.group, res.delta, res.ring)
        result = tor_of_algebra(ctx, cfg.max_q, budget_mb=cfg.budget_mb, threads=res.threads)
    else:
        result = tor_of_group(wreath_product(res.group, cfg.n), res.ring, cfg.max_q, budget_mb=cfg.budget_mb, threads=res.threads)
    rep = _side_report(args.side, result, res, asserted)
    rep["config"] = cfg.to_json()
    return rep, 0


def cmd_stability(res: Resolved, args) -> tuple[dict, int]:
    cfg = res.config
    ctx = AlgebraContext(cfg.n, res.group, res.delta, res.ring)
    cmp = compare_stability(ctx, cfg.max_q, budget_mb=cfg.budget_mb, threads=res.threads)
    asserted = cmp["asserted_range"]
    rep = {
        "asserted_range": asserted,
        "pass": cmp["pass"],
        "mismatches": cmp["mismatches"],
        "sides": [
            _side_report("algebra", cmp["algebra"], res, asserted),
            _side_report("wreath", cmp["wreath"], res, asserted),
        ],
        "config": cfg.to_json(),
    }
    return rep, 0 if cmp["pass"] else 1


COMMANDS = {
    "dim": cmd_dim,
    "compose": cmd_compose,
    "verify": cmd_verify,
    "homology": cmd_homology,
    "stability": cmd_stability,
}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--group", default="trivial", help="trivial, C:m, S:m, prod:A,B or table:FILE.json")
    shared.add_argument("--delta", default="1", help='parameter δ in the coefficient ring, e.g. "2", "-1", "2/3"')
    shared.add_argument("--coeff", default="Q", help="Q, Z or F:p")
    shared.add_argument("--seed", type=int, default=0, help="seed for every sampled check (default 0)")
    shared.add_argument("--threads", type=int, default=1, help="cap on worker threads; results do not depend on it")
    shared.add_argument("--budget-mb", type=int, default=DEFAULT_BUDGET_MB)
    shared.add_argument("--out", help="write the JSON report here instead of stdout")
    shared.add_argument("--timings", action="store_true", help="add runtime_ms to the report (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="colpart", description="Coloured partition algebras and their homology.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dim", parents=[shared], help="count diagrams, permutation diagrams and the ideal")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("compose", parents=[shared], help="multiply diagram/element JSON files left to right")
    s.add_argument("files", nargs="+")
    s.add_argument("--n", type=int)

    s = sub.add_parser("verify", parents=[shared], help="run a verification suite")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--height", type=int)

    s = sub.add_parser("homology", parents=[shared], help="Tor of the algebra or of the wreath product")
    s.add_argument("--side", choices=("algebra", "wreath"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-q", type=int)

    s = sub.add_parser("stability", parents=[shared], help="compare both sides in degrees q <= n-1")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--max-q", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        res = _resolve(args)
        payload, code = COMMANDS[args.command](res, args)
    except UsageError as exc:
        print(f"colpart: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"colpart: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except VerificationFailed as exc:
        _emit({"pass": False, "error": str(exc), "witness": exc.witness, "config": res.config.to_json()}, args.out)
        return 1
    except ColpartError as exc:
        print(f"colpart: error: {exc}", file=sys.stderr)
        return 1
    if args.timings:
        payload["runtime_ms"] = round((time.perf_counter() - start) * 1000)
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
