"""Command-line front end.

Exit status is 0 on success, 1 when a verification fails and 2 on
malformed input.  ``--format lines`` gives stable line-oriented output
with no timings, suitable for diffing runs.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import acceptance
from .algebra import (
    FIXPOINT_EQUATION, MV_EQUATIONS, PMV_EQUATION, PMV_MONOID, CongruenceBoundError,
    FiniteChain, RationalSampler, check_identity, dmv_equations,
    enumerate_congruences, evaluate, parse_algebra,
)
from .calculus import (
    ProofFormatError, SearchBudget, check_proof, format_proof, parse_proof,
    replay_prop33,
)
from .degrees import (
    PreconditionError, ProductNodeError, RegionCapError, compactness_probe,
    pavelka_gap, truth_degree_exact, truth_degree_grid,
)
from .syntax import (
    FULL, FormulaSyntaxError, LogicProfile, ProfileError, Theory,
    format_rational, parse, parse_rational, parse_theory, to_text,
)

EXIT_OK, EXIT_FAILED, EXIT_MALFORMED = 0, 1, 2


class InputError(Exception):
    """Malformed input; reported with exit status 2."""


@dataclass
class RunConfig:
    command: str
    profile: LogicProfile = FULL
    inputs: list[str] = field(default_factory=list)
    seed: int = 0
    budget_steps: int = 4000
    region_cap: int = 24
    eps: Fraction = Fraction(1, 100)
    delta: Fraction = Fraction(1, 100)
    format: str = "human"
    out: str | None = None


def _fraction(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", default="all",
                        help="comma-separated: base, product, division, fixpoint, constants, or all")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-steps", type=int, default=4000)
    common.add_argument("--region-cap", type=int, default=24)
    common.add_argument("--eps", type=_fraction, default=Fraction(1, 100))
    common.add_argument("--delta", type=_fraction, default=Fraction(1, 100))
    common.add_argument("--format", choices=("human", "lines"), default="human")
    common.add_argument("--out", default=None, help="write the proof file (or the report) here")

    parser = argparse.ArgumentParser(prog="mvpavelka", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula at a valuation")
    p.add_argument("formula")
    p.add_argument("--val", default="", help="assignments such as p=7/10,q=3/5")

    p = sub.add_parser("degree", parents=[common], help="truth degree of a formula in a theory")
    p.add_argument("formula")
    p.add_argument("--theory", help="theory file")
    p.add_argument("--method", choices=("auto", "exact", "grid"), default="auto")

    p = sub.add_parser("check", parents=[common], help="check a proof file")
    p.add_argument("proof")

    p = sub.add_parser("axioms", parents=[common], help="identity suites for the profile")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--max-chain", type=int, default=6)

    p = sub.add_parser("gap", parents=[common], help="proof degree lower bound against truth degree")
    p.add_argument("formula")
    p.add_argument("--theory", help="theory file")

    p = sub.add_parser("compact", parents=[common], help="minimal sub-theory keeping a degree")
    p.add_argument("formula")
    p.add_argument("--theory", required=True, help="theory file")
    p.add_argument("--r", type=_fraction, required=True)
    p.add_argument("--max-generators", type=int, default=12)

    p = sub.add_parser("congr", parents=[common], help="congruences of a finite algebra")
    p.add_argument("algebra")
    p.add_argument("--reduct", default="->,0", help="operations of the reduct to compare with")

    p = sub.add_parser("replay", parents=[common], help="emit and check a built-in derivation")
    p.add_argument("name", choices=("prop33",))
    p.add_argument("--alpha", default="p")
    p.add_argument("--beta", default="q")
    p.add_argument("--gamma", default="r")

    p = sub.add_parser("suite", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", default="1,2,3,4,5,6,7,8,9,10", help="criterion numbers")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _theory(path: str | None, profile: LogicProfile) -> Theory:
    if path is None:
        return Theory((), profile)
    return parse_theory(_read(path), profile)


def _valuation(text: str) -> dict[str, Fraction]:
    out = {}
    for part in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in part:
            raise InputError(f"bad assignment {part!r}; expected name=value")
        name, value = (t.strip() for t in part.split("=", 1))
        out[name] = parse_rational(value)
    return out


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def __call__(self, line: str = "", human_only: bool = False):
        if human_only and self.fmt == "lines":
            return
        self.lines.append(line)

    def text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


def _seed(args) -> int:
    env = os.environ.get("MVPAVELKA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"MVPAVELKA_SEED must be an integer, got {env!r}") from None
    return args.seed


def cmd_eval(args, cfg: RunConfig, out: Output) -> int:
    f = parse(args.formula, cfg.profile)
    out(format_rational(evaluate(f, _valuation(args.val))))
    return EXIT_OK


def cmd_degree(args, cfg: RunConfig, out: Output) -> int:
    phi = parse(args.formula, cfg.profile)
    theory = _theory(args.theory, cfg.profile)
    method = args.method
    if method == "auto":
        try:
            d = truth_degree_exact(phi, theory, cfg.region_cap)
        except ProductNodeError:
            d = truth_degree_grid(phi, theory, cfg.eps, cfg.delta)
    elif method == "exact":
        d = truth_degree_exact(phi, theory, cfg.region_cap)
    else:
        d = truth_degree_grid(phi, theory, cfg.eps, cfg.delta)
    if cfg.format == "lines":
        for line in d.lines():
            out(line)
    else:
        out(d.summary())
        if d.note:
            out(d.note)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig, out: Output) -> int:
    proof = parse_proof(_read(args.proof), None if args.profile == "all" else cfg.profile)
    verdict = check_proof(proof)
    for line in verdict.lines():
        out(line)
    return EXIT_OK if verdict.accepted else EXIT_FAILED


def _identity_suites(profile: LogicProfile, seed: int, trials: int, max_chain: int):
    chains = [FiniteChain.with_elements(m) for m in range(2, max_chain + 1)]
    for key, eqs in MV_EQUATIONS.items():
        for lhs, rhs in eqs:
            for chain in chains:
                yield f"mv{key}", lhs, rhs, f"L{len(chain)}", chain
            yield f"mv{key}", lhs, rhs, "random", RationalSampler(trials, seed)
    if profile.product_enabled:
        for lhs, rhs in [PMV_EQUATION, *PMV_MONOID]:
            yield "pmv", lhs, rhs, "random", RationalSampler(trials, seed)
    if profile.division_enabled:
        for n in range(1, 13):
            for lhs, rhs in dmv_equations(n):
                yield f"dmv{n}", lhs, rhs, "random", RationalSampler(max(trials // 10, 1), seed + n)
    if profile.fixpoint_enabled:
        yield "fix", *FIXPOINT_EQUATION, "random", RationalSampler(1, seed)


def cmd_axioms(args, cfg: RunConfig, out: Output) -> int:
    failed = 0
    for label, lhs, rhs, model_name, model in _identity_suites(cfg.profile, cfg.seed, args.trials, args.max_chain):
        rep = check_identity(lhs, rhs, model, max_counterexamples=3)
        failed += not rep.passed
        for line in rep.lines():
            out(f"{label} {to_text(lhs)} = {to_text(rhs)} on {model_name}: {line}")
    out(f"failures {failed}")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def _emit_proof(proof_text: str, cfg: RunConfig, out: Output):
    if cfg.out:
        Path(cfg.out).write_text(proof_text, encoding="utf-8")
    else:
        for line in proof_text.rstrip("\n").splitlines():
            out(line)


def cmd_gap(args, cfg: RunConfig, out: Output) -> int:
    phi = parse(args.formula, cfg.profile)
    theory = _theory(args.theory, cfg.profile)
    if not theory.profile.constants_enabled:
        raise ProfileError("the gap harness needs the constants profile")
    report = pavelka_gap(phi, theory, SearchBudget(max_steps=cfg.budget_steps),
                         cfg.region_cap, cfg.eps, cfg.delta)
    for line in report.lines():
        out(line)
    _emit_proof(format_proof(report.proof_lower.proof), cfg, out)
    return EXIT_OK if report.sound else EXIT_FAILED


def cmd_compact(args, cfg: RunConfig, out: Output) -> int:
    phi = parse(args.formula, cfg.profile)
    theory = _theory(args.theory, cfg.profile)
    res = compactness_probe(phi, theory, args.r, args.max_generators, cfg.region_cap)
    for line in res.lines():
        out(line)
    return EXIT_OK


def cmd_congr(args, cfg: RunConfig, out: Output) -> int:
    try:
        alg = parse_algebra(_read(args.algebra))
    except ValueError as exc:
        raise InputError(f"{args.algebra}: {exc}") from None
    reduct = tuple(t.strip() for t in args.reduct.split(",") if t.strip())
    full = enumerate_congruences(alg)
    for line in full.lines():
        out(line)
    if set(reduct) <= set(alg.ops) and set(reduct) != set(alg.ops):
        base = enumerate_congruences(alg, reduct)
        same = base.partitions == full.partitions
        out(f"reduct {' '.join(reduct)} congruences {len(base)}")
        out(f"expansion compatible: {'yes' if same else 'no'}")
    return EXIT_OK


def cmd_replay(args, cfg: RunConfig, out: Output) -> int:
    parts = [parse(t, cfg.profile) for t in (args.alpha, args.beta, args.gamma)]
    proof = replay_prop33(*parts)
    verdict = check_proof(proof)
    _emit_proof(format_proof(proof), cfg, out)
    out(f"# verdict: {verdict.lines()[0]}")
    return EXIT_OK if verdict.accepted else EXIT_FAILED


def cmd_suite(args, cfg: RunConfig, out: Output) -> int:
    try:
        numbers = [int(t) for t in args.only.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad criterion list {args.only!r}") from None
    ok = True
    for n in numbers:
        res = acceptance.run_criterion(n, cfg.seed)
        ok &= res.passed
        out(res.line())
        for d in res.details:
            out(f"  {d}")
        out(f"  time {res.seconds:.1f}s", human_only=True)
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "eval": cmd_eval, "degree": cmd_degree, "check": cmd_check, "axioms": cmd_axioms,
    "gap": cmd_gap, "compact": cmd_compact, "congr": cmd_congr, "replay": cmd_replay,
    "suite": cmd_suite,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    out = Output(args.format)
    try:
        cfg = RunConfig(args.command, LogicProfile.parse(args.profile), seed=_seed(args),
                        budget_steps=args.budget_steps, region_cap=args.region_cap,
                        eps=args.eps, delta=args.delta, format=args.format, out=args.out)
        code = COMMANDS[args.command](args, cfg, out)
    except (InputError, FormulaSyntaxError, ProfileError, ProofFormatError, RegionCapError,
            ProductNodeError, PreconditionError, CongruenceBoundError, KeyError, ValueError) as exc:
        stdout.write(out.text())
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=stderr)
        return EXIT_MALFORMED
    text = out.text()
    if args.out and args.command not in ("replay", "gap"):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
