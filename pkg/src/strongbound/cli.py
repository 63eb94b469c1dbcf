"""Batch command-line front end.

Every subcommand prints ``key: value`` lines and ends with a ``RESULT:`` line.
Exit status: 0 when all requested checks pass, 1 when a check fails, 2 on
bad input, 3 when a resource guard trips.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import bounded, encoding, filtration
from .groups import FactorGroup, GroupError, load_group
from .small_cancellation import (
    Certificate,
    DehnSolver,
    ResourceLimitError,
    SmallCancellationError,
    check_cprime,
    format_certificate,
    parse_relators,
    symmetrize,
)
from .words import FreeProductContext, WordError, format_word, normalize, parse_word

OK, FAILED, BAD_INPUT, RESOURCE = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    group: Path | None = None
    spec: Path | None = None
    relators: Path | None = None
    eta: Fraction = Fraction(1, 6)
    k: int | None = None
    depth: int = 8
    count: int = 8
    out: Path | None = None
    max_relators: int = 5000
    max_word_len: int = 100_000
    support_bound: int = 256
    seed: int = 0
    positional: list = field(default_factory=list)
    verbose: bool = False

    def validate(self):
        if not 0 < self.eta < 1:
            raise InputError(f"eta must lie strictly between 0 and 1, got {self.eta}")
        if self.k is not None and self.k < 1:
            raise InputError("k must be at least 1")
        for name in ("depth", "count", "max_relators", "max_word_len", "support_bound"):
            if getattr(self, name) < 0:
                raise InputError(f"--{name.replace('_', '-')} must be non-negative")


class Report:
    def __init__(self):
        self.lines: list[str] = []

    def add(self, key: str, value) -> None:
        self.lines.append(f"{key}: {value}")

    def extend(self, lines) -> None:
        self.lines.extend(lines)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _require(path: Path | None, flag: str) -> Path:
    if path is None:
        raise InputError(f"{flag} is required")
    return path


def _context(cfg: RunConfig) -> FreeProductContext:
    factors = [FactorGroup.infinite_cyclic("c")]
    if cfg.group is not None:
        factors.append(load_group(cfg.group))
    return FreeProductContext(factors)


def _load_relator_set(cfg: RunConfig, rep: Report):
    ctx = _context(cfg)
    words = parse_relators(_require(cfg.relators, "--relators").read_text(), ctx)
    if len(words) > cfg.max_relators:
        raise ResourceLimitError(f"{len(words)} relators exceed --max-relators {cfg.max_relators}")
    R = symmetrize(words, ctx)
    rep.add("relators", len(words))
    rep.add("cyclic_words", len(R.cyclic_words))
    if R.duplicates:
        rep.add("duplicate_relators", len(R.duplicates))
    return ctx, R


def cmd_check_c16(cfg: RunConfig, rep: Report) -> int:
    ctx, R = _load_relator_set(cfg, rep)
    result = check_cprime(R, cfg.eta, ctx)
    rep.extend(format_certificate(result, ctx))
    ok = isinstance(result, Certificate)
    rep.add("RESULT", "certificate" if ok else "violation")
    return OK if ok else FAILED


def cmd_build_extension(cfg: RunConfig, rep: Report) -> int:
    spec = encoding.load_spec(_require(cfg.spec, "--spec"))
    if cfg.k is not None:
        spec = encoding.EncodingSpec(spec.G, spec.n, spec.f, cfg.k)
    count = (spec.G.order - 1) ** spec.n
    if count > cfg.max_relators:
        raise ResourceLimitError(f"{count} relators exceed --max-relators {cfg.max_relators}")
    rep.add("group", f"{spec.G.name} (order {spec.G.order})")
    rep.add("n", spec.n)
    rep.add("k", spec.k)
    ctx = encoding.extension_context(spec.G)
    gamma = encoding.build_relators(spec)
    rows = encoding.relator_summary(spec, gamma)
    wrong = [r for r in rows if r[2] != r[3] or not r[4]]
    for cases in sorted({r[1] for r in rows}):
        rep.add(f"relators_{cases}", sum(1 for r in rows if r[1] == cases))
    rep.add("relator_lengths", ",".join(str(n) for n in sorted({r[3] for r in rows})))
    rep.add("length_trichotomy", "ok" if not wrong else f"{len(wrong)} mismatches")
    bound = encoding.gamma_step_bound(spec)
    rep.add("word_length", bound.word_length)
    rep.add("doubling_steps", bound.doubling_steps)
    try:
        ext = encoding.build_extension(spec, cfg.eta)
    except encoding.EncodingError as exc:
        if exc.violation is None:
            raise
        rep.extend(format_certificate(exc.violation, ctx))
        rep.add("RESULT", "violation")
        return FAILED
    rep.add("duplicate_relators", len(ext.relators.duplicates))
    rep.extend(format_certificate(ext.certificate, ctx))
    passed = not wrong
    if cfg.eta <= Fraction(1, 6):
        report = encoding.verify_extension(ext)
        rep.extend(report.lines())
        passed = passed and report.passed
    else:
        rep.add("property_check", f"skipped: C'({cfg.eta}) is weaker than C'(1/6)")
    if cfg.verbose:
        for r in ext.gamma:
            rep.add("relator", format_word(r, ctx))
    rep.add("RESULT", "pass" if passed else "fail")
    return OK if passed else FAILED


def cmd_solve_word(cfg: RunConfig, rep: Report) -> int:
    ctx, R = _load_relator_set(cfg, rep)
    result = check_cprime(R, Fraction(1, 6), ctx)
    if not isinstance(result, Certificate):
        rep.extend(format_certificate(result, ctx))
        rep.add("RESULT", "uncertified")
        return FAILED
    R = replace(R, certificate=result)
    word = normalize(parse_word(" ".join(cfg.positional), ctx), ctx)
    solver = DehnSolver(R, max_word_len=cfg.max_word_len)
    reduced = solver.reduce(word)
    rep.add("input_length", len(word))
    rep.add("reduced", format_word(reduced, ctx) or "<empty>")
    rep.add("reduced_length", len(reduced))
    trivial = solver.is_identity(word)
    rep.add("RESULT", "identity" if trivial else "nontrivial")
    return OK


def cmd_gamma_chain(cfg: RunConfig, rep: Report) -> int:
    G = load_group(_require(cfg.group, "--group"))
    seed = list(cfg.positional)
    chain = bounded.gamma_chain(G, seed)
    order = {x: i for i, x in enumerate(G.elements)}
    rep.add("group", f"{G.name} (order {G.order})")
    for i, z in enumerate(chain.levels):
        rep.add(f"Z_{i}", f"{len(z)} {{{', '.join(sorted(map(str, z), key=lambda s: order[s]))}}}")
    rep.add("stabilized_at", chain.stabilized_at)
    rep.add("limit_size", len(chain.limit))
    rep.add("RESULT", "pass")
    return OK


def _tower(cfg: RunConfig) -> filtration.ChTower:
    if not cfg.positional:
        raise InputError("a tower rule name or rule file is required")
    arg = cfg.positional[0]
    path = Path(arg)
    if arg in filtration.TOWERS:
        return filtration.make_tower(arg)
    if path.is_file():
        name, params = filtration.parse_rule(path.read_text())
        try:
            return filtration.make_tower(name, params)
        except TypeError as exc:
            raise InputError(f"bad rule parameters: {exc}") from None
    raise InputError(f"unknown tower rule {arg!r}")


def cmd_dominate(cfg: RunConfig, rep: Report) -> int:
    T = _tower(cfg)
    g = filtration.dominating_g(T, cfg.depth)
    rep.add("tower", T.name)
    rep.add("depth", cfg.depth)
    rep.add("index_demand", T.demand)
    rep.add("g", ",".join(map(str, g)))
    check = filtration.check_domination(T, cfg.depth, g)
    rep.add("selections_checked", check.selections)
    rep.add("failures", len(check.failures))
    for f in check.failures[:5]:
        rep.add("failure", f)
    rep.add("RESULT", "pass" if check.passed else "fail")
    return OK if check.passed else FAILED


def cmd_filtration(cfg: RunConfig, rep: Report) -> int:
    instance = cfg.positional[0] if cfg.positional else "support-filtration"
    if instance == "support-filtration":
        A = filtration.FiniteCofiniteAlgebra()
        filt = filtration.support_filtration(A)
        depth = min(cfg.depth, 12)
        check = filtration.check_proper_filtration(filt, A, depth=depth, seed=cfg.seed)
        rep.add("instance", instance)
        rep.add("filtration_check", check.line())
        for note in check.notes:
            rep.add("note", note)
        res = filtration.extract_antichain(A, filt, filtration.cofinite_oracle, cfg.count,
                                           support_bound=cfg.support_bound)
        disjoint = all(A.meet(x, y) == A.bottom for i, x in enumerate(res.sequence)
                       for y in res.sequence[i + 1:])
        increasing = all(a < b for a, b in zip(res.levels, res.levels[1:]))
        for step in res.steps:
            rep.add(f"a_{step.n}", f"{step.a!r} f={filt.induced_f(step.a)}")
        rep.add("disjoint", str(disjoint).lower())
        rep.add("strictly_increasing", str(increasing).lower())
        ok = check.valid and disjoint and increasing and all(s.rstep_ok for s in res.steps)
    elif instance == "finite-powerset":
        points = int(cfg.positional[1]) if len(cfg.positional) > 1 else 3
        if points > 5:
            raise ResourceLimitError("finite-powerset is limited to 5 points")
        B = filtration.FiniteSetAlgebra.powerset(range(points))
        violation = filtration.prove_no_proper_filtration(B, filtration.greedy_filtration(B))
        rep.add("instance", f"{instance} on {points} points (|A| = {len(B)})")
        rep.add("greedy_filtration", violation.line())
        ok = True
    else:
        raise InputError(f"unknown filtration instance {instance!r}")
    rep.add("RESULT", "pass" if ok else "fail")
    return OK if ok else FAILED


COMMANDS = {
    "check-c16": cmd_check_c16,
    "build-extension": cmd_build_extension,
    "solve-word": cmd_solve_word,
    "gamma-chain": cmd_gamma_chain,
    "dominate": cmd_dominate,
    "filtration": cmd_filtration,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strongbound", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("positional", nargs="*", help="word tokens, seed elements, rule or instance")
    parser.add_argument("--group", type=Path)
    parser.add_argument("--spec", type=Path)
    parser.add_argument("--relators", type=Path)
    parser.add_argument("--eta", type=_fraction, default=Fraction(1, 6))
    parser.add_argument("--k", type=int)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--out", type=Path)
    parser.add_argument("--max-relators", type=int, default=5000)
    parser.add_argument("--max-word-len", type=int, default=100_000)
    parser.add_argument("--support-bound", type=int, default=256)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(cfg: RunConfig) -> tuple[int, str]:
    rep = Report()
    rep.add("command", cfg.command)
    try:
        cfg.validate()
        status = COMMANDS[cfg.command](cfg, rep)
    except (ResourceLimitError, bounded.MeasurableLimitError, filtration.SearchLimitError) as exc:
        rep.add("error", exc)
        rep.add("RESULT", "resource-limit")
        status = RESOURCE
    except (InputError, GroupError, WordError, SmallCancellationError, encoding.EncodingError,
            filtration.RuleError, filtration.AlgebraError, OSError, ValueError) as exc:
        rep.add("error", exc)
        rep.add("RESULT", "input-error")
        status = BAD_INPUT
    except filtration.FiltrationError as exc:
        rep.add("error", exc)
        rep.add("RESULT", "fail")
        status = FAILED
    return status, rep.text()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_intermixed_args(argv)
    cfg = RunConfig(**vars(args))
    status, text = run(cfg)
    sys.stdout.write(text)
    if cfg.out is not None:
        cfg.out.write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
