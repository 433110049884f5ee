"""Cross-checks of the correspondence results on corpora of programs.

Every check maps one program to a :class:`CheckResult`.  A program whose state
space exceeds the cap is *skipped*, never failed.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import iml, pepa
from .bisim import coarsest_bisimulation
from .errors import StateCapExceeded
from .generate import generate_corpus
from .semiring import BOOLEAN, RATIONAL, FiniteSupportFn
from .standard import DEFAULT_CAP
from .syntax import IML, PEPA, parse_program

CHECKS = {
    "lemma2.1": None,
    "lemma5.3": PEPA,
    "lemma5.6": PEPA,
    "thm5.7": PEPA,
    "lemma6.5": IML,
    "thm6.6": IML,
}


@dataclass
class CheckResult:
    index: int
    status: str  # pass | fail | skipped
    source: str
    detail: str = ""


class Mismatch(Exception):
    pass


def _load(source: str, language: str):
    env, root = parse_program(source, language)
    if root is None:
        raise Mismatch("program has no root expression")
    return env, root


def check_apparent_rates(source: str, cap: int) -> str:
    """Total of each continuation equals the apparent rate."""
    env, root = _load(source, PEPA)
    model = pepa.explore_pepa(root, env, cap)
    env = env.with_terms(root)
    for s in model.states:
        for a in env.alphabet:
            total = pepa.futs_step(s, a, env).total()
            rate = pepa.apparent_rate(s, a, env)
            if total != rate:
                raise Mismatch(f"state {s}, action {a}: continuation total {total} != apparent rate {rate}")
    return f"{len(model.states)} states x {len(env.alphabet)} actions"


def check_pepa_continuations(source: str, cap: int) -> str:
    """Continuation values equal multiplicity-weighted standard rate sums."""
    env, root = _load(source, PEPA)
    model = pepa.explore_pepa(root, env, cap)
    env = env.with_terms(root)
    for s in model.states:
        trans = pepa.standard_transitions(s, env)
        for a in env.alphabet:
            sums = {}
            for tr in trans:
                if tr.action == a:
                    sums[tr.target] = sums.get(tr.target, Fraction(0)) + tr.rate * tr.multiplicity
            expected = FiniteSupportFn(RATIONAL, sums)
            got = pepa.futs_step(s, a, env)
            if got != expected:
                raise Mismatch(f"state {s}, action {a}: FuTS {got} != standard {expected}")
    return f"{len(model.states)} states"


def check_pepa_equivalence(source: str, cap: int) -> str:
    """Strong equivalence equals FuTS bisimilarity, blockwise."""
    env, root = _load(source, PEPA)
    futs_p = coarsest_bisimulation(pepa.explore_pepa(root, env, cap))
    std_p = pepa.strong_equivalence_partition(root, env, cap)
    if futs_p != std_p:
        raise Mismatch(f"FuTS partition {futs_p} != strong equivalence {std_p}")
    return f"{len(futs_p)} classes"


def check_iml_continuations(source: str, cap: int) -> str:
    """Action continuations are true exactly on standard targets; delay values are rate sums."""
    env, root = _load(source, IML)
    model = iml.explore_iml(root, env, cap)
    env = env.with_terms(root)
    for s in model.states:
        acts = iml.standard_action_transitions(s, env)
        for a in env.alphabet:
            got = iml.futs_action_step(s, a, env).support()
            expected = frozenset(t for b, t in acts if b == a)
            if got != expected:
                raise Mismatch(f"state {s}, action {a}: FuTS support {set(got)} != standard targets {set(expected)}")
        sums = {}
        for lam, t, m in iml.standard_delay_transitions(s, env):
            sums[t] = sums.get(t, Fraction(0)) + lam * m
        expected_d = FiniteSupportFn(RATIONAL, sums)
        got_d = iml.futs_delay_step(s, env)
        if got_d != expected_d:
            raise Mismatch(f"state {s}: delay FuTS {got_d} != standard {expected_d}")
    return f"{len(model.states)} states"


def check_iml_equivalence(source: str, cap: int) -> str:
    env, root = _load(source, IML)
    futs_p = coarsest_bisimulation(iml.explore_iml(root, env, cap))
    std_p = iml.strong_bisimulation_partition(root, env, cap)
    if futs_p != std_p:
        raise Mismatch(f"FuTS partition {futs_p} != strong bisimulation {std_p}")
    return f"{len(futs_p)} classes"


def random_fsf_triple(rng: random.Random, semiring, n_states: int = 6):
    """Random ``(phi, psi, pairing)`` with an injective pairing into fresh ids."""
    pool = [Fraction(0), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 7), Fraction(5, 3)]

    def one():
        entries = []
        for k in range(n_states):
            if semiring is BOOLEAN:
                entries.append((f"s{k}", rng.random() < 0.5))
            else:
                entries.append((f"s{k}", rng.choice(pool)))
        return FiniteSupportFn(semiring, entries)

    ids = list(range(n_states * n_states))
    rng.shuffle(ids)
    table = {(f"s{i}", f"s{j}"): f"p{ids[i * n_states + j]}" for i in range(n_states) for j in range(n_states)}
    return one(), one(), lambda x, y: table[(x, y)]


def check_total_laws(phi, psi, pair) -> str:
    sr = phi.semiring
    if (phi + psi).total() != sr.add(phi.total(), psi.total()):
        raise Mismatch(f"sum law fails for {phi} and {psi}")
    if phi.pair_product(psi, pair).total() != sr.mul(phi.total(), psi.total()):
        raise Mismatch(f"product law fails for {phi} and {psi}")
    return sr.name


PROGRAM_CHECKS = {
    "lemma5.3": check_apparent_rates,
    "lemma5.6": check_pepa_continuations,
    "thm5.7": check_pepa_equivalence,
    "lemma6.5": check_iml_continuations,
    "thm6.6": check_iml_equivalence,
}


def run_one(check: str, index: int, source: str, cap: int = DEFAULT_CAP) -> CheckResult:
    fn = PROGRAM_CHECKS[check]
    try:
        detail = fn(source, cap)
    except StateCapExceeded as exc:
        return CheckResult(index, "skipped", source, str(exc))
    except Mismatch as exc:
        return CheckResult(index, "fail", source, str(exc))
    return CheckResult(index, "pass", source, detail)


def _run_star(args):
    return run_one(*args)


def run_programs(check: str, programs: list[str], cap: int = DEFAULT_CAP, jobs: int = 1) -> list[CheckResult]:
    """Run ``check`` on each program; results come back in input order."""
    tasks = [(check, k, src, cap) for k, src in enumerate(programs)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_star, tasks, chunksize=8))
    return [run_one(*t) for t in tasks]


def run_total_laws(seed: int, count: int) -> list[CheckResult]:
    """``count`` random triples per semiring."""
    rng = random.Random(seed)
    out = []
    for sr in (BOOLEAN, RATIONAL):
        for _ in range(count):
            phi, psi, pair = random_fsf_triple(rng, sr)
            src = f"{sr.name}: phi={phi} psi={psi}"
            try:
                out.append(CheckResult(len(out), "pass", src, check_total_laws(phi, psi, pair)))
            except Mismatch as exc:
                out.append(CheckResult(len(out), "fail", src, str(exc)))
    return out


def _total_laws_on_model(k: int, src: str, model) -> CheckResult:
    rows = [fn for _sc, _s, _l, fn in model.rows()]
    n = 0
    try:
        for phi in rows:
            for psi in rows:
                if phi.semiring is psi.semiring:
                    check_total_laws(phi, psi, lambda x, y: (x, y))
                    n += 1
    except Mismatch as exc:
        return CheckResult(k, "fail", src, str(exc))
    return CheckResult(k, "pass", src, f"{n} pairs")


def run_total_laws_on_models(models) -> list[CheckResult]:
    """Total laws on every pair of same-semiring rows of each model."""
    return [_total_laws_on_model(k, f"model {k + 1}", m) for k, m in enumerate(models)]


def run_total_laws_on_programs(programs: list[str], language: str, cap: int = DEFAULT_CAP) -> list[CheckResult]:
    out = []
    explore = pepa.explore_pepa if language == PEPA else iml.explore_iml
    for k, src in enumerate(programs):
        try:
            env, root = _load(src, language)
            out.append(_total_laws_on_model(k, src, explore(root, env, cap)))
        except StateCapExceeded as exc:
            out.append(CheckResult(k, "skipped", src, str(exc)))
        except Mismatch as exc:
            out.append(CheckResult(k, "fail", src, str(exc)))
    return out


def random_programs(check: str, seed: int, count: int, depth: int) -> list[str]:
    return generate_corpus(CHECKS[check], seed, count, depth)


def summarize(results: list[CheckResult]) -> dict:
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for r in results:
        counts[r.status] += 1
    counts["total"] = len(results)
    return counts
