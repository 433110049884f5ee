"""Acceptance criteria, each at its stated tolerance (all exact).

Run alone with ``pytest tests/test_acceptance.py``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import json
import random
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from futs import iml, pepa, xcheck
from futs.bisim import (
    brute_force_coarsest,
    check_homomorphism,
    coarsest_bisimulation,
    is_bisimulation,
    minimize,
)
from futs.cli import main
from futs.generate import generate_corpus, random_futs_model
from futs.semiring import BOOLEAN, RATIONAL, FiniteSupportFn
from futs.syntax import IML, PEPA, Const, Coop, parse_program, parse_term

DATA = Path(__file__).parent / "data"
CORPUS_SEED = 42
CORPUS_SIZE = 500
CORPUS_DEPTH = 5


@pytest.fixture(scope="module")
def pepa_corpus():
    return generate_corpus(PEPA, CORPUS_SEED, CORPUS_SIZE, CORPUS_DEPTH)


@pytest.fixture(scope="module")
def iml_corpus():
    return generate_corpus(IML, CORPUS_SEED, CORPUS_SIZE, CORPUS_DEPTH)


def all_pass(results, n):
    summary = xcheck.summarize(results)
    failures = [r for r in results if r.status != "pass"]
    assert summary == {"pass": n, "fail": 0, "skipped": 0, "total": n}, failures[:3]


@pytest.mark.acceptance(1, "CCS pair discrimination with witness")
def test_ccs_pair_discrimination(capsys):
    code = main(["bisim", str(DATA / "ccs_pair.iml"), "--root", "P", "--root", "Q", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 3 and doc["verdict"] == "not-bisimilar"
    w = doc["witness"][-1]
    assert {w["left"], w["right"]} == {"b.nil", "b.nil + c.nil"}
    assert (w["relation"], w["label"], w["class"]) == (1, "c", ["nil"])
    assert {w["left_value"], w["right_value"]} == {"true", "false"}


@pytest.mark.acceptance(2, "duplicate-branch multiplicity")
@pytest.mark.parametrize("lam", [F(1), F(1, 2), F(3, 7)])
def test_duplicate_branch_multiplicity(lam):
    env, _ = parse_program("P := nil", PEPA)
    single = parse_term(f"(a,{lam}).P", PEPA)
    double = parse_term(f"(a,{lam}).P + (a,{lam}).P", PEPA)
    env = env.with_terms(single, double)
    assert pepa.futs_step(double, "a", env) == FiniteSupportFn(RATIONAL, {Const("P"): 2 * lam})
    assert not coarsest_bisimulation(pepa.explore_pepa([single, double], env)).same(single, double)
    assert not pepa.strongly_equivalent(single, double, env)


@pytest.mark.acceptance(3, "cooperating cycles: the five listed continuations")
def test_cooperating_cycles():
    env, root = parse_program("X := a.(1).b.X\nY := a.(2).b.Y\nX <a,b> Y", IML)
    m = iml.explore_iml(root, env)
    A = {"a", "b"}
    T = lambda s: parse_term(s, IML)  # noqa: E731
    lbX, mbY, bX, bY = T("(1).b.X"), T("(2).b.Y"), T("b.X"), T("b.Y")
    X, Y = Const("X"), Const("Y")
    expected = {
        (1, Coop(X, Y, A), "a"): FiniteSupportFn(BOOLEAN, {Coop(lbX, mbY, A): True}),
        (2, Coop(lbX, mbY, A), "delta"): FiniteSupportFn(RATIONAL, {Coop(bX, mbY, A): F(1), Coop(lbX, bY, A): F(2)}),
        (1, Coop(bX, bY, A), "b"): FiniteSupportFn(BOOLEAN, {Coop(X, Y, A): True}),
        (2, Coop(bX, mbY, A), "delta"): FiniteSupportFn(RATIONAL, {Coop(bX, bY, A): F(2)}),
        (2, Coop(lbX, bY, A), "delta"): FiniteSupportFn(RATIONAL, {Coop(bX, bY, A): F(1)}),
    }
    got = {(sc.index, s, label): fn for sc, s, label, fn in m.rows() if fn}
    assert got == expected


def _raw_total(fn):
    # independent of the semiring classes: plain any() / sum()
    vals = list(fn.values())
    return any(vals) if fn.semiring is BOOLEAN else sum(vals, F(0))


@pytest.mark.acceptance(4, "finite-support totals: 1000 triples per semiring")
def test_total_laws():
    results = xcheck.run_total_laws(seed=2024, count=1000)
    all_pass(results, 2000)
    rng = random.Random(2024)
    for sr in (BOOLEAN, RATIONAL):
        for _ in range(1000):
            phi, psi, pair = xcheck.random_fsf_triple(rng, sr)
            s, p = _raw_total(phi), _raw_total(psi)
            assert _raw_total(phi + psi) == ((s or p) if sr is BOOLEAN else s + p)
            assert _raw_total(phi.pair_product(psi, pair)) == ((s and p) if sr is BOOLEAN else s * p)


@pytest.mark.acceptance(5, "apparent rates: 500 PEPA terms under 60 s")
def test_apparent_rates(pepa_corpus):
    t0 = time.perf_counter()
    results = xcheck.run_programs("lemma5.3", pepa_corpus)
    elapsed = time.perf_counter() - t0
    all_pass(results, CORPUS_SIZE)
    assert elapsed < 60, f"{elapsed:.1f} s"


@pytest.mark.acceptance(6, "continuations equal standard-semantics sums")
@pytest.mark.parametrize("check", ["lemma5.6", "lemma6.5"])
def test_continuations_vs_standard(check, pepa_corpus, iml_corpus):
    corpus = pepa_corpus if check == "lemma5.6" else iml_corpus
    all_pass(xcheck.run_programs(check, corpus), CORPUS_SIZE)


@pytest.mark.acceptance(7, "standard equivalence partitions equal FuTS partitions")
@pytest.mark.parametrize("check", ["thm5.7", "thm6.6"])
def test_equivalence_correspondence(check, pepa_corpus, iml_corpus):
    corpus = pepa_corpus if check == "thm5.7" else iml_corpus
    all_pass(xcheck.run_programs(check, corpus), CORPUS_SIZE)


@pytest.mark.acceptance(8, "refinement equals brute-force oracle on 200 raw models")
def test_oracle_equivalence():
    rng = random.Random(8)
    mixed = 0
    for _ in range(200):
        m = random_futs_model(rng, rng.randint(1, 6))
        kinds = {sc.semiring for sc in m.schemas}
        mixed += kinds == {BOOLEAN, RATIONAL}
        p = coarsest_bisimulation(m)
        assert p == brute_force_coarsest(m)
        assert is_bisimulation(m, p)
    assert mixed > 0


@pytest.mark.acceptance(9, "quotient homomorphism law and minimality")
def test_quotient_laws(pepa_corpus, iml_corpus):
    models = [pepa.explore_pepa(r, e) for e, r in (parse_program(s, PEPA) for s in pepa_corpus)]
    models += [iml.explore_iml(r, e) for e, r in (parse_program(s, IML) for s in iml_corpus)]
    rng = random.Random(9)
    models += [random_futs_model(rng, rng.randint(1, 6)) for _ in range(200)]
    for m in models:
        q, p = minimize(m)
        assert check_homomorphism(m, p, q)
        assert len(coarsest_bisimulation(q)) == len(q.states)
