import random

import pytest

from futs.generate import ACTIONS, RATES, format_corpus, generate_corpus, generate_program
from futs.syntax import IML, PEPA, Coop, Prefix, Delay, parse_program, show, split_corpus


@pytest.mark.parametrize("language", [PEPA, IML])
def test_deterministic(language):
    assert generate_corpus(language, 1, 3, 2) == generate_corpus(language, 1, 3, 2)
    assert generate_corpus(language, 1, 20, 4) != generate_corpus(language, 2, 20, 4)


@pytest.mark.parametrize("language", [PEPA, IML])
def test_every_program_parses_and_is_guarded(language):
    for src in generate_corpus(language, 11, 200, 5):
        env, root = parse_program(src, language)  # raises on unguarded recursion
        assert root is not None
        assert set(env.alphabet) <= set(ACTIONS)


def test_draws_from_pools():
    seen_rates, seen_coop = set(), False
    for src in generate_corpus(PEPA, 3, 200, 5):
        env, root = parse_program(src, PEPA)
        stack = [root, *env.definitions.values()]
        while stack:
            t = stack.pop()
            if isinstance(t, Prefix | Delay):
                seen_rates.add(t.rate)
                stack.append(t.cont)
            elif isinstance(t, Coop):
                seen_coop = True
                assert t.actions <= set(ACTIONS)
                stack += [t.left, t.right]
            elif hasattr(t, "left"):
                stack += [t.left, t.right]
    assert seen_rates <= set(RATES) and seen_coop


def test_corpus_format_round_trip():
    progs = generate_corpus(IML, 4, 10, 3)
    assert split_corpus(format_corpus(progs)) == progs


def test_depth_validation():
    with pytest.raises(ValueError):
        generate_corpus(PEPA, 0, 1, 0)
    with pytest.raises(ValueError):
        generate_program(random.Random(0), "ccs", 2)


def test_printing_is_canonical():
    for src in generate_corpus(PEPA, 8, 50, 4):
        env, root = parse_program(src, PEPA)
        assert src.splitlines()[-1] == show(root)
