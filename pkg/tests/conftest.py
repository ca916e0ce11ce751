import random

import pytest

from dglp.corpus import algebra_catalog, random_lp, random_module
from dglp.lie import sl2


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture
def L_sl2():
    return sl2()


def random_modules(count: int, seed: int = 1):
    """Deterministic stream of validated random dg modules."""
    out = []
    s = 0
    while len(out) < count:
        r = random.Random(seed * 10_000 + s)
        L = r.choice(algebra_catalog())
        out.append(random_module(L, r))
        s += 1
    return out


def random_lps(count: int, seed: int = 2):
    out = []
    s = 0
    while len(out) < count:
        r = random.Random(seed * 10_000 + s)
        L = r.choice(algebra_catalog())
        V = random_module(L, r)
        out.append(random_lp(V, r))
        s += 1
    return out
