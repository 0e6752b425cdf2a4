import random

import pytest

from axmul.adders import AdderLibrary, FullAdderSpec


def random_adder(name: str, rng: random.Random) -> FullAdderSpec:
    return FullAdderSpec(
        name,
        tuple(rng.randint(0, 1) for _ in range(8)),
        tuple(rng.randint(0, 1) for _ in range(8)),
    )


@pytest.fixture
def zero_adder():
    return FullAdderSpec("ZERO", (0,) * 8, (0,) * 8)


@pytest.fixture
def small_library(zero_adder):
    """ZERO plus two seeded random truth tables (and the injected exact)."""
    rng = random.Random(1234)
    return AdderLibrary([zero_adder,
                         random_adder("RND1", rng),
                         random_adder("RND2", rng)])
