import itertools
from fractions import Fraction

import pytest

from mcdlo.order import FinSet

POOL3 = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
POOL4 = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
POOL5 = (Fraction(0), Fraction(1, 5), Fraction(2, 5), Fraction(3, 5),
         Fraction(4, 5))
POOL6 = (Fraction(0), Fraction(1, 6), Fraction(1, 3), Fraction(1, 2),
         Fraction(2, 3), Fraction(5, 6))


def subsets_of(pool):
    return [FinSet.from_iterable(c) for r in range(len(pool) + 1)
            for c in itertools.combinations(pool, r)]


@pytest.fixture(scope="session")
def subs3():
    return subsets_of(POOL3)


@pytest.fixture(scope="session")
def subs4():
    return subsets_of(POOL4)
