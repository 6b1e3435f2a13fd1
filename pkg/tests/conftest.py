"""Shared fixtures: p grids, the S_4 character table, an isolated cache dir."""
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from partitions import CycleType, Partition, enumerate_partitions

P_GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
P_GRID_HIGH = [Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(9, 10)]

# Rows [4], [3,1], [2,2], [2,1,1], [1^4]; columns id, (2,1,1), (2,2), (3,1), (4)
S4_CLASSES = ["1:4", "1:2,2:1", "2:2", "1:1,3:1", "4:1"]
S4_TABLE = {
    "4": [1, 1, 1, 1, 1],
    "3,1": [3, 1, -1, 0, -1],
    "2,2": [2, 0, 2, -1, 0],
    "2,1,1": [3, -1, -1, 0, 1],
    "1,1,1,1": [1, -1, 1, 1, -1],
}


@pytest.fixture
def s4_table() -> dict[tuple[Partition, CycleType], int]:
    return {
        (Partition.parse(lam), CycleType.parse(alpha, 4)): v
        for lam, row in S4_TABLE.items()
        for alpha, v in zip(S4_CLASSES, row)
    }


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    cache.mkdir()
    monkeypatch.setenv("IWALK_CACHE_DIR", str(cache))
    return cache


@st.composite
def partitions_of(draw, n_min: int = 1, n_max: int = 10, even: bool = False):
    n = draw(st.integers(n_min, n_max))
    if even and n % 2:
        n += 1
    return draw(st.sampled_from(enumerate_partitions(n)))


rational_p = st.fractions(min_value=0, max_value=1, max_denominator=12)
