"""2x2 contingency tables over pixel displacements and independence tests.

The coordinates of edge pixels inside a window are reduced to counts of
how often ordered point pairs stay within a displacement limit along
each axis (rows: |dx| <= k / > k, columns: |dy| <= k / > k).  Sparse
tables go to Fisher's exact test, evaluated as the hypergeometric point
probability of the observed table; well-filled tables go to the plain
Pearson chi-square test with one degree of freedom and no continuity
correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContingencyTable:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError("cell counts must be nonnegative integers")
            object.__setattr__(self, name, int(v))

    @property
    def row1(self) -> int:
        return self.a + self.b

    @property
    def row2(self) -> int:
        return self.c + self.d

    @property
    def col1(self) -> int:
        return self.a + self.c

    @property
    def col2(self) -> int:
        return self.b + self.d

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.a, self.c, self.b, self.d)


@dataclass(frozen=True)
class TestResult:
    p: float
    statistic: float
    method: str  # "chi-square" or "fisher"
    dependent: bool  # p < alpha


def displacement_table(points, limit: int = 3) -> ContingencyTable:
    """Count ordered point pairs by whether |dx| and |dy| stay within limit.

    points is an (m, 2) array of (x, y).  Every unordered pair is counted
    in both directions, so the total is always m(m-1).
    """
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (m, 2) array of (x, y)")
    if limit < 0:
        raise ValueError("displacement limit must be nonnegative")
    m = len(pts)
    if m < 2:
        raise ValueError("need at least two points to build a table")
    near_x = np.abs(pts[:, None, 0] - pts[None, :, 0]) <= limit
    near_y = np.abs(pts[:, None, 1] - pts[None, :, 1]) <= limit
    off_diag = ~np.eye(m, dtype=bool)
    a = int(np.count_nonzero(near_x & near_y & off_diag))
    b = int(np.count_nonzero(near_x & ~near_y & off_diag))
    c = int(np.count_nonzero(~near_x & near_y & off_diag))
    d = int(np.count_nonzero(~near_x & ~near_y & off_diag))
    return ContingencyTable(a, b, c, d)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _point_probability(row1: int, row2: int, col1: int, a: int) -> float:
    # C(row1, a) * C(row2, col1 - a) / C(row1 + row2, col1), in log space.
    logp = (_log_comb(row1, a) + _log_comb(row2, col1 - a)
            - _log_comb(row1 + row2, col1))
    return min(math.exp(logp), 1.0)


def fisher_exact_test(table: ContingencyTable, alpha: float = 0.05,
                      mode: str = "point") -> TestResult:
    """Hypergeometric probability of the table, via log-gamma binomials.

    mode "point" is the probability of the observed table alone; mode
    "two-sided" sums the probabilities of all tables with the same
    margins that are at most as likely as the observed one.
    """
    t = table
    point = _point_probability(t.row1, t.row2, t.col1, t.a)
    if mode == "point":
        p = point
    elif mode == "two-sided":
        total = 0.0
        cutoff = point * (1.0 + 1e-7)  # absorb log-gamma rounding at ties
        for a in range(max(0, t.col1 - t.row2), min(t.row1, t.col1) + 1):
            q = _point_probability(t.row1, t.row2, t.col1, a)
            if q <= cutoff:
                total += q
        p = min(total, 1.0)
    else:
        raise ValueError("fisher mode must be 'point' or 'two-sided'")
    return TestResult(p=p, statistic=point, method="fisher", dependent=p < alpha)


def chi_square_sf(stat: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom.

    At df=1 the regularized upper incomplete gamma Q(1/2, x/2) collapses
    to erfc(sqrt(x/2)).
    """
    if stat < 0:
        raise ValueError("chi-square statistic cannot be negative")
    return math.erfc(math.sqrt(stat / 2.0))


def chi_square_test(table: ContingencyTable, alpha: float = 0.05) -> TestResult:
    """Plain Pearson chi-square on the 2x2 table, no Yates correction."""
    t = table
    if min(t.row1, t.row2, t.col1, t.col2) == 0:
        raise ValueError("degenerate table: zero margin")
    stat = 0.0
    for observed, row, col in ((t.a, t.row1, t.col1), (t.b, t.row1, t.col2),
                               (t.c, t.row2, t.col1), (t.d, t.row2, t.col2)):
        expected = row * col / t.n
        stat += (observed - expected) ** 2 / expected
    p = chi_square_sf(stat)
    return TestResult(p=p, statistic=stat, method="chi-square", dependent=p < alpha)


def independence_test(table: ContingencyTable, alpha: float = 0.05,
                      fisher_mode: str = "point") -> TestResult:
    """Route sparse tables to Fisher, well-filled ones to chi-square.

    Any cell below 5 means Fisher; cells equal to exactly 5 count as
    well filled.
    """
    if min(table.a, table.b, table.c, table.d) < 5:
        return fisher_exact_test(table, alpha, fisher_mode)
    return chi_square_test(table, alpha)
