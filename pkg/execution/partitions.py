"""
Partition and conjugacy-class combinatorics for S_n.

Partitions index irreducible representations, cycle types index conjugacy
classes. Everything here is exact integer arithmetic.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial, prod

from pydantic import BaseModel, Field

from config import PreconditionError, format_rational


@dataclass(frozen=True, slots=True)
class Partition:
    """Weakly decreasing tuple of positive parts; hashing is on the canonical tuple."""
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(x < 1 for x in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise PreconditionError(f"not a partition: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the comma-joined form "5,2,1" (empty string is the empty partition)."""
        text = text.strip()
        if not text or text == "-":
            return cls(())
        try:
            return cls(tuple(int(x) for x in text.split(",")))
        except ValueError:
            raise PreconditionError(f"invalid partition string: {text!r}") from None

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def row(self, k: int) -> int:
        """k-th row length (1-based); missing rows read as 0."""
        return self.parts[k - 1] if 0 < k <= len(self.parts) else 0

    def conjugate(self) -> "Partition":
        return Partition(_conjugate(self.parts))

    def col(self, k: int) -> int:
        """k-th column length (1-based); missing columns read as 0."""
        return self.conjugate().row(k)

    def is_hook(self) -> bool:
        return len(self.parts) <= 1 or self.parts[1] == 1

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.parts)

    def __repr__(self) -> str:
        return f"[{self}]"


@lru_cache(maxsize=None)
def _conjugate(parts: tuple[int, ...]) -> tuple[int, ...]:
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x >= k) for k in range(1, parts[0] + 1))


@dataclass(frozen=True, slots=True)
class CycleType:
    """Multiplicity vector (a_1, ..., a_n) with sum k*a_k = n."""
    mults: tuple[int, ...]

    def __post_init__(self):
        mults = tuple(int(x) for x in self.mults)
        if any(x < 0 for x in mults):
            raise PreconditionError(f"negative cycle multiplicity: {self.mults}")
        object.__setattr__(self, "mults", mults)

    @classmethod
    def from_cycle_lengths(cls, lengths, n: int | None = None) -> "CycleType":
        lengths = [int(x) for x in lengths if int(x) > 0]
        size = sum(lengths) if n is None else n
        if sum(lengths) != size:
            raise PreconditionError(f"cycle lengths {lengths} do not sum to {size}")
        mults = [0] * size
        for k in lengths:
            mults[k - 1] += 1
        return cls(tuple(mults))

    @classmethod
    def involution(cls, n: int, s: int) -> "CycleType":
        """The class (1^{n-2s}, 2^s)."""
        if not 0 <= 2 * s <= n:
            raise PreconditionError(f"no involution with {s} 2-cycles in S_{n}")
        return cls.from_cycle_lengths([2] * s + [1] * (n - 2 * s), n)

    @classmethod
    def parse(cls, text: str, n: int) -> "CycleType":
        """Parse "1:a1,2:a2,..." (zero multiplicities omitted)."""
        mults = [0] * n
        try:
            for item in filter(None, text.split(",")):
                k, a = item.split(":")
                mults[int(k) - 1] = int(a)
        except (ValueError, IndexError):
            raise PreconditionError(f"invalid cycle type {text!r} for n={n}") from None
        ct = cls(tuple(mults))
        if ct.n != n:
            raise PreconditionError(f"cycle type {text!r} has size {ct.n}, expected {n}")
        return ct

    @property
    def n(self) -> int:
        return sum(k * a for k, a in enumerate(self.mults, start=1))

    def mult(self, k: int) -> int:
        return self.mults[k - 1] if 0 < k <= len(self.mults) else 0

    def cycle_lengths(self) -> tuple[int, ...]:
        """Cycle lengths, largest first (the partition of n this class is)."""
        out = []
        for k in range(len(self.mults), 0, -1):
            out.extend([k] * self.mults[k - 1])
        return tuple(out)

    @property
    def num_cycles(self) -> int:
        return sum(self.mults)

    @property
    def sign(self) -> int:
        return -1 if (self.n - self.num_cycles) % 2 else 1

    def __str__(self) -> str:
        return ",".join(f"{k}:{a}" for k, a in enumerate(self.mults, start=1) if a)

    def __repr__(self) -> str:
        return f"({self})"


class RemovalKind(str, Enum):
    SINGLE_BOX = "single-box"
    HORIZONTAL_DOMINO = "horizontal-domino"
    VERTICAL_DOMINO = "vertical-domino"
    DISCONNECTED_PAIR = "disconnected-pair"


@dataclass(frozen=True, slots=True)
class BorderstripRemoval:
    result: Partition
    kind: RemovalKind
    height: int = 0


class Majorization(str, Enum):
    LESS_OR_EQUAL = "less-or-equal"
    GREATER_OR_EQUAL_ONLY = "greater-or-equal-only"
    INCOMPARABLE = "incomparable"


# --- Enumeration ---

@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of n in descending lexicographic order."""
    if n < 0:
        raise PreconditionError(f"n must be >= 0, got {n}")
    return [Partition(parts) for parts in _partitions(n, n)]


def enumerate_cycle_types(n: int) -> list[CycleType]:
    """All conjugacy classes of S_n, identity first (same order as the partitions)."""
    return [CycleType.from_cycle_lengths(lam.parts, n) for lam in reversed(enumerate_partitions(n))]


# --- Hooks, dimensions, class sizes ---

def hook_lengths(lam: Partition) -> list[list[int]]:
    conj = lam.conjugate()
    return [
        [lam.row(r) - c + conj.row(c) - r + 1 for c in range(1, lam.row(r) + 1)]
        for r in range(1, len(lam) + 1)
    ]


@lru_cache(maxsize=None)
def _dimension(parts: tuple[int, ...]) -> int:
    lam = Partition(parts)
    hooks = prod(h for row in hook_lengths(lam) for h in row)
    return factorial(lam.n) // hooks


def dimension(lam: Partition) -> int:
    """d_lambda = n! / prod(hooks)."""
    return _dimension(lam.parts)


def class_size(alpha: CycleType) -> int:
    """n! / prod_k (k^{a_k} a_k!)."""
    centralizer = prod(k ** a * factorial(a) for k, a in enumerate(alpha.mults, start=1))
    return factorial(alpha.n) // centralizer


# --- Border strips of size 1 and 2 ---

def corners(lam: Partition) -> list[int]:
    """Rows (1-based) whose last box is removable."""
    return [r for r in range(1, len(lam) + 1) if lam.row(r) > lam.row(r + 1)]


def _minus(lam: Partition, *rows: int) -> Partition:
    parts = list(lam.parts)
    for r in rows:
        parts[r - 1] -= 1
    return Partition(tuple(parts))


def borderstrip_removals(lam: Partition, size: int) -> list[BorderstripRemoval]:
    """
    Removable border strips of size 1 or 2.

    For size 2 the list holds the horizontal dominoes (height 0), the vertical
    dominoes (height 1) and the disconnected pairs: two corner boxes in
    distinct rows and columns. Each disconnected pair is listed once although
    it can be peeled off in two orders.
    """
    if size not in (1, 2):
        raise PreconditionError(f"border strip size must be 1 or 2, got {size}")
    if lam.n < size:
        return []

    if size == 1:
        return [BorderstripRemoval(_minus(lam, r), RemovalKind.SINGLE_BOX) for r in corners(lam)]

    out = []
    for r in range(1, len(lam) + 1):
        if lam.row(r) - lam.row(r + 1) >= 2:
            out.append(BorderstripRemoval(_minus(lam, r, r), RemovalKind.HORIZONTAL_DOMINO, 0))
    for r in range(1, len(lam)):
        if lam.row(r) == lam.row(r + 1) > lam.row(r + 2):
            out.append(BorderstripRemoval(_minus(lam, r, r + 1), RemovalKind.VERTICAL_DOMINO, 1))
    for r1, r2 in combinations(corners(lam), 2):
        out.append(BorderstripRemoval(_minus(lam, r1, r2), RemovalKind.DISCONNECTED_PAIR, 0))
    return out


def rim_hook_removals(lam: Partition, k: int) -> list[tuple[Partition, int]]:
    """
    All (result, height) for border strips of size k, via beta-numbers.

    With beta_i = lambda_i + (l - i), removing a k-strip replaces some beta by
    beta - k (if free and >= 0); the height is the number of betas jumped over.
    """
    l = len(lam)
    betas = [lam.row(i) + (l - i) for i in range(1, l + 1)]
    present = set(betas)
    out = []
    for idx, b in enumerate(betas):
        target = b - k
        if target < 0 or target in present:
            continue
        height = sum(1 for x in betas if target < x < b)
        new = sorted([x for x in betas if x != b] + [target], reverse=True)
        parts = tuple(x - (l - i) for i, x in enumerate(new, start=1))
        out.append((Partition(parts), height))
    return out


# --- Orders ---

def _check_same_size(a: int, b: int) -> None:
    if a != b:
        raise PreconditionError(f"size mismatch: {a} vs {b}")


def majorization_leq(lam: Partition, mu: Partition) -> Majorization:
    """Compare leading partial sums of lam against mu."""
    _check_same_size(lam.n, mu.n)
    le = ge = True
    s_lam = s_mu = 0
    for k in range(1, max(len(lam), len(mu)) + 1):
        s_lam += lam.row(k)
        s_mu += mu.row(k)
        le &= s_lam <= s_mu
        ge &= s_lam >= s_mu
    if le:
        return Majorization.LESS_OR_EQUAL
    if ge:
        return Majorization.GREATER_OR_EQUAL_ONLY
    return Majorization.INCOMPARABLE


def majorization_covers(n: int) -> list[tuple[Partition, Partition]]:
    """Pairs (lower, upper) where upper covers lower in the majorization order."""
    parts = enumerate_partitions(n)
    below = {
        mu: {lam for lam in parts if lam != mu and majorization_leq(lam, mu) is Majorization.LESS_OR_EQUAL}
        for mu in parts
    }
    covers = []
    for mu in parts:
        for lam in sorted(below[mu], key=lambda x: x.parts, reverse=True):
            if not any(lam in below[nu] for nu in below[mu]):
                covers.append((lam, mu))
    return covers


def cycle_lex_compare(alpha: CycleType, beta: CycleType) -> int:
    """1 if alpha >_CL beta, -1 if alpha <_CL beta, 0 if equal."""
    _check_same_size(alpha.n, beta.n)
    for k in range(1, alpha.n + 1):
        a, b = alpha.mult(k), beta.mult(k)
        if a != b:
            return 1 if a > b else -1
    return 0


def cycle_lex_key(alpha: CycleType) -> tuple[int, ...]:
    """Sort key: larger key means larger in cycle-lex order."""
    return alpha.mults


def is_i_cycle_detector(lam: Partition, i: int) -> bool:
    if not 1 <= i <= lam.n:
        raise PreconditionError(f"i must lie in [1, {lam.n}], got {i}")
    conj = lam.conjugate()
    return lam.row(2) + conj.row(1) - 2 >= i and lam.row(1) + conj.row(2) - 2 >= i


# --- Dimension-ratio maximum ---

class DimRatioReport(BaseModel):
    n: int
    i: int
    ratios: dict[str, str] = Field(default_factory=dict)
    argmax: str
    expected: str
    passed: bool


def verify_dim_ratio_max(n: int, i: int) -> DimRatioReport:
    """
    Over all lam with lam_1 = n - i, check d_{lam minus first row} / d_lam is
    largest at [n-i, i] and equals (n-i+1) / (C(n,i) (n-2i+1)).
    """
    if not 1 <= i <= n // 2:
        raise PreconditionError(f"i must lie in [1, n/2], got i={i}, n={n}")

    ratios: dict[Partition, Fraction] = {}
    for lam in enumerate_partitions(n):
        if lam.row(1) != n - i:
            continue
        rest = Partition(lam.parts[1:])
        ratios[lam] = Fraction(dimension(rest), dimension(lam))

    two_row = Partition.of(n - i, i)
    expected = Fraction(n - i + 1, comb(n, i) * (n - 2 * i + 1))
    best = max(ratios.values())
    argmax = next(lam for lam, r in ratios.items() if r == best)
    return DimRatioReport(
        n=n,
        i=i,
        ratios={str(lam): format_rational(r) for lam, r in ratios.items()},
        argmax=str(argmax),
        expected=format_rational(expected),
        passed=ratios[two_row] == best and ratios[two_row] == expected,
    )
