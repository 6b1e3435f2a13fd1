"""
Irreducible characters of S_n.

Two engines:
- Murnaghan-Nakayama over rim hooks (any class), memoized per (partition, remaining cycles).
- The character polynomial specialized to involution classes (1^{n-2s}, 2^s):
  dominoes are peeled from the part below the first row and the first row is
  filled back in with an explicit product.

Both are exact integers; nothing here touches floating point.
"""
from collections import defaultdict
from fractions import Fraction
from math import comb, factorial, prod

from pydantic import BaseModel, Field

from config import MemoConflictError, PreconditionError, check_cap
from partitions import (
    CycleType,
    Partition,
    RemovalKind,
    borderstrip_removals,
    class_size,
    dimension,
    enumerate_cycle_types,
    enumerate_partitions,
    rim_hook_removals,
)


class MemoTable:
    """Write-once map. Re-inserting a key must carry the identical value."""

    def __init__(self):
        self._data: dict = {}

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        existing = self._data.setdefault(key, value)
        if existing != value:
            raise MemoConflictError(f"memo conflict at {key}: {existing} != {value}")
        return existing

    def items(self):
        return list(self._data.items())

    def __contains__(self, key) -> bool:
        return key in self._data

    def __len__(self) -> int:
        return len(self._data)


class CharacterTable:
    """
    Memoized character values chi_lambda(alpha).

    order="largest_first" peels the longest cycles first, so an all-ones tail
    collapses to the dimension of the remaining shape. order="smallest_first"
    exists as an independent cross-check.
    """

    def __init__(self, order: str = "largest_first"):
        if order not in ("largest_first", "smallest_first"):
            raise PreconditionError(f"unknown removal order {order!r}")
        self.order = order
        self.general = MemoTable()
        self.involutions = MemoTable()

    def value(self, lam: Partition, alpha: CycleType) -> int:
        if lam.n != alpha.n:
            raise PreconditionError(f"size mismatch: partition of {lam.n} vs class of {alpha.n}")
        lengths = alpha.cycle_lengths()
        if self.order == "smallest_first":
            lengths = tuple(reversed(lengths))
        return self._mn(lam, lengths)

    def _mn(self, lam: Partition, lengths: tuple[int, ...]) -> int:
        if not lengths:
            return 1
        if lengths[0] == 1 and self.order == "largest_first":
            return dimension(lam)

        key = (lam.parts, lengths)
        cached = self.general.get(key)
        if cached is not None:
            return cached

        k, rest = lengths[0], lengths[1:]
        total = 0
        for rho, height in rim_hook_removals(lam, k):
            sign = -1 if height % 2 else 1
            total += sign * self._mn(rho, rest)
        return self.general.put(key, total)

    def involution_value(self, lam: Partition, s: int) -> int:
        """chi_lambda(1^{n-2s}, 2^s) by domino removal; s = 0 is the dimension."""
        if not 0 <= 2 * s <= lam.n:
            raise PreconditionError(f"s must lie in [0, n/2], got s={s}, n={lam.n}")
        if s == 0:
            return dimension(lam)

        key = (lam.parts, s)
        cached = self.involutions.get(key)
        if cached is not None:
            return cached

        total = 0
        for removal in borderstrip_removals(lam, 2):
            if removal.kind is RemovalKind.HORIZONTAL_DOMINO:
                total += self.involution_value(removal.result, s - 1)
            elif removal.kind is RemovalKind.VERTICAL_DOMINO:
                total -= self.involution_value(removal.result, s - 1)
        return self.involutions.put(key, total)

    def dump(self) -> dict[str, str]:
        """Memo contents as "lambda|alpha" -> decimal string."""
        out = {}
        for (parts, lengths), v in self.general.items():
            alpha = CycleType.from_cycle_lengths(lengths, sum(parts))
            out[f"{Partition(parts)}|{alpha}"] = str(v)
        for (parts, s), v in self.involutions.items():
            alpha = CycleType.involution(sum(parts), s)
            out[f"{Partition(parts)}|{alpha}"] = str(v)
        return out

    def load(self, entries: dict[str, str]) -> int:
        """Seed the memo from a dump; conflicting values raise MemoConflictError."""
        loaded = 0
        for key, v in entries.items():
            lam_text, alpha_text = key.split("|")
            lam = Partition.parse(lam_text)
            alpha = CycleType.parse(alpha_text, lam.n)
            value = int(v)
            if all(k <= 2 for k in alpha.cycle_lengths()) and alpha.mult(2):
                self.involutions.put((lam.parts, alpha.mult(2)), value)
            lengths = alpha.cycle_lengths()
            if self.order == "smallest_first":
                lengths = tuple(reversed(lengths))
            self.general.put((lam.parts, lengths), value)
            loaded += 1
        return loaded


# Shared default table
TABLE = CharacterTable()


def character(lam: Partition, alpha: CycleType) -> int:
    """chi_lambda(alpha) via Murnaghan-Nakayama."""
    return TABLE.value(lam, alpha)


def involution_character(lam: Partition, s: int) -> int:
    """chi_lambda on the involution class with s 2-cycles (domino removal)."""
    return TABLE.involution_value(lam, s)


def poly_binomial(x: int, k: int) -> Fraction:
    """x(x-1)...(x-k+1)/k! for any integer x; 0 for k < 0."""
    if k < 0:
        return Fraction(0)
    return Fraction(prod(x - j for j in range(k)), factorial(k))


def first_row_fill(sigma: Partition, m: int) -> Fraction:
    """
    Value at m of the polynomial that equals d_{[m-|sigma|, sigma]} whenever that is a shape.

    m!/(m-r-sigma_1)! with the sigma_1 first-row hook factors cancelled, times
    d_sigma / r!. Evaluating the product (not the ratio) keeps small m exact.
    """
    r = sigma.n
    width = sigma.row(1)
    conj = sigma.conjugate()
    cancelled = {r + k - conj.row(k) - 1 for k in range(1, width + 1)}
    factors = [m - t for t in range(r + width) if t not in cancelled]
    return Fraction(dimension(sigma) * prod(factors), factorial(r))


def domino_chains(rho: Partition, steps: int) -> dict[Partition, int]:
    """Signed count of ordered chains of `steps` domino removals from rho, by end shape."""
    layer = {rho: 1}
    for _ in range(steps):
        nxt: dict[Partition, int] = defaultdict(int)
        for sigma, count in layer.items():
            for removal in borderstrip_removals(sigma, 2):
                if removal.kind is RemovalKind.HORIZONTAL_DOMINO:
                    nxt[removal.result] += count
                elif removal.kind is RemovalKind.VERTICAL_DOMINO:
                    nxt[removal.result] -= count
        layer = {k: v for k, v in nxt.items() if v}
    return layer


def character_involution_poly(lam: Partition, s: int) -> int:
    """
    chi_lambda(1^{n-2s}, 2^s) from the character polynomial of rho = lambda minus its first row.

    Sum over j of C(s, j) times the signed domino chains rho -> sigma of
    length j, each weighted by the first-row fill of sigma at n - 2s.
    """
    n = lam.n
    if not 0 <= 2 * s <= n:
        raise PreconditionError(f"s must lie in [0, n/2], got s={s}, n={n}")
    if not lam.parts:
        return 1

    rho = Partition(lam.parts[1:])
    m = n - 2 * s
    total = Fraction(0)
    for j in range(s + 1):
        chains = domino_chains(rho, j)
        if not chains:
            break
        total += comb(s, j) * sum(count * first_row_fill(sigma, m) for sigma, count in chains.items())

    if total.denominator != 1:
        raise ArithmeticError(f"non-integral character value {total} for {lam!r}, s={s}")
    return int(total)


def transposition_character_ratio(lam: Partition) -> Fraction:
    """chi_lambda(2, 1^{n-2}) / d_lambda."""
    if lam.n < 2:
        raise PreconditionError(f"n must be >= 2, got {lam.n}")
    return Fraction(involution_character(lam, 1), dimension(lam))


def character_table(n: int) -> dict[Partition, dict[CycleType, int]]:
    """Full table, rows in partition order, columns in class order."""
    classes = enumerate_cycle_types(n)
    return {lam: {alpha: character(lam, alpha) for alpha in classes} for lam in enumerate_partitions(n)}


class OrthogonalityReport(BaseModel):
    n: int
    passed: bool
    sign_twist_passed: bool
    violations: list[str] = Field(default_factory=list)


def column_orthogonality(n: int, unsafe: bool = False) -> OrthogonalityReport:
    """
    Check sum_lambda chi(alpha) chi(beta) = delta * n!/|C_alpha| over all class pairs,
    and chi_{lambda'} = sign * chi_lambda.
    """
    check_cap("oracle_n", n, unsafe)
    table = character_table(n)
    classes = enumerate_cycle_types(n)
    violations = []

    for a_idx, alpha in enumerate(classes):
        for beta in classes[a_idx:]:
            total = sum(row[alpha] * row[beta] for row in table.values())
            expected = factorial(n) // class_size(alpha) if alpha == beta else 0
            if total != expected:
                violations.append(f"columns {alpha} / {beta}: {total} != {expected}")

    twist_ok = True
    for lam, row in table.items():
        conj_row = table[lam.conjugate()]
        for alpha in classes:
            if conj_row[alpha] != alpha.sign * row[alpha]:
                twist_ok = False
                violations.append(f"sign twist {lam!r} at {alpha}")

    return OrthogonalityReport(
        n=n,
        passed=not violations,
        sign_twist_passed=twist_ok,
        violations=violations,
    )
