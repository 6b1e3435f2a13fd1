"""
The involution walk itself.

Step law: pick a uniform perfect matching of {1..n}, keep each 2-cycle with
probability 1-p. Distributions are class functions stored PER ELEMENT
(uniform is 1/n! on every class). Exact routes:
- Fourier inversion from the eigenvalue table and the character table
- class-algebra convolution, independent of the eigenvalues
Monte Carlo runs seeded numpy blocks concurrently.
"""
import asyncio
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb, factorial, sqrt

import numpy as np
from rich.console import Console

from characters import character, character_table
from config import PreconditionError, WalkParams, check_cap, format_rational, get_cap, get_default
from partitions import CycleType, Partition, class_size, cycle_lex_key, dimension, enumerate_cycle_types
from spectrum import cached_table

console = Console(stderr=True)


@dataclass
class ClassDistribution:
    """Per-element probabilities for every conjugacy class of S_n."""
    n: int
    probs: dict[CycleType, Fraction] = field(default_factory=dict)

    @classmethod
    def point_mass(cls, n: int) -> "ClassDistribution":
        identity = CycleType.from_cycle_lengths([1] * n, n)
        return cls(n, {a: Fraction(int(a == identity)) for a in enumerate_cycle_types(n)})

    @classmethod
    def uniform(cls, n: int) -> "ClassDistribution":
        u = Fraction(1, factorial(n))
        return cls(n, {a: u for a in enumerate_cycle_types(n)})

    def mass(self, alpha: CycleType) -> Fraction:
        """Total probability of the class (per-element value times class size)."""
        return self.probs[alpha] * class_size(alpha)

    def total(self) -> Fraction:
        return sum((self.mass(a) for a in self.probs), Fraction(0))

    def expectation(self, lam: Partition) -> Fraction:
        """E chi_lambda under this distribution."""
        return sum((self.mass(a) * character(lam, a) for a in self.probs), Fraction(0))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "classes": [
                {
                    "class": str(a),
                    "class_size": class_size(a),
                    "prob": format_rational(q),
                    "float_approx": float(q),
                }
                for a, q in self.probs.items()
            ],
        }

    def csv_rows(self) -> list[dict]:
        return [
            {
                "class": str(a),
                "class_size": class_size(a),
                "prob_num": q.numerator,
                "prob_den": q.denominator,
                "float_approx": float(q),
            }
            for a, q in self.probs.items()
        ]


@dataclass(frozen=True)
class Involution:
    """Disjoint 2-cycles on {1..n}."""
    n: int
    pairs: frozenset[tuple[int, int]]

    @property
    def s(self) -> int:
        return len(self.pairs)

    def as_permutation(self) -> list[int]:
        """One-line notation on {1..n}."""
        image = list(range(1, self.n + 1))
        for a, b in self.pairs:
            image[a - 1], image[b - 1] = b, a
        return image

    def cycle_type(self) -> CycleType:
        return CycleType.involution(self.n, self.s)


# --- Generator ---

def generator_distribution(params: WalkParams) -> ClassDistribution:
    """Class (1^{n-2s}, 2^s) gets total mass C(n/2, s) p^{n/2-s} (1-p)^s."""
    n, p, half = params.n, params.p, params.half
    probs = {a: Fraction(0) for a in enumerate_cycle_types(n)}
    for s in range(half + 1):
        alpha = CycleType.involution(n, s)
        probs[alpha] = comb(half, s) * p ** (half - s) * (1 - p) ** s / class_size(alpha)
    return ClassDistribution(n, probs)


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2 ** 64:
        raise PreconditionError(f"seed must be a 64-bit non-negative integer, got {seed}")
    return seed


def sample_generator(params: WalkParams, seed: int) -> Involution:
    """Shuffle 1..n, pair consecutive entries, keep each pair with probability 1-p."""
    rng = np.random.default_rng(_check_seed(seed))
    order = rng.permutation(params.n) + 1
    keep = rng.random(params.half) < float(1 - params.p)
    pairs = frozenset(
        tuple(sorted((int(order[2 * k]), int(order[2 * k + 1]))))
        for k in range(params.half)
        if keep[k]
    )
    return Involution(params.n, pairs)


# --- Exact distributions ---

def distribution_at_time(params: WalkParams, t: int, unsafe: bool = False) -> ClassDistribution:
    """P^{*t}(g) = (1/n!) sum_lambda d_lambda psi_lambda^t chi_lambda(g), walk started at the identity."""
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    n = params.n
    check_cap("exact_distribution_n", n, unsafe)
    table = cached_table(params, unsafe)
    chars = character_table(n)
    weights = {lam: dimension(lam) * psi ** t for lam, psi in table.values.items()}
    n_fact = factorial(n)
    probs = {
        alpha: sum((w * chars[lam][alpha] for lam, w in weights.items()), Fraction(0)) / n_fact
        for alpha in enumerate_cycle_types(n)
    }
    return ClassDistribution(n, probs)


# --- Class-algebra oracle ---

def permutation_cycle_type(perm: tuple[int, ...]) -> CycleType:
    n = len(perm)
    seen = [False] * n
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        lengths.append(length)
    return CycleType.from_cycle_lengths(lengths, n)


def class_representative(alpha: CycleType) -> tuple[int, ...]:
    perm, start = [], 0
    for k in alpha.cycle_lengths():
        perm.extend(start + (j + 1) % k for j in range(k))
        start += k
    return tuple(perm)


def _is_involution_class(alpha: CycleType) -> bool:
    return all(k <= 2 for k in alpha.cycle_lengths())


@lru_cache(maxsize=None)
def _structure_counts_enumerated(n: int) -> dict:
    """N[alpha, gamma, beta] = #{x in C_alpha : x^{-1} g_gamma in C_beta}, by listing S_n."""
    elements = list(permutations(range(n)))
    class_of = {x: permutation_cycle_type(x) for x in elements}
    counts: dict = defaultdict(int)
    for gamma in enumerate_cycle_types(n):
        g = class_representative(gamma)
        for x in elements:
            alpha = class_of[x]
            if not _is_involution_class(alpha):
                continue
            x_inv = [0] * n
            for i, xi in enumerate(x):
                x_inv[xi] = i
            y = tuple(x_inv[g[i]] for i in range(n))
            counts[(alpha, gamma, class_of[y])] += 1
    return dict(counts)


@lru_cache(maxsize=None)
def _structure_counts_characters(n: int) -> dict:
    """Same counts from characters: |C_a||C_b|/n! sum_lambda chi(a) chi(b) chi(c) / d."""
    chars = character_table(n)
    classes = enumerate_cycle_types(n)
    n_fact = factorial(n)
    counts = {}
    for alpha in filter(_is_involution_class, classes):
        for gamma in classes:
            for beta in classes:
                total = sum(
                    (Fraction(row[alpha] * row[beta] * row[gamma], dimension(lam)) for lam, row in chars.items()),
                    Fraction(0),
                )
                value = total * class_size(alpha) * class_size(beta) / n_fact
                if value.denominator != 1:
                    raise ArithmeticError(f"non-integral structure constant at {alpha}, {gamma}, {beta}")
                if value:
                    counts[(alpha, gamma, beta)] = int(value)
    return counts


def structure_counts(n: int) -> dict:
    if n <= get_cap("enumeration_oracle_n"):
        return _structure_counts_enumerated(n)
    return _structure_counts_characters(n)


def convolution_oracle(params: WalkParams, t: int, unsafe: bool = False) -> ClassDistribution:
    """Repeated convolution with the generator in the class algebra."""
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    n = params.n
    check_cap("oracle_n", n, unsafe)
    gen = generator_distribution(params)
    counts = structure_counts(n)
    classes = enumerate_cycle_types(n)

    current = ClassDistribution.point_mass(n)
    for _ in range(t):
        nxt = {gamma: Fraction(0) for gamma in classes}
        for (alpha, gamma, beta), c in counts.items():
            weight = gen.probs[alpha]
            if weight:
                nxt[gamma] += weight * c * current.probs[beta]
        current = ClassDistribution(n, nxt)
    return current


# --- Metrics ---

def total_variation(d: ClassDistribution) -> Fraction:
    """(1/2) sum_alpha |C_alpha| |P(alpha) - 1/n!|."""
    u = Fraction(1, factorial(d.n))
    return sum((class_size(a) * abs(q - u) for a, q in d.probs.items()), Fraction(0)) / 2


def separation(d: ClassDistribution) -> tuple[Fraction, CycleType]:
    """max_g (1 - n! P(g)); ties go to the cycle-lex-least class."""
    n_fact = factorial(d.n)
    best = max(1 - n_fact * q for q in d.probs.values())
    argmax = min((a for a, q in d.probs.items() if 1 - n_fact * q == best), key=cycle_lex_key)
    return best, argmax


def parity_gap(d: ClassDistribution) -> Fraction:
    """Mass on even permutations minus mass on odd ones."""
    return sum((a.sign * d.mass(a) for a in d.probs), Fraction(0))


# --- Monte Carlo ---

@dataclass
class MonteCarloEstimate:
    params: WalkParams
    t: int
    samples: int
    seed: int
    block_size: int
    distribution: ClassDistribution
    counts: dict[str, int] = field(default_factory=dict)
    stderr: dict[str, float] = field(default_factory=dict)  # empirical standard error of each class mass

    def z_scores(self, exact: ClassDistribution) -> dict[str, float]:
        """(frequency - exact mass) / sigma, sigma from the exact binomial variance."""
        out = {}
        for alpha in exact.probs:
            key = str(alpha)
            mass = float(exact.mass(alpha))
            diff = self.counts.get(key, 0) / self.samples - mass
            sigma = sqrt(mass * (1 - mass) / self.samples)
            out[key] = diff / sigma if sigma else (0.0 if diff == 0 else float("inf"))
        return out

    def to_json_dict(self) -> dict:
        return {
            "n": self.params.n,
            "p": format_rational(self.params.p),
            "t": self.t,
            "samples": self.samples,
            "seed": self.seed,
            "block_size": self.block_size,
            "classes": [
                {"class": key, "count": c, "frequency": c / self.samples, "stderr": self.stderr[key]}
                for key, c in self.counts.items()
            ],
        }


def _sample_involutions(rng: np.random.Generator, n: int, keep_prob: float, size: int) -> np.ndarray:
    """`size` involutions as rows of images on 0..n-1."""
    order = rng.permuted(np.tile(np.arange(n), (size, 1)), axis=1)
    kept = rng.random((size, n // 2)) < keep_prob
    inv = np.tile(np.arange(n), (size, 1))
    rows = np.arange(size)
    for k in range(n // 2):
        sel = kept[:, k]
        a, b = order[sel, 2 * k], order[sel, 2 * k + 1]
        inv[rows[sel], a] = b
        inv[rows[sel], b] = a
    return inv


def _cycle_type_matrix(perms: np.ndarray) -> np.ndarray:
    """Row-wise multiplicity vectors (a_1..a_n) of the permutations in `perms`."""
    size, n = perms.shape
    ident = np.tile(np.arange(n), (size, 1))
    lengths = np.zeros((size, n), dtype=np.int64)
    current = ident.copy()
    for k in range(1, n + 1):
        current = np.take_along_axis(perms, current, axis=1)
        hit = (current == ident) & (lengths == 0)
        lengths[hit] = k
    mults = np.zeros((size, n), dtype=np.int64)
    for k in range(1, n + 1):
        mults[:, k - 1] = (lengths == k).sum(axis=1) // k
    return mults


def _sample_block(n: int, keep_prob: float, t: int, size: int, seed: int, block_index: int) -> dict[tuple, int]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, block_index]))
    current = np.tile(np.arange(n), (size, 1))
    for _ in range(t):
        step = _sample_involutions(rng, n, keep_prob, size)
        current = np.take_along_axis(current, step, axis=1)
    rows, counts = np.unique(_cycle_type_matrix(current), axis=0, return_counts=True)
    return {tuple(int(x) for x in row): int(c) for row, c in zip(rows, counts)}


async def monte_carlo_estimate_async(
    params: WalkParams,
    t: int,
    samples: int,
    seed: int,
    block_size: int | None = None,
    workers: int | None = None,
) -> MonteCarloEstimate:
    """Blocks run in worker threads; block b uses the seed sequence (seed, b)."""
    if samples < 1:
        raise PreconditionError(f"samples must be >= 1, got {samples}")
    if t < 0:
        raise PreconditionError(f"t must be >= 0, got {t}")
    _check_seed(seed)
    block_size = int(block_size or get_default("block_size", 10000))
    if block_size < 1:
        raise PreconditionError(f"block size must be >= 1, got {block_size}")
    workers = int(workers or get_default("workers", 4))

    n = params.n
    keep_prob = float(1 - params.p)
    sizes = [block_size] * (samples // block_size)
    if samples % block_size:
        sizes.append(samples % block_size)

    gate = asyncio.Semaphore(workers)

    async def run_block(index: int, size: int) -> dict[tuple, int]:
        async with gate:
            return await asyncio.to_thread(_sample_block, n, keep_prob, t, size, seed, index)

    results = await asyncio.gather(*(run_block(i, size) for i, size in enumerate(sizes)))

    tally: dict[tuple, int] = defaultdict(int)
    for block in results:
        for mults, c in block.items():
            tally[mults] += c

    probs, counts, stderr = {}, {}, {}
    for alpha in enumerate_cycle_types(n):
        c = tally.get(alpha.mults, 0)
        freq = c / samples
        probs[alpha] = Fraction(c, samples * class_size(alpha))
        counts[str(alpha)] = c
        stderr[str(alpha)] = sqrt(freq * (1 - freq) / samples)

    return MonteCarloEstimate(
        params=params,
        t=t,
        samples=samples,
        seed=seed,
        block_size=block_size,
        counts=counts,
        distribution=ClassDistribution(n, probs),
        stderr=stderr,
    )


def monte_carlo_estimate(
    params: WalkParams,
    t: int,
    samples: int,
    seed: int,
    block_size: int | None = None,
    workers: int | None = None,
) -> MonteCarloEstimate:
    """Compose t sampled generators per sample and tally cycle types."""
    console.print(f"[dim]Monte Carlo: n={params.n}, t={t}, {samples} samples, seed {seed}[/]")
    return asyncio.run(monte_carlo_estimate_async(params, t, samples, seed, block_size, workers))
