"""Geometric refinement of a Markov system into cylinder intervals.

Depth-n cylinders are the images of the pieces under (n-1)-fold branch
composition, indexed by admissible words.  Refinement reuses the previous
level: the cylinder of ``w`` is the branch image of the cylinder of the
shifted word, so each level costs one branch application per word.  Levels
are memoized on the system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .symbolic import Word, enumerate_words


@dataclass(frozen=True)
class Cylinder:
    word: Word
    left: float
    right: float
    deriv_mid: float  # |g_w'| at the preimage of the midpoint = 1/|(f^n)'(mid)|
    depth: int

    @property
    def length(self):
        return self.right - self.left

    @property
    def midpoint(self):
        return 0.5 * (self.left + self.right)


@dataclass(frozen=True)
class DistortionBound:
    depth: int
    rho_n: float
    pad: float


@dataclass(frozen=True)
class Gap:
    """Maximal open interval between depth-n cylinders inside one piece.

    Outer approximation of a true complementary gap; converges to it as the
    depth grows.  ``margin_ok`` reports whether the depth-n diameter bound
    d_n <= |G| / (3 lambda) holds for this gap.
    """

    left: float
    right: float
    piece: int
    left_word: Word | None
    right_word: Word | None
    margin_ok: bool

    @property
    def length(self):
        return self.right - self.left


def _levels(system, n):
    """Cylinder intervals per depth 1..n, memoized: depth -> {word: (lo, hi)}."""
    cache = system._levels
    for k in range(1, n + 1):
        if k in cache:
            continue
        words = enumerate_words(system.subshift, k)
        table = {}
        if k == 1:
            for w in words:
                table[w] = system.pieces[w[0] - 1]
        else:
            prev = cache[k - 1]
            for w in words:
                table[w] = system.branch(w[0]).apply_interval(prev[w[1:]])
        cache[k] = table
    return cache[n]


def log_derivative_chain(system, word, x):
    """log |(f^n)'(x)| along the itinerary prescribed by ``word``."""
    total = 0.0
    for sym in word:
        x, fp = system.branch(sym).forward_step(x)
        total += math.log(abs(fp))
    return total


def _chain_table(system, n):
    """log |(f^n)'| at cylinder midpoints, memoized per depth."""
    cache = system._chain_cache
    if n not in cache:
        level = _levels(system, n)
        cache[n] = {w: log_derivative_chain(system, w, 0.5 * (lo + hi))
                    for w, (lo, hi) in level.items()}
    return cache[n]


def refine(system, n):
    """Depth-n cylinders in lexicographic word order."""
    if n < 1:
        raise ValueError("depth must be positive")
    level = _levels(system, n)
    chains = _chain_table(system, n)
    out = []
    for w in sorted(level):
        lo, hi = level[w]
        out.append(Cylinder(w, lo, hi, math.exp(-chains[w]), n))
    return out


def max_diameter(system, n):
    """Largest depth-n cylinder length d_n."""
    level = _levels(system, n)
    return max(hi - lo for lo, hi in level.values())


def cylinder_sum(system, n):
    """Total length of the depth-n cylinders (outer Lebesgue estimate)."""
    level = _levels(system, n)
    return sum(hi - lo for lo, hi in level.values())


def distortion_pad(system, n) -> DistortionBound:
    """Tempered-distortion bound at depth n.

    rho_n = theta_f * (d_1 + ... + d_n) / n, so exp(n rho_n) bounds the
    ratio of n-step derivatives across any single depth-n cylinder.
    """
    if n < 1:
        raise ValueError("depth must be positive")
    total = sum(max_diameter(system, k) for k in range(1, n + 1))
    rho = system.theta_f * total / n
    return DistortionBound(n, rho, math.exp(n * rho))


def schwartz_constants(system):
    """The distortion constants (theta, lambda) of the system."""
    return system.theta, system.lam


def gap_list(system, n):
    """Maximal open intervals between depth-n cylinders inside each piece.

    Boundary gaps against the piece endpoints are included.  Gaps of length
    below the endpoint tolerance are dropped.
    """
    level = _levels(system, n)
    tol = 1e-12 * system.length()
    d_n = max_diameter(system, n)
    out = []

    def emit(lo, hi, piece, left_word, right_word):
        if hi - lo <= tol:
            return
        out.append(Gap(lo, hi, piece, left_word, right_word,
                       d_n <= (hi - lo) / (3.0 * system.lam)))

    for i, (plo, phi) in enumerate(system.pieces, start=1):
        inside = sorted((v, w) for w, v in level.items() if w[0] == i)
        if not inside:
            continue
        prev_hi, prev_word = plo, None
        for (lo, hi), w in inside:
            emit(prev_hi, lo, i, prev_word, w)
            prev_hi, prev_word = hi, w
        emit(prev_hi, phi, i, prev_word, None)
    return out
