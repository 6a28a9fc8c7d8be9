"""Independent reference computations used to freeze expected test values.

Everything here works on raw strings / plain floats and deliberately avoids
the package's own graph and expression machinery, so the two sides can
disagree when one of them is wrong.
"""

from functools import lru_cache


def brute_force_prefixes(p, forbidden, n, margin=12):
    """Length-``n`` prefixes of two-sidedly extendable admissible streams.

    Works at the string level: a word qualifies when it avoids every
    forbidden word, can be continued to the right ``margin`` more symbols,
    and can be extended to the left ``margin`` symbols (each extension
    staying free of forbidden sub-words).  For window sizes up to 4 the
    extendability fixpoint stabilizes well inside ``margin`` steps, so this
    equals true two-sided extendability.
    """
    forbidden = [tuple(q) for q in forbidden]
    if not forbidden:
        window = 1
    else:
        window = max(len(q) for q in forbidden)
    keep = window - 1

    def clean(seq):
        for q in forbidden:
            k = len(q)
            for i in range(len(seq) - k + 1):
                if seq[i:i + k] == q:
                    return False
        return True

    @lru_cache(maxsize=None)
    def fwd(suffix, depth):
        if depth == 0:
            return True
        for b in range(1, p + 1):
            ext = suffix + (b,)
            if clean(ext) and fwd(ext[-keep:] if keep else (), depth - 1):
                return True
        return False

    @lru_cache(maxsize=None)
    def bwd(prefix, depth):
        if depth == 0:
            return True
        for b in range(1, p + 1):
            ext = (b,) + prefix
            if clean(ext) and bwd(ext[:keep] if keep else (), depth - 1):
                return True
        return False

    out = []
    word = []

    def grow():
        if len(word) == n:
            w = tuple(word)
            if fwd(w[-keep:] if keep else (), margin) and bwd(w[:keep] if keep else (), margin):
                out.append(w)
            return
        for b in range(1, p + 1):
            word.append(b)
            tail = tuple(word[-window:])
            if clean(tail):
                grow()
            word.pop()

    grow()
    return out


def central_difference(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def adjacency_word_counts(p, forbidden, n_max):
    """Admissible extendable word counts via the symbol transition matrix.

    Only valid for forbidden sets whose words all have length exactly 2.
    """
    import numpy as np

    assert all(len(q) == 2 for q in forbidden)
    blocked = {tuple(q) for q in forbidden}
    A = np.array([[0 if (i, j) in blocked else 1
                   for j in range(1, p + 1)] for i in range(1, p + 1)], dtype=float)
    # Forward-viable symbols: rows with some admissible continuation, iterated.
    viable = list(range(p))
    while True:
        nxt = [i for i in viable if any(A[i, j] for j in viable)]
        if nxt == viable:
            break
        viable = nxt
    counts = {}
    if not viable:
        return {n: 0 for n in range(1, n_max + 1)}
    sub = A[np.ix_(viable, viable)]
    vec = np.ones(len(viable))
    counts[1] = len(viable)
    power = sub.copy()
    for n in range(2, n_max + 1):
        counts[n] = int(round((np.linalg.matrix_power(sub, n - 1) @ vec).sum()))
    return counts


def periodic_word_count(p, forbidden, n):
    """Number of length-n words whose periodic repetition avoids the forbidden set."""
    window = max((len(q) for q in forbidden), default=0)
    blocked = [tuple(q) for q in forbidden]
    import itertools

    count = 0
    for w in itertools.product(range(1, p + 1), repeat=n):
        stretch = (w * (2 + window))[:n + max(window - 1, 0)]
        ok = True
        for q in blocked:
            k = len(q)
            for i in range(len(stretch) - k + 1):
                if stretch[i:i + k] == q:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count
