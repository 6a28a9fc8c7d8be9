"""Forbidden-word subshifts: follower graphs, invariance repair, word enumeration.

A subshift here is the set of one-sided infinite symbol streams over
``{1, ..., p}`` that avoid every word of a finite forbidden set as a
sub-word.  Its follower graph is the de-Bruijn-style presentation whose
vertices are the allowed windows of length one less than the longest
forbidden word; an edge appends one symbol while keeping the extended
window free of forbidden sub-words.  All operations are pure and every
returned container is deterministically (lexicographically) ordered.
"""

from __future__ import annotations

import itertools

import networkx as nx

from .errors import EmptySubshift

Word = tuple[int, ...]


def as_word(symbols) -> Word:
    """Coerce a symbol sequence to the canonical tuple-of-ints form."""
    return tuple(int(s) for s in symbols)


def _contains_subword(word: Word, sub: Word) -> bool:
    k = len(sub)
    if k > len(word):
        return False
    return any(word[i:i + k] == sub for i in range(len(word) - k + 1))


def _normalize(words) -> frozenset:
    # Keep only minimal words: anything containing a kept word is redundant.
    kept = []
    for w in sorted(set(words), key=lambda w: (len(w), w)):
        if not any(_contains_subword(w, v) for v in kept):
            kept.append(w)
    return frozenset(kept)


class SubshiftSpec:
    """Alphabet size plus a normalized set of forbidden words.

    Construction prunes redundant forbidden words (words containing a
    shorter forbidden word describe the same stream set), builds the
    follower graph, and raises :class:`EmptySubshift` when no infinite
    admissible stream exists.
    """

    __slots__ = ("p", "forbidden", "max_len", "_graph")

    def __init__(self, p, forbidden=()):
        p = int(p)
        if p < 1:
            raise ValueError("alphabet size must be at least 1")
        words = set()
        for raw in forbidden:
            w = as_word(raw)
            if not w:
                raise ValueError("forbidden words must be nonempty")
            if any(s < 1 or s > p for s in w):
                raise ValueError(f"symbol out of range [1, {p}] in forbidden word {w}")
            words.add(w)
        self.p = p
        self.forbidden = _normalize(words)
        self.max_len = max((len(w) for w in self.forbidden), default=0)
        self._graph = _build_graph(self)

    def __eq__(self, other):
        return (isinstance(other, SubshiftSpec)
                and self.p == other.p and self.forbidden == other.forbidden)

    def __hash__(self):
        return hash((self.p, self.forbidden))

    def __repr__(self):
        words = sorted(self.forbidden, key=lambda w: (len(w), w))
        return f"SubshiftSpec(p={self.p}, forbidden={words})"

    def forbidden_sorted(self):
        return sorted(self.forbidden, key=lambda w: (len(w), w))


class FollowerGraph:
    """Pruned window graph of a subshift.

    ``order`` is the window length (zero means the single sentinel window,
    the empty word).  Every node has at least one out-edge, so every node
    starts an infinite admissible stream.
    """

    __slots__ = ("p", "forbidden", "order", "nodes", "succ", "pred")

    def __init__(self, p, forbidden, order, succ):
        self.p = p
        self.forbidden = forbidden
        self.order = order
        self.nodes = tuple(sorted(succ))
        self.succ = {u: tuple(sorted(succ[u])) for u in self.nodes}
        pred = {u: [] for u in self.nodes}
        for u in self.nodes:
            for _, v in self.succ[u]:
                pred[v].append(u)
        self.pred = {u: tuple(sorted(set(pred[u]))) for u in self.nodes}

    def edges(self):
        """All edges as (source, appended symbol, target), sorted."""
        return tuple((u, b, v) for u in self.nodes for b, v in self.succ[u])

    def edge_pairs(self):
        return {(u, v) for u in self.nodes for _, v in self.succ[u]}

    def __eq__(self, other):
        return (isinstance(other, FollowerGraph)
                and self.order == other.order and self.succ == other.succ)

    def __repr__(self):
        return f"FollowerGraph(order={self.order}, nodes={len(self.nodes)}, edges={len(self.edges())})"


def _build_graph(spec: SubshiftSpec) -> FollowerGraph:
    m = max(spec.max_len - 1, 0)
    allowed = [w for w in itertools.product(range(1, spec.p + 1), repeat=m)
               if not any(_contains_subword(w, q) for q in spec.forbidden)]
    succ = {}
    for u in allowed:
        outs = []
        for b in range(1, spec.p + 1):
            full = u + (b,)
            if any(_contains_subword(full, q) for q in spec.forbidden):
                continue
            outs.append((b, full[1:] if m else ()))
        succ[u] = outs
    # Drop windows that begin no infinite admissible stream.
    alive = set(allowed)
    changed = True
    while changed:
        changed = False
        for u in list(alive):
            if not any(v in alive for _, v in succ[u]):
                alive.discard(u)
                changed = True
    if not alive:
        raise EmptySubshift(f"every stream over 1..{spec.p} hits a forbidden word")
    pruned = {u: [(b, v) for b, v in succ[u] if v in alive] for u in alive}
    return FollowerGraph(spec.p, spec.forbidden, m, pruned)


def build_follower_graph(spec: SubshiftSpec) -> FollowerGraph:
    """Return the pruned follower graph of ``spec``."""
    return spec._graph


def repair_complete_invariance(spec: SubshiftSpec) -> SubshiftSpec:
    """Smallest shift-surjective restriction of the subshift.

    Windows without incoming edges start streams that cannot be extended to
    the left; forbidding them (repeatedly, until none remain) removes
    exactly those streams.  The result is the maximal subset of the
    original stream set on which the shift acts onto.
    """
    cur = spec
    for _ in range(4 * (spec.p ** max(spec.max_len, 1) + 1)):
        graph = cur._graph
        if graph.order == 0:
            return cur
        orphans = [u for u in graph.nodes if not graph.pred[u]]
        if not orphans:
            return cur
        cur = SubshiftSpec(cur.p, set(cur.forbidden) | set(orphans))
    raise RuntimeError("invariance repair failed to reach a fixpoint")


def transitive_components(graph: FollowerGraph):
    """Strongly connected subsystems of the graph, as subshift specs.

    Components without an internal edge are dropped.  Each surviving
    component is converted back to a forbidden-word description by
    forbidding every window outside the component.  Ordered by smallest
    node word.
    """
    if not graph.nodes:
        return []
    if graph.order == 0:
        return [SubshiftSpec(graph.p, graph.forbidden)]
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.nodes)
    for u in graph.nodes:
        for _, v in graph.succ[u]:
            digraph.add_edge(u, v)
    components = []
    for comp in nx.strongly_connected_components(digraph):
        has_edge = any(v in comp for u in comp for _, v in graph.succ[u])
        if has_edge:
            components.append(frozenset(comp))
    components.sort(key=min)
    out = []
    for comp in components:
        blocked = [w for w in itertools.product(range(1, graph.p + 1), repeat=graph.order)
                   if w not in comp]
        out.append(SubshiftSpec(graph.p, set(graph.forbidden) | set(blocked)))
    return out


def enumerate_words(spec: SubshiftSpec, n: int):
    """All admissible words of length ``n`` that start an infinite stream.

    Lexicographically ordered.  A word qualifies when it avoids every
    forbidden word and its final window survives in the pruned follower
    graph (so it extends forward indefinitely).
    """
    if n < 1:
        raise ValueError("word length must be positive")
    graph = spec._graph
    m = graph.order
    if n < m:
        return sorted({u[:n] for u in graph.nodes})
    node_set = set(graph.nodes)
    lengths = sorted({len(q) for q in spec.forbidden})
    out = []
    word = []

    def suffix_ok():
        for length in lengths:
            if length <= len(word) and tuple(word[-length:]) in spec.forbidden:
                return False
        return True

    def grow():
        if len(word) == n:
            if m == 0 or tuple(word[-m:]) in node_set:
                out.append(tuple(word))
            return
        for b in range(1, spec.p + 1):
            word.append(b)
            if suffix_ok():
                grow()
            word.pop()

    grow()
    return out


def is_admissible_periodic(spec: SubshiftSpec, w) -> bool:
    """True when the periodic stream w,w,w,... avoids every forbidden word."""
    w = as_word(w)
    if not w:
        raise ValueError("word must be nonempty")
    if any(s < 1 or s > spec.p for s in w):
        raise ValueError("symbol out of range")
    if spec.max_len == 0:
        return True
    need = len(w) + spec.max_len - 1
    reps = -(-need // len(w))
    stretch = (w * reps)[:need]
    return not any(_contains_subword(stretch, q) for q in spec.forbidden)


def cut_cylinder(spec: SubshiftSpec, w) -> SubshiftSpec:
    """Forbid one admissible word and repair the result.

    Models passing to the subsystem avoiding a chosen cylinder.  Cutting a
    word that is already forbidden returns the spec unchanged; cutting the
    last admissible behaviour raises :class:`EmptySubshift`.
    """
    w = as_word(w)
    if any(s < 1 or s > spec.p for s in w):
        raise ValueError("symbol out of range")
    if len(w) < max(spec.max_len, 1):
        raise ValueError("cut word must be at least as long as the stored forbidden words")
    if any(_contains_subword(w, q) for q in spec.forbidden):
        return spec
    return repair_complete_invariance(SubshiftSpec(spec.p, set(spec.forbidden) | {w}))
