"""Branch maps and Markov system assembly.

A system is a finite family of strictly monotone contracting branches
``g_i`` sending the ambient interval into pairwise disjoint closed pieces
``I_i``, together with a subshift restricting which symbol itineraries are
admissible.  The expanding map ``f`` acts on each piece as the inverse of
its branch.  Branches are given either in contracting form (``g`` directly,
affine or as an expression) or in expanding form (``f`` on its piece, with
``g`` recovered by guarded numerical inversion).
"""

from __future__ import annotations

import math

from . import expr as ex
from .errors import (
    DomainError,
    EmptySubshift,
    InversionStall,
    NoConvergence,
    NotMonotone,
    OutOfRange,
    ValidationError,
)
from .symbolic import SubshiftSpec, build_follower_graph, repair_complete_invariance, transitive_components

_THETA_SAMPLES = 10_000
_THETA_SAFETY = 1.1
_PROBE_DEPTH = 6


# === guarded inversion ===

def _invert_monotone(fn, dfn, lo, hi, y, tol, on_step=None):
    """Solve fn(x) = y for x in [lo, hi], fn strictly monotone.

    Bracketed bisection refined by Newton steps; a Newton candidate is
    accepted only when it stays strictly inside the current bracket, so the
    bracket never loses the root.  Residual target |fn(x) - y| <=
    tol * max(1, |y|).
    """
    scale = tol * max(1.0, abs(y))
    fa = fn(lo) - y
    if abs(fa) <= scale:
        return lo
    fb = fn(hi) - y
    if abs(fb) <= scale:
        return hi
    if (fa > 0.0) == (fb > 0.0):
        raise OutOfRange(f"target {y} outside branch image")
    a, b = lo, hi
    x = 0.5 * (a + b)
    for _ in range(200):
        fx = fn(x) - y
        if abs(fx) <= scale:
            return x
        if (fx > 0.0) == (fa > 0.0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        width = abs(b - a)
        if width < 1e-300:
            raise InversionStall("bracket collapsed below representable width")
        step = None
        if dfn is not None:
            d = dfn(x)
            if d != 0.0 and math.isfinite(d):
                cand = x - fx / d
                if min(a, b) < cand < max(a, b):
                    step = cand
        if step is None:
            step = 0.5 * (a + b)
        if on_step is not None:
            on_step(step, min(a, b), max(a, b))
        x = step
    raise NoConvergence("inversion did not reach tolerance in 200 iterations")


def invert_branch(forward, interval, y, tol, on_step=None):
    """Invert a strictly monotone forward expression on an interval.

    ``forward`` is an :class:`~thermoset.expr.ExprNode`; monotonicity is
    checked by derivative sign sampling before the solve.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValueError("empty interval")
    fn = ex.compile_expr(forward)
    dfn = ex.compile_expr(ex.differentiate(forward))
    sign = 0
    for i in range(17):
        x = lo + (hi - lo) * (i + 0.5) / 17.0
        try:
            d = dfn(x)
        except DomainError:
            continue
        if d == 0.0 or not math.isfinite(d):
            raise NotMonotone("derivative vanishes on the interval")
        s = 1 if d > 0.0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            raise NotMonotone("derivative changes sign on the interval")
    if sign == 0:
        raise NotMonotone("derivative undefined across the interval")
    return _invert_monotone(fn, dfn, lo, hi, y, tol, on_step=on_step)


def _with_limits(fn, limits):
    if not limits:
        return fn
    table = dict(limits)

    def wrapped(v):
        if v in table:
            return table[v]
        return fn(v)

    return wrapped


# === branches ===

class BranchSpec:
    """One monotone branch of the system.

    ``piece`` is the closed target interval I_i, ``domain`` the ambient
    interval on which the contracting form ``g`` acts.  ``forward_step``
    applies the expanding map on the piece and returns the image together
    with the one-step derivative there.
    """

    kind = "abstract"

    def __init__(self, index, piece, domain):
        self.index = int(index)
        self.piece = (float(piece[0]), float(piece[1]))
        self.domain = (float(domain[0]), float(domain[1]))
        self.orientation = 0
        self.range_ = None

    # contracting form
    def g(self, y):
        raise NotImplementedError

    def g_prime(self, y):
        raise NotImplementedError

    # expanding form on the piece
    def forward_step(self, x):
        raise NotImplementedError

    def f_prime(self, x):
        return self.forward_step(x)[1]

    def apply_interval(self, interval):
        """Image of an interval under the contracting form, sorted."""
        a = self.g(interval[0])
        b = self.g(interval[1])
        return (a, b) if a <= b else (b, a)

    def __repr__(self):
        return f"{type(self).__name__}(index={self.index}, piece={self.piece})"


class AffineBranch(BranchSpec):
    kind = "affine"

    def __init__(self, index, a, b, piece, domain):
        super().__init__(index, piece, domain)
        if a == 0.0:
            raise ValueError("affine branch must have nonzero slope")
        self.a = float(a)
        self.b = float(b)
        self.orientation = 1 if self.a > 0 else -1

    def g(self, y):
        return self.a * y + self.b

    def g_prime(self, y):
        return self.a

    def forward_step(self, x):
        return (x - self.b) / self.a, 1.0 / self.a


class ContractionBranch(BranchSpec):
    kind = "contraction"

    def __init__(self, index, source, piece, domain, limits=None, derivative_limits=None):
        super().__init__(index, piece, domain)
        self.source = source
        self.ast = ex.parse_expr(source)
        d1 = ex.differentiate(self.ast)
        d2 = ex.differentiate(d1)
        self._g = _with_limits(ex.compile_expr(self.ast), limits)
        self._g1 = _with_limits(ex.compile_expr(d1), derivative_limits)
        self._g2 = ex.compile_expr(d2)
        self._tol = 1e-14

    def g(self, y):
        return self._g(y)

    def g_prime(self, y):
        return self._g1(y)

    def g_second(self, y):
        return self._g2(y)

    def forward_step(self, x):
        y = _invert_monotone(self._g, self._g1, self.domain[0], self.domain[1], x, self._tol)
        return y, 1.0 / self._g1(y)


class ForwardBranch(BranchSpec):
    kind = "inverse-of-forward"

    def __init__(self, index, source, piece, domain, limits=None, derivative_limits=None):
        super().__init__(index, piece, domain)
        self.source = source
        self.ast = ex.parse_expr(source)
        d1 = ex.differentiate(self.ast)
        d2 = ex.differentiate(d1)
        self._f = _with_limits(ex.compile_expr(self.ast), limits)
        self._f1 = _with_limits(ex.compile_expr(d1), derivative_limits)
        self._f2 = ex.compile_expr(d2)
        self._tol = 1e-14

    def g(self, y):
        return _invert_monotone(self._f, self._f1, self.piece[0], self.piece[1], y, self._tol)

    def g_prime(self, y):
        return 1.0 / self._f1(self.g(y))

    def forward_step(self, x):
        return self._f(x), self._f1(x)

    def f_second(self, x):
        return self._f2(x)


# === the assembled system ===

class MarkovSystem:
    """Validated branch system with its admissibility subshift.

    Immutable after construction; geometric refinements are memoized on the
    instance.  ``theta`` bounds the Lipschitz constant of log|g'| over the
    branches, ``lam = exp(4 theta |I|)`` is the associated distortion
    constant, and ``theta_f`` plays the same role for the expanding map.
    """

    def __init__(self, interval, branches, subshift, theta, lam, theta_f, warnings=()):
        self.interval = (float(interval[0]), float(interval[1]))
        self.branches = tuple(branches)
        self.pieces = tuple(b.piece for b in self.branches)
        self.subshift = subshift
        self.theta = float(theta)
        self.lam = float(lam)
        self.theta_f = float(theta_f)
        self.warnings = tuple(warnings)
        self._levels = {}
        self._chain_cache = {}
        self._periodic_cache = {}

    @property
    def p(self):
        return len(self.branches)

    def length(self):
        return self.interval[1] - self.interval[0]

    def branch(self, index):
        """Branch by 1-based symbol index."""
        return self.branches[index - 1]

    def piece_index(self, x, tol=None):
        """1-based index of the piece containing x, or None."""
        if tol is None:
            tol = 1e-12 * self.length()
        for i, (lo, hi) in enumerate(self.pieces, start=1):
            if lo - tol <= x <= hi + tol:
                return i
        return None

    def forward_step(self, x, branch_index=None):
        """One step of the expanding map with its derivative.

        When ``branch_index`` is omitted the piece containing x is used.
        """
        if branch_index is None:
            branch_index = self.piece_index(x)
            if branch_index is None:
                raise OutOfRange(f"point {x} lies in no piece")
        return self.branch(branch_index).forward_step(x)

    def __repr__(self):
        return (f"MarkovSystem(p={self.p}, interval={self.interval}, "
                f"forbidden={self.subshift.forbidden_sorted()})")


# === validation and assembly ===

def _sample_interior(lo, hi, count):
    width = hi - lo
    return [lo + width * (i + 0.5) / count for i in range(count)]


def _monotone_orientation(deriv, lo, hi, label, violations):
    sign = 0
    for x in _sample_interior(lo, hi, 257):
        try:
            d = deriv(x)
        except DomainError:
            continue
        if not math.isfinite(d):
            continue
        if d == 0.0:
            violations.append(f"{label}: derivative vanishes near x={x:.6g}")
            return 0
        s = 1 if d > 0.0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            violations.append(f"{label}: derivative changes sign (not strictly monotone)")
            return 0
    if sign == 0:
        violations.append(f"{label}: derivative undefined on the whole interval")
    return sign


def _sampled_sup(fn, lo, hi, count):
    best = 0.0
    skipped = 0
    for x in _sample_interior(lo, hi, count):
        try:
            v = abs(fn(x))
        except DomainError:
            skipped += 1
            continue
        if math.isfinite(v):
            best = max(best, v)
        else:
            skipped += 1
    return best, skipped


def _lipschitz_scan(fn, lo, hi, label, warnings):
    """Sampled sup with a grid-doubling stability check."""
    coarse, skipped = _sampled_sup(fn, lo, hi, _THETA_SAMPLES)
    fine, skipped2 = _sampled_sup(fn, lo, hi, 2 * _THETA_SAMPLES)
    if coarse > 0 and fine > coarse * 1.05:
        warnings.append(
            f"{label}: log-derivative Lipschitz sampling grew {fine / coarse:.3f}x "
            "under grid doubling; constant may be unbounded")
    if skipped + skipped2 > 0.01 * 3 * _THETA_SAMPLES:
        warnings.append(f"{label}: log-derivative sampling skipped many undefined points")
    return max(coarse, fine)


def _build_branch(i, entry, ambient, violations):
    kind = entry.get("kind")
    piece = tuple(float(v) for v in entry["interval"])
    if kind == "affine":
        return AffineBranch(i, entry["a"], entry["b"], piece, ambient)
    if kind == "expr":
        limits = {float(k): float(v) for k, v in entry.get("limits", {}).items()}
        dlimits = {float(k): float(v) for k, v in entry.get("derivative_limits", {}).items()}
        if "contraction" in entry:
            return ContractionBranch(i, entry["contraction"], piece, ambient,
                                     limits, dlimits)
        if "forward" in entry:
            return ForwardBranch(i, entry["forward"], piece, ambient, limits, dlimits)
        violations.append(f"branch {i}: expr branch needs 'contraction' or 'forward'")
        return None
    violations.append(f"branch {i}: unknown kind {kind!r}")
    return None


def make_system(config) -> MarkovSystem:
    """Build and validate a Markov system from a parsed configuration.

    Every violated invariant is collected and reported in one
    :class:`ValidationError`: overlapping pieces, non-monotone branches,
    ranges escaping their piece, and non-decreasing refinement diameters.
    The subshift is repaired to complete invariance and reduced to the
    selected transitive component.
    """
    violations = []
    warnings = []

    ambient = tuple(float(v) for v in config["interval"])
    if not ambient[1] > ambient[0]:
        raise ValidationError(["ambient interval is empty"])
    length = ambient[1] - ambient[0]
    tol = 1e-12 * length

    entries = config["branches"]
    if not entries:
        raise ValidationError(["at least one branch is required"])

    branches = []
    for i, entry in enumerate(entries, start=1):
        piece = tuple(float(v) for v in entry["interval"])
        if not piece[1] > piece[0]:
            violations.append(f"branch {i}: piece interval is empty")
            continue
        if piece[0] < ambient[0] - tol or piece[1] > ambient[1] + tol:
            violations.append(f"branch {i}: piece escapes the ambient interval")
        branch = _build_branch(i, entry, ambient, violations)
        if branch is not None:
            branches.append(branch)

    if violations and not branches:
        raise ValidationError(violations)

    # piece disjointness
    order = sorted(range(len(branches)), key=lambda k: branches[k].piece[0])
    for a, b in zip(order, order[1:]):
        prev, nxt = branches[a].piece, branches[b].piece
        if nxt[0] < prev[1] - tol:
            violations.append(
                f"pieces of branches {branches[a].index} and {branches[b].index} overlap")
        elif nxt[0] <= prev[1] + tol:
            warnings.append(
                f"pieces of branches {branches[a].index} and {branches[b].index} touch")

    # monotonicity, orientation, ranges
    for br in branches:
        label = f"branch {br.index}"
        if br.kind == "affine":
            br.orientation = 1 if br.a > 0 else -1
        elif br.kind == "contraction":
            br.orientation = _monotone_orientation(br.g_prime, ambient[0], ambient[1],
                                                   label, violations)
        else:
            sign = _monotone_orientation(br._f1, br.piece[0], br.piece[1], label, violations)
            br.orientation = sign
        if br.orientation == 0:
            continue
        if br.kind == "inverse-of-forward":
            try:
                f_lo, _ = br.forward_step(br.piece[0])
                f_hi, _ = br.forward_step(br.piece[1])
            except DomainError as err:
                violations.append(f"{label}: forward map undefined at a piece endpoint ({err})")
                continue
            img = (min(f_lo, f_hi), max(f_lo, f_hi))
            if img[0] > ambient[0] + 1e-9 * length or img[1] < ambient[1] - 1e-9 * length:
                violations.append(
                    f"{label}: forward image [{img[0]:.6g}, {img[1]:.6g}] does not cover "
                    "the ambient interval")
                continue
            br.range_ = br.apply_interval(ambient)
        else:
            br.range_ = br.apply_interval(ambient)
        lo, hi = br.range_
        if lo < br.piece[0] - tol or hi > br.piece[1] + tol:
            violations.append(
                f"{label}: range [{lo:.6g}, {hi:.6g}] escapes its piece "
                f"[{br.piece[0]:.6g}, {br.piece[1]:.6g}]")
        elif lo <= br.piece[0] + tol or hi >= br.piece[1] - tol:
            warnings.append(f"{label}: range touches the piece boundary")

    # subshift
    subshift = None
    try:
        spec = SubshiftSpec(len(branches), config.get("forbidden", ()))
        spec = repair_complete_invariance(spec)
        comps = transitive_components(build_follower_graph(spec))
        if not comps:
            violations.append("subshift has no transitive component")
        else:
            pick = int(config.get("component", 0))
            if pick < 0 or pick >= len(comps):
                violations.append(
                    f"component index {pick} out of range (found {len(comps)})")
                pick = 0
            if len(comps) > 1:
                warnings.append(
                    f"subshift splits into {len(comps)} transitive parts; "
                    f"using component {pick}")
            subshift = comps[pick]
    except EmptySubshift:
        violations.append("subshift is empty: every stream hits a forbidden word")

    # distortion constants
    theta = 0.0
    theta_f = 0.0
    for br in branches:
        if br.orientation == 0:
            continue
        label = f"branch {br.index}"
        if br.kind == "affine":
            continue
        if br.kind == "contraction":
            g1, g2 = br._g1, br._g2
            theta = max(theta, _lipschitz_scan(
                lambda y: g2(y) / g1(y), ambient[0], ambient[1], label, warnings))
            theta_f = max(theta_f, _lipschitz_scan(
                lambda y: g2(y) / g1(y) ** 2, ambient[0], ambient[1], label, warnings))
        else:
            f1, f2 = br._f1, br._f2
            theta = max(theta, _lipschitz_scan(
                lambda z: f2(z) / f1(z) ** 2, br.piece[0], br.piece[1], label, warnings))
            theta_f = max(theta_f, _lipschitz_scan(
                lambda z: f2(z) / f1(z), br.piece[0], br.piece[1], label, warnings))
    theta *= _THETA_SAFETY
    theta_f *= _THETA_SAFETY
    lam = math.exp(4.0 * theta * length)

    if violations:
        raise ValidationError(violations)

    system = MarkovSystem(ambient, branches, subshift, theta, lam, theta_f, warnings)

    # expansivity probe: refinement diameters must decrease
    from . import cylinders

    probe = int(config.get("probe_depth", _PROBE_DEPTH))
    diam = [cylinders.max_diameter(system, n) for n in range(1, probe + 1)]
    bad = [n for n in range(1, probe) if not diam[n] < diam[n - 1]]
    if bad:
        raise ValidationError(
            [f"refinement diameters do not decrease at depth {n + 1} "
             f"(d={diam[n]:.6g} vs {diam[n - 1]:.6g})" for n in bad])

    return system
