"""Local monomial orderings, Mora normal form, standard bases, quotients.

All computations are degree-truncated: a standard basis at bound B has a
leading ideal that is provably correct below total degree B, which suffices
for the finite-codimension quotients the tangent modules need.
"""

from __future__ import annotations

from .errors import NotZeroDimensionalWithinBound, PrecisionUnderflow
from .linalg import span_quotient_dim, certified
from .series import BiSeries, INF

MAX_BOUND = 512


def order_key(mono):
    """Sort key for local degrevlex: smallest key = largest monomial."""
    i, j = mono
    return (i + j, j)


class LocalOrdering:
    """Local degree reverse lexicographic ordering on K[[x,y]] monomials."""

    kind = "local_degrevlex"

    @staticmethod
    def key(mono):
        return order_key(mono)

    @staticmethod
    def greater(m1, m2):
        return order_key(m1) < order_key(m2)


def lead_monomial(f: BiSeries):
    """Leading monomial (largest in the local order) of a nonzero series."""
    return min(f.coeffs, key=order_key)


def ecart(f: BiSeries):
    degs = [i + j for (i, j) in f.coeffs]
    return max(degs) - min(degs)


def _divides(m, n):
    return m[0] <= n[0] and m[1] <= n[1]


def mora_reduce(f: BiSeries, G, bound=None, ordering=LocalOrdering):
    """Mora normal form of f modulo G, truncated at the degree bound.

    Returns r with f - r in <G> + <x,y>^bound and no term of r divisible by
    a leading term of G.  Unit multipliers are implicit in the ecart-driven
    reducer extension.
    """
    if bound is None:
        bound = f.precision
        if bound == INF:
            bound = MAX_BOUND
    bound = int(bound)
    if f.precision < bound:
        raise PrecisionUnderflow("input known only below %s" % f.precision)
    K = f.field
    h = f.truncate(bound)
    T = [g.truncate(bound) for g in G if not g.truncate(bound).is_zero()]
    Tlead = [lead_monomial(g) for g in T]
    done = {}
    guard = 0
    while not h.is_zero():
        guard += 1
        if guard > 200000:  # pragma: no cover
            raise NotZeroDimensionalWithinBound("Mora reduction did not settle")
        m = lead_monomial(h)
        cands = [idx for idx, lm in enumerate(Tlead) if _divides(lm, m)]
        if not cands:
            done[m] = h.coeffs[m]
            h = BiSeries(K, {k: c for k, c in h.coeffs.items() if k != m},
                         bound, f.vars)
            continue
        best = min(cands, key=lambda idx: (ecart(T[idx]), idx))
        g = T[best]
        if ecart(g) > ecart(h):
            T.append(h)
            Tlead.append(m)
        lm_g = Tlead[best]
        c = h.coeffs[m] / g.coeffs[lm_g]
        shift = (m[0] - lm_g[0], m[1] - lm_g[1])
        mult = BiSeries.monomial(K, shift[0], shift[1], -c, vars=f.vars)
        h = (h + mult * g).truncate(bound)
    return BiSeries(K, done, bound, f.vars)


def _spoly(f, g, bound):
    K = f.field
    mf, mg = lead_monomial(f), lead_monomial(g)
    lcm = (max(mf[0], mg[0]), max(mf[1], mg[1]))
    cf = f.coeffs[mf]
    cg = g.coeffs[mg]
    t1 = BiSeries.monomial(K, lcm[0] - mf[0], lcm[1] - mf[1], cg, vars=f.vars)
    t2 = BiSeries.monomial(K, lcm[0] - mg[0], lcm[1] - mg[1], cf, vars=f.vars)
    return (t1 * f - t2 * g).truncate(bound)


class StdBasis:
    """Truncated standard basis: leading ideal correct below degree_bound."""

    def __init__(self, generators, degree_bound, ordering=LocalOrdering):
        self.generators = generators
        self.degree_bound = degree_bound
        self.ordering = ordering

    @property
    def leading_monomials(self):
        return [lead_monomial(g) for g in self.generators]

    def __iter__(self):
        return iter(self.generators)


def std_basis(gens, bound, ordering=LocalOrdering) -> StdBasis:
    """Standard basis of <gens> truncated at the degree bound."""
    bound = int(bound)
    G = []
    for g in gens:
        gt = g.truncate(bound) if g.precision > bound else g
        if gt.precision < bound:
            raise PrecisionUnderflow("generator known only below %s" % gt.precision)
        if not gt.is_zero():
            G.append(gt.truncate(bound))
    if not G:
        return StdBasis([], bound, ordering)
    pairs = [(i, j) for i in range(len(G)) for j in range(i + 1, len(G))]
    while pairs:
        pairs.sort(key=lambda ij: order_key(_pair_lcm(G, ij)), reverse=True)
        i, j = pairs.pop()
        lcm = _pair_lcm(G, (i, j))
        if lcm[0] + lcm[1] >= bound:
            continue
        mi, mj = lead_monomial(G[i]), lead_monomial(G[j])
        if mi[0] + mj[0] == lcm[0] and mi[1] + mj[1] == lcm[1]:
            continue  # coprime leading terms: product criterion
        s = _spoly(G[i], G[j], bound)
        if s.is_zero():
            continue
        h = mora_reduce(s, G, bound, ordering)
        if not h.is_zero():
            G.append(h)
            pairs.extend((k, len(G) - 1) for k in range(len(G) - 1))
    # minimalize: drop generators whose lead is divisible by another lead
    leads = [lead_monomial(g) for g in G]
    keep = []
    for idx, m in enumerate(leads):
        if any(_divides(leads[k], m) for k in range(len(G))
               if k != idx and (leads[k] != m or k < idx)):
            continue
        keep.append(idx)
    G = [G[idx] for idx in keep]
    # normalize lead coefficients and reduce tails for determinism
    out = []
    for idx, g in enumerate(G):
        lm = lead_monomial(g)
        g = g.scale(g.coeffs[lm].inverse())
        others = [G[k] for k in range(len(G)) if k != idx]
        tail = BiSeries(g.field,
                        {k: c for k, c in g.coeffs.items() if k != lm},
                        bound, g.vars)
        red = mora_reduce(tail, others, bound, ordering) if others else tail
        out.append(BiSeries.monomial(g.field, lm[0], lm[1], vars=g.vars)
                   .truncate(bound) + red)
    out.sort(key=lambda g: order_key(lead_monomial(g)))
    return StdBasis(out, bound, ordering)


def _pair_lcm(G, ij):
    mi = lead_monomial(G[ij[0]])
    mj = lead_monomial(G[ij[1]])
    return (max(mi[0], mj[0]), max(mi[1], mj[1]))


def staircase(sb: StdBasis):
    """Minimal generators of the leading ideal."""
    leads = sorted(set(sb.leading_monomials), key=order_key)
    mins = []
    for m in leads:
        if not any(_divides(n, m) for n in mins):
            mins.append(m)
    return mins


def staircase_complement(mins, bound):
    """Monomials below the staircase; None if not finite within bound."""
    xa = min((i for (i, j) in mins if j == 0), default=None)
    yb = min((j for (i, j) in mins if i == 0), default=None)
    if xa is None or yb is None or xa >= bound or yb >= bound:
        return None
    out = []
    for i in range(xa):
        for j in range(yb):
            if not any(_divides(m, (i, j)) for m in mins):
                out.append((i, j))
    out.sort(key=lambda m: (m[0] + m[1], order_key(m)))
    return out


def quotient_dim(gens, bound=None):
    """dim_K K[[x,y]]/<gens> with its monomial staircase basis."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise NotZeroDimensionalWithinBound("zero ideal has infinite codimension")
    if bound is None:
        maxdeg = max(max(i + j for (i, j) in g.coeffs) for g in gens)
        bound = 2 * maxdeg + 4
    bound = int(min(bound, MAX_BOUND))
    while True:
        capped = [g.truncate(bound) if g.precision > bound else g for g in gens]
        if any(g.precision < bound for g in capped):
            bound = int(min(g.precision for g in capped))
        sb = std_basis(capped, bound)
        mins = staircase(sb)
        comp = staircase_complement(mins, bound)
        if comp is None:
            if bound >= MAX_BOUND or 2 * bound > min(g.precision for g in gens):
                raise NotZeroDimensionalWithinBound(
                    "no staircase corner below bound %d" % bound)
            bound *= 2
            continue
        corner = max(i + j for (i, j) in mins)
        needed = 2 * corner + 4
        if needed > bound and bound < MAX_BOUND and \
                needed <= min((g.precision for g in gens), default=INF):
            bound = needed
            continue
        return len(comp), comp


def ideal_member(f: BiSeries, sb: StdBasis) -> bool:
    return mora_reduce(f, sb.generators, sb.degree_bound).is_zero()


__all__ = [
    "LocalOrdering", "StdBasis", "mora_reduce", "std_basis", "staircase",
    "staircase_complement", "quotient_dim", "ideal_member", "lead_monomial",
    "span_quotient_dim", "certified", "order_key",
]
