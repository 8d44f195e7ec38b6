"""Formal blow-ups and the tree of infinitely near points.

Chart conventions: every non-root node has its newest exceptional branch
E_Q as the first coordinate axis {u = 0}; the older exceptional branch D_Q
(satellite points only) is the second axis {v = 0}.  The finite-direction
chart is (u, v) -> (u, u(v + beta)); the infinity chart is stored with
swapped coordinates, (u, v) -> (u*v, u), which keeps the convention.

Strict transforms carry along factors that are units at the chart origin
(they do not vanish there); multiplicities, tangent cones and Newton
polyhedra are insensitive to unit factors, so no factorization is needed
to build the tree.
"""

from __future__ import annotations

from . import field as fieldmod
from .errors import (
    DegenerateParametrization,
    FieldExtensionLimit,
    InsufficientPrecision,
    NotReduced,
    PrecisionUnderflow,
    WrongDirection,
)
from .field import embed, make_field, uroots, udivmod, ueval, umonic, \
    ufactor_squarefree, usquarefree_part, utrim
from .linalg import certified, span_quotient_dim
from .series import (
    Branch,
    BiSeries,
    INF,
    UniSeries,
    exact_series_divide,
    hensel_factor,
    implicitize,
    is_squarefree,
    poly_gcd,
)

INF_DIR = "inf"
MAX_DEPTH = 400


class _NeedExtension(Exception):
    def __init__(self, degree):
        self.degree = degree


class ResNode:
    __slots__ = ("id", "parent", "chart", "strict", "m", "has_E", "has_D",
                 "essential", "strict_singular", "children", "depth",
                 "local_branches", "e", "d", "_polygon", "_adapted")

    def __init__(self, id, parent, chart, strict, depth):
        self.id = id
        self.parent = parent
        self.chart = chart          # ("root", None) | ("beta", elem) | ("inf", None)
        self.strict = strict
        self.m = int(strict.order())
        self.has_E = chart[0] != "root"
        self.has_D = False
        self.essential = False
        self.strict_singular = self.m >= 2
        self.children = []          # list of (direction, child id)
        self.depth = depth
        self.local_branches = {}    # branch index -> local Branch
        self.e = 1
        self.d = 1
        self._polygon = None
        self._adapted = None

    @property
    def kind(self):
        if self.chart[0] == "root":
            return "root"
        return "satellite" if self.has_D else "free"

    @property
    def lam(self):
        return sorted(self.local_branches)

    def __repr__(self):
        return "ResNode(%d, m=%d, %s%s)" % (
            self.id, self.m, self.kind, ", essential" if self.essential else "")


class ResolutionTree:
    def __init__(self, field, f):
        self.field = field
        self.f = f
        self.nodes = {}
        self.root = 0
        self.branches = []

    def node(self, nid) -> ResNode:
        return self.nodes[nid]

    def essential_nodes(self):
        order = []
        queue = [self.root]
        while queue:
            nid = queue.pop(0)
            node = self.nodes[nid]
            if node.essential:
                order.append(node)
            queue.extend(cid for _, cid in node.children)
        return order

    @property
    def branch_count(self):
        return len(self.branches)

    def to_json(self):
        out = []
        queue = [self.root]
        while queue:
            nid = queue.pop(0)
            node = self.nodes[nid]
            beta = None
            if node.chart[0] == "beta":
                beta = fieldmod.format_elem(node.chart[1])
            elif node.chart[0] == "inf":
                beta = "inf"
            out.append({
                "id": node.id,
                "parent": node.parent,
                "beta": beta,
                "m": node.m,
                "kind": node.kind,
                "essential": node.essential,
                "e": node.e,
                "d": node.d,
                "lambda": node.lam,
            })
            queue.extend(cid for _, cid in node.children)
        return out


# ---------------------------------------------------------------------------
# single blow-up operations

def blowup_equation(g: BiSeries, direction):
    """Strict / reduced total / exceptional transform in one chart.

    direction: a field element beta (chart x -> x, y -> x(y+beta)) or
    INF_DIR (swapped chart x -> x*y, y -> x).
    """
    if g.is_zero():
        raise PrecisionUnderflow("cannot blow up the zero series")
    K = g.field
    m = int(g.order())
    x = BiSeries.monomial(K, 1, 0, vars=g.vars)
    y = BiSeries.monomial(K, 0, 1, vars=g.vars)
    if direction == INF_DIR:
        total = g.subst(x * y, x)
        strict = total.divide_xpow(m)
    else:
        beta = direction
        ytrans = x * y + BiSeries.monomial(K, 1, 0, beta, vars=g.vars) \
            if not beta.is_zero() else x * y
        total = g.subst(x, ytrans)
        strict = total.divide_xpow(m)
    exceptional = BiSeries.monomial(K, 1, 0, vars=g.vars)
    reduced_total = exceptional * strict
    return strict, reduced_total, exceptional


def blowup_branch(b: Branch, direction) -> Branch:
    """Transform a parametrization through one blow-up chart."""
    X, Y = b.X, b.Y
    if direction == INF_DIR:
        ox, oy = X.order_lower(), Y.order_lower()
        if X.coeffs and Y.coeffs and X.order() <= Y.order():
            raise WrongDirection("branch does not pass through the infinity point")
        quotient = X.divide(Y)
        return Branch(Y, quotient)
    beta = direction
    if X.is_zero():
        raise WrongDirection("branch is tangent to the infinity direction")
    quotient = Y.divide(X) if not Y.is_zero() else \
        UniSeries.zero(X.field, X.precision - X.order(), X.var)
    lead = quotient.coeffs.get(0, X.field.zero)
    if lead != beta:
        raise WrongDirection("branch tangent %r does not match direction %r"
                             % (lead, beta))
    shifted = quotient + UniSeries(X.field, {0: -beta}, INF, X.var) \
        if not beta.is_zero() else quotient
    return Branch(X, shifted)


# ---------------------------------------------------------------------------
# tangent directions

def tangent_directions(g: BiSeries):
    """Directions of the tangent cone: [(beta | INF_DIR, multiplicity)].

    Raises _NeedExtension when a direction is irrational over g's field.
    """
    K = g.field
    low = g.lowest_form()
    m = int(g.order())
    # T(v) = sum over j of c_{m-j, j} v^j
    coeffs = [K.zero] * (m + 1)
    for (i, j), c in low.items():
        coeffs[j] = c
    T = utrim(list(coeffs))
    e_inf = m - (len(T) - 1)
    out = []
    if len(T) > 1:
        Tm = umonic(T)
        sqf = usquarefree_part(Tm) if K.characteristic else _qsqf(Tm)
        roots = uroots(sqf, K)
        rest = list(Tm)
        for r in roots:
            mu = 0
            while True:
                q, rem = udivmod(rest, [-r, K.one])
                if utrim(rem):
                    break
                rest = q
                mu += 1
            out.append((r, mu))
        if len(rest) - 1 >= 1:
            if K.characteristic == 0:
                raise FieldExtensionLimit(
                    "irrational tangent direction over Q")
            sq = usquarefree_part(umonic(rest))
            facs = ufactor_squarefree(sq, K)
            raise _NeedExtension(min(len(h) - 1 for h in facs))
    if e_inf > 0:
        out.append((INF_DIR, e_inf))
    out.sort(key=_direction_key)
    return out


def _qsqf(f):
    """Squarefree part over Q (char 0: gcd with derivative)."""
    from .field import ugcd, uderiv
    d = uderiv(f)
    g = ugcd(f, d)
    if len(g) <= 1:
        return umonic(list(f))
    return umonic(udivmod(f, g)[0])


def _direction_key(item):
    d, _ = item
    if d == INF_DIR:
        return (1, 0)
    return (0, d.index()) if d.owner.characteristic else (0, d.value)


def branch_direction(b: Branch):
    """Tangent direction of a branch: beta or INF_DIR."""
    ox, oy = b.coord_orders()
    if oy < ox:
        return INF_DIR
    if oy > ox:
        return b.field.zero
    return b.Y.coeffs[oy] / b.X.coeffs[ox]


# ---------------------------------------------------------------------------
# the resolution tree

def _is_terminal(node: ResNode) -> bool:
    """True when the reduced total transform at the node is a node germ."""
    if node.chart[0] == "root":
        return node.m <= 1
    naxes = 1 + (1 if node.has_D else 0)
    if naxes == 2:
        return False  # curve through a satellite point: never a node
    if node.m != 1:
        return False
    # strict is smooth; transversal to E = {u=0} iff its tangent is not {u=0}
    low = node.strict.lowest_form()
    return any(j == 1 for (_, j) in low)


def _build_tree(f: BiSeries, field) -> ResolutionTree:
    tree = ResolutionTree(field, f)
    root = ResNode(0, None, ("root", None), f, 0)
    root.essential = root.m >= 2
    tree.nodes[0] = root
    queue = [0]
    next_id = 1
    while queue:
        nid = queue.pop(0)
        node = tree.nodes[nid]
        if _is_terminal(node):
            continue
        node.essential = True if node.chart[0] != "root" else node.essential
        if node.depth > MAX_DEPTH:
            raise NotReduced("resolution did not terminate (input reduced?)")
        for direction, _mu in tangent_directions(node.strict):
            strict, _rt, _e = blowup_equation(node.strict, direction)
            if strict.order() == INF or strict.order() < 1:
                # direction does not actually carry the curve (unit strict):
                # can happen only for unit factors; skip
                if strict.order() != INF and strict.order() < 1:
                    continue
                raise NotReduced("strict transform vanished: non-reduced input")
            chart = ("inf", None) if direction == INF_DIR else ("beta", direction)
            child = ResNode(next_id, nid, chart, strict, node.depth + 1)
            if direction == INF_DIR:
                child.has_D = node.has_E
            else:
                child.has_D = node.has_D and direction.is_zero()
            child.essential = not _is_terminal(child)
            tree.nodes[next_id] = child
            node.children.append((direction, next_id))
            queue.append(next_id)
            next_id += 1
    return tree


def _fill_e_d(tree: ResolutionTree):
    for node in tree.nodes.values():
        if node.has_E:
            node.e = 1 + _axis_chain(tree, node, first_axis=True)
        if node.has_D:
            node.d = 1 + _axis_chain(tree, node, first_axis=False)


def _axis_chain(tree, node, first_axis):
    """Number of tree points strictly beyond `node` along an axis."""
    count = 0
    current = node
    # E = {u=0} continues through the infinity child, then as the second
    # axis through beta=0 children; D = {v=0} goes through beta=0 children.
    direction = INF_DIR if first_axis else "zero"
    while True:
        nxt = None
        for d, cid in current.children:
            if direction == INF_DIR and d == INF_DIR:
                nxt = cid
            elif direction == "zero" and d != INF_DIR and d.is_zero():
                nxt = cid
        if nxt is None:
            return count
        count += 1
        current = tree.nodes[nxt]
        direction = "zero"


def _parametrize_smooth(g: BiSeries, precision: int) -> Branch:
    """Parametrize a smooth germ (multiplicity-one strict transform)."""
    K = g.field
    low = g.lowest_form()
    swap = not any(j == 1 for (_, j) in low)
    work = g.swap_vars() if swap else g
    # Newton iteration for v = s(u) with work(u, s(u)) = 0
    t = UniSeries.monomial(K, 1)
    if work.exact and work.eval_y0().is_zero():
        # the axis itself solves the equation exactly
        zero = UniSeries.zero(K, INF)
        if swap:
            return Branch(zero, UniSeries.monomial(K, 1, precision=precision))
        return Branch(UniSeries.monomial(K, 1, precision=precision), zero)
    s = UniSeries.zero(K, 1)
    wv = work.derivative_y()
    prec = 1
    while prec < precision:
        prec = min(2 * prec, precision)
        s = UniSeries(K, s.coeffs, prec)
        val = work.truncate(prec + 1).substitute(_branch_pair(t, s))
        der = wv.truncate(prec + 1).substitute(_branch_pair(t, s))
        if val.is_zero():
            continue
        corr = val.divide(der.truncate(prec), prec)
        s = (s - corr).truncate(prec)
    s = UniSeries(K, s.coeffs, precision)
    if swap:
        return Branch(s, UniSeries.monomial(K, 1, precision=precision))
    return Branch(UniSeries.monomial(K, 1, precision=precision), s)


class _BranchPair:
    """Branch-like access without the origin checks (internal)."""
    __slots__ = ("X", "Y", "field")

    def __init__(self, X, Y):
        self.X, self.Y, self.field = X, Y, X.field


def _branch_pair(X, Y):
    return _BranchPair(X, Y)


def _compose_down(b: Branch, path):
    """Apply chart maps leaf -> root to express a branch at the root."""
    X, Y = b.X, b.Y
    for chart in path:
        kind, beta = chart
        if kind == "beta":
            newY = X * Y
            if not beta.is_zero():
                newY = newY + X.scale(beta)
            X, Y = X, newY
        elif kind == "inf":
            # parent (u, v) = (U*V, U)
            X, Y = X * Y, X
        else:
            break
    return Branch(X, Y)


def resolve(f=None, branches=None, max_ext=16, work_precision=64):
    """Embedded good resolution: the full tree of infinitely near points.

    Accepts either a reduced equation f or a list of parametrized branches
    (polynomial coordinates); the ground field is extended automatically
    when a tangent direction is irrational over it.
    """
    if f is None:
        if not branches:
            raise DegenerateParametrization("nothing to resolve")
        prod = None
        for b in branches:
            F = implicitize(b)
            prod = F if prod is None else prod * F
        f = prod
    if f.is_zero():
        raise NotReduced("zero equation")
    if f.order() == 0:
        raise NotReduced("curve does not pass through the origin")
    if f.exact and not is_squarefree(f):
        raise NotReduced("equation has a repeated factor")
    field = f.field
    while True:
        try:
            tree = _build_tree(f, field)
            break
        except _NeedExtension as need:
            new_deg = field.ext_degree * need.degree
            if new_deg > max_ext:
                raise FieldExtensionLimit(
                    "resolution needs extension degree %d > %d"
                    % (new_deg, max_ext))
            bigger = make_field(field.characteristic, new_deg)
            f = f.map_coeffs(lambda c: embed(c, bigger), bigger)
            field = bigger
    _fill_e_d(tree)
    _extract_branches(tree, work_precision)
    return tree


def _leaves(tree):
    out = []
    for node in tree.nodes.values():
        if not node.children:
            out.append(node)
    out.sort(key=lambda n: n.id)
    return out


def _extract_branches(tree: ResolutionTree, precision):
    field = tree.field
    branches = []
    for leaf in _leaves(tree):
        if leaf.m < 1:
            continue
        local = _parametrize_smooth(leaf.strict, precision)
        # walk up, remembering charts
        path = []
        cur = leaf
        while cur.parent is not None:
            path.append(cur.chart)
            cur = tree.nodes[cur.parent]
        idx = len(branches)
        branches.append((_compose_down(local, path), leaf.id))
        # record local parametrization at every node along the way
        node_ids = [leaf.id]
        cur = leaf
        while cur.parent is not None:
            node_ids.append(cur.parent)
            cur = tree.nodes[cur.parent]
        locals_up = [local]
        b = local
        for chart in path:
            b = _compose_down(b, [chart])
            locals_up.append(b)
        for nid, lb in zip(node_ids, locals_up):
            tree.nodes[nid].local_branches[idx] = lb
    tree.branches = [b for b, _ in branches]
    # root sanity: residuals should vanish to precision
    for b in tree.branches:
        val = tree.f.substitute(b)
        if not val.is_zero():
            raise PrecisionUnderflow(
                "extracted branch does not satisfy the equation")


def branches_of(f: BiSeries, precision=None, max_ext=16):
    """Primitive parametrizations of the branches of a reduced germ."""
    if precision is None:
        precision = 64
    tree = resolve(f, max_ext=max_ext, work_precision=precision)
    return tree.branches


# ---------------------------------------------------------------------------
# tangential decomposition

def tangential_split(g: BiSeries, precision=None, max_ext=16):
    """Factor g into tangential components (one per tangent direction)."""
    if g.is_zero():
        raise PrecisionUnderflow("cannot split the zero series")
    K = g.field
    while True:
        try:
            dirs = tangent_directions(g)
            break
        except _NeedExtension as need:
            new_deg = K.ext_degree * need.degree
            if new_deg > max_ext:
                raise FieldExtensionLimit(
                    "tangential split needs extension degree %d" % new_deg)
            bigger = make_field(K.characteristic, new_deg)
            g = g.map_coeffs(lambda c: embed(c, bigger), bigger)
            K = bigger
    if len(dirs) <= 1:
        return [g]
    if precision is None:
        precision = g.precision
        if precision == INF:
            maxdeg = max(i + j for (i, j) in g.coeffs)
            precision = 2 * maxdeg + 6
    N = int(precision)
    m = int(g.order())
    finite = [(b, mu) for (b, mu) in dirs if b != INF_DIR]
    x = BiSeries.monomial(K, 1, 0, vars=g.vars)
    xy = BiSeries.monomial(K, 1, 1, vars=g.vars)
    ghat = g.subst(x, xy).divide_xpow(m)     # x^{-m} g(x, x y)
    inits = []
    for beta, mu in finite:
        lin = [-beta, K.one]
        fac = [K.one]
        for _ in range(mu):
            fac = fieldmod.umul(fac, lin)
        inits.append(fac)
    # residual initial factor: ghat(0, y) / prod(inits)
    f0 = ghat.eval_x0()
    f0list = [f0.coeffs.get(e, K.zero) for e in range(max(f0.coeffs, default=0) + 1)]
    prod0 = [K.one]
    for init in inits:
        prod0 = fieldmod.umul(prod0, init)
    res0, rem = udivmod(utrim(f0list), prod0)
    if utrim(rem):
        raise PrecisionUnderflow("tangent cone does not factor as expected")
    lift = hensel_factor(ghat.truncate(N + m), inits + [res0],
                         precision=N, absorb=-1)
    out = []
    mus = [mu for _, mu in finite]
    for fac, mu in zip(lift[:-1], mus):
        out.append(_blow_down(fac, mu, g.vars))
    prod_fin = None
    for F in out:
        prod_fin = F if prod_fin is None else prod_fin * F
    s_fin = sum(mus)
    residual = exact_series_divide(g.truncate(N + s_fin) if g.precision > N + s_fin else g,
                                   prod_fin, s_fin, N)
    if any(d == INF_DIR for d, _ in dirs):
        out.append(residual)
    else:
        out[0] = out[0] * residual  # residual is a unit; fold it in
    return out


def _blow_down(F: BiSeries, mu: int, vars):
    """x^mu * F(x, y/x) for a y-polynomial factor of degree <= mu."""
    K = F.field
    terms = {}
    for (a, b), c in F.coeffs.items():
        i = a + mu - b
        if i < 0:
            raise PrecisionUnderflow("factor does not blow down (degree excess)")
        terms[(i, b)] = terms.get((i, b), K.zero) + c
    prec = F.precision if F.precision == INF else F.precision + 0
    return BiSeries(K, {k: c for k, c in terms.items() if not c.is_zero()},
                    prec, vars)


# ---------------------------------------------------------------------------
# Newton polygons, adapted coordinates, T^ep

class NewtonPolygon:
    """Lower-left convex chain of a germ in adapted coordinates."""

    def __init__(self, vertices):
        self.vertices = list(vertices)
        self.segments = []
        for (i1, j1), (i2, j2) in zip(self.vertices, self.vertices[1:]):
            di, dj = i2 - i1, j1 - j2
            from math import gcd
            g = gcd(di, dj)
            normal = (dj // g, di // g)
            c = normal[0] * i1 + normal[1] * j1
            self.segments.append((((i1, j1), (i2, j2)), normal, c))

    def contains(self, i, j):
        """Membership of (i, j) in the Newton polyhedron N + Z^2_{>=0}."""
        if not self.vertices:
            return False
        if i < min(v[0] for v in self.vertices):
            return False
        if j < min(v[1] for v in self.vertices):
            return False
        for _, normal, c in self.segments:
            if normal[0] * i + normal[1] * j < c:
                return False
        if not self.segments:
            v = self.vertices[0]
            return i >= v[0] and j >= v[1]
        return True

    def __repr__(self):
        return "NewtonPolygon(%r)" % (self.vertices,)


def _lower_hull(points):
    best = {}
    for (i, j) in points:
        if i not in best or j < best[i]:
            best[i] = j
    pts = sorted(best.items())
    # Pareto filter: keep points with strictly decreasing j
    pareto = []
    min_j = None
    for i, j in pts:
        if min_j is None or j < min_j:
            pareto.append((i, j))
            min_j = j
    hull = []
    for p in pareto:
        # slopes must strictly increase along the chain; pop otherwise
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _axis_orders(g: BiSeries):
    gu = g.eval_y0()
    gv = g.eval_x0()
    ou = min(gu.coeffs) if gu.coeffs else INF
    ov = min(gv.coeffs) if gv.coeffs else INF
    return ou, ov


def adapted_coordinates(tree: ResolutionTree, nid: int):
    """Generic adapted coordinates for the node's strict transform.

    Returns (g_adapted, shear_v, shear_u): shear_v is the c with
    v -> v + c*u applied (None if the axis was fixed), similarly shear_u
    for u -> u + c*v.  Exceptional axes are never sheared; at the root both
    axes are kept unless the curve contains one of them.
    """
    node = tree.node(nid)
    if node._adapted is not None:
        return node._adapted
    K = tree.field
    g = node.strict
    m = node.m
    shear_u = None
    shear_v = None
    ou, ov = _axis_orders(g)
    if not node.has_E and ov == INF:
        # u-axis divides g: shear u -> u + c v to break it, minimizing
        o, shear_u, g = _best_shear(g, m, x_side=True)
    if not node.has_D:
        ou_now = _axis_orders(g)[0]
        must = (ou_now == INF)
        if node.chart[0] != "root" or must:
            # the minimum of ord_u g(u, 0) over adapted shears is mt(g) as
            # soon as some direction avoids every branch tangent
            if ou_now != m:
                o, c, cand = _best_shear(g, m, x_side=False)
                if must or o < ou_now:
                    shear_v, g = c, cand
    node._adapted = (g, shear_v, shear_u)
    return node._adapted


def _best_shear(g, m, x_side):
    """Minimizing shear for one axis; certified by reaching mt(g) or by
    exhausting more candidates than there are branch tangents."""
    K = g.field
    best = None
    tried = 0
    for c in _shear_candidates(K, m):
        cand = g.shear_x(c) if x_side else g.shear(c)
        orders = _axis_orders(cand)
        o = orders[1] if x_side else orders[0]
        tried += 1
        if o != INF and (best is None or o < best[0]):
            best = (o, c, cand)
            if o == m:
                return best
    if best is None or (best[0] > m and tried < m + 1):
        raise FieldExtensionLimit(
            "no certified generic adapted shear over %r" % K)
    return best


def _shear_candidates(K, m):
    if K.characteristic == 0:
        return [K.el(n) for n in range(1, m + 3)]
    limit = min(K.order, m + 3)
    return [K.from_index(n) for n in range(1, limit)]


def newton_polygon(tree: ResolutionTree, nid: int) -> NewtonPolygon:
    node = tree.node(nid)
    if node._polygon is None:
        g, _, _ = adapted_coordinates(tree, nid)
        node._polygon = NewtonPolygon(_lower_hull(g.coeffs.keys()))
    return node._polygon


def ep_data(tree: ResolutionTree, nid: int):
    """(I^ep generators, adapted Jacobian generators, dim I^ep/J)."""
    node = tree.node(nid)
    poly = newton_polygon(tree, nid)
    g, _, _ = adapted_coordinates(tree, nid)
    K = tree.field
    e, d = node.e, node.d
    gu = g.derivative_x()
    gv = g.derivative_y()
    J = [g,
         BiSeries.monomial(K, 1, 0, vars=g.vars) * gu,
         BiSeries.monomial(K, e, 0, vars=g.vars) * gv,
         BiSeries.monomial(K, 0, d, vars=g.vars) * gu,
         BiSeries.monomial(K, 0, 1, vars=g.vars) * gv]
    J = [h for h in J if not h.is_zero()]
    iep_gens = _iep_min_generators(poly)

    def builder(T):
        T = int(T)
        V = []
        for i in range(T):
            for j in range(T - i):
                if poly.contains(i, j):
                    V.append({(i, j): K.one})
        W = []
        for h in J:
            ht = h.truncate(T)
            for i in range(T):
                for j in range(T - i):
                    vec = {}
                    for (a, b), c in ht.coeffs.items():
                        if a + i + b + j < T:
                            vec[(a + i, b + j)] = c
                    if vec:
                        W.append(vec)
        return span_quotient_dim(V, W, K)

    base = max((i + j for (i, j) in poly.vertices), default=2) * 2 + 6
    tep = certified(builder, base)
    return iep_gens, J, tep


def _iep_min_generators(poly: NewtonPolygon):
    if not poly.vertices:
        return []
    imax = max(v[0] for v in poly.vertices)
    jmax = max(v[1] for v in poly.vertices)
    members = [(i, j) for i in range(imax + 2) for j in range(jmax + 2)
               if poly.contains(i, j)]
    gens = []
    for m in sorted(members, key=lambda k: (k[0] + k[1], k[1])):
        if not any(g[0] <= m[0] and g[1] <= m[1] for g in gens):
            gens.append(m)
    return gens


# ---------------------------------------------------------------------------
# numeric invariants

def numeric_invariants(tree: ResolutionTree):
    ess = tree.essential_nodes()
    mult = [n.m for n in ess]
    delta = sum(m * (m - 1) for m in mult) // 2
    ef = sum(1 for n in ess if n.kind in ("root", "free"))
    return {
        "delta": delta,
        "mult_sequence": mult,
        "ef": ef,
        "sum_m": sum(mult),
        "sum_m_m_plus_1_half": sum(m * (m + 1) for m in mult) // 2,
        "r": tree.branch_count,
    }


def intersection_mult(f: BiSeries, g: BiSeries, max_ext=16):
    """Intersection multiplicity at the origin via branches of g."""
    if f.is_zero() or g.is_zero():
        raise PrecisionUnderflow("intersection with the zero curve")
    if f.exact and g.exact:
        common = poly_gcd(f, g)
        if not common.is_zero() and common.order() >= 1:
            return INF
    if g.order() == 0:
        return 0
    total = 0
    for b in branches_of(g, max_ext=max_ext):
        val = f.substitute(b)
        if val.is_zero():
            return INF
        total += int(val.order())
    return total
