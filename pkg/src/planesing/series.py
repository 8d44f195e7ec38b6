"""Truncated univariate/bivariate power series and exact polynomials.

Precision conventions: a series knows its coefficients for exponents
(total degree in the bivariate case) strictly below `precision`; exact
polynomials carry infinite precision.  Every operation computes the maximal
sound output precision; consumers that need more raise rather than guess.
"""

from __future__ import annotations

from .errors import (
    DegenerateParametrization,
    InsufficientPrecision,
    NotAUnit,
    NotCoprime,
    NonPolynomialInput,
    PrecisionUnderflow,
)
from . import field as fieldmod

INF = float("inf")


# ---------------------------------------------------------------------------
# univariate series

class UniSeries:
    __slots__ = ("field", "var", "coeffs", "precision")

    def __init__(self, field, coeffs=None, precision=INF, var="t"):
        self.field = field
        self.var = var
        self.precision = precision
        cc = {}
        if coeffs:
            for e, c in coeffs.items():
                if e < precision and not c.is_zero():
                    cc[e] = c
        self.coeffs = cc

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field, precision=INF, var="t"):
        return cls(field, {}, precision, var)

    @classmethod
    def monomial(cls, field, e, c=None, precision=INF, var="t"):
        c = field.one if c is None else c
        return cls(field, {e: c}, precision, var)

    @property
    def exact(self):
        return self.precision == INF

    def coeff(self, e):
        if e >= self.precision:
            raise InsufficientPrecision("coefficient %d beyond precision %s"
                                        % (e, self.precision))
        return self.coeffs.get(e, self.field.zero)

    def order_lower(self):
        """Lower bound for the order derived from known coefficients."""
        return min(self.coeffs) if self.coeffs else self.precision

    def order(self):
        """Exact order; INF for the exact zero series."""
        if self.coeffs:
            return min(self.coeffs)
        if self.exact:
            return INF
        raise InsufficientPrecision(
            "series vanishes to precision %s; order unknown" % self.precision)

    def is_zero(self):
        return not self.coeffs

    def truncate(self, precision):
        if precision >= self.precision:
            return self
        return UniSeries(self.field, self.coeffs, precision, self.var)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        prec = min(self.precision, other.precision)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            nc = out.get(e, self.field.zero) + c
            if nc.is_zero():
                out.pop(e, None)
            else:
                out[e] = nc
        return UniSeries(self.field, out, prec, self.var)

    def __neg__(self):
        return UniSeries(self.field, {e: -c for e, c in self.coeffs.items()},
                         self.precision, self.var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, fieldmod.FieldElem):
            return self.scale(other)
        prec = min(self.precision + other.order_lower(),
                   other.precision + self.order_lower())
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= prec:
                    continue
                nc = out.get(e, self.field.zero) + c1 * c2
                if nc.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = nc
        return UniSeries(self.field, out, prec, self.var)

    def scale(self, c):
        if c.is_zero():
            return UniSeries(self.field, {}, self.precision, self.var)
        return UniSeries(self.field, {e: v * c for e, v in self.coeffs.items()},
                         self.precision, self.var)

    def shift(self, k):
        """Multiply by t^k (k may be negative if all exponents allow it)."""
        out = {}
        for e, c in self.coeffs.items():
            if e + k < 0:
                raise PrecisionUnderflow("negative exponent in shift")
            out[e + k] = c
        return UniSeries(self.field, out, self.precision + k, self.var)

    def derivative(self):
        out = {}
        for e, c in self.coeffs.items():
            if e == 0:
                continue
            nc = c * self.field.el(e)
            if not nc.is_zero():
                out[e - 1] = nc
        prec = self.precision if self.exact else self.precision - 1
        return UniSeries(self.field, out, prec, self.var)

    def invert_unit(self, precision=None):
        """Inverse of a unit series (nonzero constant term)."""
        c0 = self.coeffs.get(0)
        if c0 is None or c0.is_zero():
            raise NotAUnit("series has zero constant term")
        if precision is None:
            precision = self.precision
        if precision == INF:
            if len(self.coeffs) == 1:
                return UniSeries(self.field, {0: c0.inverse()}, INF, self.var)
            raise PrecisionUnderflow("cannot invert a non-constant series exactly")
        if precision <= 0:
            raise PrecisionUnderflow("requested precision <= 0")
        inv0 = c0.inverse()
        out = {0: inv0}
        # Newton-free direct recurrence: b_n = -inv0 * sum_{k>=1} a_k b_{n-k}
        for n in range(1, int(precision)):
            acc = self.field.zero
            for k, ak in self.coeffs.items():
                if 1 <= k <= n:
                    bk = out.get(n - k)
                    if bk is not None:
                        acc = acc + ak * bk
            val = -inv0 * acc
            if not val.is_zero():
                out[n] = val
        return UniSeries(self.field, out, precision, self.var)

    def divide(self, other, precision=None):
        """self / other where ord(other) <= ord(self); precision tracked."""
        m = other.order()
        if m == INF:
            raise PrecisionUnderflow("division by the zero series")
        for e in self.coeffs:
            if e < m:
                raise PrecisionUnderflow(
                    "division would create negative exponents")
        unit = other.shift(-m)
        N = min(unit.precision,
                self.precision - m if self.precision != INF else INF)
        if precision is not None:
            N = min(N, precision)
        if N == INF:
            if len(unit.coeffs) == 1 and 0 in unit.coeffs:
                inv = unit.invert_unit(INF)
            else:
                # exact polynomial division only when divisor is a monomial;
                # otherwise truncate at a generous level chosen by callers
                raise PrecisionUnderflow(
                    "exact division by non-monomial requires a precision")
        else:
            if N <= 0:
                raise PrecisionUnderflow("no sound precision for division")
            inv = unit.invert_unit(N)
        return self.shift(-m) * inv

    def eval0_after_div(self, other):
        """(self / other)(0) for ord(other) <= ord(self): ratio of leads."""
        m = other.order()
        c = self.coeffs.get(m)
        if c is None:
            lo = self.order_lower()
            if lo <= m:
                raise InsufficientPrecision("lead coefficient unknown")
            return self.field.zero
        return c / other.coeffs[m]

    def __eq__(self, other):
        if not isinstance(other, UniSeries):
            return NotImplemented
        prec = min(self.precision, other.precision)
        for e in set(self.coeffs) | set(other.coeffs):
            if e < prec and self.coeffs.get(e) != other.coeffs.get(e):
                if not ((self.coeffs.get(e) is None and other.coeffs[e].is_zero())
                        or (other.coeffs.get(e) is None and self.coeffs[e].is_zero())):
                    return False
        return True

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for e in sorted(self.coeffs):
                c = fieldmod.format_elem(self.coeffs[e])
                if e == 0:
                    parts.append(c)
                else:
                    mono = self.var if e == 1 else "%s^%d" % (self.var, e)
                    parts.append(mono if c == "1" else "%s*%s" % (c, mono))
            body = " + ".join(parts)
        tail = "" if self.exact else " + O(%s^%d)" % (self.var, self.precision)
        return body + tail


# ---------------------------------------------------------------------------
# bivariate series

class BiSeries:
    __slots__ = ("field", "vars", "coeffs", "precision")

    def __init__(self, field, coeffs=None, precision=INF, vars=("x", "y")):
        self.field = field
        self.vars = tuple(vars)
        self.precision = precision
        cc = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                if i + j < precision and not c.is_zero():
                    cc[(i, j)] = c
        self.coeffs = cc

    @classmethod
    def zero(cls, field, precision=INF, vars=("x", "y")):
        return cls(field, {}, precision, vars)

    @classmethod
    def monomial(cls, field, i, j, c=None, precision=INF, vars=("x", "y")):
        c = field.one if c is None else c
        return cls(field, {(i, j): c}, precision, vars)

    @classmethod
    def from_terms(cls, field, terms, precision=INF, vars=("x", "y")):
        out = {}
        for (i, j), c in terms.items():
            e = c if isinstance(c, fieldmod.FieldElem) else field.el(c)
            if not e.is_zero():
                out[(i, j)] = e
        return cls(field, out, precision, vars)

    @property
    def exact(self):
        return self.precision == INF

    def coeff(self, i, j):
        if i + j >= self.precision:
            raise InsufficientPrecision("coefficient beyond precision")
        return self.coeffs.get((i, j), self.field.zero)

    def order_lower(self):
        return min((i + j for i, j in self.coeffs), default=self.precision)

    def order(self):
        """Total-degree order mt(f); INF for the exact zero series."""
        if self.coeffs:
            return min(i + j for i, j in self.coeffs)
        if self.exact:
            return INF
        raise InsufficientPrecision(
            "series vanishes to precision %s; order unknown" % self.precision)

    def is_zero(self):
        return not self.coeffs

    def truncate(self, precision):
        if precision >= self.precision:
            return self
        return BiSeries(self.field, self.coeffs, precision, self.vars)

    def triples(self):
        """Internal exchange format: sorted (i, j, coeff) triples."""
        return [(i, j, self.coeffs[(i, j)])
                for (i, j) in sorted(self.coeffs)]

    def __add__(self, other):
        prec = min(self.precision, other.precision)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            nc = out.get(k, self.field.zero) + c
            if nc.is_zero():
                out.pop(k, None)
            else:
                out[k] = nc
        return BiSeries(self.field, out, prec, self.vars)

    def __neg__(self):
        return BiSeries(self.field, {k: -c for k, c in self.coeffs.items()},
                        self.precision, self.vars)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, fieldmod.FieldElem):
            return self.scale(other)
        prec = min(self.precision + other.order_lower(),
                   other.precision + self.order_lower())
        out = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                if i1 + i2 + j1 + j2 >= prec:
                    continue
                k = (i1 + i2, j1 + j2)
                nc = out.get(k, self.field.zero) + c1 * c2
                if nc.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = nc
        return BiSeries(self.field, out, prec, self.vars)

    def scale(self, c):
        if c.is_zero():
            return BiSeries(self.field, {}, self.precision, self.vars)
        return BiSeries(self.field, {k: v * c for k, v in self.coeffs.items()},
                        self.precision, self.vars)

    def derivative_x(self):
        out = {}
        for (i, j), c in self.coeffs.items():
            if i == 0:
                continue
            nc = c * self.field.el(i)
            if not nc.is_zero():
                out[(i - 1, j)] = nc
        prec = self.precision if self.exact else self.precision - 1
        return BiSeries(self.field, out, prec, self.vars)

    def derivative_y(self):
        out = {}
        for (i, j), c in self.coeffs.items():
            if j == 0:
                continue
            nc = c * self.field.el(j)
            if not nc.is_zero():
                out[(i, j - 1)] = nc
        prec = self.precision if self.exact else self.precision - 1
        return BiSeries(self.field, out, prec, self.vars)

    def invert_unit(self, precision):
        c0 = self.coeffs.get((0, 0))
        if c0 is None or c0.is_zero():
            raise NotAUnit("bivariate series has zero constant term")
        if precision == INF:
            if len(self.coeffs) == 1:
                return BiSeries(self.field, {(0, 0): c0.inverse()}, INF, self.vars)
            precision = self.precision
        precision = min(precision, self.precision)
        if precision == INF:
            raise PrecisionUnderflow("cannot invert non-constant unit exactly")
        if precision <= 0:
            raise PrecisionUnderflow("requested precision <= 0")
        inv0 = c0.inverse()
        rest = BiSeries(self.field,
                        {k: c for k, c in self.coeffs.items() if k != (0, 0)},
                        precision, self.vars)
        # geometric series: inv0 * sum (-inv0 * rest)^n
        term = BiSeries(self.field, {(0, 0): inv0}, precision, self.vars)
        total = term
        factor = rest.scale(-inv0)
        n = 1
        power = factor
        while not power.is_zero() and n < precision:
            total = total + power.scale(inv0)
            power = power * factor
            power = power.truncate(precision)
            n += 1
        return total.truncate(precision)

    def shear(self, c, e=1):
        """Substitute y -> y + c*x^e (an axis-preserving coordinate change)."""
        x = BiSeries.monomial(self.field, 1, 0, vars=self.vars)
        y = BiSeries.monomial(self.field, 0, 1, vars=self.vars)
        xe = BiSeries.monomial(self.field, e, 0, c, vars=self.vars)
        return self.subst(x, y + xe)

    def shear_x(self, c, e=1):
        """Substitute x -> x + c*y^e."""
        x = BiSeries.monomial(self.field, 1, 0, vars=self.vars)
        y = BiSeries.monomial(self.field, 0, 1, vars=self.vars)
        ye = BiSeries.monomial(self.field, 0, e, c, vars=self.vars)
        return self.subst(x + ye, y)

    def swap_vars(self):
        return BiSeries(self.field,
                        {(j, i): c for (i, j), c in self.coeffs.items()},
                        self.precision, (self.vars[1], self.vars[0]))

    def subst(self, U, V):
        """f(U, V) for bivariate U, V of positive order; precision tracked."""
        ou = U.order_lower()
        ov = V.order_lower()
        if (U.coeffs and ou < 1) or (V.coeffs and ov < 1):
            raise PrecisionUnderflow("substitution requires positive order")
        omin = min(ou if U.coeffs else INF, ov if V.coeffs else INF)
        if self.exact:
            tail_prec = INF
        else:
            tail_prec = self.precision * max(omin, 1)
        out = BiSeries.zero(self.field, INF, self.vars)
        upows = {0: BiSeries.monomial(self.field, 0, 0, vars=self.vars)}
        vpows = {0: BiSeries.monomial(self.field, 0, 0, vars=self.vars)}

        def upow(n):
            if n not in upows:
                upows[n] = upow(n - 1) * U
            return upows[n]

        def vpow(n):
            if n not in vpows:
                vpows[n] = vpow(n - 1) * V
            return vpows[n]

        for (i, j) in sorted(self.coeffs, key=lambda k: (k[0] + k[1], k)):
            term = upow(i) * vpow(j)
            out = out + term.scale(self.coeffs[(i, j)])
        prec = min(out.precision, tail_prec)
        return out.truncate(prec) if prec != INF else out

    def substitute(self, branch):
        """Compose with a parametrization: f(X(t), Y(t)) as UniSeries."""
        X, Y = branch.X, branch.Y
        ox = X.order_lower()
        oy = Y.order_lower()
        if (X.coeffs and ox < 1) or (Y.coeffs and oy < 1):
            raise PrecisionUnderflow("branch must be centered at the origin")
        omin = min(ox if X.coeffs else INF, oy if Y.coeffs else INF)
        tail_prec = INF if self.exact else self.precision * max(omin, 1)
        if tail_prec != INF and tail_prec < 1:
            raise PrecisionUnderflow("no sound output precision")
        out = UniSeries.zero(self.field, INF, X.var)
        xpows = {0: UniSeries.monomial(self.field, 0, var=X.var)}
        ypows = {0: UniSeries.monomial(self.field, 0, var=X.var)}

        def xpow(n):
            if n not in xpows:
                xpows[n] = xpow(n - 1) * X
            return xpows[n]

        def ypow(n):
            if n not in ypows:
                ypows[n] = ypow(n - 1) * Y
            return ypows[n]

        for (i, j) in sorted(self.coeffs, key=lambda k: (k[0] + k[1], k)):
            term = xpow(i) * ypow(j)
            out = out + term.scale(self.coeffs[(i, j)])
        prec = min(out.precision, tail_prec)
        return out.truncate(prec) if prec != INF else out

    def eval_x0(self):
        """f(0, v) as a UniSeries in the second variable."""
        out = {}
        for (i, j), c in self.coeffs.items():
            if i == 0:
                out[j] = c
        return UniSeries(self.field, out, self.precision, self.vars[1])

    def eval_y0(self):
        """f(u, 0) as a UniSeries in the first variable."""
        out = {}
        for (i, j), c in self.coeffs.items():
            if j == 0:
                out[i] = c
        return UniSeries(self.field, out, self.precision, self.vars[0])

    def lowest_form(self):
        """Dict of the terms of minimal total degree (the tangent cone)."""
        m = self.order()
        if m == INF:
            return {}
        return {k: c for k, c in self.coeffs.items() if k[0] + k[1] == m}

    def ydegree(self):
        return max((j for (_, j) in self.coeffs), default=-1)

    def xdegree(self):
        return max((i for (i, _) in self.coeffs), default=-1)

    def divide_xpow(self, m):
        """Exact division by x^m."""
        out = {}
        for (i, j), c in self.coeffs.items():
            if i < m:
                raise PrecisionUnderflow("not divisible by x^%d" % m)
            out[(i - m, j)] = c
        return BiSeries(self.field, out, self.precision - m, self.vars)

    def divide_ypow(self, m):
        out = {}
        for (i, j), c in self.coeffs.items():
            if j < m:
                raise PrecisionUnderflow("not divisible by y^%d" % m)
            out[(i, j - m)] = c
        return BiSeries(self.field, out, self.precision - m, self.vars)

    def map_coeffs(self, fn, new_field):
        return BiSeries(new_field, {k: fn(c) for k, c in self.coeffs.items()},
                        self.precision, self.vars)

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        prec = min(self.precision, other.precision)
        for k in set(self.coeffs) | set(other.coeffs):
            if k[0] + k[1] < prec:
                a = self.coeffs.get(k)
                b = other.coeffs.get(k)
                if a is None:
                    if not b.is_zero():
                        return False
                elif b is None:
                    if not a.is_zero():
                        return False
                elif a != b:
                    return False
        return True

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for (i, j) in sorted(self.coeffs, key=lambda k: (k[0] + k[1], k[1], k[0])):
                c = fieldmod.format_elem(self.coeffs[(i, j)])
                mono = []
                if i:
                    mono.append(self.vars[0] if i == 1 else "%s^%d" % (self.vars[0], i))
                if j:
                    mono.append(self.vars[1] if j == 1 else "%s^%d" % (self.vars[1], j))
                m = "*".join(mono)
                if not m:
                    parts.append(c)
                elif c == "1":
                    parts.append(m)
                else:
                    parts.append("%s*%s" % (c, m))
            body = " + ".join(parts)
        tail = "" if self.exact else " + O(deg %s)" % self.precision
        return body + tail


# ---------------------------------------------------------------------------
# branches

class Branch:
    """Parametrization t -> (X(t), Y(t)) of one branch through the origin."""

    __slots__ = ("field", "X", "Y")

    def __init__(self, X, Y):
        self.field = X.field
        self.X = X
        self.Y = Y
        if (X.coeffs and min(X.coeffs) < 1) or (Y.coeffs and min(Y.coeffs) < 1):
            raise DegenerateParametrization("branch must pass through the origin")
        if X.is_zero() and Y.is_zero() and X.exact and Y.exact:
            raise DegenerateParametrization("zero parametrization")

    @property
    def precision(self):
        return min(self.X.precision, self.Y.precision)

    def coord_orders(self):
        """(ord X, ord Y); a coordinate vanishing to finite precision is
        reported as INF when the other one settles the minimum."""
        def _ord(s):
            if s.coeffs:
                return min(s.coeffs), None
            if s.exact:
                return INF, None
            return None, s.precision
        ox, bx = _ord(self.X)
        oy, by = _ord(self.Y)
        if ox is None and oy is None:
            raise InsufficientPrecision("branch vanishes to precision")
        if ox is None:
            if oy >= bx:
                raise InsufficientPrecision("coordinate order beyond precision")
            ox = INF
        if oy is None:
            if ox >= by:
                raise InsufficientPrecision("coordinate order beyond precision")
            oy = INF
        if ox == INF and oy == INF:
            raise DegenerateParametrization("zero branch")
        return ox, oy

    def order(self):
        """(ord phi, ord X, ord Y, differential exponent d)."""
        ox, oy = self.coord_orders()
        om = min(ox, oy)
        known = []
        unknown_from = []
        for s in (self.X.derivative(), self.Y.derivative()):
            if s.coeffs:
                known.append(min(s.coeffs))
            elif s.exact:
                known.append(INF)
            else:
                unknown_from.append(s.precision)
        if not known:
            raise InsufficientPrecision("both derivatives vanish to precision")
        d = min(known)
        if unknown_from and d >= min(unknown_from):
            raise InsufficientPrecision("differential exponent beyond precision")
        if d == INF:
            raise DegenerateParametrization(
                "both coordinate derivatives vanish; branch is not primitive")
        return om, ox, oy, d

    def truncate(self, precision):
        return Branch(self.X.truncate(precision), self.Y.truncate(precision))

    def __repr__(self):
        return "Branch(%r, %r)" % (self.X, self.Y)


def order_bi(f: BiSeries):
    return f.order()


def order_branch(b: Branch):
    return b.order()


# ---------------------------------------------------------------------------
# Hensel lifting

def hensel_factor(f: BiSeries, inits, precision=None, absorb=-1):
    """Lift a coprime y-factorization of f mod <x> to x-precision N.

    `inits` are univariate polynomials in y (little-endian FieldElem lists)
    whose product equals f(0, y).  The factor at index `absorb` soaks up the
    y-degree excess, so it need not stay of bounded degree.  Returns BiSeries
    factors F_k with prod F_k = f mod x^N and F_k = init_k mod x.
    """
    K = f.field
    if precision is None:
        precision = f.precision
    if precision == INF:
        precision = max((i for (i, _) in f.coeffs), default=0) + \
            max((j for (_, j) in f.coeffs), default=0) + 2
    N = int(precision)
    s = len(inits)
    if all(isinstance(init, BiSeries) for init in inits):
        prod = BiSeries.monomial(K, 0, 0, vars=f.vars)
        for init in inits:
            prod = prod * init
        if prod.truncate(min(N, prod.precision)) == f.truncate(min(N, prod.precision)):
            return list(inits)  # already a factorization; nothing to lift
    inits = [init.eval_x0() if isinstance(init, BiSeries) else init
             for init in inits]
    inits = [list(init.coeffs.get(e, K.zero) for e in range(max(init.coeffs, default=0) + 1))
             if isinstance(init, UniSeries) else init for init in inits]
    inits = [fieldmod.utrim([c for c in init]) for init in inits]
    # pairwise coprimality
    for a in range(s):
        for b in range(a + 1, s):
            if len(fieldmod.ugcd(inits[a], inits[b])) > 1:
                raise NotCoprime("initial factors share a root")
    f0 = [f.coeffs.get((0, j), K.zero) for j in range(f.ydegree() + 1)]
    f0 = fieldmod.utrim(f0)
    prod0 = [K.one]
    for init in inits:
        prod0 = fieldmod.umul(prod0, init)
    if fieldmod.utrim(fieldmod.usub(f0, prod0)):
        raise NotCoprime("product of initial factors differs from f mod <x>")
    absorb %= s
    # Bezout data: sigma_k * prod_{l != k} init_l = 1 mod init_k
    sigmas = []
    for k in range(s):
        rest = [K.one]
        for l in range(s):
            if l != k:
                rest = fieldmod.umul(rest, inits[l])
        if len(inits[k]) <= 1:
            sigmas.append([])
            continue
        restk = fieldmod.udivmod(rest, inits[k])[1]
        sig = _uinv_mod(restk, inits[k])
        sigmas.append(sig)
    # factors as lists over x-power: factor[k][n] = y-poly coefficient of x^n
    factors = [[list(init)] for init in inits]
    for n in range(1, N):
        # error term at x-degree n
        prod = _xpoly_mul(factors, n)
        err = [K.zero] * max(len(f0), len(prod[n]) if n < len(prod) else 0,
                             f.ydegree() + 1)
        for j in range(len(err)):
            c = f.coeffs.get((n, j), K.zero) if n + j < f.precision or f.exact else K.zero
            pj = prod[n][j] if n < len(prod) and j < len(prod[n]) else K.zero
            err[j] = c - pj
        err = fieldmod.utrim(err)
        if not err:
            for k in range(s):
                factors[k].append([])
            continue
        deltas = []
        for k in range(s):
            if len(inits[k]) <= 1:
                deltas.append([])
                continue
            dk = fieldmod.udivmod(fieldmod.umul(err, sigmas[k]), inits[k])[1]
            deltas.append(dk)
        # leftover divisible by prod(inits); assign quotient to absorber
        covered = [K.zero]
        for k in range(s):
            if not deltas[k]:
                continue
            rest = [K.one]
            for l in range(s):
                if l != k:
                    rest = fieldmod.umul(rest, inits[l])
            covered = fieldmod.uadd(covered, fieldmod.umul(deltas[k], rest))
        leftover = fieldmod.usub(err, covered)
        if leftover:
            q, r = fieldmod.udivmod(leftover, prod0)
            if fieldmod.utrim(r):
                raise NotCoprime("Hensel correction failed (inconsistent data)")
            # q * prod0 = q*init_absorb * rest: add q*init_absorb to absorber
            deltas[absorb] = fieldmod.uadd(
                deltas[absorb], fieldmod.umul(q, inits[absorb]))
        for k in range(s):
            factors[k].append(deltas[k])
    out = []
    for k in range(s):
        terms = {}
        for n, ypoly in enumerate(factors[k]):
            for j, c in enumerate(ypoly):
                if not c.is_zero():
                    terms[(n, j)] = c
        out.append(BiSeries(K, terms, N + max(0, len(inits[k]) - 1), f.vars))
    return out


def _uinv_mod(a, mod):
    """Inverse of a modulo mod in K[y] (extended Euclid)."""
    K = mod[-1].owner
    r0, r1 = list(mod), fieldmod.utrim(list(a))
    t0, t1 = [], [K.one]
    while r1:
        q, r = fieldmod.udivmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, fieldmod.usub(t0, fieldmod.umul(q, t1))
    if len(r0) != 1:
        raise NotCoprime("element not invertible modulo init factor")
    return fieldmod.uscale(t0, r0[0].inverse())


def _xpoly_mul(factors, upto):
    """Product of x-graded y-poly lists, keeping x-degrees <= upto."""
    K = None
    for fac in factors:
        for ypoly in fac:
            for c in ypoly:
                K = c.owner
                break
            if K:
                break
        if K:
            break
    prod = [[K.one]]
    for fac in factors:
        new = [[] for _ in range(upto + 1)]
        for n1, y1 in enumerate(prod):
            if n1 > upto or not y1:
                continue
            for n2, y2 in enumerate(fac):
                if n1 + n2 > upto or not y2:
                    continue
                contrib = fieldmod.umul(y1, y2)
                new[n1 + n2] = fieldmod.uadd(new[n1 + n2], contrib)
        prod = new
    return prod


# ---------------------------------------------------------------------------
# exact polynomial helpers (division, gcd, resultants)

def _lt_deglex(f: BiSeries):
    return max(f.coeffs, key=lambda k: (k[0] + k[1], k[0]))


def exact_div(f: BiSeries, g: BiSeries) -> BiSeries:
    """Exact division of polynomials (raises if not divisible)."""
    if not f.exact or not g.exact:
        raise NonPolynomialInput("exact_div needs exact polynomials")
    if g.is_zero():
        raise PrecisionUnderflow("division by zero polynomial")
    K = f.field
    rem = dict(f.coeffs)
    out = {}
    ltg = _lt_deglex(g)
    cg = g.coeffs[ltg]
    cg_inv = cg.inverse()
    while rem:
        ltf = max(rem, key=lambda k: (k[0] + k[1], k[0]))
        qi, qj = ltf[0] - ltg[0], ltf[1] - ltg[1]
        if qi < 0 or qj < 0:
            raise PrecisionUnderflow("polynomial division is not exact")
        c = rem[ltf] * cg_inv
        out[(qi, qj)] = c
        for (i, j), gc in g.coeffs.items():
            k = (i + qi, j + qj)
            nv = rem.get(k, K.zero) - c * gc
            if nv.is_zero():
                rem.pop(k, None)
            else:
                rem[k] = nv
    return BiSeries(K, out, INF, f.vars)


def _as_ypolys(f: BiSeries):
    """Exact polynomial as list over y-degree of x-coefficient lists."""
    K = f.field
    ydeg = f.ydegree()
    out = [[] for _ in range(ydeg + 1)]
    for (i, j), c in f.coeffs.items():
        col = out[j]
        while len(col) <= i:
            col.append(K.zero)
        col[i] = c
    return [fieldmod.utrim(col) for col in out]


def _from_ypolys(cols, field, vars):
    terms = {}
    for j, col in enumerate(cols):
        for i, c in enumerate(col):
            if not c.is_zero():
                terms[(i, j)] = c
    return BiSeries(field, terms, INF, vars)


def poly_gcd(f: BiSeries, g: BiSeries) -> BiSeries:
    """Gcd of exact bivariate polynomials (primitive PRS in y over K[x])."""
    K = f.field
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    fy, gy = _as_ypolys(f), _as_ypolys(g)
    if len(fy) == 1 and len(gy) == 1:
        return _from_ypolys([_ugcd_x(fy[0], gy[0])], K, f.vars)
    if len(fy) == 1:
        return _from_ypolys([_ugcd_x(fy[0], _content(gy))], K, f.vars)
    if len(gy) == 1:
        return _from_ypolys([_ugcd_x(gy[0], _content(fy))], K, f.vars)
    contf, contg = _content(fy), _content(gy)
    contgcd = _ugcd_x(contf, contg)
    a = _yprim(fy, contf)
    b = _yprim(gy, contg)
    if len(a) < len(b):
        a, b = b, a
    while True:
        r = _ypseudo_rem(a, b)
        r = [fieldmod.utrim(c) for c in r]
        while r and not r[-1]:
            r.pop()
        if not r:
            break
        r = _yprim(r, _content(r))
        a, b = b, r
        if len(b) == 1:
            # primitive parts are coprime; only the content survives
            return _from_ypolys([contgcd if contgcd else [K.one]], K, f.vars)
    return _from_ypolys(_ymul_content(b, contgcd), K, f.vars)


def _ugcd_x(a, b):
    return fieldmod.ugcd(a, b) if (a or b) else []


def _content(cols):
    cont = []
    for col in cols:
        if col:
            cont = fieldmod.ugcd(cont, col) if cont else fieldmod.umonic(list(col))
    return cont if cont else []


def _yprim(cols, cont):
    if not cont or len(cont) == 1:
        return [fieldmod.utrim(list(c)) for c in cols]
    return [fieldmod.udivmod(c, cont)[0] if c else [] for c in cols]


def _ymul_content(cols, cont):
    if not cont:
        return cols
    return [fieldmod.umul(c, cont) if c else [] for c in cols]


def _ypseudo_rem(a, b):
    """Pseudo remainder of a by b as y-polynomials over K[x]."""
    a = [list(c) for c in a]
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db:
        while a and not fieldmod.utrim(list(a[-1])):
            a.pop()
        if len(a) - 1 < db or not a:
            break
        la = a[-1]
        shift = len(a) - 1 - db
        # a = lb * a - la * y^shift * b
        newa = []
        for j in range(len(a)):
            term = fieldmod.umul(a[j], lb)
            if 0 <= j - shift <= db:
                term = fieldmod.usub(term, fieldmod.umul(la, b[j - shift]))
            newa.append(term)
        newa[-1] = []
        a = newa
        while a and not a[-1]:
            a.pop()
    return a


def is_squarefree(f: BiSeries) -> bool:
    """Squarefree test for an exact polynomial over a perfect field."""
    fx = f.derivative_x()
    fy = f.derivative_y()
    if fx.is_zero() and fy.is_zero():
        return f.order() == 0  # constant is fine, anything else is a p-th power
    g = poly_gcd(f, fx if not fx.is_zero() else fy)
    if not fx.is_zero() and not fy.is_zero():
        g = poly_gcd(g, fy)
    return g.order() == 0 or g.is_zero()


def implicitize(b: Branch) -> BiSeries:
    """Equation of a polynomially parametrized branch via resultants."""
    X, Y = b.X, b.Y
    if not (X.exact and Y.exact):
        raise NonPolynomialInput("implicitize needs polynomial X(t), Y(t)")
    if X.is_zero() and Y.is_zero():
        raise DegenerateParametrization("zero parametrization")
    K = b.field
    # Sylvester matrix of x - X(t), y - Y(t) with respect to t,
    # entries in K[x, y]
    dx = max(X.coeffs, default=0)
    dy = max(Y.coeffs, default=0)
    if dx == 0:
        # X identically 0: curve is x = 0 when Y primitive
        return BiSeries.monomial(K, 1, 0)
    if dy == 0:
        return BiSeries.monomial(K, 0, 1)
    A = [BiSeries.zero(K) for _ in range(dx + 1)]   # coeffs of t^i
    for e, c in X.coeffs.items():
        A[e] = A[e] - BiSeries.monomial(K, 0, 0, c)
    A[0] = A[0] + BiSeries.monomial(K, 1, 0)
    B = [BiSeries.zero(K) for _ in range(dy + 1)]
    for e, c in Y.coeffs.items():
        B[e] = B[e] - BiSeries.monomial(K, 0, 0, c)
    B[0] = B[0] + BiSeries.monomial(K, 0, 1)
    n = dx + dy
    M = [[BiSeries.zero(K) for _ in range(n)] for _ in range(n)]
    for r in range(dy):  # rows with A
        for i in range(dx + 1):
            M[r][r + i] = A[dx - i]
    for r in range(dx):
        for i in range(dy + 1):
            M[dy + r][r + i] = B[dy - i]
    det = _bareiss_det(M, K)
    if det.is_zero():
        raise DegenerateParametrization("resultant vanished (non-primitive?)")
    # normalize: monic in the highest pure power (prefer y)
    ypow = max((j for (i, j) in det.coeffs if i == 0), default=None)
    if ypow is not None:
        lead = det.coeffs[(0, ypow)]
    else:
        xpow = max((i for (i, j) in det.coeffs if j == 0), default=None)
        lead = det.coeffs[(xpow, 0)]
    return det.scale(lead.inverse())


def _bareiss_det(M, K):
    n = len(M)
    sign = K.one
    prev = BiSeries.monomial(K, 0, 0)
    for k in range(n - 1):
        if M[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if piv is None:
                return BiSeries.zero(K)
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = exact_div(num, prev)
            M[i][k] = BiSeries.zero(K)
        prev = M[k][k]
    return M[n - 1][n - 1].scale(sign)


def exact_series_divide(g: BiSeries, h: BiSeries, s: int, N) -> BiSeries:
    """g / h up to total degree N, where h's x^0-slice is c*y^s exactly.

    Used to peel tangential factors: h is a product of (y - beta x)-type
    factors, so its pure-y part is a single monomial y^s.
    """
    K = g.field
    if N == INF:
        N = min(g.precision, h.precision)
    if N == INF:
        N = max((i + j for (i, j) in g.coeffs), default=0) + 1
    N = int(N)
    hy = {}
    for (i, j), c in h.coeffs.items():
        hy.setdefault(i, {})[j] = c
    c0 = hy.get(0, {}).get(s)
    if c0 is None or len(hy.get(0, {})) != 1:
        raise PrecisionUnderflow("divisor x^0-slice is not a pure power of y")
    inv0 = c0.inverse()
    gy = {}
    for (i, j), c in g.coeffs.items():
        gy.setdefault(i, {})[j] = c
    q = {}
    for i in range(N):
        rhs = dict(gy.get(i, {}))
        for i2 in range(i):
            qi2 = q.get(i2)
            if not qi2:
                continue
            hcol = hy.get(i - i2)
            if not hcol:
                continue
            for j2, qc in qi2.items():
                for jh, hc in hcol.items():
                    jj = j2 + jh
                    nv = rhs.get(jj, K.zero) - qc * hc
                    if nv.is_zero():
                        rhs.pop(jj, None)
                    else:
                        rhs[jj] = nv
        qi = {}
        for j, c in rhs.items():
            if j < s:
                if not c.is_zero():
                    raise PrecisionUnderflow("series division not exact")
                continue
            qi[j - s] = c * inv0
        if qi:
            q[i] = qi
    terms = {}
    for i, col in q.items():
        for j, c in col.items():
            if not c.is_zero():
                terms[(i, j)] = c
    prec = min(N, g.precision, h.precision) if not (g.exact and h.exact) else N
    return BiSeries(K, terms, prec, g.vars)
