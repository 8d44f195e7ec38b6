"""Exact coefficient arithmetic: prime fields F_p, extensions F_{p^k}, and Q.

Finite-field elements are residue polynomials stored as int tuples of length
k (little endian, reduced mod p and mod the field modulus).  Characteristic-0
elements are `fractions.Fraction`.  All values are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import (
    DivisionByZero,
    ExtensionOfCharZero,
    FieldMismatch,
    IncompatibleFields,
    NotPrime,
)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense int-coefficient polynomials over F_p (used only for modulus handling)

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a, b, mod, p):
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _prem(res, mod, p)


def _prem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        a = _ptrim(a)
        if not a or len(a) - 1 < dm:
            break
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(mod):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _ptrim(a)
    return _ptrim(a)


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _prem(a, b, p)
    return a


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _prem(base, mod, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        e >>= 1
    return result


def _irreducible_mod_p(coeffs, p):
    """coeffs: monic poly as little-endian int list."""
    k = len(coeffs) - 1
    if k < 1:
        return False
    x = [0, 1]
    xq = _ppowmod(x, p ** k, coeffs, p)
    diff = _ptrim([(a - b) % p for a, b in
                   zip(xq + [0] * len(x), x + [0] * len(xq))])
    if diff:
        return False
    for q in _prime_divisors(k):
        xe = _ppowmod(x, p ** (k // q), coeffs, p)
        diff = _ptrim([(a - b) % p for a, b in
                       zip(xe + [0] * len(x), x + [0] * len(xe))])
        g = _pgcd(coeffs, diff, p) if diff else list(coeffs)
        if len(g) - 1 >= 1:
            return False
    return True


def _first_irreducible(p, k):
    """Lexicographically first monic irreducible of degree k over F_p."""
    for n in range(p ** k):
        lower = []
        m = n
        for _ in range(k):
            lower.append(m % p)
            m //= p
        cand = lower + [1]
        if _irreducible_mod_p(cand, p):
            return tuple(cand)
    raise NotPrime("no irreducible modulus found (p=%d, k=%d)" % (p, k))


class CoeffField:
    """Handle for F_{p^k} (p prime) or Q (p = 0, k = 1)."""

    def __init__(self, characteristic, ext_degree=1, modulus=None):
        if characteristic == 0:
            if ext_degree != 1:
                raise ExtensionOfCharZero("extensions of Q are not supported")
        elif not _is_prime(characteristic):
            raise NotPrime("%r is not prime" % (characteristic,))
        if ext_degree < 1:
            raise NotPrime("extension degree must be positive")
        self.characteristic = characteristic
        self.ext_degree = ext_degree
        if characteristic > 0 and ext_degree > 1:
            if modulus is None:
                modulus = _first_irreducible(characteristic, ext_degree)
            else:
                modulus = tuple(c % characteristic for c in modulus)
                if len(modulus) != ext_degree + 1 or modulus[-1] != 1:
                    raise NotPrime("modulus must be monic of degree k")
                if not _irreducible_mod_p(list(modulus), characteristic):
                    raise NotPrime("modulus is reducible")
        else:
            modulus = None
        self.modulus = modulus
        p, k = characteristic, ext_degree
        self.order = p ** k if p else 0
        self.zero = FieldElem(self, Fraction(0) if p == 0 else (0,) * k)
        self.one = FieldElem(self, Fraction(1) if p == 0 else ((1,) + (0,) * (k - 1)))
        self._embed_cache = {}

    # -- constructors -------------------------------------------------------

    def el(self, value):
        """Coerce an int, Fraction, tuple, or FieldElem into this field."""
        if isinstance(value, FieldElem):
            if value.owner is self:
                return value
            if value.owner == self:
                return FieldElem(self, value.value)
            raise FieldMismatch("element of %r used in %r" % (value.owner, self))
        p, k = self.characteristic, self.ext_degree
        if p == 0:
            return FieldElem(self, Fraction(value))
        if isinstance(value, tuple):
            if len(value) != k:
                value = tuple(value[:k]) + (0,) * (k - len(value))
            return FieldElem(self, tuple(c % p for c in value))
        return FieldElem(self, ((int(value) % p,) + (0,) * (k - 1)))

    def from_index(self, n):
        """n-th element in the canonical enumeration (finite fields)."""
        p, k = self.characteristic, self.ext_degree
        coeffs = []
        for _ in range(k):
            coeffs.append(n % p)
            n //= p
        return FieldElem(self, tuple(coeffs))

    def elements(self):
        """Iterate all elements in canonical order (finite fields only)."""
        for n in range(self.order):
            yield self.from_index(n)

    @property
    def is_prime_field(self):
        return self.characteristic > 0 and self.ext_degree == 1

    @property
    def generator(self):
        """Residue class of the extension variable `a` (k > 1 only)."""
        k = self.ext_degree
        return FieldElem(self, (0, 1) + (0,) * (k - 2))

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, CoeffField)
                and self.characteristic == other.characteristic
                and self.ext_degree == other.ext_degree
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.characteristic, self.ext_degree, self.modulus))

    def __repr__(self):
        if self.characteristic == 0:
            return "QQ"
        if self.ext_degree == 1:
            return "GF(%d)" % self.characteristic
        return "GF(%d^%d)" % (self.characteristic, self.ext_degree)

    # -- arithmetic backends ------------------------------------------------

    def _add(self, a, b):
        if self.characteristic == 0:
            return a + b
        p = self.characteristic
        return tuple((x + y) % p for x, y in zip(a, b))

    def _sub(self, a, b):
        if self.characteristic == 0:
            return a - b
        p = self.characteristic
        return tuple((x - y) % p for x, y in zip(a, b))

    def _neg(self, a):
        if self.characteristic == 0:
            return -a
        p = self.characteristic
        return tuple((-x) % p for x in a)

    def _mul(self, a, b):
        if self.characteristic == 0:
            return a * b
        p, k = self.characteristic, self.ext_degree
        if k == 1:
            return ((a[0] * b[0]) % p,)
        res = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    res[i + j] = (res[i + j] + ai * bj) % p
        rem = _prem(res, list(self.modulus), p)
        rem = rem + [0] * (k - len(rem))
        return tuple(rem)

    def _inv(self, a):
        p, k = self.characteristic, self.ext_degree
        if p == 0:
            if a == 0:
                raise DivisionByZero("inverse of 0")
            return 1 / a
        if k == 1:
            if a[0] == 0:
                raise DivisionByZero("inverse of 0")
            return (pow(a[0], p - 2, p),)
        if not any(a):
            raise DivisionByZero("inverse of 0")
        # extended Euclid in F_p[x]
        r0, r1 = list(self.modulus), _ptrim(list(a))
        t0, t1 = [], [1]
        while r1:
            # divide r0 by r1
            q = []
            r = list(r0)
            inv_lead = pow(r1[-1], p - 2, p)
            while len(r) >= len(r1) and _ptrim(r):
                r = _ptrim(r)
                if len(r) < len(r1):
                    break
                c = (r[-1] * inv_lead) % p
                shift = len(r) - len(r1)
                q = q + [0] * max(0, shift + 1 - len(q))
                q[shift] = c
                for i, mi in enumerate(r1):
                    r[shift + i] = (r[shift + i] - c * mi) % p
                r = _ptrim(r)
            # t0, t1 = t1, t0 - q*t1
            qt = [0] * (len(q) + len(t1) - 1) if q and t1 else []
            for i, qi in enumerate(q):
                if qi:
                    for j, tj in enumerate(t1):
                        qt[i + j] = (qt[i + j] + qi * tj) % p
            newt = [((t0[i] if i < len(t0) else 0) - (qt[i] if i < len(qt) else 0)) % p
                    for i in range(max(len(t0), len(qt)))]
            r0, r1 = r1, r
            t0, t1 = t1, _ptrim(newt)
        # r0 is the gcd (a constant, since modulus irreducible)
        c = pow(r0[0], p - 2, p)
        out = [(x * c) % p for x in t0]
        out = out + [0] * (k - len(out))
        return tuple(out[:k])


class FieldElem:
    """Immutable element of a CoeffField."""

    __slots__ = ("owner", "value")

    def __init__(self, owner, value):
        self.owner = owner
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.owner is self.owner or other.owner == self.owner:
                return other
            raise FieldMismatch("mixed fields %r / %r" % (self.owner, other.owner))
        if isinstance(other, (int, Fraction)):
            return self.owner.el(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._add(self.value, o.value))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._sub(self.value, o.value))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._sub(o.value, self.value))

    def __neg__(self):
        return FieldElem(self.owner, self.owner._neg(self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._mul(self.value, o.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._mul(self.value, self.owner._inv(o.value)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.owner, self.owner._mul(o.value, self.owner._inv(self.value)))

    def inverse(self):
        return FieldElem(self.owner, self.owner._inv(self.value))

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.owner.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.owner.el(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.owner == other.owner and self.value == other.value

    def __hash__(self):
        return hash((self.owner.characteristic, self.owner.ext_degree, self.value))

    def __bool__(self):
        if self.owner.characteristic == 0:
            return self.value != 0
        return any(self.value)

    def is_zero(self):
        return not self.__bool__()

    def index(self):
        """Canonical enumeration index (finite fields)."""
        p = self.owner.characteristic
        n = 0
        for c in reversed(self.value):
            n = n * p + c
        return n

    def frobenius(self):
        return self ** self.owner.characteristic if self.owner.characteristic else self

    def __repr__(self):
        return format_elem(self)


def make_field(p, k=1, modulus=None):
    """Create F_{p^k} (deterministic lexicographic-first modulus) or Q."""
    return CoeffField(p, k, modulus)


@lru_cache(maxsize=None)
def _rationals():
    return CoeffField(0, 1)


def QQ():
    return _rationals()


def format_elem(e: FieldElem) -> str:
    """Render an element; extensions use `a^i` monomial notation."""
    if e.owner.characteristic == 0:
        return str(e.value)
    if e.owner.ext_degree == 1:
        return str(e.value[0])
    terms = []
    for i in range(e.owner.ext_degree - 1, -1, -1):
        c = e.value[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("a" if c == 1 else "%d*a" % c)
        else:
            terms.append("a^%d" % i if c == 1 else "%d*a^%d" % (c, i))
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# univariate polynomials over a CoeffField (lists of FieldElem, little endian)

def utrim(poly):
    while poly and poly[-1].is_zero():
        poly.pop()
    return poly


def uadd(a, b):
    if not a:
        return utrim(list(b))
    if not b:
        return utrim(list(a))
    field = a[0].owner
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else field.zero
        y = b[i] if i < len(b) else field.zero
        out.append(x + y)
    return utrim(out)


def uscale(a, c):
    return utrim([x * c for x in a])


def usub(a, b):
    return uadd(a, [-x for x in b])


def umul(a, b):
    if not a or not b:
        return []
    field = a[0].owner
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x.is_zero():
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return utrim(out)


def udivmod(a, b):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    field = b[-1].owner
    a = list(a)
    q = [field.zero] * max(0, len(a) - len(b) + 1)
    inv = b[-1].inverse()
    while len(a) >= len(b):
        a = utrim(a)
        if len(a) < len(b):
            break
        c = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = q[shift] + c
        for i, bi in enumerate(b):
            a[shift + i] = a[shift + i] - c * bi
        a = utrim(a)
    return utrim(q), utrim(a)


def ugcd(a, b):
    a, b = utrim(list(a)), utrim(list(b))
    while b:
        a, b = b, udivmod(a, b)[1]
    if a:
        a = uscale(a, a[-1].inverse())
    return a


def umonic(a):
    a = utrim(list(a))
    if not a:
        return a
    return uscale(a, a[-1].inverse())


def upowmod(base, e, mod):
    field = mod[-1].owner
    result = [field.one]
    base = udivmod(base, mod)[1]
    while e:
        if e & 1:
            result = udivmod(umul(result, base), mod)[1]
        base = udivmod(umul(base, base), mod)[1]
        e >>= 1
    return result


def ueval(a, x):
    field = x.owner
    acc = field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def uderiv(a):
    if len(a) <= 1:
        return []
    field = a[0].owner
    return utrim([a[i] * field.el(i) for i in range(1, len(a))])


def usquarefree_part(f):
    """Squarefree part (product of distinct irreducible factors) of monic f."""
    field = f[-1].owner
    d = uderiv(f)
    if not d:
        # derivative vanished: f = g(x^p); take the p-th root and recurse
        p = field.characteristic
        root = []
        for i in range(0, len(f), p):
            c = f[i]
            root.append(c ** (field.order // p))
        return usquarefree_part(umonic(root))
    g = ugcd(f, d)
    if len(g) <= 1:
        return umonic(list(f))
    w = udivmod(f, g)[0]          # contains every factor at least once
    inner = usquarefree_part(umonic(g))
    c = ugcd(w, inner)
    extra = udivmod(inner, c)[0]  # factors of g not already in w
    return umonic(umul(w, extra))


def uroots(f, field):
    """All roots of f lying in `field`, each once, canonically ordered.

    Uses gcd with x^q - x followed by deterministic splitting, so it works
    for moderately large fields without enumeration.
    """
    f = umonic([field.el(c) if not isinstance(c, FieldElem) else c for c in f])
    if len(f) <= 1:
        return []
    if field.characteristic == 0:
        return _qroots(f, field)
    q = field.order
    x = [field.zero, field.one]
    xq = upowmod(x, q, f)
    lin = ugcd(f, usub(xq, x))
    if len(lin) <= 1:
        return []
    roots = _split_linear(lin, field)
    roots.sort(key=lambda r: r.index())
    return roots


def _split_linear(f, field):
    """Split a product of distinct linear factors into roots (deterministic)."""
    f = umonic(f)
    deg = len(f) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [-f[0]]
    q = field.order
    p = field.characteristic
    if q <= 256:
        return [e for e in field.elements() if ueval(f, e).is_zero()]
    if p == 2:
        # trace-based splitting with deterministic multipliers
        k = field.ext_degree
        n = 1
        while True:
            delta = field.from_index(n)
            h = [field.zero, delta]
            tr = [field.zero]
            cur = list(h)
            for _ in range(k):
                tr = uadd(tr, cur)
                cur = upowmod(cur, 2, f)
            g = ugcd(f, tr)
            if 0 < len(g) - 1 < deg:
                return _split_linear(g, field) + _split_linear(udivmod(f, g)[0], field)
            n += 1
            if n > 4 * q:
                raise NotPrime("splitting failed")  # pragma: no cover
    n = 0
    while True:
        delta = field.from_index(n % q)
        h = [delta, field.one]
        g0 = upowmod(h, (q - 1) // 2, f)
        g = ugcd(f, usub(g0, [field.one]))
        if 0 < len(g) - 1 < deg:
            return _split_linear(g, field) + _split_linear(udivmod(f, g)[0], field)
        n += 1
        if n > 4 * q:  # pragma: no cover
            raise NotPrime("splitting failed")


def _qroots(f, field):
    """Rational roots of f over Q (exact rational-root test)."""
    from math import gcd as igcd
    den = 1
    for c in f:
        den = den * c.value.denominator // igcd(den, c.value.denominator)
    ints = [int(c.value * den) for c in f]
    cands = {Fraction(0)}
    lead = abs(ints[-1])
    const = next((abs(c) for c in ints if c != 0), 0)
    if const:
        for r in _divisors(const):
            for s in _divisors(lead):
                cands.add(Fraction(r, s))
                cands.add(Fraction(-r, s))
    out = []
    for c in sorted(cands):
        if ueval(f, field.el(c)).is_zero():
            out.append(field.el(c))
    return out


def _divisors(n):
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def ufactor_squarefree(f, field):
    """Irreducible factors of a squarefree monic poly over a finite field.

    Returns a list of monic factors, canonically ordered.  Distinct-degree
    followed by deterministic equal-degree splitting.
    """
    f = umonic(f)
    q = field.order
    out = []
    x = [field.zero, field.one]
    d = 1
    rest = f
    xqd = list(x)
    while len(rest) - 1 >= 2 * d:
        xqd = upowmod(xqd, q, rest)
        g = ugcd(rest, usub(xqd, x))
        if len(g) > 1:
            out.extend(_equal_degree(g, d, field))
            rest = udivmod(rest, g)[0]
            xqd = udivmod(xqd, rest)[1] if len(rest) > 1 else xqd
        d += 1
    if len(rest) > 1:
        out.append(umonic(rest))
    out.sort(key=lambda h: (len(h), [c.index() for c in h]))
    return out


def _equal_degree(f, d, field):
    """Split f (product of distinct irreducibles of degree d) completely."""
    f = umonic(f)
    if len(f) - 1 == d:
        return [f]
    q = field.order
    p = field.characteristic
    n = 1
    while True:
        # deterministic trial elements: polynomials of increasing index
        h = _index_poly(n, len(f) - 1, field)
        n += 1
        if not h:
            continue
        if p == 2:
            tr = [field.zero]
            cur = list(h)
            for _ in range(d * field.ext_degree):
                tr = uadd(tr, cur)
                cur = upowmod(cur, 2, f)
            g = ugcd(f, tr)
        else:
            g0 = upowmod(h, (q ** d - 1) // 2, f)
            g = ugcd(f, usub(g0, [field.one]))
        if 0 < len(g) - 1 < len(f) - 1:
            return (_equal_degree(g, d, field)
                    + _equal_degree(udivmod(f, g)[0], d, field))
        if n > 64 * q:  # pragma: no cover
            raise NotPrime("equal-degree splitting failed")


def _index_poly(n, maxdeg, field):
    """n-th polynomial of degree < maxdeg in a fixed enumeration."""
    q = field.order
    coeffs = []
    while n:
        coeffs.append(field.from_index(n % q))
        n //= q
        if len(coeffs) >= maxdeg:
            break
    return utrim(coeffs)


def embed(e: FieldElem, bigger: CoeffField) -> FieldElem:
    """Ring-homomorphic injection F_{p^k} -> F_{p^K} (k | K), or Q -> Q."""
    small = e.owner
    if small == bigger:
        return bigger.el(e)
    if small.characteristic != bigger.characteristic:
        raise IncompatibleFields("different characteristics")
    if small.characteristic == 0:
        return bigger.el(e.value)
    if bigger.ext_degree % small.ext_degree != 0:
        raise IncompatibleFields("extension degree %d does not divide %d"
                                 % (small.ext_degree, bigger.ext_degree))
    if small.ext_degree == 1:
        return bigger.el(e.value[0])
    key = (small.ext_degree, small.modulus)
    root = bigger._embed_cache.get(key)
    if root is None:
        mod = [bigger.el(c) for c in small.modulus]
        roots = uroots(mod, bigger)
        if not roots:
            raise IncompatibleFields("modulus has no root in target field")
        root = roots[0]
        bigger._embed_cache[key] = root
    acc = bigger.zero
    for c in reversed(e.value):
        acc = acc * root + bigger.el(c)
    return acc


def parse_elem(text: str, field: CoeffField) -> FieldElem:
    """Parse a field literal: integer, fraction n/m, or sums of c*a^i."""
    text = text.strip()
    if field.characteristic == 0:
        if "/" in text:
            num, den = text.split("/")
            return field.el(Fraction(int(num), int(den)))
        return field.el(int(text))
    total = field.zero
    for part in text.replace("-", "+-").split("+"):
        part = part.strip()
        if not part:
            continue
        neg = part.startswith("-")
        if neg:
            part = part[1:].strip()
        coeff = 1
        exp = 0
        if "a" in part:
            pre, _, post = part.partition("a")
            pre = pre.strip().rstrip("*").strip()
            if pre:
                coeff = int(pre)
            post = post.strip()
            if post.startswith("^"):
                exp = int(post[1:])
            else:
                exp = 1
        else:
            coeff = int(part)
        term = field.el(coeff) * (field.generator ** exp if exp else field.one)
        total = total - term if neg else total + term
    return total
