"""Exact truncated series arithmetic.

Univariate power and Laurent series over exact rationals (optionally
Gaussian rationals), plus a sparse multivariate companion used for
group-law expansions, box-truncated (q, z) tables, and nilpotent root
algebras.  Coefficient arithmetic is exact everywhere; floating point
appears only in the numeric evaluators.
"""
from __future__ import annotations

from fractions import Fraction

# Hard lower bound on Laurent exponents.  Nothing in the library needs
# deeper poles, and the bound catches runaway inverse() loops early.
LAURENT_FLOOR = -24


class Gaussian:
    """Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def conjugate(self) -> "Gaussian":
        return Gaussian(self.re, -self.im)

    def __add__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return _norm_scalar(Gaussian(self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return _norm_scalar(Gaussian(self.re - o.re, self.im - o.im))

    def __rsub__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return _norm_scalar(Gaussian(o.re - self.re, o.im - self.im))

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __mul__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return _norm_scalar(
            Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return _norm_scalar(
            Gaussian(
                (self.re * o.re + self.im * o.im) / n,
                (self.im * o.re - self.re * o.im) / n,
            )
        )

    def __rtruediv__(self, other):
        o = _as_gaussian(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (Fraction(1) / self) ** (-n)
        out = Fraction(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return _norm_scalar(out)

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"Gaussian({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


I = Gaussian(0, 1)


def _as_gaussian(x):
    if isinstance(x, Gaussian):
        return x
    if isinstance(x, (int, Fraction)):
        return Gaussian(x)
    return None


def _norm_scalar(c):
    # collapse Gaussian rationals with zero imaginary part back to Fraction
    if isinstance(c, Gaussian) and c.im == 0:
        return c.re
    return c


def _coerce(c):
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, Gaussian)):
        return _norm_scalar(c)
    raise TypeError(f"unsupported coefficient {c!r}")


def _scalar_str(c) -> str:
    return str(c)


class TruncatedSeries:
    """Series in one variable, exact coefficients, explicit truncation order.

    Coefficients with exponent above ``trunc`` are unknown, not zero; the
    order-N object represents the series modulo x^(N+1).  Exponents may go
    down to ``minexp`` (>= LAURENT_FLOOR) for Laurent use.  Zero
    coefficients are never stored, and equality compares the stored
    table coefficient-wise.
    """

    __slots__ = ("var", "trunc", "minexp", "coeffs")

    def __init__(self, var: str, trunc: int, coeffs=None, minexp: int = 0):
        if minexp < LAURENT_FLOOR:
            raise ValueError(f"minexp {minexp} below Laurent floor {LAURENT_FLOOR}")
        self.var = var
        self.trunc = int(trunc)
        self.minexp = int(minexp)
        table = {}
        if coeffs:
            for e, c in coeffs.items() if isinstance(coeffs, dict) else coeffs:
                if e < self.minexp:
                    raise ValueError(f"exponent {e} below declared minexp {minexp}")
                if e > self.trunc:
                    continue
                c = _coerce(c)
                if c != 0:
                    table[int(e)] = c
        self.coeffs = table

    # ---- constructors ----

    @classmethod
    def zero(cls, var: str, trunc: int, minexp: int = 0) -> "TruncatedSeries":
        return cls(var, trunc, None, minexp)

    @classmethod
    def one(cls, var: str, trunc: int) -> "TruncatedSeries":
        return cls(var, trunc, {0: 1})

    @classmethod
    def const(cls, var: str, trunc: int, c) -> "TruncatedSeries":
        return cls(var, trunc, {0: c})

    @classmethod
    def gen(cls, var: str, trunc: int) -> "TruncatedSeries":
        return cls(var, trunc, {1: 1})

    # ---- accessors ----

    def coeff(self, e: int):
        return self.coeffs.get(e, Fraction(0))

    def valuation(self) -> int:
        if not self.coeffs:
            return self.trunc + 1
        return min(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, n: int) -> "TruncatedSeries":
        n = min(n, self.trunc)
        return TruncatedSeries(
            self.var, n, {e: c for e, c in self.coeffs.items() if e <= n}, self.minexp
        )

    def map_coeffs(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(
            self.var, self.trunc, {e: fn(c) for e, c in self.coeffs.items()}, self.minexp
        )

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by var**k (k of either sign)."""
        m = self.minexp + k
        if m < LAURENT_FLOOR:
            raise ValueError("shift would cross the Laurent floor")
        return TruncatedSeries(
            self.var, self.trunc + k, {e + k: c for e, c in self.coeffs.items()}, m
        )

    # ---- ring operations ----

    def _binop_check(self, other: "TruncatedSeries"):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var!r} vs {other.var!r}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Gaussian)):
            other = TruncatedSeries(self.var, self.trunc, {0: other}, min(self.minexp, 0))
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._binop_check(other)
        trunc = min(self.trunc, other.trunc)
        minexp = min(self.minexp, other.minexp)
        table = {e: c for e, c in self.coeffs.items() if e <= trunc}
        for e, c in other.coeffs.items():
            if e > trunc:
                continue
            s = table.get(e, 0) + c
            if s == 0:
                table.pop(e, None)
            else:
                table[e] = s
        return TruncatedSeries(self.var, trunc, table, minexp)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncatedSeries) else -_coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TruncatedSeries(
            self.var, self.trunc, {e: -c for e, c in self.coeffs.items()}, self.minexp
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Gaussian)):
            c = _coerce(other)
            if c == 0:
                return TruncatedSeries.zero(self.var, self.trunc, self.minexp)
            return self.map_coeffs(lambda x: x * c)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._binop_check(other)
        trunc = min(self.trunc, other.trunc)
        minexp = self.minexp + other.minexp
        if minexp < LAURENT_FLOOR:
            raise ValueError("product crosses the Laurent floor")
        table = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e > trunc:
                    continue
                s = table.get(e, 0) + c1 * c2
                if s == 0:
                    table.pop(e, None)
                else:
                    table[e] = s
        return TruncatedSeries(self.var, trunc, table, max(minexp, LAURENT_FLOOR))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Gaussian)):
            c = _coerce(other)
            return self.map_coeffs(lambda x: x / c)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = TruncatedSeries.one(self.var, self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; the leading term may sit at any exponent."""
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero series")
        v = self.valuation()
        if -v < LAURENT_FLOOR:
            raise ValueError("inverse crosses the Laurent floor")
        lead = self.coeffs[v]
        n = self.trunc - v  # number of known coefficients past the lead
        # a = lead * x^v * (1 + u), solve (1+u)^-1 term by term
        inv0 = 1 / lead if isinstance(lead, Fraction) else Fraction(1) / lead
        b = {0: inv0}
        for k in range(1, n + 1):
            s = 0
            for j in range(0, k):
                a_c = self.coeffs.get(v + (k - j))
                if a_c is not None and j in b:
                    s += b[j] * a_c
            val = -s * inv0
            if val != 0:
                b[k] = val
        table = {e - v: c for e, c in b.items()}
        return TruncatedSeries(self.var, n - v, table, min(-v, 0))

    # ---- transcendental-style operations ----

    def exp(self) -> "TruncatedSeries":
        if self.minexp < 0 and any(e < 0 for e in self.coeffs):
            raise ValueError("exp of a series with negative exponents")
        if self.coeff(0) != 0:
            raise ValueError("exp requires zero constant term")
        out = TruncatedSeries.one(self.var, self.trunc)
        term = TruncatedSeries.one(self.var, self.trunc)
        for k in range(1, self.trunc + 1):
            term = term * self / k
            if term.is_zero():
                break
            out = out + term
        return out

    def log(self) -> "TruncatedSeries":
        if self.coeff(0) != 1:
            raise ValueError("log requires constant term 1")
        if any(e < 0 for e in self.coeffs):
            raise ValueError("log of a series with negative exponents")
        u = self - 1
        out = TruncatedSeries.zero(self.var, self.trunc)
        p = TruncatedSeries.one(self.var, self.trunc)
        for k in range(1, self.trunc + 1):
            p = p * u
            if p.is_zero():
                break
            out = out + p * Fraction((-1) ** (k + 1), k)
        return out

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner); inner must have zero constant term."""
        if any(e < 0 for e in self.coeffs) or any(e < 0 for e in inner.coeffs):
            raise ValueError("compose requires power series")
        if inner.coeff(0) != 0:
            raise ValueError("inner series must have zero constant term")
        trunc = min(self.trunc, inner.trunc)
        out = TruncatedSeries.zero(inner.var, trunc)
        c0 = self.coeff(0)
        if c0 != 0:
            out = out + c0
        p = TruncatedSeries.one(inner.var, trunc)
        for e in range(1, trunc + 1):
            p = p * inner
            if p.is_zero():
                break
            c = self.coeffs.get(e)
            if c is not None:
                out = out + p * c
        return out

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of c1*x + c2*x^2 + ... with c1 invertible."""
        if self.coeff(0) != 0:
            raise ValueError("reversion requires zero constant term")
        c1 = self.coeff(1)
        if c1 == 0:
            raise ValueError("reversion requires an invertible linear coefficient")
        n = self.trunc
        g = TruncatedSeries(self.var, n, {1: Fraction(1) / c1})
        for k in range(2, n + 1):
            err = self.compose(g).coeff(k)
            if err != 0:
                g = g + TruncatedSeries(self.var, n, {k: -err / c1})
        return g

    def derivative(self) -> "TruncatedSeries":
        table = {e - 1: e * c for e, c in self.coeffs.items() if e != 0}
        m = min(self.minexp - 1, 0)
        if m < LAURENT_FLOOR:
            m = LAURENT_FLOOR
        return TruncatedSeries(self.var, self.trunc - 1, table, m)

    # ---- numerics and serialization ----

    def evaluate(self, x: complex) -> complex:
        out = 0j
        for e, c in sorted(self.coeffs.items(), reverse=True):
            out += complex(c) * x**e
        return out

    def to_json(self) -> dict:
        pairs = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if isinstance(c, Gaussian):
                pairs.append([e, str(c.re), str(c.im)])
            else:
                pairs.append([e, str(c)])
        return {"var": self.var, "min": self.minexp, "trunc": self.trunc, "coeffs": pairs}

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        table = {}
        last = None
        for entry in data["coeffs"]:
            e = int(entry[0])
            if last is not None and e <= last:
                raise ValueError("exponents must be strictly increasing")
            last = e
            if len(entry) == 2:
                table[e] = Fraction(entry[1])
            else:
                table[e] = Gaussian(Fraction(entry[1]), Fraction(entry[2]))
        return cls(data["var"], int(data["trunc"]), table, int(data["min"]))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Gaussian)):
            other = TruncatedSeries(self.var, self.trunc, {0: other})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __repr__(self):
        return f"TruncatedSeries({self.var!r}, {self.trunc}, {self.coeffs!r}, minexp={self.minexp})"

    def __str__(self):
        if not self.coeffs:
            return f"0 + O({self.var}^{self.trunc + 1})"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            cs = _scalar_str(c)
            if isinstance(c, Gaussian) and c.re != 0 and c.im != 0:
                cs = f"({cs})"
            if e == 0:
                parts.append(cs)
            elif e == 1:
                parts.append(f"{cs}*{self.var}")
            else:
                parts.append(f"{cs}*{self.var}^{e}")
        return " + ".join(parts) + f" + O({self.var}^{self.trunc + 1})"


def _is_zero_coeff(c) -> bool:
    if isinstance(c, TruncatedSeries):
        return c.is_zero()
    return c == 0


def _ring_inverse(c):
    if isinstance(c, TruncatedSeries):
        return c.inverse()
    return 1 / c if not isinstance(c, Gaussian) else Fraction(1) / c


class MultiSeries:
    """Sparse exact series in several variables.

    Truncation policy: an optional per-variable cap vector and an optional
    total-degree bound, the latter counted over a chosen subset of the
    variables (``tgroup``, default all).  At least one bound must be set.
    Coefficients may be Fraction, Gaussian, or TruncatedSeries in an
    auxiliary variable, so the same class covers rational group-law
    tables, box-truncated (q, z) data, and nilpotent root algebras over
    the q-expansion ring.
    """

    __slots__ = ("vars", "caps", "total", "tgroup", "coeffs")

    def __init__(self, vars, coeffs=None, caps=None, total=None, tgroup=None):
        self.vars = tuple(vars)
        n = len(self.vars)
        self.caps = None if caps is None else tuple(int(c) for c in caps)
        if self.caps is not None and len(self.caps) != n:
            raise ValueError("caps length mismatch")
        self.total = None if total is None else int(total)
        self.tgroup = tuple(range(n)) if tgroup is None else tuple(tgroup)
        if self.caps is None and self.total is None:
            raise ValueError("need a per-variable cap or a total-degree bound")
        table = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else coeffs
            for e, c in items:
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise ValueError("exponent arity mismatch")
                if any(x < 0 for x in e):
                    raise ValueError("negative exponent in MultiSeries")
                if not self._keep(e):
                    continue
                if isinstance(c, int):
                    c = Fraction(c)
                if not _is_zero_coeff(c):
                    table[e] = c
        self.coeffs = table

    def _keep(self, e) -> bool:
        if self.caps is not None and any(x > c for x, c in zip(e, self.caps)):
            return False
        if self.total is not None and sum(e[i] for i in self.tgroup) > self.total:
            return False
        return True

    def _like(self, coeffs) -> "MultiSeries":
        return MultiSeries(self.vars, coeffs, self.caps, self.total, self.tgroup)

    # ---- constructors ----

    @classmethod
    def zero(cls, vars, caps=None, total=None, tgroup=None) -> "MultiSeries":
        return cls(vars, None, caps, total, tgroup)

    @classmethod
    def one(cls, vars, caps=None, total=None, tgroup=None) -> "MultiSeries":
        n = len(tuple(vars))
        return cls(vars, {(0,) * n: Fraction(1)}, caps, total, tgroup)

    @classmethod
    def gen(cls, vars, name, caps=None, total=None, tgroup=None) -> "MultiSeries":
        vars = tuple(vars)
        i = vars.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(vars)))
        return cls(vars, {e: Fraction(1)}, caps, total, tgroup)

    # ---- accessors ----

    def coeff(self, e):
        return self.coeffs.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def tdeg(self, e) -> int:
        return sum(e[i] for i in self.tgroup)

    def map_coeffs(self, fn) -> "MultiSeries":
        return self._like({e: fn(c) for e, c in self.coeffs.items()})

    # ---- ring operations ----

    def _compat(self, other: "MultiSeries"):
        if self.vars != other.vars:
            raise ValueError("variable tuple mismatch")

    def _merged_bounds(self, other: "MultiSeries"):
        if self.caps is None or other.caps is None:
            caps = None
        else:
            caps = tuple(min(a, b) for a, b in zip(self.caps, other.caps))
        if self.total is None or other.total is None:
            total = self.total if other.total is None else other.total
        else:
            total = min(self.total, other.total)
        return caps, total

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Gaussian, TruncatedSeries)):
            z = (0,) * len(self.vars)
            other = self._like({z: other})
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._compat(other)
        caps, total = self._merged_bounds(other)
        res = MultiSeries(self.vars, None, caps, total, self.tgroup)
        table = {}
        for src in (self.coeffs, other.coeffs):
            for e, c in src.items():
                if not res._keep(e):
                    continue
                s = table.get(e)
                s = c if s is None else s + c
                if _is_zero_coeff(s):
                    table.pop(e, None)
                else:
                    table[e] = s
        res.coeffs = table
        return res

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, MultiSeries):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._like({e: -c for e, c in self.coeffs.items()})

    def scale(self, c) -> "MultiSeries":
        if _is_zero_coeff(c):
            return self._like(None)
        return self._like({e: x * c for e, x in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Gaussian, TruncatedSeries)):
            return self.scale(other)
        if not isinstance(other, MultiSeries):
            return NotImplemented
        self._compat(other)
        caps, total = self._merged_bounds(other)
        res = MultiSeries(self.vars, None, caps, total, self.tgroup)
        table = {}
        if total is not None:
            # bucket by counted degree so deep products are skipped wholesale
            by_a: dict[int, list] = {}
            for e, c in self.coeffs.items():
                by_a.setdefault(self.tdeg(e), []).append((e, c))
            by_b: dict[int, list] = {}
            for e, c in other.coeffs.items():
                by_b.setdefault(self.tdeg(e), []).append((e, c))
            for da, items_a in by_a.items():
                for db, items_b in by_b.items():
                    if da + db > total:
                        continue
                    for e1, c1 in items_a:
                        for e2, c2 in items_b:
                            e = tuple(x + y for x, y in zip(e1, e2))
                            if not res._keep(e):
                                continue
                            p = c1 * c2
                            s = table.get(e)
                            s = p if s is None else s + p
                            if _is_zero_coeff(s):
                                table.pop(e, None)
                            else:
                                table[e] = s
        else:
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    if not res._keep(e):
                        continue
                    p = c1 * c2
                    s = table.get(e)
                    s = p if s is None else s + p
                    if _is_zero_coeff(s):
                        table.pop(e, None)
                    else:
                        table[e] = s
        res.coeffs = table
        return res

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return self.map_coeffs(lambda x: x / c)
        if isinstance(other, Gaussian):
            return self.map_coeffs(lambda x: x / other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = MultiSeries.one(self.vars, self.caps, self.total, self.tgroup)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # ---- structural operations ----

    def truncate(self, caps=None, total=None) -> "MultiSeries":
        new_caps = self.caps if caps is None else tuple(caps)
        new_total = self.total if total is None else int(total)
        if self.caps is not None and new_caps is not None:
            new_caps = tuple(min(a, b) for a, b in zip(self.caps, new_caps))
        if self.total is not None and new_total is not None:
            new_total = min(self.total, new_total)
        return MultiSeries(self.vars, self.coeffs, new_caps, new_total, self.tgroup)

    def rename(self, mapping: dict) -> "MultiSeries":
        """Rename variables; exponent layout is unchanged."""
        return MultiSeries(
            tuple(mapping.get(v, v) for v in self.vars),
            self.coeffs,
            self.caps,
            self.total,
            self.tgroup,
        )

    def lift(self, vars, caps=None, total=None, tgroup=None) -> "MultiSeries":
        """Embed into a larger variable tuple (by name)."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        n = len(vars)
        table = {}
        for e, c in self.coeffs.items():
            new_e = [0] * n
            for p, x in zip(pos, e):
                new_e[p] = x
            table[tuple(new_e)] = c
        return MultiSeries(vars, table, caps, total, tgroup)

    def coeff_in(self, name: str, e: int) -> "MultiSeries":
        """Coefficient of name**e as a series in the remaining variables."""
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1 :]
        caps = None if self.caps is None else self.caps[:i] + self.caps[i + 1 :]
        total = self.total
        if total is not None and i in self.tgroup:
            total = max(total - e, 0)
        tgroup = tuple(j if j < i else j - 1 for j in self.tgroup if j != i)
        if caps is None and total is None:
            total = 0  # only possible when the removed cap was the sole bound
        table = {}
        for exps, c in self.coeffs.items():
            if exps[i] == e:
                table[exps[:i] + exps[i + 1 :]] = c
        return MultiSeries(rest, table, caps, total, tgroup if tgroup else None)

    def subs(self, args: dict) -> "MultiSeries":
        """Substitute series for variables; unsubstituted variables stay.

        args maps a variable name to a MultiSeries; all substituted series
        must share one variable tuple, which becomes the result's.
        Substituting anything with a nonzero constant term is rejected.
        """
        targets = [s for s in args.values() if isinstance(s, MultiSeries)]
        if not targets:
            raise ValueError("no substitution targets")
        proto = targets[0]
        for s in targets[1:]:
            if s.vars != proto.vars:
                raise ValueError("substitution targets disagree on variables")
        zero_key = (0,) * len(proto.vars)
        for s in targets:
            if not _is_zero_coeff(s.coeffs.get(zero_key, Fraction(0))):
                raise ValueError("substitution target has nonzero constant term")
        for v in self.vars:
            if v not in args:
                raise ValueError(f"no substitution given for {v!r}")
        res = MultiSeries.zero(proto.vars, proto.caps, proto.total, proto.tgroup)
        nv = len(proto.vars)
        # single-monomial targets act by exponent shift, a big saving when
        # substituting generators; only genuinely mixed targets get powered
        mono = {}
        pows = {}
        for v in self.vars:
            s = args[v]
            if len(s.coeffs) == 1:
                (me, mc), = s.coeffs.items()
                mono[v] = (me, mc)
            else:
                pows[v] = [
                    MultiSeries.one(proto.vars, proto.caps, proto.total, proto.tgroup),
                    s,
                ]
        table = {}
        for e, c in self.coeffs.items():
            shift = [0] * nv
            scal = c
            prod = None
            dead = False
            for v, k in zip(self.vars, e):
                if k == 0:
                    continue
                if v in mono:
                    me, mc = mono[v]
                    for i, x in enumerate(me):
                        shift[i] += k * x
                    scal = scal * mc**k
                else:
                    plist = pows[v]
                    while len(plist) <= k:
                        plist.append(plist[-1] * plist[1])
                    p = plist[k]
                    if p.is_zero():
                        dead = True
                        break
                    prod = p if prod is None else prod * p
            if dead or _is_zero_coeff(scal):
                continue
            if prod is None:
                key = tuple(shift)
                if res._keep(key):
                    s0 = table.get(key)
                    s0 = scal if s0 is None else s0 + scal
                    table[key] = s0
            else:
                for pk, pv in prod.coeffs.items():
                    key = tuple(a + b for a, b in zip(pk, shift))
                    if not res._keep(key):
                        continue
                    val = pv * scal
                    s0 = table.get(key)
                    s0 = val if s0 is None else s0 + val
                    table[key] = s0
        res.coeffs = {k: v for k, v in table.items() if not _is_zero_coeff(v)}
        return res

    def exp(self) -> "MultiSeries":
        zero_key = (0,) * len(self.vars)
        if not _is_zero_coeff(self.coeffs.get(zero_key, Fraction(0))):
            raise ValueError("exp requires zero constant term")
        bound = self._nilpotency_bound()
        out = MultiSeries.one(self.vars, self.caps, self.total, self.tgroup)
        term = out
        for k in range(1, bound + 1):
            term = term * self / k
            if term.is_zero():
                break
            out = out + term
        return out

    def log(self) -> "MultiSeries":
        zero_key = (0,) * len(self.vars)
        c0 = self.coeffs.get(zero_key, Fraction(0))
        if not (isinstance(c0, (int, Fraction)) and c0 == 1) and not (
            isinstance(c0, TruncatedSeries) and c0 == 1
        ):
            raise ValueError("log requires constant term 1")
        u = self - 1
        bound = self._nilpotency_bound()
        out = MultiSeries.zero(self.vars, self.caps, self.total, self.tgroup)
        p = MultiSeries.one(self.vars, self.caps, self.total, self.tgroup)
        for k in range(1, bound + 1):
            p = p * u
            if p.is_zero():
                break
            out = out + p * Fraction((-1) ** (k + 1), k)
        return out

    def _nilpotency_bound(self) -> int:
        # any series with zero constant term vanishes beyond this power
        if self.caps is not None:
            return sum(self.caps) + 1
        return self.total + 1

    def reversion(self) -> "MultiSeries":
        """Compositional inverse for one-variable series over the coefficient ring."""
        if len(self.vars) != 1:
            raise ValueError("reversion is defined for one-variable series")
        c1 = self.coeffs.get((1,))
        if c1 is None or _is_zero_coeff(c1):
            raise ValueError("reversion requires an invertible linear coefficient")
        zero_key = (0,)
        if not _is_zero_coeff(self.coeffs.get(zero_key, Fraction(0))):
            raise ValueError("reversion requires zero constant term")
        n = self.caps[0] if self.caps is not None else self.total
        inv1 = _ring_inverse(c1)
        g = self._like({(1,): inv1})
        for k in range(2, n + 1):
            err = self.subs({self.vars[0]: g}).coeffs.get((k,))
            if err is not None and not _is_zero_coeff(err):
                g = g + self._like({(k,): -(err * inv1)})
        return g

    def as_univariate(self) -> "TruncatedSeries":
        if len(self.vars) != 1:
            raise ValueError("not a one-variable series")
        n = self.caps[0] if self.caps is not None else self.total
        return TruncatedSeries(self.vars[0], n, {e[0]: c for e, c in self.coeffs.items()})

    # ---- comparisons / display ----

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Gaussian)):
            z = (0,) * len(self.vars)
            if _is_zero_coeff(_coerce(other) if isinstance(other, int) else other):
                return not self.coeffs
            return self.coeffs == {z: other if not isinstance(other, int) else Fraction(other)}
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.vars == other.vars and self.coeffs == other.coeffs

    def __repr__(self):
        bounds = []
        if self.caps is not None:
            bounds.append(f"caps={self.caps}")
        if self.total is not None:
            bounds.append(f"total={self.total}")
        return f"MultiSeries({self.vars!r}, {len(self.coeffs)} terms, {', '.join(bounds)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, key=lambda t: (sum(t), t)):
            c = self.coeffs[e]
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v for v, k in zip(self.vars, e) if k
            )
            cs = f"({c})" if isinstance(c, TruncatedSeries) else _scalar_str(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)


# ------------------------------------------------------------------ exact
# linear algebra over the coefficient field (Fraction or Gaussian), used by
# the modular-fit solvers, kernel computations, and rank checks.


def rref(rows, ncols: int):
    """Reduced row echelon form in place semantics; returns (matrix, pivots)."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c] if not isinstance(mat[r][c], Gaussian) else Fraction(1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def matrix_rank(rows, ncols: int) -> int:
    if not rows:
        return 0
    _, pivots = rref(rows, ncols)
    return len(pivots)


def solve_exact(rows, rhs):
    """Exact solution of an (overdetermined) consistent system, else None."""
    if not rows:
        return [] if all(x == 0 for x in rhs) else None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    mat, pivots = rref(aug, ncols)
    # inconsistent if a zero row has nonzero last entry
    for row in mat:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            return None
    sol = [Fraction(0)] * ncols
    r = 0
    for c in pivots:
        sol[c] = mat[r][ncols]
        r += 1
    # verify (guards against free columns hiding inconsistency)
    for row_in, b in zip(rows, rhs):
        acc = 0
        for a, x in zip(row_in, sol):
            acc = acc + a * x
        if acc != b:
            return None
    return sol


def nullspace(rows, ncols: int):
    """Basis of the right kernel as lists of field elements."""
    if not rows:
        return [
            [Fraction(1) if i == j else Fraction(0) for i in range(ncols)]
            for j in range(ncols)
        ]
    mat, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for r, pcol in enumerate(pivots):
            vec[pcol] = -mat[r][fcol]
        basis.append(vec)
    return basis
