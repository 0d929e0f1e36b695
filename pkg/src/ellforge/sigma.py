"""The canonical odd coordinate of an elliptic curve and its group law.

Every q-expansion in this module normalizes the second period to 1; the
numeric evaluators restore the lam2 prefactor from the lattice they are
handed.  The variable z is the exponential coordinate: the point w of
C/Lambda sits at z = 2*pi*i*w/lam2, so stepping by lam2 shifts z by
2*pi*i and stepping by lam1 shifts z by 2*pi*i*tau.

Two independent constructions of the same object are kept side by side:
a convergent product over q-shells and an exponential of Eisenstein
series.  Their exact agreement is one of the headline checks, so neither
is ever derived from the other.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .modforms import TWO_PI_I, Lattice, eisenstein_q, homogeneous_fit, qpochhammer
from .series import MultiSeries, TruncatedSeries

QZ = ("q", "z")

# frozen normalization of the exponential form:
#   sigma = z * exp(EXP_LINEAR * z) * exp(sum_k exp_weight(k) * G_{2k}(q) * z^{2k})
# regenerated from the product form in the test suite; do not tweak casually
EXP_LINEAR = Fraction(-1, 2)


def exp_weight(k: int) -> Fraction:
    return Fraction(-2, math.factorial(2 * k))


def _exp_z(sign: int, qorder: int, zorder: int) -> MultiSeries:
    table = {(0, j): Fraction(sign**j, math.factorial(j)) for j in range(zorder + 1)}
    return MultiSeries(QZ, table, caps=(qorder, zorder))


def _lift_q(series: TruncatedSeries, qorder: int, zorder: int) -> MultiSeries:
    return MultiSeries(
        QZ, {(e, 0): c for e, c in series.coeffs.items()}, caps=(qorder, zorder)
    )


def sigma_product(qorder: int, zorder: int) -> MultiSeries:
    """(1 - e^-z) prod_n (1 - q^n e^-z)(1 - q^n e^z) / (1 - q^n)^2."""
    caps = (qorder, zorder)
    one = MultiSeries.one(QZ, caps=caps)
    em = _exp_z(-1, qorder, zorder)
    ep = _exp_z(+1, qorder, zorder)
    out = (one - em) * _lift_q(qpochhammer(qorder, 2).inverse(), qorder, zorder)
    for n in range(1, qorder + 1):
        qn_em = MultiSeries(QZ, {(n, 0): 1}, caps=caps) * em
        qn_ep = MultiSeries(QZ, {(n, 0): 1}, caps=caps) * ep
        out = out * (one - qn_em) * (one - qn_ep)
    return out


def sigma_exponential(qorder: int, zorder: int) -> MultiSeries:
    """z * e^(z * EXP_LINEAR) * exp(sum_k exp_weight(k) G_{2k}(q) z^{2k})."""
    caps = (qorder, zorder)
    arg = MultiSeries.zero(QZ, caps=caps)
    for k in range(1, zorder // 2 + 1):
        g = eisenstein_q(2 * k, qorder)
        zpow = MultiSeries(QZ, {(0, 2 * k): exp_weight(k)}, caps=caps)
        arg = arg + zpow * _lift_q(g, qorder, zorder)
    pref = MultiSeries(
        QZ,
        {
            (0, j + 1): EXP_LINEAR**j / math.factorial(j)
            for j in range(zorder)
        },
        caps=caps,
    )
    return pref * arg.exp()


def z_coefficients(qorder: int, zorder: int) -> list[TruncatedSeries]:
    """z-Taylor coefficients of the coordinate as q-expansions, index = power."""
    s = sigma_exponential(qorder, zorder)
    return [s.coeff_in("z", k).as_univariate() for k in range(zorder + 1)]


@dataclass
class CompletionTerm:
    degree: int
    series: TruncatedSeries
    tag: str


def taylor_completion(qorder: int, zorder: int) -> list[CompletionTerm]:
    """Taylor coefficients tagged by whether they are honestly modular.

    The z^k coefficient is called modular when it equals an isobaric
    weight-(k-1) polynomial in G_4 and G_6 exactly, and quasimodular
    otherwise (the failures all trace back to G_2 and to the e^(z/2)
    prefactor).
    """
    out = []
    for k, series in enumerate(z_coefficients(qorder, zorder)):
        fit = homogeneous_fit(series, k - 1)
        out.append(CompletionTerm(k, series, "modular" if fit is not None else "quasimodular"))
    return out


# ---------------------------------------------------------------- numerics


def sigma_num(lat: Lattice, z: complex, tol: float = 1e-17) -> complex:
    """Numeric value of the coordinate, lam2 prefactor included."""
    q = lat.q
    em = cmath.exp(-z)
    ep = cmath.exp(z)
    out = lat.lam2 * (1 - em)
    qn = q
    n = 0
    while abs(qn) > tol:
        out *= (1 - qn * em) * (1 - qn * ep) / (1 - qn) ** 2
        qn *= q
        n += 1
        if n > 6000:
            raise RuntimeError("q-product failed to converge")
    return out


@dataclass(frozen=True)
class QuasiPeriod:
    sign: int
    q_power: int
    z_slope: int


# frozen transformation data: stepping z by 2*pi*i (direction 1) leaves the
# coordinate alone; stepping by 2*pi*i*tau (direction 2) multiplies it by
# -q^-1 e^-z.  Regenerated numerically in the tests.
QUASI_PERIODS = {1: QuasiPeriod(1, 0, 0), 2: QuasiPeriod(-1, -1, -1)}


def quasi_period_predicted(direction: int, lat: Lattice, z: complex) -> complex:
    qp = QUASI_PERIODS[direction]
    return qp.sign * lat.q**qp.q_power * cmath.exp(qp.z_slope * z)


def quasi_period_measured(direction: int, lat: Lattice, z: complex) -> complex:
    shift = TWO_PI_I * (1 if direction == 1 else lat.tau)
    return sigma_num(lat, z + shift) / sigma_num(lat, z)


# ---------------------------------------------------------------- group law

XYQ = ("x", "y", "q")


def coordinate_series(kind: str, degree: int, qorder: int) -> MultiSeries:
    """The chosen coordinate as a one-variable series over the q-expansion ring."""
    one = TruncatedSeries.one("q", qorder)
    if kind == "additive":
        table = {(1,): one}
    elif kind == "multiplicative":
        table = {(k,): one * Fraction(1, math.factorial(k)) for k in range(1, degree + 1)}
    elif kind == "sigma":
        coeffs = z_coefficients(qorder, degree)
        table = {(k,): c for k, c in enumerate(coeffs) if k and not c.is_zero()}
    else:
        raise ValueError(f"unknown coordinate kind {kind!r}")
    return MultiSeries(("z",), table, caps=(degree,))


def _flatten(ring_series: MultiSeries, gen: str, degree: int, qorder: int) -> MultiSeries:
    """One-variable series over the q-ring -> rational series in (x, y, q)."""
    i = XYQ.index(gen)
    table = {}
    for (k,), c in ring_series.coeffs.items():
        if isinstance(c, TruncatedSeries):
            for e, f in c.coeffs.items():
                key = [0, 0, e]
                key[i] = k
                table[tuple(key)] = f
        else:
            key = [0, 0, 0]
            key[i] = k
            table[tuple(key)] = c
    return MultiSeries(XYQ, table, caps=(degree, degree, qorder), total=degree, tgroup=(0, 1))


@dataclass
class FormalGroupLaw:
    kind: str
    degree: int
    qorder: int
    table: MultiSeries  # vars (x, y, q); total degree bound counts x, y only

    def coefficient(self, i: int, j: int) -> TruncatedSeries:
        out = {}
        for (a, b, e), c in self.table.coeffs.items():
            if a == i and b == j:
                out[e] = c
        return TruncatedSeries("q", self.qorder, out)

    def evaluate(self, x: complex, y: complex, q: complex) -> complex:
        total = 0j
        for (a, b, e), c in self.table.coeffs.items():
            total += complex(c) * x**a * y**b * q**e
        return total

    def q_zero_slice(self) -> MultiSeries:
        return self.table.coeff_in("q", 0)

    def is_unital(self) -> bool:
        gen_x = MultiSeries.gen(
            XYQ, "x", caps=(self.degree, self.degree, self.qorder),
            total=self.degree, tgroup=(0, 1),
        )
        zero = gen_x._like(None)
        q = MultiSeries.gen(
            XYQ, "q", caps=(self.degree, self.degree, self.qorder),
            total=self.degree, tgroup=(0, 1),
        )
        return self.table.subs({"x": gen_x, "y": zero, "q": q}) == gen_x

    def is_commutative(self) -> bool:
        flipped = {(b, a, e): c for (a, b, e), c in self.table.coeffs.items()}
        return flipped == self.table.coeffs

    def associativity_defect(self) -> MultiSeries:
        """F(F(x,y),w) - F(x,F(y,w)) in the exact quotient ring."""
        V = ("x", "y", "w", "q")
        caps = (self.degree, self.degree, self.degree, self.qorder)
        kw = dict(caps=caps, total=self.degree, tgroup=(0, 1, 2))
        gx = MultiSeries.gen(V, "x", **kw)
        gw = MultiSeries.gen(V, "w", **kw)
        gq = MultiSeries.gen(V, "q", **kw)
        f_xy = self.table.lift(V, **kw)
        f_yw = self.table.rename({"x": "y", "y": "w"}).lift(V, **kw)
        left = self.table.subs({"x": f_xy, "y": gw, "q": gq})
        right = self.table.subs({"x": gx, "y": f_yw, "q": gq})
        return left - right

    def is_associative(self) -> bool:
        return self.associativity_defect().is_zero()

    def to_json(self) -> dict:
        entries = []
        seen = sorted({(a, b) for (a, b, _) in self.table.coeffs})
        for a, b in seen:
            entries.append({"i": a, "j": b, "series": self.coefficient(a, b).to_json()})
        return {
            "kind": self.kind,
            "degree": self.degree,
            "qorder": self.qorder,
            "coefficients": entries,
        }


def fgl_from_coordinate(kind: str, degree: int, qorder: int) -> FormalGroupLaw:
    """F(x, y) = c(c^-1(x) + c^-1(y)) for the chosen coordinate c."""
    c = coordinate_series(kind, degree, qorder)
    cinv = c.reversion()
    A = _flatten(cinv, "x", degree, qorder)
    B = _flatten(cinv.rename({"z": "y"}), "y", degree, qorder)
    s = A + B
    acc = MultiSeries.zero(XYQ, caps=(degree, degree, qorder), total=degree, tgroup=(0, 1))
    p = MultiSeries.one(XYQ, caps=(degree, degree, qorder), total=degree, tgroup=(0, 1))
    for k in range(1, degree + 1):
        p = p * s
        ck = c.coeffs.get((k,))
        if ck is None:
            continue
        if isinstance(ck, TruncatedSeries):
            ck_flat = MultiSeries(
                XYQ, {(0, 0, e): f for e, f in ck.coeffs.items()},
                caps=(degree, degree, qorder), total=degree, tgroup=(0, 1),
            )
        else:
            ck_flat = MultiSeries(
                XYQ, {(0, 0, 0): ck},
                caps=(degree, degree, qorder), total=degree, tgroup=(0, 1),
            )
        acc = acc + p * ck_flat
    return FormalGroupLaw(kind, degree, qorder, acc)


# ------------------------------------------------------- numeric group law


def coordinate_num(lat: Lattice, z: complex) -> complex:
    return sigma_num(lat, z) / lat.lam2


def invert_coordinate_num(lat: Lattice, x: complex) -> complex:
    """Solve coordinate_num(lat, z) = x by Newton iteration from z = x."""
    z = complex(x)
    h = 1e-7
    for _ in range(60):
        f = coordinate_num(lat, z) - x
        if abs(f) < 1e-16:
            break
        df = (coordinate_num(lat, z + h) - coordinate_num(lat, z - h)) / (2 * h)
        z -= f / df
    return z


@dataclass
class GroupLawReport:
    residual: float
    residual_large: float
    slope: float


def group_law_check(
    x: float,
    y: float,
    degree: int = 10,
    qorder: int = 6,
    tau: complex = 2j,
    fgl: FormalGroupLaw | None = None,
) -> GroupLawReport:
    """Truncated law vs transcendental addition at a concrete lattice.

    The slope compares the residual at (2x, 2y) with the one at (x, y);
    a truncation at total degree D shows up as about D + 1 doublings.
    """
    if fgl is None:
        fgl = fgl_from_coordinate("sigma", degree, qorder)
    lat = Lattice(tau, 1.0)
    q0 = lat.q

    def residual(a: float, b: float) -> float:
        za = invert_coordinate_num(lat, a)
        zb = invert_coordinate_num(lat, b)
        truth = coordinate_num(lat, za + zb)
        return abs(fgl.evaluate(a, b, q0) - truth)

    r_small = residual(x, y)
    r_large = residual(2 * x, 2 * y)
    slope = math.log2(r_large / r_small) if r_small > 0 else float("inf")
    return GroupLawReport(r_small, r_large, slope)
