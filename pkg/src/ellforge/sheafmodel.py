"""Local sections of circle-equivariant elliptic cohomology over the dual curve.

A point of the dual torus is a pair of rational angles; its fixed locus
inside a linear circle representation is a coordinate subspace.  A local
section anchored there is an equivariant Cartan cocycle on the fixed
locus tensored with a lattice-function slot, and functions of the curve
coordinate act on it through the equivariant parameter.  Moving the
anchor restricts the cocycle and twists that action by the translation
between the anchors; the twist bookkeeping composes exactly, which is
the cocycle condition checked by the tests.  Finite-group sectors
(commuting pairs up to conjugation and the integer modular group) are
enumerated by brute force at the end of the module.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .equivderham import (
    GradedElement,
    cartan_block,
    cartan_d,
    cartan_world,
    circle_rep,
    invariant_vectors,
    substitute,
    u1,
)
from .series import MultiSeries, TruncatedSeries, matrix_rank, nullspace
from .sigma import sigma_product

_U1 = u1()
_WORLDS = {}


def _world(nfix):
    """Shared per-arity world so sections from different chains compare equal."""
    if nfix not in _WORLDS:
        _WORLDS[nfix] = cartan_world(_U1, 2 * nfix)
    return _WORLDS[nfix]


# ---------------------------------------------------------------------------
# spaces, anchors, fixed loci


@dataclass(frozen=True)
class CircleActionSpace:
    """Diagonal circle action on complex coordinates with integer weights."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))


def _angle_pair(h):
    x, y = h
    return (Fraction(x), Fraction(y))


def fixed_locus(space, h):
    """Coordinates fixed by the subgroup generated by the angle pair.

    Coordinate j survives iff both w_j x and w_j y are integers; shifting
    either angle by an integer changes nothing, so representatives need
    no reduction.
    """
    x, y = _angle_pair(h)
    return tuple(
        j
        for j, w in enumerate(space.weights)
        if (w * x).denominator == 1 and (w * y).denominator == 1
    )


def _active_weights(space, h):
    return tuple(space.weights[j] for j in fixed_locus(space, h))


# ---------------------------------------------------------------------------
# cocycle bases on a fixed locus

# The differential and all restrictions preserve W = x-degree + form
# degree, so the complex splits into W-blocks, each finite-dimensional in
# every total degree; truncating in W keeps every inspected block a
# complete subcomplex and exact rational linear algebra suffices.


def _block_keys(ws, w, deg):
    world = _world(len(ws))
    ambient = 2 * len(ws)
    keys = []
    for fdeg in range(min(w, ambient, deg) + 1):
        if (deg - fdeg) % 2:
            continue
        keys.extend(cartan_block(_U1, world, ambient, w - fdeg, fdeg, (deg - fdeg) // 2))
    return keys


def _w_complex(ws, w, degree_bound):
    """Keys, cocycle vectors, and boundary vectors per degree in one W-block."""
    world = _world(len(ws))
    mats = circle_rep(ws)
    ambient = 2 * len(ws)
    d = cartan_d(_U1, world, mats)
    keys = {deg: _block_keys(ws, w, deg) for deg in range(degree_bound + 2)}
    inv = {
        deg: invariant_vectors(_U1, world, ambient, keys[deg], mats)
        for deg in range(degree_bound + 1)
    }
    cocycles = {deg: [] for deg in range(degree_bound + 1)}
    boundaries = {deg: [] for deg in range(degree_bound + 1)}
    for deg in range(degree_bound + 1):
        vecs = inv[deg]
        if not vecs:
            continue
        dst = {k: i for i, k in enumerate(keys[deg + 1])}
        cols = []
        for v in vecs:
            el = GradedElement(world, {k: c for k, c in zip(keys[deg], v) if c})
            img = d(el)
            col = [Fraction(0)] * len(keys[deg + 1])
            for k, c in img.coeffs.items():
                col[dst[k]] = c
            cols.append(col)
            if deg + 1 <= degree_bound and any(col):
                boundaries[deg + 1].append(col)
        rows = [
            [cols[j][i] for j in range(len(vecs))]
            for i in range(len(keys[deg + 1]))
        ]
        for combo in nullspace(rows, len(vecs)):
            vec = [
                sum(combo[j] * vecs[j][i] for j in range(len(vecs)))
                for i in range(len(keys[deg]))
            ]
            cocycles[deg].append(vec)
    return keys, cocycles, boundaries


def _chain_data(ws, degree_bound, wmax):
    """Assembled per-degree keys, cocycle vectors, and boundary vectors."""
    keys = {deg: [] for deg in range(degree_bound + 1)}
    coc = {deg: [] for deg in range(degree_bound + 1)}
    bnd = {deg: [] for deg in range(degree_bound + 1)}
    for w in range(wmax + 1):
        wkeys, wcoc, wbnd = _w_complex(ws, w, degree_bound)
        for deg in range(degree_bound + 1):
            off = len(keys[deg])
            if not wkeys[deg]:
                continue
            keys[deg].extend(wkeys[deg])
            for store, src in ((coc, wcoc), (bnd, wbnd)):
                for v in src[deg]:
                    store[deg].append((off, v))
    out_keys, out_coc, out_bnd = {}, {}, {}
    for deg in range(degree_bound + 1):
        total = len(keys[deg])
        out_keys[deg] = keys[deg]
        out_coc[deg] = [_pad(off, v, total) for off, v in coc[deg]]
        out_bnd[deg] = [_pad(off, v, total) for off, v in bnd[deg]]
    return _world(len(ws)), out_keys, out_coc, out_bnd


def _pad(off, v, total):
    out = [Fraction(0)] * total
    out[off : off + len(v)] = v
    return out


def _rank_of(vectors, width):
    if not vectors:
        return 0
    rows = [[v[i] for v in vectors] for i in range(width)]
    return matrix_rank(rows, len(vectors))


@dataclass
class SectionsReport:
    anchor: tuple
    fixed: tuple
    degree_bound: int
    wmax: int
    cocycle_dims: list
    cohomology_dims: list
    basis: dict


def local_sections(space, h, degree_bound, wmax=None):
    """Basis of equivariant cocycles on the fixed locus up to the truncation.

    The cohomology dimensions (cocycles modulo boundaries) come along for
    free and give the cross-check against the weight-by-weight
    computation: every nonzero weight contributes nothing beyond the
    polynomial algebra on the equivariant parameter.
    """
    if wmax is None:
        wmax = degree_bound
    h = _angle_pair(h)
    ws = _active_weights(space, h)
    world, keys, coc, bnd = _chain_data(ws, degree_bound, wmax)
    cdims = []
    hdims = []
    basis = {}
    for deg in range(degree_bound + 1):
        cdims.append(len(coc[deg]))
        hdims.append(len(coc[deg]) - _rank_of(bnd[deg], len(keys[deg])))
        basis[deg] = [
            GradedElement(world, {k: c for k, c in zip(keys[deg], v) if c})
            for v in coc[deg]
        ]
    return SectionsReport(h, fixed_locus(space, h), degree_bound, wmax, cdims, hdims, basis)


# ---------------------------------------------------------------------------
# sections and the twisted module structure


@dataclass
class CurveFunction:
    """Power series in the curve coordinate, centered at a named anchor."""

    center: tuple
    series: TruncatedSeries

    def __post_init__(self):
        self.center = _angle_pair(self.center)


@dataclass
class LocalSection:
    """Cartan cocycle on a fixed locus with a lattice-function slot.

    center is the anchor where the module identification was set up;
    twist accumulates the translations of later anchors, stored as raw
    rational differences so that chains compose on the nose.  prefactor
    collects the module multiplications applied so far as a series in
    the equivariant parameter u and the modular parameter tau (tau only
    enters through twisted actions).
    """

    space: CircleActionSpace
    anchor: tuple
    center: tuple
    twist: tuple
    cocycle: GradedElement
    prefactor: MultiSeries
    factor: object
    weight: object
    truncation: int


def _prefactor_caps(truncation):
    return (truncation, truncation)


def make_section(space, h, cocycle=None, factor="O(Lat)", truncation=8, weight=None):
    h = _angle_pair(h)
    ws = _active_weights(space, h)
    world = _world(len(ws))
    if cocycle is None:
        cocycle = GradedElement.const(world, Fraction(1))
    if cocycle.world is not world:
        raise ValueError("cocycle lives in the wrong generator world")
    d = cartan_d(_U1, world, circle_rep(ws))
    if not d(cocycle).is_zero():
        raise ValueError("not a cocycle: the equivariant differential does not vanish")
    if weight is None:
        degs = {world.monomial_degree(k) for k in cocycle.coeffs}
        weight = degs.pop() if len(degs) == 1 else None
    pref = MultiSeries.one(("tau", "u"), caps=_prefactor_caps(truncation))
    zero = Fraction(0)
    return LocalSection(space, h, h, (zero, zero), cocycle, pref, factor, weight, truncation)


def sigma_section(qorder, zorder):
    """The odd coordinate function as a weight-one section at the trivial pair."""
    space = CircleActionSpace(())
    return make_section(
        space,
        (0, 0),
        factor=sigma_product(qorder, zorder),
        truncation=zorder,
        weight=1,
    )


def module_action(f, s):
    """Multiply by f evaluated at the twisted equivariant parameter.

    At the original anchor f acts through u itself; after transitions the
    argument picks up the accumulated translation, whose modular-frame
    component enters as the formal parameter tau.
    """
    if f.center != s.center:
        raise ValueError("series centered elsewhere: recenter to the section's module chart")
    if f.series.minexp < 0:
        raise ValueError("curve function has a pole at its center")
    ex, ey = s.twist
    caps = _prefactor_caps(s.truncation)
    shift = MultiSeries(
        ("tau", "u"),
        {(0, 1): Fraction(1), (0, 0): ex, (1, 0): -ey},
        caps=caps,
    )
    acc = MultiSeries.zero(("tau", "u"), caps=caps)
    power = MultiSeries.one(("tau", "u"), caps=caps)
    for n in range(f.series.trunc + 1):
        c = f.series.coeff(n)
        if c:
            acc = acc + power.scale(c)
        power = power * shift
    if acc.is_zero():
        weight = s.weight
    elif len(acc.coeffs) == 1 and s.weight is not None:
        ((_, ue),) = acc.coeffs.keys()
        weight = s.weight + 2 * ue
    else:
        weight = None
    return LocalSection(
        s.space, s.anchor, s.center, s.twist, s.cocycle,
        s.prefactor * acc, s.factor, weight, s.truncation,
    )


def transition(space, h, hp, s):
    """Restrict to the smaller fixed locus and accumulate the module twist."""
    h = _angle_pair(h)
    hp = _angle_pair(hp)
    if s.anchor != h:
        raise ValueError("section does not live at the source anchor")
    fx = fixed_locus(space, h)
    fxp = fixed_locus(space, hp)
    if not set(fxp) <= set(fx):
        raise ValueError("target fixed locus is not contained in the source one")
    worldp = _world(len(fxp))
    pos = {j: i for i, j in enumerate(fx)}
    images = {"u0": worldp.gen("u0")}
    for newi, j in enumerate(fxp):
        oldi = pos[j]
        for r in (1, 2):
            images[f"x{2 * oldi + r}"] = worldp.gen(f"x{2 * newi + r}")
            images[f"dx{2 * oldi + r}"] = worldp.gen(f"dx{2 * newi + r}")
    coc = substitute(s.cocycle, worldp, images)
    d = cartan_d(_U1, worldp, circle_rep(_active_weights(space, hp)))
    if not d(coc).is_zero():
        raise ValueError("restriction failed to preserve the cocycle condition")
    tw = (s.twist[0] + (h[0] - hp[0]), s.twist[1] + (h[1] - hp[1]))
    return LocalSection(
        space, hp, s.center, tw, coc, s.prefactor, s.factor, s.weight, s.truncation
    )


def completion_map(s):
    """Expand the lattice factor at the trivial pair and merge z into u.

    Only sections without coordinate content complete here; the output is
    a series in q and u whose u-coefficients are q-expansions.
    """
    zero = Fraction(0)
    if s.anchor != (zero, zero) or s.center != (zero, zero) or s.twist != (zero, zero):
        raise ValueError("completion is defined at the trivial pair only")
    if isinstance(s.factor, str):
        raise ValueError("symbolic lattice factor has no expansion")
    fac = s.factor
    if fac.vars != ("q", "z"):
        raise ValueError("lattice factor must be a series in (q, z)")
    upoly = {}
    for (e, o), c in s.cocycle.coeffs.items():
        if o or any(e[1:]):
            raise ValueError("completion needs a coordinate-free section")
        upoly[e[0]] = c
    for (te, _), _c in s.prefactor.coeffs.items():
        if te:
            raise ValueError("prefactor still depends on the modular parameter")
    caps = fac.caps
    merged = fac.rename({"z": "u"})
    coc_u = MultiSeries(("q", "u"), {(0, k): c for k, c in upoly.items()}, caps=caps)
    pref_u = MultiSeries(
        ("q", "u"), {(0, ue): c for (_, ue), c in s.prefactor.coeffs.items()}, caps=caps
    )
    return merged * coc_u * pref_u


# ---------------------------------------------------------------------------
# localization rank check


@dataclass
class LocalizationReport:
    degree_bound: int
    upstairs: list
    downstairs: list
    ranks: list

    @property
    def ok(self):
        return all(
            r == a == b
            for r, a, b in zip(self.ranks, self.upstairs, self.downstairs)
        )


def localized_transition_rank(space, h, hp, degree_bound=8, wmax=None):
    """Rank of the induced restriction on cohomology, degree by degree.

    The transition is a bijection on the inverted-parameter modules, so
    on each truncated degree the induced map must hit all of the target
    cohomology; the report records both sides' dimensions and the rank.
    """
    if wmax is None:
        wmax = degree_bound
    h = _angle_pair(h)
    hp = _angle_pair(hp)
    fx = fixed_locus(space, h)
    fxp = fixed_locus(space, hp)
    if not set(fxp) <= set(fx):
        raise ValueError("target fixed locus is not contained in the source one")
    ws = tuple(space.weights[j] for j in fx)
    wsp = tuple(space.weights[j] for j in fxp)
    _, ukeys, ucoc, ubnd = _chain_data(ws, degree_bound, wmax)
    worldp, dkeys, dcoc, dbnd = _chain_data(wsp, degree_bound, wmax)
    world = _world(len(ws))
    pos = {j: i for i, j in enumerate(fx)}
    images = {"u0": worldp.gen("u0")}
    for newi, j in enumerate(fxp):
        oldi = pos[j]
        for r in (1, 2):
            images[f"x{2 * oldi + r}"] = worldp.gen(f"x{2 * newi + r}")
            images[f"dx{2 * oldi + r}"] = worldp.gen(f"dx{2 * newi + r}")
    up_dims, down_dims, ranks = [], [], []
    for deg in range(degree_bound + 1):
        up_dims.append(len(ucoc[deg]) - _rank_of(ubnd[deg], len(ukeys[deg])))
        down_dims.append(len(dcoc[deg]) - _rank_of(dbnd[deg], len(dkeys[deg])))
        dst = {k: i for i, k in enumerate(dkeys[deg])}
        restricted = []
        for v in ucoc[deg]:
            el = GradedElement(world, {k: c for k, c in zip(ukeys[deg], v) if c})
            img = substitute(el, worldp, images)
            col = [Fraction(0)] * len(dkeys[deg])
            for k, c in img.coeffs.items():
                col[dst[k]] = c
            restricted.append(col)
        b_rank = _rank_of(dbnd[deg], len(dkeys[deg]))
        joint = _rank_of(restricted + dbnd[deg], len(dkeys[deg]))
        ranks.append(joint - b_rank)
    return LocalizationReport(degree_bound, up_dims, down_dims, ranks)


# ---------------------------------------------------------------------------
# finite-group sectors


@dataclass(frozen=True)
class FiniteGroupTable:
    """Finite group given by its multiplication table, validated at load."""

    order: int
    mul: tuple
    names: tuple = None

    def __post_init__(self):
        n = self.order
        mul = tuple(tuple(int(x) for x in row) for row in self.mul)
        object.__setattr__(self, "mul", mul)
        if len(mul) != n or any(len(row) != n for row in mul):
            raise ValueError("multiplication table has the wrong shape")
        if any(x < 0 or x >= n for row in mul for x in row):
            raise ValueError("multiplication table entry out of range")
        e = None
        for cand in range(n):
            if all(mul[cand][x] == x and mul[x][cand] == x for x in range(n)):
                e = cand
                break
        if e is None:
            raise ValueError("multiplication table has no identity")
        object.__setattr__(self, "e", e)
        for a in range(n):
            if not any(mul[a][b] == e and mul[b][a] == e for b in range(n)):
                raise ValueError("multiplication table has a non-invertible element")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                        raise ValueError("multiplication table is not associative")
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"g{a}" for a in range(n)))

    @classmethod
    def from_json(cls, data):
        return cls(int(data["order"]), tuple(tuple(r) for r in data["mul"]))

    def inv(self, a):
        for b in range(self.order):
            if self.mul[a][b] == self.e:
                return b
        raise AssertionError("validated table lost an inverse")


def _reduce_word(word):
    out = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


@dataclass
class OrbitInfo:
    representative: tuple
    pairs: int
    classes: int
    index: int
    stabilizer_words: tuple


@dataclass
class SectorReport:
    order: int
    pair_count: int
    group_class_count: int
    burnside_ok: bool
    class_count: int
    orbits: tuple


def finite_sectors(table):
    """Commuting pairs, conjugation classes, and modular orbits with stabilizers.

    The two modular generators act by (a, b) -> (b, a^-1) and
    (a, b) -> (a, ab); they descend to conjugation classes of pairs.  The
    stabilizer of an orbit representative is generated by the tree words
    of the orbit traversal (letters act right to left, lowercase means
    inverse), and its index equals the orbit size on classes.
    """
    n = table.order
    mul = table.mul
    inv = [table.inv(a) for a in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(n) if mul[a][b] == mul[b][a]]

    group_classes = set()
    for a in range(n):
        group_classes.add(min(mul[mul[g][a]][inv[g]] for g in range(n)))
    group_class_count = len(group_classes)

    def conj_class(p):
        a, b = p
        return min((mul[mul[g][a]][inv[g]], mul[mul[g][b]][inv[g]]) for g in range(n))

    class_of = {p: conj_class(p) for p in pairs}
    class_sizes = {}
    for p in pairs:
        class_sizes[class_of[p]] = class_sizes.get(class_of[p], 0) + 1
    reps = sorted(class_sizes)

    def act(letter, p):
        a, b = p
        if letter == "S":
            return (b, inv[a])
        if letter == "s":
            return (inv[b], a)
        if letter == "T":
            return (a, mul[a][b])
        return (a, mul[inv[a]][b])

    def act_class(letter, rep):
        return class_of[act(letter, rep)]

    seen = set()
    orbits = []
    for start in reps:
        if start in seen:
            continue
        transversal = {start: ""}
        queue = [start]
        words = []
        while queue:
            x = queue.pop(0)
            for letter in "STst":
                y = act_class(letter, x)
                if y not in transversal:
                    transversal[y] = letter + transversal[x]
                    queue.append(y)
                else:
                    back = transversal[y][::-1].swapcase()
                    w = _reduce_word(back + letter + transversal[x])
                    if w:
                        words.append(w)
        seen.update(transversal)
        uniq = []
        for w in sorted(set(words), key=lambda w: (len(w), w)):
            if w[::-1].swapcase() not in uniq:
                uniq.append(w)
        for w in uniq:
            cls = start
            for letter in reversed(w):
                cls = act_class(letter, cls)
            if cls != start:
                raise AssertionError("stabilizer word fails to fix its orbit representative")
        orbit_classes = sorted(transversal)
        orbits.append(
            OrbitInfo(
                representative=start,
                pairs=sum(class_sizes[c] for c in orbit_classes),
                classes=len(orbit_classes),
                index=len(orbit_classes),
                stabilizer_words=tuple(uniq),
            )
        )

    return SectorReport(
        order=n,
        pair_count=len(pairs),
        group_class_count=group_class_count,
        burnside_ok=len(pairs) == n * group_class_count,
        class_count=len(reps),
        orbits=tuple(orbits),
    )
