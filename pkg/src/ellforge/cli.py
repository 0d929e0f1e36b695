"""Command-line surface: q-expansion emitters, check suites, JSON round-trips.

Every subcommand prints either an aligned coefficient table or, with
--json, one line of canonical JSON (sorted keys, no whitespace) so that
identical flags and seed produce identical bytes.  Exit codes: 0 for
success, 1 for a failed check, 2 for usage or input errors.
"""

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .equivderham import (
    basic_subspace,
    cartan_cohomology,
    su2,
    u1,
    u2,
    weil_relations_report,
)
from .euler import (
    anomaly_factorization_ok,
    corrected_euler,
    g2_anomaly,
    g2_free_certificate,
    linear_anomaly,
    twisted_euler,
    whitney_defect,
)
from .fermion import (
    SectorDatum,
    looijenga_check,
    pf_closed,
    pf_truncated_ratio,
    vacuum_character,
    vacuum_character_product,
    weyl_invariant,
)
from .modforms import Lattice, check_weight, delta_q, eisenstein_lattice, eisenstein_q
from .series import Gaussian, MultiSeries, TruncatedSeries
from .sheafmodel import (
    CircleActionSpace,
    FiniteGroupTable,
    completion_map,
    finite_sectors,
    local_sections,
    localized_transition_rank,
    make_section,
    sigma_section,
    transition,
)
from .sigma import (
    fgl_from_coordinate,
    group_law_check,
    sigma_exponential,
    sigma_product,
    taylor_completion,
)

_GROUPS = {"u1": u1, "su2": su2, "u2": u2}


# ---------------------------------------------------------------------------
# formatting


def _sig17(x) -> str:
    return f"{float(x):.17g}"


def _scalar_json(c):
    if isinstance(c, TruncatedSeries):
        return c.to_json()
    if isinstance(c, Gaussian):
        return [str(c.re), str(c.im)]
    if isinstance(c, (int, Fraction)):
        return str(c)
    z = complex(c)
    return [_sig17(z.real), _sig17(z.imag)]


def _series_json(ms: MultiSeries) -> dict:
    out = {
        "vars": list(ms.vars),
        "terms": [[list(e), _scalar_json(c)] for e, c in sorted(ms.coeffs.items())],
    }
    if ms.caps is not None:
        out["caps"] = list(ms.caps)
    if ms.total is not None:
        out["total"] = ms.total
    return out


def _element_json(el) -> list:
    return [
        [[list(e), list(o)], str(c)] for (e, o), c in sorted(el.coeffs.items())
    ]


def _scalar_text(c) -> str:
    if isinstance(c, Gaussian):
        if c.im == 0:
            return str(c.re)
        if c.re == 0:
            return f"{c.im}i"
        sign = "+" if c.im > 0 else "-"
        return f"{c.re}{sign}{abs(c.im)}i"
    return str(c)


def _mono_text(names, exps) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return " ".join(parts) if parts else "1"


def _element_text(el) -> str:
    world = el.world
    enames = [n for n, _ in world.evens]
    onames = [n for n, _ in world.odds]
    parts = []
    for (e, o), c in sorted(el.coeffs.items()):
        mono = _mono_text(enames, e)
        odd = " ".join(onames[i] for i in o)
        label = " ".join(x for x in (mono if mono != "1" or odd else "1", odd) if x)
        parts.append(f"({c})*{label}" if label != "1" else f"({c})")
    return " + ".join(parts) if parts else "0"


def _print_table(headers, rows):
    cols = len(headers)
    widths = [len(headers[i]) for i in range(cols)]
    for r in rows:
        for i in range(cols):
            widths[i] = max(widths[i], len(r[i]))
    print("  ".join(headers[i].ljust(widths[i]) for i in range(cols)).rstrip())
    for r in rows:
        print("  ".join(r[i].ljust(widths[i]) for i in range(cols)).rstrip())


def _emit_json(payload) -> int:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    return 0


def _reemit(args):
    """Re-ingest previously emitted JSON and print it back canonically."""
    if not args.json:
        print("error: --from requires --json", file=sys.stderr)
        return 2
    try:
        with open(args.from_file) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _emit_json(payload)


def _grid(ms: MultiSeries, row_idx, q_idx):
    """Rows labelled by the non-q exponents, one column per q power."""
    names = ms.vars
    qmax = 0
    table = {}
    for e, c in ms.coeffs.items():
        rkey = tuple(e[i] for i in row_idx)
        qe = e[q_idx]
        qmax = max(qmax, qe)
        table.setdefault(rkey, {})[qe] = c
    headers = ["term"] + [f"q^{n}" for n in range(qmax + 1)]
    rows = []
    rnames = [names[i] for i in row_idx]
    for rkey in sorted(table):
        cells = [_mono_text(rnames, rkey)]
        for n in range(qmax + 1):
            c = table[rkey].get(n)
            cells.append(_scalar_text(c) if c is not None else "0")
        rows.append(cells)
    return headers, rows


def _qseries_grid(ms: MultiSeries, qorder):
    """Same layout when the coefficients are themselves q-series."""

    def qc(c, n):
        if isinstance(c, TruncatedSeries):
            return c.coeff(n)
        return c if n == 0 else Fraction(0)

    headers = ["term"] + [f"q^{n}" for n in range(qorder + 1)]
    rows = []
    for e in sorted(ms.coeffs):
        c = ms.coeffs[e]
        cells = [_mono_text(ms.vars, e)]
        for n in range(qorder + 1):
            cells.append(_scalar_text(qc(c, n)))
        rows.append(cells)
    return headers, rows


# ---------------------------------------------------------------------------
# emitters


def _cmd_modforms(args):
    if args.from_file:
        return _reemit(args)
    if args.delta:
        series, label, weight = delta_q(args.qorder), "Delta", 12
    else:
        if args.k < 4 or args.k % 2:
            print("error: --k takes an even integer >= 4", file=sys.stderr)
            return 2
        series, label, weight = eisenstein_q(args.k, args.qorder), f"G{args.k}", args.k
    payload = {
        "command": "modforms",
        "label": label,
        "weight": weight,
        "qorder": args.qorder,
        "series": series.to_json(),
    }
    if args.json:
        return _emit_json(payload)
    print(f"{label} q-expansion, weight {weight}, order {args.qorder}")
    _print_table(
        ["n", "coefficient"],
        [[str(e), str(series.coeff(e))] for e in range(args.qorder + 1)],
    )
    return 0


def _cmd_sigma(args):
    if args.from_file:
        return _reemit(args)
    build = sigma_product if args.form == "product" else sigma_exponential
    ms = build(args.qorder, args.zorder)
    payload = {
        "command": "sigma",
        "form": args.form,
        "qorder": args.qorder,
        "zorder": args.zorder,
        "series": _series_json(ms),
    }
    if args.json:
        return _emit_json(payload)
    print(f"sigma {args.form} form, q-order {args.qorder}, z-order {args.zorder}")
    headers, rows = _grid(ms, (1,), 0)
    _print_table(headers, rows)
    return 0


def _cmd_fgl(args):
    if args.from_file:
        return _reemit(args)
    fgl = fgl_from_coordinate(args.coordinate, args.degree, args.qorder)
    payload = {"command": "fgl"}
    payload.update(fgl.to_json())
    if args.json:
        return _emit_json(payload)
    print(f"formal group law, {args.coordinate} coordinate, degree {args.degree}, q-order {args.qorder}")
    headers, rows = _qseries_grid(fgl_table_as_xy(fgl), args.qorder)
    _print_table(headers, rows)
    return 0


def fgl_table_as_xy(fgl) -> MultiSeries:
    """Collapse the (x, y, q) table to (x, y) with q-series coefficients."""
    out = {}
    for (a, b, e), c in fgl.table.coeffs.items():
        out.setdefault((a, b), {})[e] = c
    coeffs = {
        k: TruncatedSeries("q", fgl.qorder, v) for k, v in sorted(out.items())
    }
    return MultiSeries(("x", "y"), coeffs, total=fgl.degree)


def _cmd_fermion(args):
    if args.from_file:
        return _reemit(args)
    ms = vacuum_character(args.rank, args.qorder, args.zorder)
    payload = {
        "command": "fermion",
        "rank": args.rank,
        "qorder": args.qorder,
        "zorder": args.zorder,
        "character": _series_json(ms),
    }
    if args.json:
        return _emit_json(payload)
    print(f"vacuum character, rank {args.rank}, q-order {args.qorder}, z-order {args.zorder}")
    headers, rows = _grid(ms, tuple(range(1, args.rank + 1)), 0)
    _print_table(headers, rows)
    return 0


def _cmd_euler(args):
    if args.from_file:
        return _reemit(args)
    m, deg, qo = args.roots, args.nilpotency, args.qorder
    tw = twisted_euler(m, deg, qo)
    co = corrected_euler(m, deg, qo)
    lin = linear_anomaly(m, deg, qo)
    g2a = g2_anomaly(m, deg, qo)
    payload = {
        "command": "euler",
        "roots": m,
        "nilpotency": deg,
        "qorder": qo,
        "twisted": _series_json(tw),
        "corrected": _series_json(co),
        "linear_anomaly": _series_json(lin),
        "g2_anomaly": _series_json(g2a),
        "factorization_exact": anomaly_factorization_ok(m, deg, qo),
    }
    if args.json:
        return _emit_json(payload)
    print(f"euler classes, roots {m}, nilpotency {deg}, q-order {qo}")
    for label, ms in (
        ("twisted", tw),
        ("corrected", co),
        ("linear anomaly", lin),
        ("g2 anomaly", g2a),
    ):
        print()
        print(label)
        headers, rows = _qseries_grid(ms, qo)
        _print_table(headers, rows)
    print()
    print(f"factorization exact: {'yes' if payload['factorization_exact'] else 'no'}")
    return 0


def _cmd_derham(args):
    if args.from_file:
        return _reemit(args)
    modes = [args.check_relations, args.cohomology, args.basic]
    if sum(1 for m in modes if m) != 1:
        print(
            "error: pick exactly one of --check-relations, --cohomology, --basic",
            file=sys.stderr,
        )
        return 2
    if args.check_relations or args.basic:
        if args.group is None:
            print("error: --group is required for this mode", file=sys.stderr)
            return 2
        alg = _GROUPS[args.group]()
    if args.check_relations:
        degree = args.degree if args.degree is not None else 6
        rep = weil_relations_report(alg, degree)
        payload = {
            "command": "derham",
            "mode": "relations",
            "group": args.group,
            "degree": degree,
            "d_squared_zero": rep.d_squared_zero,
            "contraction_squares_zero": rep.contraction_squares_zero,
            "contractions_anticommute": rep.contractions_anticommute,
            "d_commutes_with_lie": rep.d_commutes_with_lie,
            "bracket_sign": rep.bracket_sign,
            "mixed_relation_ok": rep.mixed_relation_ok,
            "ok": rep.ok,
        }
        if args.json:
            _emit_json(payload)
        else:
            print(f"differential relations for {args.group} up to degree {degree}")
            for key in (
                "d_squared_zero",
                "contraction_squares_zero",
                "contractions_anticommute",
                "d_commutes_with_lie",
                "mixed_relation_ok",
            ):
                print(f"  {key.replace('_', ' ')}: {'ok' if payload[key] else 'FAIL'}")
            print(f"  commutator sign: {rep.bracket_sign:+d}")
            print(f"  all relations: {'ok' if rep.ok else 'FAIL'}")
        return 0 if rep.ok else 1
    if args.cohomology:
        if not args.weights:
            print("error: --weights is required with --cohomology", file=sys.stderr)
            return 2
        weights = tuple(int(w) for w in args.weights.split(","))
        degree = args.degree if args.degree is not None else 8
        rep = cartan_cohomology(weights, degree)
        payload = {
            "command": "derham",
            "mode": "cohomology",
            "weights": list(weights),
            "degree": degree,
            "dims": rep.dims,
            "fixed_locus_positive": rep.fixed_locus_positive,
            "free_rank_one": rep.free_rank_one,
        }
        if args.json:
            return _emit_json(payload)
        print(f"circle-equivariant cohomology of C^{len(weights)}, weights {weights}")
        _print_table(
            ["degree", "dimension"],
            [[str(n), str(d)] for n, d in enumerate(rep.dims)],
        )
        print(f"zero weight present: {'yes' if rep.fixed_locus_positive else 'no'}")
        print(f"free of rank one: {'yes' if rep.free_rank_one else 'no'}")
        return 0
    degree = args.degree if args.degree is not None else 4
    basis = basic_subspace(alg, degree)
    payload = {
        "command": "derham",
        "mode": "basic",
        "group": args.group,
        "degree": degree,
        "dimension": len(basis),
        "basis": [_element_json(el) for el in basis],
    }
    if args.json:
        return _emit_json(payload)
    print(f"basic subspace of the {args.group} generator algebra, degree {degree}")
    print(f"dimension {len(basis)}")
    for el in basis:
        print(f"  {_element_text(el)}")
    return 0


def _cmd_sheaf(args):
    if args.from_file:
        return _reemit(args)
    if not args.sections:
        print("error: --sections is required", file=sys.stderr)
        return 2
    try:
        weights = tuple(int(w) for w in args.weights.split(","))
        ax, ay = (Fraction(part) for part in args.anchor.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    space = CircleActionSpace(weights)
    rep = local_sections(space, (ax, ay), args.degree)
    payload = {
        "command": "sheaf",
        "weights": list(weights),
        "anchor": [str(ax), str(ay)],
        "degree": args.degree,
        "fixed": list(rep.fixed),
        "cocycle_dims": rep.cocycle_dims,
        "cohomology_dims": rep.cohomology_dims,
        "basis": {
            str(deg): [_element_json(el) for el in els]
            for deg, els in sorted(rep.basis.items())
        },
    }
    if args.json:
        return _emit_json(payload)
    print(f"local sections at anchor ({ax}, {ay}), weights {weights}")
    print(f"fixed coordinates: {list(rep.fixed)}")
    _print_table(
        ["degree", "cocycles", "cohomology"],
        [
            [str(n), str(c), str(h)]
            for n, (c, h) in enumerate(zip(rep.cocycle_dims, rep.cohomology_dims))
        ],
    )
    return 0


def _cmd_sectors(args):
    if args.from_file:
        return _reemit(args)
    try:
        with open(args.group_table) as fh:
            data = json.load(fh)
        table = FiniteGroupTable.from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep = finite_sectors(table)
    payload = {
        "command": "sectors",
        "order": rep.order,
        "pair_count": rep.pair_count,
        "group_class_count": rep.group_class_count,
        "burnside_ok": rep.burnside_ok,
        "class_count": rep.class_count,
        "orbits": [
            {
                "representative": list(o.representative),
                "pairs": o.pairs,
                "classes": o.classes,
                "index": o.index,
                "stabilizer_words": list(o.stabilizer_words),
            }
            for o in rep.orbits
        ],
    }
    if args.json:
        return _emit_json(payload)
    print(f"group of order {rep.order}: {rep.pair_count} commuting pairs, "
          f"{rep.class_count} pair classes, {len(rep.orbits)} modular orbits")
    print(f"burnside check ({rep.order} x {rep.group_class_count} classes): "
          f"{'ok' if rep.burnside_ok else 'FAIL'}")
    _print_table(
        ["representative", "pairs", "classes", "index", "stabilizer"],
        [
            [
                str(o.representative),
                str(o.pairs),
                str(o.classes),
                str(o.index),
                " ".join(o.stabilizer_words[:4]),
            ]
            for o in rep.orbits
        ],
    )
    return 0 if rep.burnside_ok else 1


# ---------------------------------------------------------------------------
# check suites


@dataclass
class CheckReport:
    name: str
    status: str
    residuals: list
    parameters: dict
    runtime: float

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residuals": [_sig17(r) for r in self.residuals],
            "parameters": {k: str(v) for k, v in sorted(self.parameters.items())},
            "runtime": f"{self.runtime:.3f}",
        }


def _report(name, ok, residuals, parameters, started) -> CheckReport:
    return CheckReport(
        name,
        "pass" if ok else "fail",
        residuals,
        parameters,
        time.perf_counter() - started,
    )


def _suite_sigma_identity(seed, tol):
    t0 = time.perf_counter()
    ok = sigma_product(6, 8) == sigma_exponential(6, 8)
    return _report(
        "sigma-identity", ok, [0.0 if ok else 1.0],
        {"qorder": 6, "zorder": 8, "seed": seed}, t0,
    )


def _suite_fgl_axioms(seed, tol):
    t0 = time.perf_counter()
    fgl = fgl_from_coordinate("sigma", 6, 3)
    add = fgl_from_coordinate("additive", 3, 0)
    mul = fgl_from_coordinate("multiplicative", 3, 0)
    checks = [
        fgl.is_unital(),
        fgl.is_commutative(),
        fgl.is_associative(),
        sorted(add.table.coeffs) == [(0, 1, 0), (1, 0, 0)],
        sorted(mul.table.coeffs) == [(0, 1, 0), (1, 0, 0), (1, 1, 0)],
    ]
    bad = sum(1 for c in checks if not c)
    return _report(
        "fgl-axioms", bad == 0, [float(bad)],
        {"degree": 6, "qorder": 3, "seed": seed}, t0,
    )


def _suite_group_law(seed, tol):
    t0 = time.perf_counter()
    bound = tol if tol is not None else 1e-9
    rep = group_law_check(0.2, 0.1)
    ok = rep.residual < bound and abs(rep.slope - 11.0) <= 0.5
    return _report(
        "group-law", ok, [rep.residual],
        {"x": 0.2, "y": 0.1, "degree": 10, "slope": f"{rep.slope:.3f}", "seed": seed},
        t0,
    )


def _suite_pfaffian(seed, tol):
    t0 = time.perf_counter()
    bound = tol if tol is not None else 1e-3
    lat = Lattice(2j, 1.0)
    a = [SectorDatum(Fraction(1, 3))]
    b = [SectorDatum(Fraction(1, 4))]
    truncated = pf_truncated_ratio(a, b, lat, 200)
    closed = pf_closed(a, lat) / pf_closed(b, lat)
    rel = abs(truncated - closed) / abs(closed)
    trivial = pf_closed([SectorDatum(Fraction(0))], lat)
    ok = rel < bound and trivial == 0
    return _report(
        "pfaffian", ok, [rel, abs(trivial)],
        {"tau": "2i", "modes": 200, "seed": seed}, t0,
    )


def _suite_vacuum_character(seed, tol):
    t0 = time.perf_counter()
    ch = vacuum_character(2, 4, 4)
    ok = ch == vacuum_character_product(2, 4, 4) and weyl_invariant(ch)
    return _report(
        "vacuum-character", ok, [0.0 if ok else 1.0],
        {"rank": 2, "qorder": 4, "zorder": 4, "seed": seed}, t0,
    )


def _suite_looijenga(seed, tol):
    t0 = time.perf_counter()
    bound = tol if tol is not None else 1e-8
    rng = random.Random(seed)
    worst = 0.0
    ok = True
    for _ in range(3):
        lat = Lattice(complex(rng.uniform(-0.3, 0.3), rng.uniform(1.0, 1.8)), 1.0)
        datum = SectorDatum(
            Fraction(rng.randrange(1, 6), 7),
            Fraction(rng.randrange(-2, 3), 5),
            complex(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)),
        )
        for chk in looijenga_check(lat, datum, bound):
            worst = max(worst, chk.rel_err)
            ok = ok and chk.ok
    return _report("looijenga", ok, [worst], {"samples": 3, "seed": seed}, t0)


def _suite_euler_anomaly(seed, tol):
    t0 = time.perf_counter()
    cert = g2_free_certificate(corrected_euler(2, 3, 2), 2)
    checks = [
        anomaly_factorization_ok(2, 3, 2),
        cert.ok,
        whitney_defect(1, 1, 3, 2).is_zero(),
    ]
    bad = sum(1 for c in checks if not c)
    return _report(
        "euler-anomaly", bad == 0, [float(bad)],
        {"roots": 2, "nilpotency": 3, "qorder": 2, "seed": seed}, t0,
    )


def _suite_modularity(seed, tol):
    t0 = time.perf_counter()
    bound = tol if tol is not None else 1e-9
    chk = check_weight(
        lambda lat: eisenstein_lattice(4, lat, 40), 4, count=3, seed=seed, tol=bound
    )
    return _report(
        "modularity", chk.ok, [chk.max_rel],
        {"k": 4, "qorder": 40, "samples": chk.samples, "seed": seed}, t0,
    )


def _suite_derham(seed, tol):
    t0 = time.perf_counter()
    checks = [
        weil_relations_report(u1(), 4).ok,
        weil_relations_report(su2(), 4).ok,
        cartan_cohomology((1,), 4).dims == [1, 0, 1, 0, 1],
    ]
    bad = sum(1 for c in checks if not c)
    return _report(
        "derham", bad == 0, [float(bad)], {"degree": 4, "seed": seed}, t0
    )


def _suite_sheaf(seed, tol):
    t0 = time.perf_counter()
    sp = CircleActionSpace((1, 2))
    s = make_section(sp, (0, 0), truncation=4)
    half = Fraction(1, 2)
    chained = transition(
        sp, (half, 0), (half, half), transition(sp, (0, 0), (half, 0), s)
    )
    direct = transition(sp, (0, 0), (half, half), s)
    cocycle_ok = (
        chained.twist == direct.twist and chained.cocycle == direct.cocycle
    )
    comp = completion_map(sigma_section(3, 4))
    terms = taylor_completion(3, 4)
    comp_ok = all(
        comp.coeff_in("u", k).as_univariate().coeff(n) == terms[k].series.coeff(n)
        for k in range(len(terms))
        for n in range(4)
    )
    loc = localized_transition_rank(
        CircleActionSpace((1,)), (0, 0), (Fraction(1, 3), 0), degree_bound=4
    )
    checks = [cocycle_ok, comp_ok, loc.ok]
    bad = sum(1 for c in checks if not c)
    return _report(
        "sheaf", bad == 0, [float(bad)], {"degree": 4, "seed": seed}, t0
    )


def _suite_sectors(seed, tol):
    t0 = time.perf_counter()
    z2 = finite_sectors(FiniteGroupTable(2, ((0, 1), (1, 0))))
    import itertools

    perms = sorted(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    mul = tuple(
        tuple(idx[tuple(p[q[i]] for i in range(3))] for q in perms) for p in perms
    )
    s3 = finite_sectors(FiniteGroupTable(6, mul))
    checks = [
        z2.pair_count == 4,
        len(z2.orbits) == 2,
        max(o.index for o in z2.orbits) == 3,
        s3.pair_count == 18,
        s3.burnside_ok,
    ]
    bad = sum(1 for c in checks if not c)
    return _report("sectors", bad == 0, [float(bad)], {"seed": seed}, t0)


_SUITES = {
    "sigma-identity": _suite_sigma_identity,
    "fgl-axioms": _suite_fgl_axioms,
    "group-law": _suite_group_law,
    "pfaffian": _suite_pfaffian,
    "vacuum-character": _suite_vacuum_character,
    "looijenga": _suite_looijenga,
    "euler-anomaly": _suite_euler_anomaly,
    "modularity": _suite_modularity,
    "derham": _suite_derham,
    "sheaf": _suite_sheaf,
    "sectors": _suite_sectors,
}


def _thread_cap() -> int:
    raw = os.environ.get("ELLFORGE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def run_checks(names, seed, tol):
    """Run the requested suites, in parallel when ELLFORGE_THREADS allows."""
    cap = min(_thread_cap(), len(names))
    if cap > 1:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            return list(pool.map(lambda n: _SUITES[n](seed, tol), names))
    return [_SUITES[n](seed, tol) for n in names]


def _cmd_check(args):
    if args.list:
        for name in _SUITES:
            print(name)
        return 0
    if args.suite is not None and args.suite not in _SUITES:
        print(f"error: unknown suite '{args.suite}'", file=sys.stderr)
        print("known suites: " + ", ".join(_SUITES), file=sys.stderr)
        return 2
    names = [args.suite] if args.suite else list(_SUITES)
    reports = run_checks(names, args.seed, args.tol)
    if args.json:
        _emit_json({"command": "check", "seed": args.seed,
                    "reports": [r.to_json() for r in reports]})
    else:
        for r in reports:
            worst = max(r.residuals) if r.residuals else 0.0
            print(
                f"{r.name}: {r.status.upper()}  residual {_sig17(worst)}  "
                f"seed {args.seed}  ({r.runtime:.2f}s)"
            )
        failed = sum(1 for r in reports if r.status != "pass")
        print(f"{len(reports) - failed}/{len(reports)} suites passed")
    return 0 if all(r.status == "pass" for r in reports) else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellforge",
        description="q-expansions, equivariant cocycles, and identity checks",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="canonical JSON output")
    common.add_argument("--seed", type=int, default=0, help="sampling seed")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument(
        "--from", dest="from_file", metavar="FILE", default=None,
        help="re-emit a previously saved JSON payload",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modforms", parents=[common], help="Eisenstein and Delta q-expansions")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--qorder", type=int, default=10)
    p.add_argument("--delta", action="store_true")

    p = sub.add_parser("sigma", parents=[common], help="sigma function double expansion")
    p.add_argument("--qorder", type=int, default=4)
    p.add_argument("--zorder", type=int, default=6)
    p.add_argument("--form", choices=["product", "exponential"], default="product")

    p = sub.add_parser("fgl", parents=[common], help="formal group law coefficients")
    p.add_argument("--coordinate", choices=["additive", "multiplicative", "sigma"], required=True)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--qorder", type=int, default=4)

    p = sub.add_parser("fermion", parents=[common], help="vacuum character table")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--qorder", type=int, default=4)
    p.add_argument("--zorder", type=int, default=4)

    p = sub.add_parser("euler", parents=[common], help="twisted and corrected Euler classes")
    p.add_argument("--roots", type=int, required=True)
    p.add_argument("--nilpotency", type=int, required=True)
    p.add_argument("--qorder", type=int, default=2)

    p = sub.add_parser("derham", parents=[common], help="differential relations and cohomology")
    p.add_argument("--group", choices=sorted(_GROUPS))
    p.add_argument("--check-relations", action="store_true")
    p.add_argument("--cohomology", action="store_true")
    p.add_argument("--basic", action="store_true")
    p.add_argument("--weights")
    p.add_argument("--degree", type=int, default=None)

    p = sub.add_parser("sheaf", parents=[common], help="local section bases at an anchor")
    p.add_argument("--weights", required=True)
    p.add_argument("--anchor", required=True, help="rational pair, e.g. 1/2,0")
    p.add_argument("--sections", action="store_true")
    p.add_argument("--degree", type=int, default=6)

    p = sub.add_parser("sectors", parents=[common], help="commuting pairs and modular orbits")
    p.add_argument("--group-table", required=True, metavar="FILE")

    p = sub.add_parser("check", parents=[common], help="run identity check suites")
    p.add_argument("suite", nargs="?")
    p.add_argument("--list", action="store_true")

    return parser


_HANDLERS = {
    "modforms": _cmd_modforms,
    "sigma": _cmd_sigma,
    "fgl": _cmd_fgl,
    "fermion": _cmd_fermion,
    "euler": _cmd_euler,
    "derham": _cmd_derham,
    "sheaf": _cmd_sheaf,
    "sectors": _cmd_sectors,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
