"""Verification suites and table concordance, shared by the CLI and the tests.

Each check yields a record {name, verdict, residual_norm, ...}; a suite is a
list of such records in a fixed order so that reports are reproducible.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath as mp

from . import appb, constants, mirror, oscint
from .monodromy import INF, charpoly_distance, monodromy_rep
from .numeric import decimal_string, resolve_precision
from .pfode import sector_operator
from .sectors import spectrum

SUITES = ("oscint", "mirror", "yy", "appb")
CHARPOLY_TOL = mp.mpf(10) ** -30


def record(name: str, passed: bool, residual=None, **detail) -> dict:
    if isinstance(residual, (mp.mpf, mp.mpc)):
        residual = decimal_string(abs(residual), 10)
    elif residual is not None:
        residual = str(residual)
    return {"name": name, "verdict": "pass" if passed else "fail", "residual_norm": residual, **detail}


def failures(records) -> int:
    return sum(1 for r in records if r["verdict"] != "pass")


def _orders_json(orders):
    return ["inf" if o == INF else int(o) for o in orders]


# ---------------------------------------------------------------- spectrum


def spectrum_report(n: int) -> dict:
    spec = spectrum(n)
    counts = spec.as_dict()
    # beta runs over [0, n-1] and the spectrum is symmetric under beta -> n-1-beta
    symmetric = all(counts.get(n - 1 - b, 0) == c for b, c in counts.items())
    consistent = spec.total == n ** (n + 1) and symmetric
    out = {"n": n, "spectrum": spec.to_json(), "total": spec.total, "milnor_number": n ** (n + 1),
           "symmetric": symmetric, "consistent": consistent}
    printed = constants.load()["spectra"].get(n)
    if printed is not None:
        out["table_match"] = constants.spectrum(n) == counts
        out["consistent"] = consistent and out["table_match"]
    return out


# ---------------------------------------------------------------- monodromy concordance


def _charpoly_records(pairs, precision: int) -> tuple[bool, dict]:
    dist = {}
    for name, printed, numeric in pairs:
        dist[name] = charpoly_distance(printed, numeric, precision)
    ok = all(d < CHARPOLY_TOL for d in dist.values())
    return ok, {k: decimal_string(v, 5) for k, v in dist.items()}


def monodromy_concordance(row: "constants.MonodromyRow", precision: int | None = None) -> dict:
    """Numeric signature and char polys of (M0, Minf) against one printed row."""
    prec = resolve_precision(precision)
    rep = monodromy_rep(row.operator, precision=prec)
    T0, Tinf = row.matrices(prec)
    ok_cp, dist = _charpoly_records([("T0", T0, rep.M0), ("Tinf", Tinf, rep.Minf)], prec)
    sig_ok = rep.orders == row.group
    return record(f"quartic[{row.label}]", sig_ok and ok_cp, max(charpoly_distance(T0, rep.M0, prec),
                                                               charpoly_distance(Tinf, rep.Minf, prec)),
                  signature=_orders_json(rep.orders), printed_signature=_orders_json(row.group),
                  signature_match=sig_ok, charpoly_distance=dist,
                  relation_residual=decimal_string(rep.relation_residual, 5))


def monodromy_row(m) -> "constants.MonodromyRow | None":
    key = sorted(int(x) for x in m)
    for row in constants.quartic_monodromy():
        if row.m is not None and sorted(row.m) == key:
            return row
    return None


def cubic_concordance(precision: int | None = None) -> dict:
    prec = resolve_precision(precision)
    cub = constants.load()["cubic"]
    op = sector_operator(2, (0, 0, 0))
    rep = monodromy_rep(op, precision=prec)
    mats = [(k, constants.printed_matrix(cub[k], prec), M)
            for k, M in (("T0", rep.M0), ("T1", rep.M1), ("Tinf", rep.Minf))]
    ok_cp, dist = _charpoly_records(mats, prec)
    group = constants.group(cub["group"])
    return record("cubic[000]", ok_cp and rep.orders == group and op == constants.operator(cub),
                  max(charpoly_distance(p, M, prec) for _, p, M in mats),
                  signature=_orders_json(rep.orders), printed_signature=_orders_json(group),
                  charpoly_distance=dist)


# ---------------------------------------------------------------- suites


def suite_oscint(precision: int | None = None) -> list[dict]:
    prec = resolve_precision(precision)
    rows = oscint.sweep(precision=prec)
    worst = max(r["error"] for r in rows)
    out = [record("two_path", worst < mp.mpf(10) ** -40, worst, cases=len(rows))]
    checked, fails = oscint.chi_identity_table(literal=True)
    out.append(record("chi_identity_literal", not fails, len(fails), checked=checked))
    checked, fails = oscint.chi_identity_table(literal=False)
    out.append(record("chi_identity_sqrt3", not fails, len(fails), checked=checked))
    ok = True
    worst_im = mp.mpf(0)
    for m in ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 1)):
        try:
            vals = oscint.cubic_real_structure(mp.mpc(0.3, 0.7), m, prec)
        except AssertionError:
            ok = False
            continue
        worst_im = max([worst_im] + [abs(mp.im(v)) for v in vals.values()])
    out.append(record("real_structure", ok and worst_im < mp.mpf(10) ** -40, worst_im))
    return out


def suite_mirror(trunc: int = 20) -> list[dict]:
    out = []
    I = mirror.i_function_quartic(trunc)
    q = mirror.qde_check(I)
    out.append(record("qde", q.verdict, q.residual_norm, ideal_term=q.detail["ideal_term"]))
    f = mirror.f_coefficients(trunc)
    h = mirror.hypergeometric_3f2_coefficients(trunc)
    eps0 = [I.eps_series(d)[0] for d in range(trunc + 1)]
    out.append(record("f_hypergeometric", f == h == eps0, 0 if f == h == eps0 else 1))
    mm = mirror.mirror_map_quartic(trunc)
    again = mirror.mirror_map_quartic(trunc + 5).t_coeffs[:trunc + 1]
    periods = mirror.mirror_map_from_periods(trunc)
    closed = mirror.series_divide(mirror.g_coefficients(trunc), mirror.f_coefficients(trunc), trunc)
    ok = list(mm.t_coeffs) == list(again) == periods == closed
    out.append(record("mirror_map", ok, 0 if ok else 1, t1=str(mm.t_coeffs[1])))
    split = mirror.minimal_split_check(6)
    out.append(record("i_tw_minimal_split", split.verdict, split.residual_norm))
    mx = mirror.maximal_quotient_report(12)
    out.append(record("i_tw_maximal", mx.verdict, mx.residual_norm,
                      representatives=mx.detail["representatives"]))
    census = mirror.chen_ruan_census()
    expected = constants.load()["chen_ruan_dimension"]
    ok = census["total"] == expected == spectrum(3).total
    out.append(record("chen_ruan", ok, abs(census["total"] - expected), total=census["total"]))
    return out


def suite_yy(trunc: int = 20) -> list[dict]:
    r = mirror.yy_check(trunc)
    out = []
    for label, block, key in (("relation_1_literal", "literal", "1"), ("relation_1_wronskian", "corrected", "1"),
                              ("relation_2", "corrected", "2"), ("relation_3_literal", "literal", "3"),
                              ("relation_3_corrected", "corrected", "3")):
        s = r[block][key]
        out.append(record(label, s["zero"], s["residual_norm"], first_nonzero=s["first_nonzero"]))
    out.append(record("closure", r["closure_pass"],
                      max((Fraction(v["residual_norm"]) for v in r["closure"].values()), default=0)))
    out.append(record("constants", r["C_at_0"] == "5" and r["I0_z1"] == "120", 0))
    return out


def suite_appb(precision: int | None = None) -> list[dict]:
    return [c.to_json() for c in appb.run_all(precision)]


def run_suite(name: str, precision: int | None = None) -> list[dict]:
    if name == "oscint":
        return suite_oscint(precision)
    if name == "mirror":
        return suite_mirror()
    if name == "yy":
        return suite_yy()
    if name == "appb":
        return suite_appb(precision)
    raise ValueError(f"unknown suite {name!r}")


def run_suites(names, precision: int | None = None, jobs: int = 1) -> dict:
    """Run suites (optionally in worker processes); the result order follows names."""
    names = list(names)
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
            results = list(pool.map(run_suite, names, [precision] * len(names)))
    else:
        results = [run_suite(n, precision) for n in names]
    return dict(zip(names, results))

