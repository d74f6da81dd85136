"""Reference checks run by ``reproduce-paper`` and the acceptance tests.

Each ``check_*`` function returns a list of :class:`Check` rows with the
expected value, the observed value and a status: ``pass``, ``fail``,
``flagged`` (a known discrepancy in the reference data, reported with our
value) or ``skipped``.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Callable

from .analysis import (
    INF,
    ChannelModel,
    asymptotic_pl,
    beta,
    bias_polynomial,
    code_length,
    corollary_pl_bound,
    exact_beta,
    exhaustive_fractions,
    theorem1_beta_bound,
)
from .construction import build
from .enumerators import closed_form_counts, pure_logical_counts, undetectable_we
from .montecarlo import estimate_pl, threshold

# generators as printed; G4 of both codes prints Z13 where the X check needs X13
CYL_GENERATORS = [
    "X1 X7 X10", "X1 X2 X8 X11", "X2 X9 X12", "X3 X10 Z13", "X3 X4 X11 X14",
    "X4 X12 X15", "X5 X7 X13", "X5 X6 X8 X14", "X6 X9 X15", "Z1 Z5 Z7 Z8",
    "Z2 Z6 Z8 Z9", "Z1 Z3 Z10 Z11", "Z2 Z4 Z11 Z12", "Z3 Z5 Z13 Z14", "Z4 Z6 Z14 Z15",
]
MOB_CHANGED = {4: "X3 X12 Z13", 6: "X4 X10 X15", 12: "Z1 Z4 Z10 Z11", 13: "Z2 Z3 Z11 Z12"}
TYPO_FIXES = {"X3 X10 Z13": "X3 X10 X13", "X3 X12 Z13": "X3 X12 X13"}

PARAMETERS = [
    ("surface", 3, 3, "[[13,1,3]]"),
    ("surface", 5, 5, "[[41,1,5]]"),
    ("surface", 3, 5, "[[23,1,3/5]]"),
    ("cylindrical", 3, 3, "[[15,1,3]]"),
    ("cylindrical", 5, 5, "[[45,1,5]]"),
    ("cylindrical", 5, 3, "[[25,1,3/5]]"),
    ("moebius", 3, 3, "[[15,1,3]]"),
    ("moebius", 5, 5, "[[45,1,5]]"),
    ("moebius", 5, 3, "[[25,1,3/5]]"),
]

L_REFERENCE = {
    ("cylindrical", 3, 3): (3, [6, 18, 66, 228, 678, 1836, 4236, 7920, 11274, 11442, 7746, 3132, 570]),
    ("surface", 3, 3): (3, [6, 24, 75, 240, 648, 1440, 2538, 3216, 2634, 1224, 243]),
    ("moebius", 3, 3): (3, [4, 18, 60, 220, 666, 1836, 4288, 7968, 11280, 11378, 7668, 3156, 610]),
}

BETA2_REFERENCE = {
    ("cylindrical", 1): 0.85,
    ("cylindrical", INF): 0.91,
    ("moebius", 1): 0.82,
    ("moebius", INF): 0.97,
}

# fraction tables; None marks an entry suspected to be a copy error in the reference
FRACTION_REFERENCE = {
    ("cylindrical", 3, 3, 2): [0.257, 0, 0.257, 0.086, 0.086, 0.343],
    ("moebius", 3, 3, 2): [0.371, 0, 0.371, 0.029, 0.029, 0.400],
    ("cylindrical", 5, 3, 2): [0.150, 0, 0.150, 0, 0, 0.150],
    ("moebius", 5, 3, 2): [0.150, 0, 0.150, 0, 0, 0.150],
    ("cylindrical", 5, 3, 3): [0.384, 0.150, 0.384, 0, 0.150, 0.384, 0.013, 0.013, 0.163, 0.397],
    ("moebius", 5, 3, 3): [0.396, 0.150, 0.396, 0, 0.150, 0.396, 0.004, 0.004, 0.154, 0.401],
    ("cylindrical", 5, 5, 3): [0.019, 0, 0.019, 0, 0, 0.019, 0.004, 0.004, 0.004, 0.023],
    ("moebius", 5, 5, 3): [0.025, 0, 0.025, 0, 0.150, 0.0251, 7e-4, 7e-4, 7e-4, 0.401],
}
SUSPECT_ENTRIES = {("moebius", 5, 5, 3): {"XZY", "YYY"}}

ONE_MINUS_BETA2 = {
    ("surface", 3, 3): [0.24, 0.233, 0.265, 0.270],
    ("cylindrical", 3, 3): [0.15, 0.080, 0.084, 0.091],
    ("moebius", 3, 3): [0.18, 0.034, 0.028, 0.029],
}
BIAS_COLUMNS = (1, 10, 100, INF)

BIAS_POLY_REFERENCE = (1.114, 0.172, 0.086)  # constant, A, A^2

BOUND_CURVE_P = 0.001
BOUND_CURVE_REFERENCE = [
    ("cylindrical", 7, 0.1, 2.63875157470403e-09),
    ("cylindrical", 7, 1000, 2.44023419302082e-10),
    ("moebius", 7, 0.1, 3.83231490479795e-09),
    ("moebius", 7, 1000, 3.48604885385317e-11),
    ("cylindrical", 9, 1000, 1.12835260088642e-12),
    ("moebius", 9, 1000, 1.2537251117733e-13),
    ("cylindrical", 11, 1000, 5.05164467757047e-15),
    ("moebius", 11, 0.1, 1.17569808964991e-13),
    ("moebius", 11, 1000, 4.59240421243802e-16),
]

MC_REFERENCE = [("depolarizing", 1, 1.585e-3), ("phase flip", INF, 9.1e-4)]

THRESHOLDS = {1: 0.14, 10: 0.12, INF: 0.10}
THRESHOLD_GRID = (0.06, 0.08, 0.10, 0.12, 0.14, 0.16, 0.18, 0.20)


@dataclass
class Check:
    criterion: int
    name: str
    expected: Any
    observed: Any
    status: str
    note: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = asdict(self)
        out["expected"] = _jsonable(self.expected)
        out["observed"] = _jsonable(self.observed)
        return out


def _jsonable(v: Any) -> Any:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _a_label(a: float) -> str:
    return "inf" if a == INF else f"{a:g}"


_TABLE_CACHE: dict = {}


def fraction_table(family: str, lc: int, lf: int, j: int, tie_break: str = "lex", workers: int = 1):
    key = (family, lc, lf, j, tie_break)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = exhaustive_fractions(build(family, lc, lf), j, tie_break=tie_break, workers=workers)
    return _TABLE_CACHE[key]


def check_generators() -> list[Check]:
    t0 = time.perf_counter()
    cyl = [g.label() for g in build("cylindrical", 3, 3).generators()]
    mob = [g.label() for g in build("moebius", 3, 3).generators()]
    printed = [TYPO_FIXES.get(g, g) for g in CYL_GENERATORS]
    changed = {i + 1 for i, (a, b) in enumerate(zip(cyl, mob)) if a != b}
    mob_expected = {k: TYPO_FIXES.get(v, v) for k, v in MOB_CHANGED.items()}
    mob_ok = changed == set(MOB_CHANGED) and all(mob[k - 1] == v for k, v in mob_expected.items())
    dt = time.perf_counter() - t0
    return [
        Check(1, "cylindrical(3,3) generators", printed, cyl, _status(cyl == printed and dt < 1),
              "G4 compared with its X13 correction", dt),
        Check(1, "moebius(3,3) changed generators", mob_expected, {k: mob[k - 1] for k in sorted(changed)},
              _status(mob_ok and dt < 1), "", dt),
    ]


def check_parameters() -> list[Check]:
    out = []
    t0 = time.perf_counter()
    for family, lc, lf, label in PARAMETERS:
        t = time.perf_counter()
        code = build(family, lc, lf)
        ok = code.name == label and code.distance_verified
        out.append(Check(2, f"{family}({lc},{lf})", label, code.name, _status(ok), "", time.perf_counter() - t))
    total = time.perf_counter() - t0
    out.append(Check(2, "parameter runtime", "< 60 s", round(total, 2), _status(total < 60), "", total))
    return out


def check_enumerators() -> list[Check]:
    out = []
    t0 = time.perf_counter()
    for (family, lc, lf), (start, ref) in L_REFERENCE.items():
        t = time.perf_counter()
        code = build(family, lc, lf)
        mac = undetectable_we(code, "macwilliams")
        direct = undetectable_we(code, "direct")
        expected = [0] * start + ref
        ok = list(mac) == expected and list(direct) == list(mac)
        out.append(Check(3, f"L(z) {family}{code.name}", expected, list(mac), _status(ok),
                         "direct and MacWilliams agree" if list(direct) == list(mac) else "paths disagree",
                         time.perf_counter() - t))
    total = time.perf_counter() - t0
    out.append(Check(3, "enumerator runtime", "< 10 s", round(total, 2), _status(total < 10), "", total))
    return out


def check_closed_forms() -> list[Check]:
    out = []
    for family in ("cylindrical", "moebius"):
        t = time.perf_counter()
        code = build(family, 3, 3)
        enum = undetectable_we(code)
        cf = closed_form_counts(family, 3)
        expected, observed = (cf.L_low, cf.L_low1), (enum[3], enum[4])
        out.append(Check(4, f"{family} d=3 (L3, L4)", expected, observed, _status(expected == observed),
                         "", time.perf_counter() - t))
    # sector split at d = 5, outside the criterion but reported
    for family in ("cylindrical", "moebius"):
        t = time.perf_counter()
        code = build(family, 5, 5)
        lx, lz = pure_logical_counts(code, "x"), pure_logical_counts(code, "z")
        cf = closed_form_counts(family, 5)
        expected = (cf.LX_low, cf.LZ_low, cf.LX_low1, cf.LZ_low1)
        observed = (lx[5], lz[5], lx[6], lz[6])
        status = "pass" if expected == observed else "flagged"
        note = "" if expected == observed else "closed form over-counts; the bound stays valid but looser"
        out.append(Check(4, f"{family} d=5 sector counts (LX5, LZ5, LX6, LZ6)", expected, observed, status,
                         note, time.perf_counter() - t))
    return out


def check_beta2(tie_break: str = "lex") -> list[Check]:
    out = []
    for (family, a), ref in BETA2_REFERENCE.items():
        t = time.perf_counter()
        table = fraction_table(family, 3, 3, 2, tie_break)
        exact = exact_beta(table, a)
        ok = abs(float(exact) - ref) <= 0.02
        out.append(Check(5, f"beta2 {family} A={_a_label(a)}", ref, round(float(exact), 4),
                         _status(ok), f"exact {exact}", time.perf_counter() - t))
    return out


def check_fraction_table(tie_break: str = "lex", skip_slow: bool = False, workers: int = 1) -> list[Check]:
    out = []
    for (family, lc, lf, j), ref in FRACTION_REFERENCE.items():
        name = f"fractions {family}({lc},{lf}) j={j}"
        if skip_slow and j == 3:
            out.append(Check(6, name, ref, None, "skipped", "slow sweep"))
            continue
        t = time.perf_counter()
        table = fraction_table(family, lc, lf, j, tie_break, workers)
        dt = time.perf_counter() - t
        observed = [round(float(v), 4) for v in table.by_label().values()]
        labels = list(table.by_label())
        suspects = SUSPECT_ENTRIES.get((family, lc, lf, j), set())
        bad = [lab for lab, e, o in zip(labels, ref, observed) if abs(e - o) > 0.03 and lab not in suspects]
        flagged = [lab for lab, e, o in zip(labels, ref, observed) if abs(e - o) > 0.03 and lab in suspects]
        limit = 600 if lc * lf >= 25 else 60
        if bad:
            status = "flagged" if tie_break != "lex" else "fail"
        elif flagged:
            status = "flagged"
        else:
            status = "pass"
        if dt > limit:
            status = "fail"
        note = []
        if bad:
            note.append(f"outside 0.03: {bad}")
        if flagged:
            note.append(f"suspect reference entries {flagged} reported with our values")
        out.append(Check(6, name, ref, observed, status, "; ".join(note), dt))
    for (family, lc, lf), ref in ONE_MINUS_BETA2.items():
        t = time.perf_counter()
        table = fraction_table(family, lc, lf, 2, tie_break)
        observed = [round(float(1 - exact_beta(table, a)), 4) for a in BIAS_COLUMNS]
        bad = [a for a, e, o in zip(BIAS_COLUMNS, ref, observed) if abs(e - o) > 0.02]
        status = "pass" if not bad else ("flagged" if tie_break != "lex" else "fail")
        out.append(Check(6, f"1-beta2(A) {family}({lc},{lf})", ref, observed, status,
                         f"outside 0.02 at A={bad}" if bad else "", time.perf_counter() - t))
    return out


def check_bias_polynomial(tie_break: str = "lex") -> list[Check]:
    t = time.perf_counter()
    coeffs = bias_polynomial(fraction_table("cylindrical", 3, 3, 2, tie_break))
    observed = [round(float(c), 4) for c in coeffs]
    ok = all(abs(o - e) <= 0.005 for o, e in zip(observed, BIAS_POLY_REFERENCE))
    return [Check(7, "1-beta2(A)(A+2)^2 coefficients [[15,1,3]] cylindrical", list(BIAS_POLY_REFERENCE), observed,
                  _status(ok), "exact " + ", ".join(str(c) for c in coeffs), time.perf_counter() - t)]


def bound_bias_grid() -> list[float]:
    return [10 ** (-1 + 3 * k / 29) for k in range(30)] + [1000.0]


def bound_curve_rows(distances=(3, 5, 7, 9, 11), p: float = BOUND_CURVE_P) -> list[dict]:
    rows = []
    for d in distances:
        for a in bound_bias_grid():
            for family in ("cylindrical", "moebius"):
                rows.append({"family": family, "d": d, "A": a, "p": p,
                             "bound": corollary_pl_bound(family, d, a, p)})
    return rows


def check_bounds(skip_slow: bool = False, workers: int = 1) -> list[Check]:
    out = []
    t = time.perf_counter()
    worst = 0.0
    for family, d, a, ref in BOUND_CURVE_REFERENCE:
        worst = max(worst, abs(corollary_pl_bound(family, d, a, BOUND_CURVE_P) / ref - 1))
    out.append(Check(8, "corollary bound vs plotted values", "rel err < 1e-6", worst, _status(worst < 1e-6),
                     "", time.perf_counter() - t))
    rows = bound_curve_rows()
    by_key = {(r["family"], r["d"], r["A"]): r["bound"] for r in rows}
    order_ok = all(
        by_key[("moebius", d, a)] < by_key[("cylindrical", d, a)]
        for d in (7, 9, 11) for a in bound_bias_grid() if a >= 10
    )
    out.append(Check(8, "moebius bound below cylindrical for A >= 10", True, order_ok, _status(order_ok)))
    sane = all(0 <= theorem1_beta_bound(f, d, ChannelModel.from_bias(0.01, a)) <= 1
               for f in ("cylindrical", "moebius") for d in (3, 5, 7, 9, 11) for a in (1, 10, INF))
    out.append(Check(8, "theorem bound within [0, 1]", True, sane, _status(sane)))
    cases = [(f, 3, 2) for f in ("cylindrical", "moebius")]
    if not skip_slow:
        cases += [(f, 5, 3) for f in ("cylindrical", "moebius")]
    for family, d, j in cases:
        t = time.perf_counter()
        table = fraction_table(family, d, d, j, "lex", workers)
        n, tt = code_length(family, d), (d - 1) // 2
        ok = True
        detail = []
        for a in (1, 10, INF):
            ch = ChannelModel.from_bias(BOUND_CURVE_P, a)
            b_exact = float(beta(table, ch))
            b_bound = theorem1_beta_bound(family, d, ch)
            exact_pl = asymptotic_pl(n, tt, b_exact, BOUND_CURVE_P)
            bound_pl = corollary_pl_bound(family, d, a, BOUND_CURVE_P)
            ok &= b_bound <= b_exact + 1e-12 and bound_pl >= exact_pl * (1 - 1e-12)
            detail.append(f"A={_a_label(a)}: beta {b_exact:.4f} >= {b_bound:.4f}, pL {exact_pl:.3e} <= {bound_pl:.3e}")
        out.append(Check(8, f"bound vs exhaustive {family} d={d}", "bound holds", ok, _status(ok),
                         "; ".join(detail), time.perf_counter() - t))
    if skip_slow:
        out.append(Check(8, "bound vs exhaustive d=5", "bound holds", None, "skipped", "slow sweep"))
    return out


def check_monte_carlo(skip_slow: bool = False, workers: int = 1, seed: int = 2024) -> list[Check]:
    out = []
    code = build("cylindrical", 3, 3)
    for (name, a, ref), s in zip(MC_REFERENCE, (seed, seed + 1)):
        label = f"Monte Carlo [[15,1,3]] cylindrical {name} p=0.01"
        if skip_slow:
            out.append(Check(9, label, ref, None, "skipped", "slow simulation"))
            continue
        t = time.perf_counter()
        rep = estimate_pl(code, ChannelModel.from_bias(0.01, a), seed=s, min_failures=300,
                          max_shots=3 * 10**6, workers=workers)
        sigma = (rep.ci_high - rep.ci_low) / (2 * 1.959964)
        dt = time.perf_counter() - t
        ok = abs(rep.p_l_hat - ref) <= 3 * sigma and rep.failures >= 300 and dt < 120
        out.append(Check(9, label, ref, rep.p_l_hat, _status(ok),
                         f"{rep.failures} failures / {rep.shots} shots, sigma {sigma:.2e}, seed {s}", dt))
    return out


def check_thresholds(skip_slow: bool = False, workers: int = 1, seed: int = 7,
                     shots: int = 10000) -> list[Check]:
    out = []
    start = time.perf_counter()
    for family in ("cylindrical", "moebius"):
        for a, ref in THRESHOLDS.items():
            label = f"threshold {family} A={_a_label(a)}"
            if skip_slow:
                out.append(Check(10, label, ref, None, "skipped", "slow simulation"))
                continue
            t = time.perf_counter()
            est = threshold(family, a, THRESHOLD_GRID, seed=seed, shots=shots, workers=workers)
            c = est.crossings[0]
            out.append(Check(10, label, ref, round(est.value, 4), _status(abs(est.value - ref) <= 0.02),
                             f"bracket {c.bracket}, {shots} shots per point, seed {seed}",
                             time.perf_counter() - t))
    if not skip_slow:
        total = time.perf_counter() - start
        out.append(Check(10, "threshold runtime", "< 1800 s", round(total, 1), _status(total < 1800), "", total))
    return out


CRITERIA: dict[int, Callable[..., list[Check]]] = {
    1: lambda **kw: check_generators(),
    2: lambda **kw: check_parameters(),
    3: lambda **kw: check_enumerators(),
    4: lambda **kw: check_closed_forms(),
    5: lambda **kw: check_beta2(kw.get("tie_break", "lex")),
    6: lambda **kw: check_fraction_table(kw.get("tie_break", "lex"), kw.get("skip_slow", False), kw.get("workers", 1)),
    7: lambda **kw: check_bias_polynomial(kw.get("tie_break", "lex")),
    8: lambda **kw: check_bounds(kw.get("skip_slow", False), kw.get("workers", 1)),
    9: lambda **kw: check_monte_carlo(kw.get("skip_slow", False), kw.get("workers", 1)),
    10: lambda **kw: check_thresholds(kw.get("skip_slow", False), kw.get("workers", 1)),
}


def run_checks(criteria=None, *, skip_slow: bool = False, tie_break: str = "lex", workers: int = 1) -> list[Check]:
    rows = []
    for k in criteria or sorted(CRITERIA):
        rows.extend(CRITERIA[k](skip_slow=skip_slow, tie_break=tie_break, workers=workers))
    return rows


def format_report(rows: list[Check]) -> str:
    lines = []
    for r in rows:
        exp = _short(r.expected)
        obs = _short(r.observed)
        lines.append(f"[{r.status.upper():7}] C{r.criterion:<2} {r.name}: expected {exp}, observed {obs}"
                     + (f" ({r.note})" if r.note else ""))
    counts = {s: sum(r.status == s for r in rows) for s in ("pass", "fail", "flagged", "skipped")}
    lines.append(" ".join(f"{k}={v}" for k, v in counts.items()))
    return "\n".join(lines)


def _short(v: Any) -> str:
    text = str(_jsonable(v))
    return text if len(text) <= 90 else text[:87] + "..."
