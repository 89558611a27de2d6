"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Criteria that cannot be met at desk scale are still run as stated and fail
with the measured reason in the printed line.
"""

import math
import random
import time
from fractions import Fraction as F

import pytest

from twlp import cli, formats
from twlp.bruteforce import CapExceeded, solve_gb_bruteforce, solve_po_bruteforce
from twlp.discretize import lift_decomposition, plan, to_gb, width_bound
from twlp.gb import bits_of, build_feasible_tables, build_lp, canonical_lift, omega
from twlp.generators import (acopf_toy, fcnf_bruteforce, fcnf_data, has_equal_partition, random_gb, random_npo,
                             random_po, random_subset_sum, round_subset, subset_sum, subset_sum_epsilon, twtrap)
from twlp.graphs import heuristic_decomposition, intersection_graph, validate
from twlp.lpsolve import solve
from twlp.mixture import decompose, extract, verify_mixture
from twlp.npo import good_split, npo_to_po
from twlp.pipeline import RunConfig, solve_npo, solve_po
from twlp.poly import Constraint, POProblem, Polynomial, scaled_violation

from .oracles import npo_binary_optimum, split_binary_optimum


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


# ------------------------------------------------------------ shared GB suite

_SUITE = None


def gb_suite():
    """200 random GB instances with heuristic width at most 4, solved both ways."""
    global _SUITE
    if _SUITE is None:
        out, seed = [], 0
        while len(out) < 200:
            gb = random_gb(seed, n_max=14, m_max=12, k=1 + seed % 4)
            seed += 1
            td = heuristic_decomposition(intersection_graph(gb))
            if td.width > 4:
                continue
            tables = build_feasible_tables(gb, td)
            models = {f: build_lp(gb, td, tables, f) for f in ("lpz", "lpgb")}
            sols = {f: solve(m) for f, m in models.items()}
            out.append((gb, td, tables, models, sols))
        _SUITE = out
    return _SUITE


def test_criterion_1_gb_exactness(capsys):
    start = time.time()
    suite = gb_suite()
    bad, kinds = [], set()
    for gb, td, tables, models, sols in suite:
        kinds |= {type(c.oracle).__name__ for c in gb.constraints}
        bf = solve_gb_bruteforce(gb)
        s = sols["lpz"]
        if s.status != bf.status or (bf.status == "optimal" and s.objective != bf.objective):
            bad.append(gb)
    elapsed = time.time() - start
    widths = max(td.width for _, td, *_ in suite)
    ok = not bad and len(suite) >= 200 and {"ListOracle", "PolyOracle"} <= kinds and elapsed < 120
    report(capsys, 1, ok, f"{len(suite) - len(bad)}/{len(suite)} instances LPz == brute force exactly "
                          f"(max width {widths}, oracles {sorted(kinds)}, {elapsed:.1f}s)")


def test_criterion_2_formulation_equivalence(capsys):
    suite = gb_suite()
    value_bad, var_bad, row_bad = 0, 0, 0
    for gb, td, tables, models, sols in suite:
        a, b = sols["lpz"], sols["lpgb"]
        if a.status != b.status or a.objective != b.objective:
            value_bad += 1
        var_bad += models["lpgb"].num_vars > models["lpz"].num_vars
        row_bad += models["lpgb"].num_rows > models["lpz"].num_rows
    ok = value_bad == var_bad == row_bad == 0
    report(capsys, 2, ok, f"{len(suite)} instances: value mismatches {value_bad}, "
                          f"LP-GB larger in vars on {var_bad}, in rows on {row_bad}")


def _fractional_cases(count):
    cases, seed = [], 1000
    while len(cases) < count:
        gb = random_gb(seed, n_max=10, m_max=8, k=1 + seed % 4)
        seed += 1
        pts = [bits_of(i, gb.n) for i in range(1 << gb.n) if gb.feasible(bits_of(i, gb.n))]
        if len(pts) < 2:
            continue
        rng = random.Random(seed)
        chosen = rng.sample(pts, rng.randint(2, min(5, len(pts))))
        raw = [rng.randint(1, 7) for _ in chosen]
        cases.append((gb, chosen, [F(r, sum(raw)) for r in raw], "lpz" if seed % 2 else "lpgb"))
    return cases


def test_criterion_3_integral_extraction(capsys):
    optimal, opt_bad = 0, 0
    for gb, td, tables, models, sols in gb_suite():
        for f in ("lpz", "lpgb"):
            s = sols[f]
            if s.status != "optimal":
                continue
            optimal += 1
            mix = decompose(gb, td, tables, models[f], s.x)
            x = extract(mix, gb.c)
            if gb.objective(x) != s.objective or not gb.feasible(x) or \
                    verify_mixture(mix, gb, td, tables, models[f], s.x):
                opt_bad += 1
    crafted, crafted_bad = 0, 0
    for gb, pts, weights, f in _fractional_cases(60):
        td = heuristic_decomposition(intersection_graph(gb))
        tables = build_feasible_tables(gb, td)
        model = build_lp(gb, td, tables, f)
        lifts = [canonical_lift(model, tables, p) for p in pts]
        point = [sum((w * l[j] for w, l in zip(weights, lifts)), F(0)) for j in range(model.num_vars)]
        mix = decompose(gb, td, tables, model, point)
        crafted += 1
        good = not verify_mixture(mix, gb, td, tables, model, point)
        for t in td.nodes:
            for y, n in omega(td, t):
                want = sum((w for w, p in zip(weights, pts) if all(p[j] for j in y) and not any(p[j] for j in n)),
                           F(0))
                good &= mix.probability(y, n) == want
        crafted_bad += not good
    ok = opt_bad == 0 and crafted >= 50 and crafted_bad == 0
    report(capsys, 3, ok, f"{optimal - opt_bad}/{optimal} LP optima extracted exactly; "
                          f"{crafted - crafted_bad}/{crafted} crafted fractional points reproduced")


def test_criterion_4_po_tolerance(capsys):
    start = time.time()
    total, bad, eps_list = 0, [], [F(1, 2), F(1, 4), F(1, 8)]
    seed = 0
    while total < 120:
        pb, planted = random_po(seed, n_max=6, p_max=3, pi_max=2)
        eps = eps_list[seed % 3]
        seed += 1
        td = heuristic_decomposition(intersection_graph(pb))
        if td.width > 2 or pb.pi > 2:
            continue
        run = solve_po(pb, RunConfig(epsilon=eps, formulation="lpgb"))
        total += 1
        norm_c = sum(abs(v) for v in pb.c)
        if run.status != "optimal":
            bad.append((seed - 1, "status " + run.status))
            continue
        if scaled_violation(pb, run.x) > eps:
            bad.append((seed - 1, "tolerance"))
        if run.lp_value > pb.objective(planted) + eps * norm_c:
            bad.append((seed - 1, "value bound"))
    elapsed = time.time() - start
    ok = not bad and elapsed < 180
    report(capsys, 4, ok, f"{total - len(bad)}/{total} PO instances within tolerance and value bound "
                          f"({elapsed:.1f}s){'; failures ' + str(bad[:5]) if bad else ''}")


def test_criterion_5_subset_sum_round_trip(capsys):
    instances = [[3, 5, 8, 2]]
    s = 0
    while len(instances) < 3:
        a = random_subset_sum(4, max_sum=60, seed=s)
        s += 1
        if sum(a) // 2 <= 30 and has_equal_partition(a) and a not in instances:
            instances.append(a)
    lines, ok = [], True
    for a in instances:
        S = sum(a) // 2
        exists = has_equal_partition(a)
        pb = subset_sum(a, scaled=False)
        eps = subset_sum_epsilon(a)
        pl = plan(pb, eps)
        try:
            run = solve_po(pb, RunConfig(epsilon=eps))
        except CapExceeded as exc:
            ok = False
            lines.append(f"a={a} (partition {'exists' if exists else 'absent'}): eps={eps}, L={pl.L}, {exc}")
            continue
        if run.status != "optimal":
            ok = False
            lines.append(f"a={a}: LP {run.status} (partition {'exists' if exists else 'absent'})")
            continue
        xt = round_subset(run.x, len(a))
        hit = sum(ai * xi for ai, xi in zip(a, xt)) == S
        ok &= hit
        lines.append(f"a={a}: rounded subset {xt} {'hits' if hit else 'misses'} S={S}")
    report(capsys, 5, ok, "; ".join(lines))


def test_criterion_6_splitting(capsys):
    problems = [("random", s, random_npo(s, v_max=10, max_degree=6)) for s in range(110)]
    problems += [("trap", k, twtrap(k)) for k in (2, 3, 4)]
    bad, compared, high = [], 0, 0
    for kind, key, pb in problems:
        td = heuristic_decomposition(pb.graph)
        res = good_split(pb, td)
        high += pb.max_degree > 3
        if res.problem.max_degree > 3:
            bad.append((kind, key, "degree"))
        if any(res.family_sum(i) != k.total() for i, k in enumerate(pb.constraints)):
            bad.append((kind, key, "family sum"))
        if not validate(res.decomposition, res.problem.graph) or res.decomposition.width > 2 * td.width + 1:
            bad.append((kind, key, "decomposition"))
        if pb.n <= 12:
            compared += 1
            if split_binary_optimum(res.problem, pb.n) != npo_binary_optimum(pb):
                bad.append((kind, key, "optimum"))
    ok = not bad
    report(capsys, 6, ok, f"{len(problems)} networks ({high} with degree above 3): "
                          f"{len(bad)} failures, optimum compared on {compared}")


def test_criterion_7_npo_tolerance(capsys):
    eps = F(1, 2)
    lines, ok = [], True
    cases = [("fcnf-path", a, s) for a in range(1, 6) for s in range(2)]
    cases += [("fcnf-caterpillar", a, s) for a in range(3, 6) for s in range(2)]
    for name, arcs, seed in cases:
        data = fcnf_data(arcs, name.split("-")[1], max_value=8, seed=seed)
        pb = data.to_npo()
        try:
            run = solve_npo(pb, RunConfig(epsilon=eps, formulation="lpgb"))
        except CapExceeded as exc:
            ok = False
            lines.append(f"{name} arcs={arcs} seed={seed}: {exc}")
            continue
        best = fcnf_bruteforce(data)[0]
        norm_c = sum(abs(v) for v in pb.c)
        worst = max(run.violations.values())
        good = run.status == "optimal" and worst <= eps and abs(run.lp_value - best) <= eps * norm_c
        ok &= good
        if not good:
            lines.append(f"{name} arcs={arcs} seed={seed}: violation {worst}, LP {run.lp_value} vs MILP {best}")
    for seed in range(2):
        pb = acopf_toy(3, seed=seed)
        try:
            run = solve_npo(pb, RunConfig(epsilon=eps, formulation="lpgb"))
            worst = max(run.violations.values())
            good = run.status == "optimal" and worst <= eps
            ok &= good
            if not good:
                lines.append(f"acopf-toy seed={seed}: status {run.status}, violation {worst}")
        except CapExceeded as exc:
            ok = False
            lines.append(f"acopf-toy seed={seed}: {exc}")
    passed = len(cases) + 2 - len(lines)
    report(capsys, 7, ok, f"{passed}/{len(cases) + 2} NPO runs within tolerance at eps=1/2"
                          + ("; " + "; ".join(lines) if lines else ""))


def _chain_po(n, window):
    """Linear constraints on sliding windows of continuous variables (width window-1)."""
    x = Polynomial.var
    cons = []
    for s in range(n - window + 1):
        poly = sum((x(j) for j in range(s, s + window)), Polynomial()) - F(1, 3)
        cons.append(Constraint(poly, ">="))
    return POProblem(n, 0, tuple([1] * n), tuple(cons))


def test_criterion_8_size_and_query_audits(capsys):
    query_bad = size_bad = 0
    for gb, td, tables, models, sols in gb_suite():
        query_bad += tables.stats.total != sum(2 ** len(k) for k in gb.supports)
        bound = 4 * sum(2 ** len(b) for b in td.bags.values())
        size_bad += models["lpz"].num_vars + models["lpz"].num_rows > bound
    width_bad = 0
    for seed in range(60):
        pb, _ = random_po(seed)
        for eps in (F(1, 2), F(1, 4), F(1, 8)):
            pl = plan(pb, eps)
            td = heuristic_decomposition(intersection_graph(pb))
            lifted = lift_decomposition(td, pl)
            width_bad += lifted.width > width_bound(td.width, pl)
    slopes = []
    for window in (2, 3):
        omega_ = window - 1
        sizes = []
        epss = [F(1, 2), F(1, 4), F(1, 8), F(1, 16)] if window == 2 else [F(1, 2), F(1, 4), F(1, 8)]
        for eps in epss:
            pb = _chain_po(4, window)
            run = solve_po(pb, RunConfig(epsilon=eps), run_solver=False)
            sizes.append(run.gb_run.model.num_vars + run.gb_run.model.num_rows)
        xs = [math.log(1 / float(e)) for e in epss]
        ys = [math.log(s) for s in sizes]
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        slopes.append((omega_, slope, (omega_ + 1) / 2 <= slope <= 2 * (omega_ + 1)))
    ok = query_bad == size_bad == width_bad == 0 and all(s[2] for s in slopes)
    slope_text = ", ".join(f"omega={o}: slope {s:.2f} vs {o + 1}" for o, s, _ in slopes)
    report(capsys, 8, ok, f"query mismatches {query_bad}, LPz size over 4*sum 2^|Q_t| on {size_bad}, "
                          f"lifted width over bound on {width_bad}; {slope_text}")


def test_criterion_9_determinism(capsys, tmp_path):
    files = {}
    inst_gb = tmp_path / "g.json"
    inst_gb.write_text(formats.dumps(formats.to_json(random_gb(4))))
    inst_npo = tmp_path / "f.json"
    inst_npo.write_text(formats.dumps(formats.to_json(fcnf_data(3, seed=0).to_npo())))
    for k in range(2):
        out = tmp_path / f"run{k}"
        for inst in (inst_gb, inst_npo):
            code = cli.main(["solve", str(inst), "--epsilon", "1/2", "--seed", "3",
                             "--emit", "lp,solution,stats,mixture", "--out", str(out)])
            assert code == 0
        gen = out / "gen.json"
        cli.main(["generate", "fcnf", "--seed", "3", "--param", "arcs=4", "-o", str(gen)])
        files[k] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    same = files[0] == files[1] and len(files[0]) >= 9
    report(capsys, 9, same, f"{len(files[0])} artifacts compared byte for byte across two runs")
