"""End-to-end runs: GB -> LP -> mixture -> point, PO via discretization, NPO via splitting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .bruteforce import CapExceeded
from .formats import ParseError
from .discretize import DiscretizationPlan, lift_decomposition, plan, recover, to_gb
from .gb import FeasibleTable, GBProblem, build_feasible_tables, build_lp
from .graphs import Graph, TreeDecomposition, heuristic_decomposition, intersection_graph, validate
from .lp import LPModel, LPSolution
from .lpsolve import SOLVERS, solve
from .mixture import Mixture, decompose, extract
from .npo import FlatProblem, NPOProblem, SplitResult, good_split, npo_to_po, npo_tolerance, original_violations
from .poly import POProblem, StructuralError, format_rational, scaled_violation, to_rational

DEFAULT_BAG_CAP = 20
FORMULATIONS = ("lpz", "lpgb")


class ValidationError(StructuralError):
    """A supplied decomposition is not a tree decomposition of the relevant graph."""


@dataclass
class RunConfig:
    epsilon: Fraction = Fraction(1, 4)
    formulation: str = "lpz"
    decomposition: str = "minfill"  # "minfill", "mindegree" or "file:<path>"
    solver: str = "exact"
    emit: tuple = ()
    cap: int = DEFAULT_BAG_CAP  # largest bag allowed, in binary variables
    seed: int = 0

    def __post_init__(self):
        self.epsilon = to_rational(self.epsilon)
        if not 0 < self.epsilon < 1:
            raise StructuralError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.formulation not in FORMULATIONS:
            raise StructuralError(f"formulation must be one of {FORMULATIONS}")
        if self.solver not in SOLVERS:
            raise StructuralError(f"solver must be one of {SOLVERS}")
        if self.decomposition not in ("minfill", "mindegree") and not self.decomposition.startswith("file:"):
            raise StructuralError("decomposition must be minfill, mindegree or file:<path>")


def load_decomposition_file(path: str) -> TreeDecomposition:
    try:
        with open(path) as fh:
            return TreeDecomposition.from_json(json.load(fh))
    except OSError as exc:
        raise ParseError(f"cannot read decomposition {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed decomposition file {path}: {exc}") from exc


def choose_decomposition(g: Graph, config: RunConfig, given: TreeDecomposition | None = None) -> TreeDecomposition:
    if given is None:
        if config.decomposition.startswith("file:"):
            given = load_decomposition_file(config.decomposition[5:])
        else:
            return heuristic_decomposition(g, "min-fill" if config.decomposition == "minfill" else "min-degree")
    report = validate(given, g)
    if not report:
        raise ValidationError(f"decomposition rejected ({report.kind}): {report.message}")
    return given


@dataclass
class GBRun:
    gb: GBProblem
    td: TreeDecomposition
    tables: FeasibleTable
    model: LPModel
    solution: LPSolution | None
    mixture: Mixture | None = None
    x: tuple | None = None
    status: str = "optimal"

    @property
    def lp_value(self) -> Fraction | None:
        return None if self.solution is None else self.solution.objective

    @property
    def objective(self) -> Fraction | None:
        return None if self.x is None else self.gb.objective(self.x)


def solve_gb(gb: GBProblem, config: RunConfig | None = None, td: TreeDecomposition | None = None,
             run_solver: bool = True) -> GBRun:
    """With ``run_solver=False`` the LP is built but not solved (status "built")."""
    config = config or RunConfig()
    td = choose_decomposition(intersection_graph(gb), config, td)
    biggest = td.width + 1
    if biggest > config.cap:
        raise CapExceeded(f"largest bag has {biggest} binary variables; the cap is {config.cap}")
    tables = build_feasible_tables(gb, td)
    model = build_lp(gb, td, tables, config.formulation)
    if not run_solver:
        return GBRun(gb, td, tables, model, None, status="built")
    sol = solve(model, config.solver)
    run = GBRun(gb, td, tables, model, sol, status=sol.status)
    if sol.status == "optimal" and sol.exact:
        run.mixture = decompose(gb, td, tables, model, sol.x)
        run.x = extract(run.mixture, gb.c)
    return run


@dataclass
class PORun:
    problem: POProblem
    plan: DiscretizationPlan
    gb_run: GBRun
    td: TreeDecomposition
    x: list | None = None
    violation: Fraction | None = None

    @property
    def status(self) -> str:
        return self.gb_run.status

    @property
    def lp_value(self) -> Fraction | None:
        return self.gb_run.lp_value

    @property
    def objective(self) -> Fraction | None:
        return None if self.x is None else self.problem.objective(self.x)


def solve_po(problem: POProblem, config: RunConfig | None = None, td: TreeDecomposition | None = None,
             run_solver: bool = True) -> PORun:
    """Discretize, lift the decomposition of the PO intersection graph, solve, recover."""
    config = config or RunConfig()
    pl = plan(problem, config.epsilon)
    gb = to_gb(problem, pl)
    td = choose_decomposition(intersection_graph(problem), config, td)
    lifted = lift_decomposition(td, pl)
    gb_run = solve_gb(gb, replace(config, decomposition="minfill"), lifted, run_solver)
    run = PORun(problem, pl, gb_run, td)
    if gb_run.x is not None:
        run.x = recover(gb_run.x, pl)
        run.violation = scaled_violation(problem, run.x)
    return run


@dataclass
class NPORun:
    source: NPOProblem
    split: SplitResult
    flat: FlatProblem
    theta: Fraction
    po_run: PORun
    violations: dict = field(default_factory=dict)  # source constraint -> scaled violation

    @property
    def status(self) -> str:
        return self.po_run.status

    @property
    def x(self):
        return None if self.po_run.x is None else self.po_run.x[:self.source.n]

    @property
    def lp_value(self):
        return self.po_run.lp_value


def solve_npo(problem: NPOProblem, config: RunConfig | None = None, td: TreeDecomposition | None = None,
              run_solver: bool = True) -> NPORun:
    """Split to maximum degree three, flatten with tolerance eps / (8 D), run the PO path."""
    config = config or RunConfig()
    D = max(1, problem.max_degree)
    theta = npo_tolerance(config.epsilon, D)
    if td is None and config.decomposition.startswith("file:"):
        td = load_decomposition_file(config.decomposition[5:])
    if td is not None:
        report = validate(td, problem.graph)
        if not report:
            raise ValidationError(f"decomposition rejected ({report.kind}): {report.message}")
    elif config.decomposition == "mindegree":
        td = heuristic_decomposition(problem.graph, "min-degree")
    split = good_split(problem, td)
    flat = npo_to_po(split)
    po_run = solve_po(flat.po, replace(config, epsilon=theta, decomposition="minfill"), flat.decomposition,
                      run_solver)
    run = NPORun(problem, split, flat, theta, po_run)
    if po_run.x is not None:
        run.violations = original_violations(problem, po_run.x)
    return run


def gb_stats(run: GBRun) -> dict:
    td, tables, model = run.td, run.tables, run.model
    bag_sizes = {t: len(td.bags[t]) for t in td.nodes}
    return {
        "width": td.width,
        "bags": len(bag_sizes),
        "bag_sizes": [bag_sizes[t] for t in td.nodes],
        "feasible_sizes": [len(tables.feasible[t]) for t in td.nodes],
        "sum_2_pow_bag": sum(1 << k for k in bag_sizes.values()),
        "oracle_queries": tables.stats.total,
        "expected_queries": run.gb.expected_queries(),
        "lp_vars": model.num_vars,
        "lp_rows": model.num_rows,
        "lp_nonzeros": model.nonzeros(),
        "formulation": model.meta.get("formulation"),
    }


def plan_stats(pl: DiscretizationPlan) -> dict:
    return {"gamma": format_rational(pl.gamma), "L": pl.L, "pi": pl.pi, "delta": format_rational(pl.delta),
            "gb_variables": pl.n_gb}
