# Polynomial problems with continuous variables, solved to a scaled tolerance.
#
# Each continuous variable in [0, 1] is replaced by L bits.  The LP over the
# resulting binary problem returns a point whose constraint violations are at
# most eps times the size of each constraint.  Halving eps adds one bit per
# variable, so the LP grows like (1/eps)^(bag size).

from fractions import Fraction

from twlp.discretize import plan
from twlp.pipeline import RunConfig, solve_po
from twlp.poly import Constraint, POProblem, Polynomial, scaled_violation

x = Polynomial.var

# x0 binary; x1, x2, x3 continuous
cons = [
    Constraint(x(1) * x(1) + x(2) - Fraction(3, 4), ">="),   # x1^2 + x2 >= 3/4
    Constraint(x(2) + x(3) - 1, "="),                        # x2 + x3 = 1
    Constraint(x(0) + x(3) - Fraction(1, 2), ">="),          # x0 + x3 >= 1/2
]
problem = POProblem(4, 1, (Fraction(2), Fraction(1), Fraction(1), Fraction(-1)), cons,
                    ("x0", "x1", "x2", "x3"))

print("eps     L  delta     LP size  objective  violation  point")
for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)):
    pl = plan(problem, eps)
    run = solve_po(problem, RunConfig(epsilon=eps))
    size = run.gb_run.model.num_vars + run.gb_run.model.num_rows
    point = ", ".join(str(v) for v in run.x)
    print(f"{str(eps):7} {pl.L}  {str(pl.delta):9} {size:7}  {str(run.objective):9}  "
          f"{str(run.violation):9}  ({point})")
    assert scaled_violation(problem, run.x) <= eps
