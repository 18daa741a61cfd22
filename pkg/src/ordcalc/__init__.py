"""Normal and anti-normal ordering of functions of the boson number operator."""

from .combinatorics import (
    FunctionTable,
    StirlingTable,
    TableTooShortError,
    binomial,
    falling_factorial,
    forward_difference,
    stirling2,
)
from .opalgebra import (
    OperatorExpr,
    Ordering,
    ParseError,
    RawWord,
    parse,
    print_expr,
    rewrite_antinormal,
    rewrite_normal,
)
from .ordering import (
    OrderedExpansion,
    antinormal_function,
    antinormal_power,
    lemma1_coefficients,
    lemma2_coefficients,
    normal_function,
    normal_power,
    taylor_difference_check,
)

__version__ = "0.1.0"
