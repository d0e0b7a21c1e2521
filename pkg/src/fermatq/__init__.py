"""Fermat quotient matrices FQM(p): exact entries, order-pattern counts,
line-distance averages and discrepancy tooling."""

__version__ = "0.1.0"

from .core import (
    FermatQuotientTable,
    MatrixIndex,
    OddPrime,
    build_table,
    fermat_quotient_oracle,
    fqm_entry,
    inverse_mod,
    validate_prime,
    zero_row_of_column,
)
from .lines import LineSpec, integral_I, line_value, mean_line_distance
from .patterns import (
    DisplacementPattern,
    PatternCountReport,
    admissible_region,
    count_all_permutations,
    count_pattern,
    emit_point_sets,
    in_polyhedron,
    make_pattern,
    span_point,
)
