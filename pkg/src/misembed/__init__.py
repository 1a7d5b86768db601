"""misembed: embed MIS instances into weighted hosts, enumerate low-energy
independent sets exactly, and score interpretation strategies."""

from .graphs import (
    BudgetError,
    Configuration,
    ContractError,
    ExactValue,
    GraphFormatError,
    WeightedGraph,
    WeightMode,
    is_independent,
    make_graph,
    random_gnp,
    read_graph,
    total_weight,
    write_graph,
)
from .polynomials import (
    GeneralizedPolynomial,
    a_poly,
    cl_lower_bound,
    evaluate_partition,
    ip_bruteforce,
    ip_path,
    ip_weighted_path,
)
from .solver import (
    EnergyWindow,
    SearchBudget,
    StateRecord,
    count_all_is,
    enumerate_low_energy,
    iter_low_energy,
    solve_mwis,
)

__version__ = "0.1.0"
