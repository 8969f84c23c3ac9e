"""Information extraction from a strategic sender: certified capacity
brackets, equilibrium strategies, and the supporting exact combinatorics."""

from .channel import Channel, channel_from_json, identity_channel, load_channel, make_channel
from .errors import (
    BudgetExceededError,
    CapExceededError,
    ConvergenceError,
    InputError,
    IxcapError,
)
from .game import (
    DOMINATED,
    GameOutcome,
    ReceiverStrategy,
    SenderStrategy,
    asymptotic_rate_bracket,
    equilibrium_value_noiseless,
    expected_block_utility,
    naive_receiver_strategy,
    noisy_equilibrium_value,
    noisy_receiver_strategy,
    receiver_strategy_from_set,
    worst_case_decoded_set,
)
from .graphs import (
    Graph,
    IndependentSetWitness,
    confusability_graph,
    graph_from_edges,
    graph_from_json,
    graphs_equal,
    independence_number,
    is_independent,
    load_graph,
    sender_graph,
    strong_power,
    strong_product,
)
from .lower_bounds import (
    FeasibleSetCertificate,
    TransportResult,
    beta_cycle_bound,
    feasibility_report,
    gamma,
    gamma_n,
    has_positive_edges_cycle,
    is_feasible_O,
    sufficient_margin_check,
    transport_lower_bound,
    type_class_size,
)
from .theta import lovasz_theta
from .upper_bounds import (
    CapacityBracket,
    ExactValue,
    alpha_sym_upper,
    in_perfect_whitelist,
    is_two_valued_a_ge_b,
    xi_bracket,
)
from .utility import (
    Alphabet,
    BlockSequence,
    UtilityMatrix,
    antisymmetric_part,
    block_utility,
    block_utility_rows,
    capped_max,
    capped_min,
    incremented,
    load_utility,
    normalize_diagonal,
    product_utility,
    symmetric_part,
    utility_from_graph,
    utility_from_json,
)

__version__ = "0.1.0"
