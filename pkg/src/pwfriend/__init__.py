"""Page-Wootters history states for Wigner's-friend experiments and four
candidate rules for two-time conditional probabilities."""
from .conditions import (
    ConditionReport,
    DegenerateParametersError,
    def2a_residuals,
    def2a_solve_ratios,
    def3_commutator_residual,
    nondisturbance_check,
)
from .decoherence import (
    DecoherenceFunctional,
    HistoryFamily,
    chain_operator,
    decoherence_functional,
    pure_family,
)
from .history import (
    Event,
    EventSchedule,
    EventTimeError,
    HistoryState,
    build_history,
    conditional_state,
    evolution_map,
    one_time_prob,
)
from .params import WignerFriendParams
from .rules import (
    NullConditioningError,
    OutcomeEvent,
    Rule,
    RuleResult,
    UnsupportedRuleError,
    prob_def1,
    prob_def2a,
    prob_def2b,
    prob_def3,
    rule_table,
)
from .scenarios import (
    NonWignerParams,
    build_non_wigner,
    build_wigner_friend,
    friend_events,
    wigner_events,
    wigner_friend_family,
)
from .tables import crosscheck, eval_table

__all__ = [
    "ConditionReport",
    "DecoherenceFunctional",
    "DegenerateParametersError",
    "Event",
    "EventSchedule",
    "EventTimeError",
    "HistoryFamily",
    "HistoryState",
    "NonWignerParams",
    "NullConditioningError",
    "OutcomeEvent",
    "Rule",
    "RuleResult",
    "UnsupportedRuleError",
    "WignerFriendParams",
    "build_history",
    "build_non_wigner",
    "build_wigner_friend",
    "chain_operator",
    "conditional_state",
    "crosscheck",
    "decoherence_functional",
    "def2a_residuals",
    "def2a_solve_ratios",
    "def3_commutator_residual",
    "eval_table",
    "evolution_map",
    "friend_events",
    "nondisturbance_check",
    "one_time_prob",
    "prob_def1",
    "prob_def2a",
    "prob_def2b",
    "prob_def3",
    "pure_family",
    "rule_table",
    "wigner_events",
    "wigner_friend_family",
]
__version__ = "0.1.0"
