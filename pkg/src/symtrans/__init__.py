"""Strategy-driven term rewriting with an O(epsilon) convergence calculus."""
from .algebra import expand, simplify
from .contextual import BadContext, InnerContext, outer_context
from .convergence import (
    CONVERGENCE_RULES,
    ConvergenceStrategy,
    Session,
    convergence_rules,
    convergence_strategy,
    eval_fresh,
    fresh_index,
    is_bounded,
    lift_oeps_rule,
    oeps_indexes,
    transform,
)
from .dsl import (
    Environment,
    ParseError,
    Script,
    UnknownName,
    parse_rule_file,
    parse_script,
    parse_strategy,
    parse_term,
    render_rule,
    render_term,
)
from .matching import NoMatch, UnboundVariable, contains_match, match, matches, substitute
from .rules import BadTemplate, Guard, IllFormedRule, RewriteFailure, Rule, apply_at_top, linearity, make_rule
from .runner import ExpectationFailed, StrategyFailed, TraceEvent, emit_trace, run_gradient_proof, run_script
from .strategies import (
    All,
    BottomUp,
    Comp,
    Fail,
    FailAsIdentity,
    Identity,
    IdentityAsFail,
    LeftChoice,
    Normalizer,
    Strategy,
    TimeLimitExceeded,
    TopDown,
    Transform,
    exist_child,
    time_limit,
)
from .terms import (
    FRESH_OEPS,
    App,
    Num,
    Term,
    Var,
    canonicalize,
    equal,
    equiv_mod_oeps,
    make,
    oeps,
    symbol_count,
)

__version__ = "0.1.0"
