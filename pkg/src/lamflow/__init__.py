"""Flow analyses for the labeled lambda calculus.

The package provides 0CFA, simple closure analysis (iterated and
union-find solvers), and the bounded-update sub-0CFA family, together
with an environment-tightening evaluator and a compiler from boolean
circuits to closed linear terms.  On linear programs all the analyses
coincide with evaluation, which is what lets a flow query decide the
circuit value problem.
"""

from .cache import UNKNOWN, BoundedCache, Cache, cache_leq
from .cfa0 import FlowQuery, accepts_0cfa, analyze_0cfa, flow_query
from .circuits import (
    AndGate,
    Circuit,
    CompiledInstance,
    CopyGate,
    NetlistError,
    NotGate,
    TermBuilder,
    compile_circuit,
    cvp_decide,
    encode_gates,
    eval_circuit,
    parse_netlist,
)
from .evaluator import (
    Closure,
    EvalError,
    FuelExhaustedError,
    UnboundVariableError,
    closure_size,
    config_size,
    env_size,
    evaluate,
    linearly_closes,
    respects,
)
from .sca import accepts_sca, analyze_sca_naive, analyze_sca_unionfind
from .sub0cfa import analyze_sub0cfa, concretize
from .syntax import (
    Abs,
    AbsId,
    App,
    ParseError,
    Ref,
    Term,
    abs_id,
    abstractions,
    alpha_rename,
    binder_occurrences,
    free_vars,
    is_linear,
    label_index,
    labels_of,
    parse,
    pretty,
    relabel,
    term_shorthand,
    term_size,
)

__version__ = "0.1.0"
