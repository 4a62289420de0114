"""Decomposition functions, interval bounds, and reach tubes for mixed monotone systems."""

from .errors import (BlowupError, ConfigError, DegenerateAxisError, DimensionError,
                     EvalError, InvalidBoundsError, NonConvergenceError, ParseError,
                     ToolkitError, UnboundedDerivativeError)
from .expr import (DEFAULT_SLACK, Binary, Const, Expr, Power, Unary, Var,
                   differentiate, eval_interval, evaluate, parse, to_string)
from .interval import BoxDomain, Interval, hull, intersect, leq_orthant
from .jacbounds import JacobianBounds, SignCase, VectorField, classify, jacobian_bounds
from .decomp import (DecompositionSpec, bound_box, build_decomposition,
                     eval_decomposition, format_decomposition, refine_bounds)
from .jordan import (JordanSplit, ScalarFunction, UnboundedSplit, bv_decomposition_eval,
                     jordan_split, total_variation, unbounded_decomposition,
                     unbounded_split)
from .embed import (EmbeddingSystem, ReachTube, build_embedding, integrate_embedding,
                    sample_flow)

__version__ = "0.1.0"

__all__ = [
    "BlowupError", "ConfigError", "DegenerateAxisError", "DimensionError",
    "EvalError", "InvalidBoundsError", "NonConvergenceError", "ParseError",
    "ToolkitError", "UnboundedDerivativeError",
    "DEFAULT_SLACK", "Binary", "Const", "Expr", "Power", "Unary", "Var",
    "differentiate", "eval_interval", "evaluate", "parse", "to_string",
    "BoxDomain", "Interval", "hull", "intersect", "leq_orthant",
    "JacobianBounds", "SignCase", "VectorField", "classify", "jacobian_bounds",
    "DecompositionSpec", "bound_box", "build_decomposition", "eval_decomposition",
    "format_decomposition", "refine_bounds",
    "JordanSplit", "ScalarFunction", "UnboundedSplit", "bv_decomposition_eval",
    "jordan_split", "total_variation", "unbounded_decomposition", "unbounded_split",
    "EmbeddingSystem", "ReachTube", "build_embedding", "integrate_embedding",
    "sample_flow",
    "__version__",
]
