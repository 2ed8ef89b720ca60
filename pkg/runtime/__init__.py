from .evaluator import Evaluator, eval_expr, run

__all__ = ["Evaluator", "eval_expr", "run"]
