"""Random side-effecting expressions checked against a left-to-right reference model."""
import random

from runtime import eval_expr
from runtime.environment import Environment
from runtime.values import Cell
from tools.ast_nodes import INT
from tools.lexer import lex
from tools.operators import wrap_signed
from tools.parser import parse_expression
from tools.tokens import TokenCursor

NAMES = ("a", "b", "c")
CASES = 10_000
SEED = 1337


def generate(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return ("var", rng.choice(NAMES))
        return ("lit", rng.randint(0, 9))
    kind = rng.choice(["bin", "bin", "bin", "pre", "post", "assign", "assign", "comma"])
    if kind == "bin":
        return ("bin", rng.choice("+-*"), generate(rng, depth - 1), generate(rng, depth - 1))
    if kind in ("pre", "post"):
        return (kind, rng.choice(["++", "--"]), rng.choice(NAMES))
    if kind == "assign":
        return ("assign", rng.choice(["=", "+=", "-=", "*="]), rng.choice(NAMES), generate(rng, depth - 1))
    return ("comma", generate(rng, depth - 1), generate(rng, depth - 1))


def render(node):
    kind = node[0]
    if kind == "var":
        return node[1]
    if kind == "lit":
        return str(node[1])
    if kind == "bin":
        return f"({render(node[2])} {node[1]} {render(node[3])})"
    if kind == "pre":
        return f"({node[1]}{node[2]})"
    if kind == "post":
        return f"({node[2]}{node[1]})"
    if kind == "assign":
        return f"({node[2]} {node[1]} {render(node[3])})"
    return f"({render(node[1])}, {render(node[2])})"


def reference(node, state):
    """Every operand fully evaluated, effects included, before the next one starts."""
    kind = node[0]
    if kind == "var":
        return state[node[1]]
    if kind == "lit":
        return node[1]
    if kind == "bin":
        left = reference(node[2], state)
        right = reference(node[3], state)
        return wrap_signed({"+": left + right, "-": left - right, "*": left * right}[node[1]], 32)
    if kind in ("pre", "post"):
        old = state[node[2]]
        state[node[2]] = wrap_signed(old + (1 if node[1] == "++" else -1), 32)
        return state[node[2]] if kind == "pre" else old
    if kind == "assign":
        op, name = node[1], node[2]
        old = state[name]
        value = reference(node[3], state)
        if op == "+=":
            value = old + value
        elif op == "-=":
            value = old - value
        elif op == "*=":
            value = old * value
        state[name] = wrap_signed(value, 32)
        return state[name]
    reference(node[1], state)
    return reference(node[2], state)


def evaluate(source, state):
    tokens, diags = lex(source.encode())
    assert diags == []
    tree = parse_expression(TokenCursor(tokens))
    env = Environment()
    cells = {name: env.define(name, Cell(INT, value)) for name, value in state.items()}
    value = eval_expr(tree, env)
    return value, {name: cell.get() for name, cell in cells.items()}


def test_evaluator_agrees_with_reference_model():
    rng = random.Random(SEED)
    for _ in range(CASES):
        tree = generate(rng, rng.randint(1, 5))
        start = {name: rng.choice([0, 1, -1, rng.randint(-1000, 1000), 2147483647, -2147483648]) for name in NAMES}
        source = render(tree)
        expected_state = dict(start)
        expected = reference(tree, expected_state)
        value, state = evaluate(source, dict(start))
        assert (value, state) == (expected, expected_state), f"{source} from {start}"


def test_reference_model_on_known_cases():
    state = {"a": 0, "b": 0, "c": 0}
    tree = ("bin", "+", ("bin", "+", ("bin", "+", ("pre", "++", "a"), ("post", "++", "a")),
                         ("pre", "++", "a")), ("post", "++", "a"))
    assert reference(tree, state) == 8
    assert evaluate(render(tree), {"a": 0, "b": 0, "c": 0}) == (8, {"a": 4, "b": 0, "c": 0})
