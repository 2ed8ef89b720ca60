from typing import Dict, Optional

from .values import Activation, Cell


class Environment:
    """
    Variables of one scope plus a link to the enclosing scope.

    A closure keeps the environment it was defined in, so every ancestor
    frame it can reach stays alive after the parent activation returns.
    """

    def __init__(self, parent: Optional["Environment"] = None, activation: Optional[Activation] = None):
        self.record: Dict[str, Cell] = {}
        self.parent = parent
        self.activation = activation if activation is not None else (parent.activation if parent else None)

    def define(self, name: str, cell: Cell) -> Cell:
        self.record[name] = cell
        return cell

    def resolve(self, name: str) -> Optional["Environment"]:
        env = self
        while env is not None:
            if name in env.record:
                return env
            env = env.parent
        return None

    def lookup(self, name: str) -> Optional[Cell]:
        env = self.resolve(name)
        return env.record[name] if env is not None else None

    def child(self) -> "Environment":
        return Environment(self, self.activation)
