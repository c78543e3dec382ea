# File: models/models.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from models.exceptions import ConfigError, UnsupportedKnotCount

SUPPORTED_KNOTS = (1, 3, 4, 5)
DEFAULT_KNOTS = 5


class VariableRole(str, Enum):
    CONTROL = "control"
    FIXED = "fixed"
    FREE = "free"

    @property
    def label(self):
        return self.value.title()


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    BINOMIAL = "binomial"


class TermKind(str, Enum):
    CONTROL = "control"
    MAIN = "main"
    INTERACTION = "interaction"


@dataclass(frozen=True)
class VariableSpec:
    """A named input column, its role in the model and its smoothness.

    knots = 1 enters the variable linearly; 3, 4 or 5 expands it into a
    restricted cubic spline. Control variables are always linear.
    """
    name: str
    role: VariableRole = VariableRole.FREE
    knots: Optional[int] = None

    def __post_init__(self):
        role = VariableRole(self.role)
        object.__setattr__(self, "role", role)
        knots = self.knots
        if knots is None:
            knots = 1 if role is VariableRole.CONTROL else DEFAULT_KNOTS
        knots = int(knots)
        if knots not in SUPPORTED_KNOTS:
            raise UnsupportedKnotCount(knots)
        if role is VariableRole.CONTROL and knots != 1:
            raise ConfigError(f"Control variable '{self.name}' must be linear (knots=1), got {knots}")
        object.__setattr__(self, "knots", knots)

    @property
    def is_control(self):
        return self.role is VariableRole.CONTROL

    @property
    def term(self):
        if self.is_control:
            return TermId.control(self.name)
        return TermId.main(self.name)


@dataclass(frozen=True)
class TermId:
    """Identity of a model term.

    Interaction names are stored sorted, so (a, b) and (b, a) are the same term.
    """
    kind: TermKind
    names: tuple = field(default_factory=tuple)

    @classmethod
    def control(cls, name):
        return cls(TermKind.CONTROL, (name,))

    @classmethod
    def main(cls, name):
        return cls(TermKind.MAIN, (name,))

    @classmethod
    def interaction(cls, a, b):
        if a == b:
            raise ValueError(f"A variable cannot interact with itself: {a}")
        return cls(TermKind.INTERACTION, tuple(sorted((a, b))))

    @property
    def is_interaction(self):
        return self.kind is TermKind.INTERACTION

    @property
    def is_control(self):
        return self.kind is TermKind.CONTROL

    @property
    def sort_key(self):
        return (self.is_interaction, self.names)

    def __str__(self):
        return ":".join(self.names)
