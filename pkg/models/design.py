# File: models/design.py
import logging
import threading
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from models.exceptions import ConfigError, ControlInInteraction, MissingColumn
from models.models import TermId, VariableRole
from models.splines import expand

logger = logging.getLogger(__name__)


def basis_label(name, index):
    return name if index == 0 else f"S{index}({name})"


@dataclass(frozen=True)
class ColumnInfo:
    """One design column: the term it belongs to and the basis factors it is built from.

    A factor is (variable name, basis index); index 0 is the raw variable.
    Main columns have one factor, interaction columns two.
    """
    term: TermId
    factors: tuple

    @property
    def label(self):
        return "*".join(basis_label(name, index) for name, index in self.factors)

    @property
    def is_doubly_nonlinear(self):
        return len(self.factors) == 2 and all(index > 0 for _, index in self.factors)


@dataclass(frozen=True)
class TermGroup:
    term: TermId
    columns: slice
    role: VariableRole = None

    @property
    def width(self):
        return self.columns.stop - self.columns.start

    @property
    def role_label(self):
        if self.term.is_interaction:
            return "Interaction"
        return self.role.label if self.role is not None else "Free"


@dataclass(frozen=True)
class TermBlock:
    """Columns of a single term before assembly."""
    term: TermId
    values: np.ndarray
    columns: tuple
    role: VariableRole = None


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric columns plus the column -> term map. The intercept is left to the fitters."""
    values: np.ndarray
    columns: tuple
    groups: tuple

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise ValueError(f"values shape {self.values.shape} does not match {len(self.columns)} column labels")
        position = 0
        for group in self.groups:
            if group.columns.start != position:
                raise ValueError(f"Column groups must partition the design; gap or overlap at {group.term}")
            for c in range(group.columns.start, group.columns.stop):
                if self.columns[c].term != group.term:
                    raise ValueError(f"Column {self.columns[c].label} is not part of {group.term}")
            position = group.columns.stop
        if position != len(self.columns):
            raise ValueError("Column groups do not cover every column")

    @classmethod
    def from_blocks(cls, blocks, n_rows):
        groups, columns, values = [], [], []
        position = 0
        for block in blocks:
            width = len(block.columns)
            groups.append(TermGroup(block.term, slice(position, position + width), block.role))
            columns.extend(block.columns)
            values.append(block.values)
            position += width
        matrix = np.column_stack(values) if values else np.empty((n_rows, 0))
        return cls(matrix, tuple(columns), tuple(groups))

    @property
    def n_columns(self):
        return self.values.shape[1]

    @property
    def terms(self):
        return [group.term for group in self.groups]

    def group(self, term):
        for group in self.groups:
            if group.term == term:
                return group
        raise KeyError(term)

    def column_index(self, factors):
        for index, column in enumerate(self.columns):
            if column.factors == factors:
                return index
        raise KeyError(factors)


def main_block(x, spec):
    knots, basis = expand(x, spec.knots, spec.name)
    term = spec.term
    columns = tuple(ColumnInfo(term, ((spec.name, label),)) for label in basis.labels)
    return TermBlock(term, basis.columns, columns, spec.role), knots


def restricted_interaction(a, b):
    """Pairwise products of two main blocks, without the nonlinear x nonlinear products."""
    for block in (a, b):
        if block.term.is_control:
            raise ControlInInteraction(block.term.names[0])
        if block.term.is_interaction:
            raise ValueError(f"Interactions are built from main terms only, got {block.term}")
    term = TermId.interaction(a.term.names[0], b.term.names[0])
    if a.term.names[0] != term.names[0]:
        a, b = b, a

    values, columns = [], []
    for i, col_a in enumerate(a.columns):
        for j, col_b in enumerate(b.columns):
            column = ColumnInfo(term, (col_a.factors[0], col_b.factors[0]))
            if column.is_doubly_nonlinear:
                continue
            values.append(a.values[:, i] * b.values[:, j])
            columns.append(column)
    return TermBlock(term, np.column_stack(values), tuple(columns))


def restricted_interaction_width(k_a, k_b):
    cols_a = 1 if k_a == 1 else k_a - 1
    cols_b = 1 if k_b == 1 else k_b - 1
    return cols_a * cols_b - (cols_a - 1) * (cols_b - 1)


def count_full_model_parameters(p, k):
    """Size of the full interaction model as usually quoted: 1 + kp + (k/2)p(p-1).

    It counts k parameters per main effect while a k-knot basis has k-1
    columns; the real column counts come from the design's group map.
    """
    if p < 1:
        raise ValueError(f"p must be at least 1, got {p}")
    if k not in (3, 4, 5):
        raise ValueError(f"k must be 3, 4 or 5, got {k}")
    return 1 + k * p + (k * p * (p - 1)) // 2


def full_model_columns(specs):
    """Actual column count of the upper-scope design, plus one for the intercept."""
    specs = list(specs)
    mains = sum(1 if spec.knots == 1 else spec.knots - 1 for spec in specs)
    free = [spec.knots for spec in specs if not spec.is_control]
    interactions = sum(restricted_interaction_width(a, b) for a, b in combinations(free, 2))
    return 1 + mains + interactions


def _check_specs(data, specs):
    seen = set()
    for spec in specs:
        if spec.name in seen:
            raise ConfigError(f"Variable '{spec.name}' is listed twice")
        seen.add(spec.name)
        if spec.name not in data:
            raise MissingColumn(spec.name)


def build_main_effects(data, specs):
    _check_specs(data, specs)
    blocks = [main_block(np.asarray(data[spec.name], dtype=float), spec)[0] for spec in specs]
    return DesignMatrix.from_blocks(blocks, len(data))


class DesignBuilder:
    """Expands every variable once and assembles designs for any set of terms.

    Interaction blocks are built on first use and cached; assembly is safe
    from several threads.
    """

    def __init__(self, data, specs):
        _check_specs(data, specs)
        self.specs = list(specs)
        self.n_rows = len(data)
        self._order = {spec.name: i for i, spec in enumerate(self.specs)}
        self._mains = {}
        self.knots = {}
        for spec in self.specs:
            block, knots = main_block(np.asarray(data[spec.name], dtype=float), spec)
            self._mains[spec.term] = block
            self.knots[spec.name] = knots
        self._interactions = {}
        self._lock = threading.Lock()

    @property
    def main_terms(self):
        return [spec.term for spec in self.specs]

    def eligible_interactions(self):
        names = [spec.name for spec in self.specs if not spec.is_control]
        return [TermId.interaction(a, b) for a, b in combinations(names, 2)]

    def spec(self, name):
        return self.specs[self._order[name]]

    def term_block(self, term):
        if not term.is_interaction:
            return self._mains[term]
        with self._lock:
            block = self._interactions.get(term)
            if block is None:
                a, b = (self._mains[self.spec(name).term] for name in term.names)
                block = restricted_interaction(a, b)
                self._interactions[term] = block
        return block

    def term_order(self, term):
        positions = tuple(self._order[name] for name in term.names)
        return (term.is_interaction, tuple(sorted(positions)))

    def assemble(self, terms):
        ordered = sorted(terms, key=self.term_order)
        return DesignMatrix.from_blocks([self.term_block(term) for term in ordered], self.n_rows)
