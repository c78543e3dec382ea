# File: models/selection.py
"""Bidirectional stepwise search between a lower and an upper scope.

The search starts from every main effect, then repeatedly applies the legal
add or drop move that lowers the criterion (BIC by default) the most. An
interaction may only be active with both of its main effects.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from models.design import DesignBuilder
from models.exceptions import NumericalError
from models.glm import criterion_value, fit, gaussian_log_likelihood, penalty
from models.models import Family, TermId, VariableRole
from utils.config import Config

logger = logging.getLogger(__name__)

ADD = "add"
DROP = "drop"


@dataclass(frozen=True)
class Scope:
    lower: frozenset
    upper: frozenset

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("The lower scope must be contained in the upper scope")
        controls = {term.names[0] for term in self.upper if term.is_control}
        for term in self.upper:
            if term.is_interaction and controls.intersection(term.names):
                raise ValueError(f"Interaction {term} involves a control variable")

    @classmethod
    def from_specs(cls, specs):
        """Controls and fixed mains below; every main and eligible interaction above."""
        lower = {spec.term for spec in specs if spec.role in (VariableRole.CONTROL, VariableRole.FIXED)}
        upper = set(lower) | {spec.term for spec in specs}
        names = [spec.name for spec in specs if not spec.is_control]
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                upper.add(TermId.interaction(a, b))
        return cls(frozenset(lower), frozenset(upper))


def missing_parents(term, active):
    if not term.is_interaction:
        return ()
    return tuple(TermId.main(name) for name in term.names if TermId.main(name) not in active)


@dataclass(frozen=True)
class TermSet:
    active: frozenset = field(default_factory=frozenset)

    def validate(self, scope):
        if not scope.lower <= self.active:
            raise ValueError(f"Lower-scope terms missing: {sorted(map(str, scope.lower - self.active))}")
        if not self.active <= scope.upper:
            raise ValueError(f"Terms outside the upper scope: {sorted(map(str, self.active - scope.upper))}")
        for term in self.active:
            if missing_parents(term, self.active):
                raise ValueError(f"Interaction {term} is active without both main effects")
        return self

    @property
    def interactions(self):
        return sorted((t for t in self.active if t.is_interaction), key=lambda t: t.sort_key)

    def __contains__(self, term):
        return term in self.active

    def __len__(self):
        return len(self.active)


@dataclass(frozen=True)
class Move:
    action: str
    term: TermId
    implied: tuple = ()  # mains added together with an interaction

    def apply(self, current):
        if self.action == ADD:
            return TermSet(current.active | {self.term, *self.implied})
        return TermSet(current.active - {self.term})

    @property
    def sort_key(self):
        return (self.action != DROP, self.term.sort_key)

    def __str__(self):
        sign = "+" if self.action == ADD else "-"
        if self.implied:
            return f"{sign} {self.term} (with {', '.join(map(str, self.implied))})"
        return f"{sign} {self.term}"


def legal_moves(current, scope):
    moves = []
    for term in scope.upper - current.active:
        moves.append(Move(ADD, term, missing_parents(term, current.active)))

    parents = {TermId.main(name) for term in current.active if term.is_interaction for name in term.names}
    for term in current.active - scope.lower:
        if term in parents:
            continue
        moves.append(Move(DROP, term))
    return sorted(moves, key=lambda move: move.sort_key)


@dataclass(frozen=True)
class SelectionStep:
    move: Move  # None for the starting model
    criterion: float
    n_params: int


@dataclass(frozen=True)
class SelectionResult:
    terms: TermSet
    fit: object
    design: object
    scope: Scope
    criterion: str
    trace: tuple

    @property
    def criterion_path(self):
        return [step.criterion for step in self.trace]


class GramScorer:
    """Scores gaussian moves from the cross-products of the upper-scope columns.

    The upper design is centred and scaled to unit-norm columns and crossed
    once. For the current model the Cholesky factor of its Gram block is
    kept; an add costs a Schur complement on the new columns, a drop a solve
    on a block of the inverse. The residuals and coefficients come from the
    current exact fit, so only the projections use the Gram matrix.
    """

    RANK_TOL = 1e-10  # residual share of a new column below which it is dependent

    def __init__(self, builder, terms, y):
        self.builder = builder
        self.y = np.asarray(y, dtype=float)
        design = builder.assemble(terms)
        X = design.values - design.values.mean(axis=0)
        norms = np.linalg.norm(X, axis=0)
        norms[norms == 0.0] = 1.0
        self.X = X / norms
        self.norms = norms
        self.gram = self.X.T @ self.X
        self.index = {group.term: np.arange(group.columns.start, group.columns.stop) for group in design.groups}
        self.n = len(self.y)
        logger.debug("Gram matrix of %d upper-scope columns", design.n_columns)

    def columns(self, terms):
        ordered = sorted(terms, key=self.builder.term_order)
        if not ordered:
            return np.empty(0, dtype=int)
        return np.concatenate([self.index[term] for term in ordered])

    def update(self, current, current_fit):
        """Take the accepted model as the base for the next round of moves."""
        self._idx = self.columns(current.active)
        self._residual = self.y - current_fit.fitted
        self._rss = float(self._residual @ self._residual)
        self._beta = current_fit.coefficients[1:] * self.norms[self._idx]
        self._positions = {}
        offset = 0
        for term in sorted(current.active, key=self.builder.term_order):
            width = self.index[term].size
            self._positions[term] = np.arange(offset, offset + width)
            offset += width
        self._factor = self._inverse = None
        if self._idx.size:
            self._factor = scipy.linalg.cho_factor(self.gram[np.ix_(self._idx, self._idx)])
            self._inverse = scipy.linalg.cho_solve(self._factor, np.eye(self._idx.size))

    def rss_after(self, move):
        """RSS of the model after `move`, or None if it makes the design rank deficient."""
        if move.action == DROP:
            positions = self._positions[move.term]
            beta = self._beta[positions]
            block = self._inverse[np.ix_(positions, positions)]
            return self._rss + float(beta @ scipy.linalg.solve(block, beta, assume_a="pos"))

        added = self.columns((move.term, *move.implied))
        gram_aa = self.gram[np.ix_(added, added)]
        schur = gram_aa
        if self._idx.size:
            gram_ca = self.gram[np.ix_(self._idx, added)]
            schur = gram_aa - gram_ca.T @ scipy.linalg.cho_solve(self._factor, gram_ca)
        try:
            lower = scipy.linalg.cholesky(schur, lower=True)
        except np.linalg.LinAlgError:
            return None
        if np.any(np.diag(lower) ** 2 <= self.RANK_TOL * np.diag(gram_aa)):
            return None
        z = scipy.linalg.solve_triangular(lower, self.X[:, added].T @ self._residual, lower=True)
        return self._rss - float(z @ z)

    def n_params_after(self, move):
        if move.action == DROP:
            return 1 + self._idx.size - self._positions[move.term].size
        return 1 + self._idx.size + self.columns((move.term, *move.implied)).size

    def score(self, move, criterion):
        rss = self.rss_after(move)
        if rss is None:
            return None
        log_likelihood = gaussian_log_likelihood(rss, self.n)
        return -2.0 * log_likelihood + penalty(criterion, self.n) * self.n_params_after(move)


def _evaluate(builder, y, family, criterion, terms):
    try:
        candidate = fit(builder.assemble(terms.active), y, family, warn=False)
    except NumericalError as e:
        logger.debug("Skipping candidate: %s", e)
        return None
    if not candidate.converged:
        return None
    return candidate, criterion_value(candidate, criterion)


def _best_by_refit(pool, moves, builder, y, family, criterion, current):
    results = list(pool.map(
        lambda move: _evaluate(builder, y, family, criterion, move.apply(current)), moves))
    best = None
    for move, result in zip(moves, results):
        if result is None:
            continue
        candidate, value = result
        logger.debug("  %-30s %s = %.4f", move, criterion.upper(), value)
        if best is None or (value, move.sort_key) < (best[2], best[0].sort_key):
            best = (move, candidate, value)
    return best


def _best_by_gram(scorer, pool, moves, builder, y, family, criterion, current):
    """Rank moves on the Gram scores; the winner is refit exactly before it is compared."""
    scores = list(pool.map(lambda move: scorer.score(move, criterion), moves))
    ranked = sorted(((value, move.sort_key, move) for move, value in zip(moves, scores) if value is not None),
                    key=lambda item: item[:2])
    for value, _, move in ranked:
        logger.debug("  %-30s %s ~ %.4f", move, criterion.upper(), value)
        result = _evaluate(builder, y, family, criterion, move.apply(current))
        if result is not None:
            return (move, *result)
    return None


def stepwise_select(data, specs, y, family=Family.GAUSSIAN, *, criterion="bic",
                    max_workers=None, builder=None, max_steps=None):
    """Greedy bidirectional search; returns a SelectionResult.

    Ties between moves with equal criterion prefer drops, then the smaller
    TermId. Candidates that are rank deficient or fail to converge are skipped.
    Gaussian moves are ranked by GramScorer and only the chosen one is refit;
    binomial moves are each refit by IRLS.
    `max_steps` caps the number of accepted moves; None runs to convergence.
    """
    family = Family(family)
    y = np.asarray(y, dtype=float)
    builder = builder or DesignBuilder(data, specs)
    scope = Scope.from_specs(builder.specs)
    current = TermSet(frozenset(builder.main_terms)).validate(scope)

    current_fit = fit(builder.assemble(current.active), y, family)
    current_value = criterion_value(current_fit, criterion)
    trace = [SelectionStep(None, current_value, current_fit.n_params)]
    logger.info("Start: %d main effects, %s = %.4f", len(current), criterion.upper(), current_value)

    scorer = GramScorer(builder, scope.upper, y) if family is Family.GAUSSIAN else None
    workers = max(1, int(max_workers or Config.RWA_THREADS))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            if max_steps is not None and len(trace) > max_steps:
                logger.info("Stopped after %d steps", max_steps)
                break
            moves = legal_moves(current, scope)
            if not moves:
                break
            if scorer is not None:
                scorer.update(current, current_fit)
                best = _best_by_gram(scorer, pool, moves, builder, y, family, criterion, current)
            else:
                best = _best_by_refit(pool, moves, builder, y, family, criterion, current)

            if best is None or best[2] >= current_value:
                break
            move, current_fit, current_value = best
            current = move.apply(current)
            trace.append(SelectionStep(move, current_value, current_fit.n_params))
            logger.info("Step %d: %s, %s = %.4f", len(trace) - 1, move, criterion.upper(), current_value)

    current.validate(scope)
    logger.info("Selected %d terms (%d interactions)", len(current), len(current.interactions))
    return SelectionResult(
        terms=current,
        fit=current_fit,
        design=builder.assemble(current.active),
        scope=scope,
        criterion=criterion,
        trace=tuple(trace),
    )
