# File: models/pipeline.py
import logging
from dataclasses import dataclass

import numpy as np

from models.design import DesignBuilder
from models.exceptions import ConfigError, MissingColumn, NonBinaryResponse
from models.glm import fit
from models.models import Family
from models.residualize import residualize_interactions
from models.rwa import relative_weights
from models.selection import Scope, SelectionResult, SelectionStep, TermSet, stepwise_select

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    selection: SelectionResult
    residualized: object
    report: object


def response_vector(data, response, family):
    if response not in data:
        raise MissingColumn(response)
    y = data[response]
    if Family(family) is Family.BINOMIAL:
        bad = y[~y.isin([0, 1])]
        if len(bad):
            # row numbers count data rows from 1, as in the input file
            raise NonBinaryResponse(int(bad.index[0]) + 1, bad.iloc[0])
    return np.asarray(y, dtype=float)


def full_model(data, specs, y, family, builder=None):
    """Upper-scope model, used when selection is switched off."""
    builder = builder or DesignBuilder(data, specs)
    scope = Scope.from_specs(builder.specs)
    terms = TermSet(scope.upper)
    design = builder.assemble(terms.active)
    model = fit(design, y, family)
    step = SelectionStep(None, model.bic, model.n_params)
    return SelectionResult(terms, model, design, scope, "bic", (step,))


def run_pipeline(data, response, specs, family=Family.GAUSSIAN, *, selection=True,
                 criterion="bic", max_workers=None, max_steps=None):
    """Select the model, residualize its interactions and compute relative weights."""
    family = Family(family)
    specs = list(specs)
    if response in {spec.name for spec in specs}:
        raise ConfigError(f"Response '{response}' is also listed as a predictor")
    y = response_vector(data, response, family)
    builder = DesignBuilder(data, specs)

    if selection:
        selected = stepwise_select(data, specs, y, family, criterion=criterion,
                                   max_workers=max_workers, builder=builder, max_steps=max_steps)
    else:
        logger.info("Selection switched off; analysing the full interaction model")
        selected = full_model(data, specs, y, family, builder=builder)

    residualized = residualize_interactions(selected.design)
    report = relative_weights(residualized, y, family)
    return PipelineResult(selected, residualized, report)
