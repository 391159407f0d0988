"""Python front end for the schur-lab core library."""

import json

from . import _core
from ._core import (
    SCHEMA_VERSION,
    ConfigInvalid,
    SchurLabError,
    cotlar_check,
    multiplier_norm_lower_bound,
    multiplier_ratio,
    riesz_projection_constant,
    schatten_norm,
    schur_product,
    singular_values,
    subalgebra_check,
)

__all__ = [
    "SCHEMA_VERSION",
    "ConfigInvalid",
    "SchurLabError",
    "cotlar_check",
    "multiplier_norm_lower_bound",
    "multiplier_ratio",
    "riesz_projection_constant",
    "run_experiment",
    "schema",
    "schatten_norm",
    "schur_product",
    "singular_values",
    "subalgebra_check",
    "validate",
]


def run_experiment(config, seed=None, jobs=None):
    """Runs a config dict and returns the report dict."""
    return json.loads(_core.run_experiment_json(json.dumps(config), seed, jobs))


def schema(name):
    """Published JSON schema ("config" or "report") as a dict."""
    return json.loads(_core.schema_json(name))


def validate(instance, schema_name):
    """List of problems found validating `instance` against a published schema."""
    return _core.validate_json(json.dumps(instance), _core.schema_json(schema_name))
