"""Modifiable temporal belief networks."""

import json as _json

from ._core import (
    CyclicStructureError,
    EnumerationCapError,
    InconclusiveRunError,
    MissingRowError,
    Model,
    ModelError,
    MtbnError,
    ParseError,
    UnknownInstanceError,
    ZeroEvidenceError,
    apply_intervention,
    check,
    interval_relation,
    make_interval,
    make_manipulation,
    query,
    simulate,
    stream_uniform,
    structure_count,
    transform_noncausal,
    validate,
)
from . import _core

__version__ = "0.1.0"


def deploy(model):
    """Deployed instances and candidate edges as a dict."""
    return _json.loads(_core.deploy_json(model))


def export_bn(model):
    """Ordinary Bayesian network equivalent to the model, as a dict."""
    return _json.loads(_core.export_bn_json(model))


def intervene(model, bindings, target, evidence="", **kwargs):
    """p(target | do(bindings), evidence). Bindings map names to values."""
    m, clamp = apply_intervention(model, list(bindings.items()))
    ev = ",".join([e for e in [evidence] if e] + clamp)
    return query(m, target, ev, **kwargs)
