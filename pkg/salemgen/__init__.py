"""Generalized Salem functions and shift operators on P-representations"""

import os
import logging

from typing import Optional, Union

from salemgen._constants import (
    CONFIG_ENV,
    Continuity,
    Deviation,
    DiscontinuitySet,
    EvalMethod,
    Monotonicity,
    PermKind,
    Rationality,
    TailKind,
)
from salemgen.config import RunConfig, load_config, parse_config
from salemgen.exceptions import (
    SalemgenError,
    ConfigError,
    DistributionError,
    DomainError,
    DuplicateTargetError,
    InconsistencyError,
    PointParseError,
    UnclassifiedError,
    UnsupportedPermutationError,
)
from salemgen.gensalem import (
    GenSalemSpec,
    eval_G_feq,
    eval_G_series,
    increment,
    integral,
)
from salemgen.numrep import (
    CoefficientVector,
    DigitString,
    EvalResult,
    ProbabilitySchedule,
    ProbabilityVector,
    Tail,
    decode,
    encode,
)
from salemgen.permspec import BlockPermutation, FinitePermutation, Identity

logger: logging.Logger = logging.getLogger("salemgen")


__all__ = [
    "SalemgenError",
    "ConfigError",
    "DistributionError",
    "DomainError",
    "DuplicateTargetError",
    "InconsistencyError",
    "PointParseError",
    "UnclassifiedError",
    "UnsupportedPermutationError",
    "Continuity",
    "Deviation",
    "DiscontinuitySet",
    "EvalMethod",
    "Monotonicity",
    "PermKind",
    "Rationality",
    "TailKind",
    "RunConfig",
    "GenSalemSpec",
    "CoefficientVector",
    "DigitString",
    "EvalResult",
    "ProbabilitySchedule",
    "ProbabilityVector",
    "Tail",
    "Identity",
    "FinitePermutation",
    "BlockPermutation",
    "decode",
    "encode",
    "eval_G_series",
    "eval_G_feq",
    "increment",
    "integral",
    "load_config",
    "parse_config",
    "open_config",
]


def open_config(
    path: Optional[str] = None,
    log_level: Optional[Union[int, str]] = logging.INFO,
) -> RunConfig:
    """Load the run configuration for a generalized Salem function

    :param str path: (optional) path of the JSON config
    :param int log_level: (optional) The log level to use for the logger
    :return: A validated run configuration
    :rtype: salemgen.config.RunConfig
    """

    logger.setLevel(log_level)
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        raise ConfigError(
            "No config provided. Set a config path either as an environment variable (SALEMGEN_CONFIG) or pass it as an argument.",
            field="config",
        )

    return load_config(path)
