"""Run configuration: one JSON document describing ``(q, P, R, (n_k))``.

Example::

    {
        "q": 2,
        "P": ["0.5", "0.5"],
        "R": [0.3, 0.7],
        "perm": {"kind": "finite", "table": [2, 1]},
        "tol": 1e-12,
        "seed": 7
    }
"""

import json
import logging

from dataclasses import dataclass
from typing import Any, Optional, Tuple

from salemgen._constants import Tolerance
from salemgen._utils._parallel import resolve_threads
from salemgen.exceptions import ConfigError, SalemgenError
from salemgen.gensalem import GenSalemSpec
from salemgen.numrep import CoefficientVector, ProbabilitySchedule, ProbabilityVector
from salemgen.permspec import IndexSequence, from_descriptor

logger = logging.getLogger(__name__)

_KNOWN_KEYS = ("q", "P", "R", "schedule", "perm", "tol", "seed", "threads")


@dataclass(frozen=True)
class RunConfig:
    q: int
    P: ProbabilityVector
    R: CoefficientVector
    perm: IndexSequence
    schedule: Optional[ProbabilitySchedule] = None
    tol: float = Tolerance.default
    seed: int = 0
    threads: Optional[int] = None

    @property
    def spec(self) -> GenSalemSpec:
        return GenSalemSpec(self.P, self.R, self.perm)

    @property
    def probability_schedule(self) -> ProbabilitySchedule:
        """The configured schedule, or the constant schedule of ``P``."""
        return self.schedule or ProbabilitySchedule.constant(self.P)

    def resolve_threads(self, threads: Optional[int] = None) -> int:
        return resolve_threads(threads if threads is not None else self.threads)

    def __repr__(self) -> str:
        return (
            f"RunConfig("
            f"q={self.q}, "
            f"P={self.P.p}, "
            f"R={self.R.r}, "
            f"perm={self.perm!r}, "
            f"tol={self.tol}, "
            f"seed={self.seed})"
        )


def _weights(raw: Any, name: str, q: int) -> Tuple[float, ...]:
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"'{name}' must be a list of {q} weights", field=name)
    if len(raw) != q:
        raise ConfigError(f"'{name}' has {len(raw)} weights, expected q={q}", field=name)
    try:
        return tuple(float(weight) for weight in raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"'{name}' holds a non-numeric weight", field=name, cause=e)


def _build(name: str, factory, *args):
    try:
        return factory(*args)
    except SalemgenError as e:
        raise ConfigError(f"Invalid '{name}'", field=name, cause=e)


def parse_config(document: dict) -> RunConfig:
    """Validate a decoded JSON document.

    :raises ConfigError: naming the offending field
    """
    if not isinstance(document, dict):
        raise ConfigError("Config must be a JSON object")
    unknown = sorted(set(document) - set(_KNOWN_KEYS))
    if unknown:
        logger.warning(f"Ignoring unknown config keys: {unknown}")

    for key in ("q", "P", "R"):
        if key not in document:
            raise ConfigError(f"Missing required key '{key}'", field=key)
    q = document["q"]
    if isinstance(q, bool) or not isinstance(q, int) or q < 2:
        raise ConfigError(f"'q' must be an integer >= 2, got {q!r}", field="q")

    P = _build("P", ProbabilityVector, _weights(document["P"], "P", q))
    R = _build("R", CoefficientVector, _weights(document["R"], "R", q))

    schedule = None
    if document.get("schedule") is not None:
        raw = document["schedule"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("'schedule' must be a non-empty list of vectors", field="schedule")
        vectors = [
            _build("schedule", ProbabilityVector, _weights(vector, "schedule", q))
            for vector in raw
        ]
        schedule = ProbabilitySchedule.periodic(vectors)

    perm_descriptor = document.get("perm", {"kind": "identity"})
    if not isinstance(perm_descriptor, dict):
        raise ConfigError("'perm' must be an object with a 'kind'", field="perm")
    perm = _build("perm", from_descriptor, perm_descriptor)

    try:
        tol = float(document.get("tol", Tolerance.default))
    except (TypeError, ValueError) as e:
        raise ConfigError("'tol' must be a number", field="tol", cause=e)
    if not tol > 0.0:
        raise ConfigError(f"'tol' must be positive, got {tol}", field="tol")

    seed = document.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"'seed' must be an integer, got {seed!r}", field="seed")

    threads = document.get("threads")
    if threads is not None:
        if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
            raise ConfigError(
                f"'threads' must be a positive integer, got {threads!r}", field="threads"
            )

    return RunConfig(q, P, R, perm, schedule, tol, seed, threads)


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON config file.

    :raises ConfigError: on unreadable JSON or an invalid field
    :raises OSError: if the file cannot be opened
    """
    with open(path, "r", encoding="utf-8") as fp:
        try:
            document = json.load(fp)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON", cause=e)
    config = parse_config(document)
    logger.debug(f"Loaded {config!r} from {path}")
    return config
