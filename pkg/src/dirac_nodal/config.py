"""Problem-configuration documents: parsing, strict validation, hashing.

A configuration is a JSON object with required ``mass``, ``potential`` and
``boundary`` sections and optional ``solver`` and ``modes`` sections.
Unknown keys are rejected anywhere in the document, and every diagnostic
names the offending field.  The configuration hash is the SHA-256 of the
canonical (sorted-key, compact) JSON encoding, so logically identical
documents hash identically regardless of key order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import BoundaryConditionError, ConfigError, InputError
from .model import Classical, DiracProblem, ParamDependent
from .potentials import potential_from_json
from .reconstruction import ReconstructionMode
from .solver import EigenSearchConfig, IntegratorConfig

_TOP_KEYS = {"mass", "potential", "boundary", "solver", "modes"}
_SOLVER_KEYS = {"steps", "lambda_tol", "bracket_expansion", "max_iterations"}
_MODE_KEYS = {"reconstruction", "lambda_source"}
_CLASSICAL_KEYS = {"kind", "alpha", "beta"}
_PARAM_KEYS = {"kind", "alpha", "beta", "a0", "b0", "a1", "b1"}


@dataclass(frozen=True)
class SolverSettings:
    steps: int = 4096
    lambda_tol: float = 1e-10
    bracket_expansion: float = 0.6
    max_iterations: int = 48

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(n_steps=self.steps)

    def search(self, require_constants: bool = False) -> EigenSearchConfig:
        return EigenSearchConfig(lambda_tolerance=self.lambda_tol,
                                 bracket_half_width=self.bracket_expansion,
                                 max_iterations=self.max_iterations,
                                 require_constants=require_constants)


@dataclass(frozen=True)
class LoadedConfig:
    problem: DiracProblem
    solver: SolverSettings
    mode: ReconstructionMode
    document: dict

    @property
    def hash(self) -> str:
        return config_hash(self.document)


def config_hash(document: dict) -> str:
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _require_number(obj, key, where):
    if key not in obj:
        raise ConfigError("missing required field", field=f"{where}.{key}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=f"{where}.{key}")
    return float(value)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", field=where)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys {unknown}", field=where)


def _parse_boundary(obj):
    _check_keys(obj, _PARAM_KEYS | _CLASSICAL_KEYS, "boundary")
    kind = obj.get("kind")
    try:
        if kind == "classical":
            _check_keys(obj, _CLASSICAL_KEYS, "boundary")
            return Classical(_require_number(obj, "alpha", "boundary"),
                             _require_number(obj, "beta", "boundary"))
        if kind == "param_dependent":
            _check_keys(obj, _PARAM_KEYS, "boundary")
            return ParamDependent(*(_require_number(obj, k, "boundary")
                                    for k in ("alpha", "beta", "a0", "b0", "a1", "b1")))
    except BoundaryConditionError as exc:
        raise ConfigError(str(exc), field="boundary") from exc
    raise ConfigError(f"kind must be 'classical' or 'param_dependent', got {kind!r}",
                      field="boundary.kind")


def parse_config(document) -> LoadedConfig:
    _check_keys(document, _TOP_KEYS, "<root>")
    for key in ("mass", "potential", "boundary"):
        if key not in document:
            raise ConfigError("missing required section", field=key)
    mass = _require_number(document, "mass", "<root>")
    potential = potential_from_json(document["potential"])
    boundary = _parse_boundary(document["boundary"])

    solver_obj = document.get("solver", {})
    _check_keys(solver_obj, _SOLVER_KEYS, "solver")
    steps = solver_obj.get("steps", 4096)
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise ConfigError("steps must be an integer", field="solver.steps")
    settings = SolverSettings(
        steps=steps,
        lambda_tol=float(solver_obj.get("lambda_tol", 1e-10)),
        bracket_expansion=float(solver_obj.get("bracket_expansion", 0.6)),
        max_iterations=int(solver_obj.get("max_iterations", 48)),
    )

    modes_obj = document.get("modes", {})
    _check_keys(modes_obj, _MODE_KEYS, "modes")
    try:
        mode = ReconstructionMode(
            tag=modes_obj.get("reconstruction", "corrected"),
            lambda_source=modes_obj.get("lambda_source", "numeric"),
        )
        problem = DiracProblem(mass, potential, boundary)
        settings.integrator()
        settings.search()
    except (InputError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(problem=problem, solver=settings, mode=mode,
                        document=document)


def load_config(path) -> LoadedConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}", field=str(path)) from exc
    if not isinstance(document, dict):
        raise ConfigError("top-level document must be an object", field=str(path))
    return parse_config(document)
