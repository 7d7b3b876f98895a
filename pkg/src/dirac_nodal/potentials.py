"""Built-in potential library and JSON (de)serialization.

Every named entry provides a vectorized evaluator and an exact
antiderivative vanishing at 0, so phase integrals of library potentials
carry no quadrature error.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, InputError
from .model import Potential, make_potential_sampled


def _zero(params):
    return (lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def _constant(params):
    c = float(params["c"])
    return (lambda x: np.full_like(np.asarray(x, dtype=float), c),
            lambda x: c * np.asarray(x, dtype=float))


def _sin2x(params):
    return (lambda x: np.sin(2.0 * np.asarray(x, dtype=float)),
            lambda x: 0.5 * (1.0 - np.cos(2.0 * np.asarray(x, dtype=float))))


def _poly(params):
    coeffs = [float(c) for c in params["coeffs"]]
    if not coeffs:
        raise ConfigError("poly potential needs a non-empty coeffs list",
                          field="potential.params.coeffs")
    poly = np.polynomial.Polynomial(coeffs)
    anti = poly.integ()
    return (lambda x: poly(np.asarray(x, dtype=float)),
            lambda x: anti(np.asarray(x, dtype=float)))


def _step(params):
    a = float(params["a"])
    height = float(params["height"])
    if not 0.0 <= a <= np.pi:
        raise ConfigError("step location must lie in [0, pi]",
                          field="potential.params.a")
    return (lambda x: np.where(np.asarray(x, dtype=float) >= a, height, 0.0),
            lambda x: height * np.clip(np.asarray(x, dtype=float) - a, 0.0, None))


_LIBRARY = {
    "zero": (_zero, ()),
    "constant": (_constant, ("c",)),
    "sin2x": (_sin2x, ()),
    "poly": (_poly, ("coeffs",)),
    "step": (_step, ("a", "height")),
}


def library_names():
    return sorted(_LIBRARY)


def named_potential(name: str, **params) -> Potential:
    """Instantiate a library potential by name."""
    try:
        builder, required = _LIBRARY[name]
    except KeyError:
        raise ConfigError(f"unknown potential {name!r}; known: {library_names()}",
                          field="potential.name") from None
    missing = [key for key in required if key not in params]
    if missing:
        raise ConfigError(f"missing parameters {missing} for potential {name!r}",
                          field="potential.params")
    extra = [key for key in params if key not in required]
    if extra:
        raise ConfigError(f"unknown parameters {extra} for potential {name!r}",
                          field="potential.params")
    func, anti = builder(params)
    return Potential(func=func, antiderivative=anti, name=name, params=params)


def potential_from_json(obj) -> Potential:
    """Parse {"kind": "sampled"|"named", ...} into a Potential."""
    if not isinstance(obj, dict):
        raise ConfigError("potential must be an object", field="potential")
    kind = obj.get("kind")
    if kind == "sampled":
        keys = set(obj) - {"kind", "values"}
        if keys:
            raise ConfigError(f"unknown keys {sorted(keys)}", field="potential")
        try:
            return make_potential_sampled(obj["values"])
        except KeyError:
            raise ConfigError("sampled potential needs 'values'",
                              field="potential.values") from None
        except InputError as exc:
            raise ConfigError(str(exc), field="potential.values") from exc
    if kind == "named":
        keys = set(obj) - {"kind", "name", "params"}
        if keys:
            raise ConfigError(f"unknown keys {sorted(keys)}", field="potential")
        if "name" not in obj:
            raise ConfigError("named potential needs 'name'", field="potential.name")
        return named_potential(obj["name"], **obj.get("params", {}))
    raise ConfigError(f"potential kind must be 'sampled' or 'named', got {kind!r}",
                      field="potential.kind")


def potential_to_json(potential: Potential) -> dict:
    return potential.to_json()
