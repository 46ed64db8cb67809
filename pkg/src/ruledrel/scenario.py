"""Scenario files: a TOML document describing a surface, a normalization and a grid.

Example::

    [constants]
    c3 = 2.0

    [surface]
    delta = "1"
    kappa = "0"
    lambda = "0"
    u_domain = [0.0, 1.5]

    [normalization]
    kind = "central"          # euclidean | central | polar | right | product | sphere
    g = "c3 - u"

    [grid]
    nu = 21
    nv = 21
    v_domain = [0.1, 2.0]

    [[outputs]]
    type = "sphere"
    expect = "proper"

Names from ``[constants]`` are substituted into every expression string as
literal numbers before parsing.  For ``kind = "sphere"`` the table also holds
``builder`` and its numeric parameters.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .expr import SmoothFn1
from .geom_core import RuledSurface
from .normalizations import (
    make_central,
    make_euclidean,
    make_polar,
    make_product,
    make_right,
)
from .relnorm import SupportField
from .spheres import (
    SphereBuild,
    build_improper_conoidal,
    build_improper_nonconoidal,
    build_proper_conoidal,
    build_proper_nonconoidal,
)
from .verify import DEFAULT_TOLERANCES


class ScenarioError(ValueError):
    """Malformed scenario file (exit code 2)."""


KINDS = ("euclidean", "central", "polar", "right", "product", "sphere")
INGREDIENTS = {
    "euclidean": (),
    "central": ("g",),
    "polar": ("f",),
    "right": ("f", "g"),
    "product": ("a", "b"),
}
BUILDERS = {
    "improper_conoidal": (build_improper_conoidal, ("c1", "c2", "c3")),
    "improper_nonconoidal": (build_improper_nonconoidal, ("g0", "g0p", "g0pp")),
    "proper_conoidal": (build_proper_conoidal, ("c", "c1", "c2", "c3")),
    "proper_nonconoidal": (build_proper_nonconoidal, ("c", "g0", "g0p", "g0pp")),
}
OUTPUT_TYPES = ("table", "report", "mesh", "classify", "sphere")
EXPRESSION_VARIABLE = {"f": "u", "g": "u", "a": "u", "b": "v"}


@dataclass
class Grid:
    nu: int
    nv: int
    v_domain: tuple[float, float]


@dataclass
class Scenario:
    name: str
    delta: SmoothFn1
    kappa: SmoothFn1
    lam: SmoothFn1
    u_domain: tuple[float, float]
    kind: str
    ingredients: dict
    grid: Grid
    outputs: list[dict] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    sphere_builder: str | None = None
    sphere_params: dict = field(default_factory=dict)

    def surface(self) -> RuledSurface:
        return RuledSurface(self.delta, self.kappa, self.lam, self.u_domain)

    def support(self, surface: RuledSurface) -> tuple[SupportField, SphereBuild | None]:
        """The support function, plus the sphere build when ``kind = "sphere"``."""
        k = self.kind
        if k == "euclidean":
            return make_euclidean(surface), None
        if k == "central":
            return make_central(surface, self.ingredients["g"]), None
        if k == "polar":
            return make_polar(surface, self.ingredients["f"]), None
        if k == "right":
            return make_right(surface, self.ingredients["f"], self.ingredients["g"], self.grid.v_domain), None
        if k == "product":
            return make_product(surface, self.ingredients["a"], self.ingredients["b"]), None
        fn, names = BUILDERS[self.sphere_builder]
        build = fn(surface, *(self.sphere_params[n] for n in names), v_domain=self.grid.v_domain)
        return build.support, build


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where} must be a number")
    return float(value)


def _interval(value, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioError(f"{where} must be a two-element list")
    a, b = _number(value[0], where), _number(value[1], where)
    if not a < b:
        raise ScenarioError(f"{where} must be a nonempty interval")
    return a, b


def _expression(source, constants: dict, where: str, variable: str = "u") -> SmoothFn1:
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        return SmoothFn1.constant(float(source))
    if not isinstance(source, str):
        raise ScenarioError(f"{where} must be an expression string or a number")
    return SmoothFn1.from_expr(source, constants, variable)


def _table(doc: dict, key: str, required: bool = True) -> dict:
    value = doc.get(key)
    if value is None:
        if required:
            raise ScenarioError(f"missing [{key}] table")
        return {}
    if not isinstance(value, dict):
        raise ScenarioError(f"[{key}] must be a table")
    return value


def parse_scenario(doc: dict, name: str = "scenario") -> Scenario:
    """Validate a decoded TOML document; expression errors propagate as ExprError."""
    constants = {k: _number(v, f"constants.{k}") for k, v in _table(doc, "constants", False).items()}
    surf = _table(doc, "surface")
    for key in ("delta", "kappa", "lambda", "u_domain"):
        if key not in surf:
            raise ScenarioError(f"surface.{key} is required")
    delta = _expression(surf["delta"], constants, "surface.delta")
    kappa = _expression(surf["kappa"], constants, "surface.kappa")
    lam = _expression(surf["lambda"], constants, "surface.lambda")
    u_domain = _interval(surf["u_domain"], "surface.u_domain")

    norm = _table(doc, "normalization")
    kind = norm.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"normalization.kind must be one of {', '.join(KINDS)}")
    ingredients: dict = {}
    builder = None
    params: dict = {}
    if kind == "sphere":
        builder = norm.get("builder")
        if builder not in BUILDERS:
            raise ScenarioError(f"normalization.builder must be one of {', '.join(BUILDERS)}")
        for pname in BUILDERS[builder][1]:
            if pname not in norm:
                raise ScenarioError(f"normalization.{pname} is required for builder {builder}")
            value = norm[pname]
            if isinstance(value, str):
                value = constants.get(value, value)
            params[pname] = _number(value, f"normalization.{pname}")
    else:
        for iname in INGREDIENTS[kind]:
            if iname not in norm:
                raise ScenarioError(f"normalization.{iname} is required for kind {kind}")
            variable = "V" if kind == "polar" else EXPRESSION_VARIABLE[iname]
            ingredients[iname] = _expression(norm[iname], constants, f"normalization.{iname}", variable)

    grid_t = _table(doc, "grid", False)
    nu = grid_t.get("nu", 11)
    nv = grid_t.get("nv", 11)
    for label, n in (("nu", nu), ("nv", nv)):
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ScenarioError(f"grid.{label} must be an integer >= 2")
    if "v_domain" in grid_t:
        v_domain = _interval(grid_t["v_domain"], "grid.v_domain")
    else:
        v_domain = (1e-2, 2.0) if kind == "central" else (-2.0, 2.0)

    outputs = doc.get("outputs", [])
    if not isinstance(outputs, list) or not all(isinstance(o, dict) for o in outputs):
        raise ScenarioError("outputs must be an array of tables")
    for o in outputs:
        if o.get("type") not in OUTPUT_TYPES:
            raise ScenarioError(f"outputs.type must be one of {', '.join(OUTPUT_TYPES)}")
        if o["type"] == "sphere" and o.get("expect") not in ("proper", "improper", "none"):
            raise ScenarioError("sphere outputs need expect = proper | improper | none")

    tolerances = {}
    for k, v in _table(doc, "tolerances", False).items():
        if k not in DEFAULT_TOLERANCES:
            raise ScenarioError(f"unknown tolerance {k!r}")
        tolerances[k] = _number(v, f"tolerances.{k}")

    return Scenario(
        name=name,
        delta=delta,
        kappa=kappa,
        lam=lam,
        u_domain=u_domain,
        kind=kind,
        ingredients=ingredients,
        grid=Grid(nu, nv, v_domain),
        outputs=outputs,
        tolerances=tolerances,
        sphere_builder=builder,
        sphere_params=params,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return parse_scenario(doc, path.stem)


__all__ = ["Grid", "Scenario", "ScenarioError", "load_scenario", "parse_scenario"]
