"""JSON model configuration: validation, unit handling and model construction."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .errors import InvalidModelError
from .models import (
    AMU,
    DEFAULT_J_CAP,
    DEFAULT_T_MAX,
    HF_CONSTANTS,
    ContinuousPower,
    DiscreteLevels,
    InternalModel,
    Monoatomic,
    PhysicalConstants,
    Product,
    QuadraticClassical,
    SpectroscopicConstants,
    build_hf_model,
    inertia_from_rotational_constant,
)

__all__ = ["ModelConfig", "load_schema", "parse_config", "load_config", "levels_config", "constants_from_doc"]


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("model_config.schema.json").read_text())


@dataclass(frozen=True)
class ModelConfig:
    model: InternalModel
    constants: PhysicalConstants
    t_max: float
    doc: dict


def constants_from_doc(doc: dict) -> PhysicalConstants:
    mass = float(doc["molecularMass"]) * (AMU if doc.get("massUnit", "amu") == "amu" else 1.0)
    spec = doc.get("constants", "SI")
    if spec == "SI":
        return PhysicalConstants(mass=mass)
    if spec == "reduced":
        return PhysicalConstants.reduced(mass)
    return PhysicalConstants(**{**dict(k_B=PhysicalConstants.k_B, h=PhysicalConstants.h, c=PhysicalConstants.c),
                                **spec}, mass=mass)


def _factor(f: dict, scale: float, constants: PhysicalConstants, t_max: float) -> InternalModel:
    kind = f["type"]
    if kind == "mono":
        return Monoatomic(scale * f.get("epsilon0", 0.0))
    if kind == "continuous_power":
        a = f["alpha"]
        # a density c I^a dI in the config unit becomes c scale^-(a+1) in joules
        return ContinuousPower(f.get("coefficient", 1.0) * scale ** -(a + 1), a, scale * f.get("epsilon0", 0.0))
    if kind == "discrete_levels":
        es = f["energies"]
        rs = f.get("degeneracies", [1.0] * len(es))
        if len(rs) != len(es):
            raise InvalidModelError("energies and degeneracies differ in length")
        return DiscreteLevels(tuple(scale * e for e in es), tuple(rs))
    if kind == "quadratic":
        if "inertias" in f:
            ins = tuple(f["inertias"])
        else:
            ins = (inertia_from_rotational_constant(f["rotationalConstant"], constants),) * f["dim"]
        return QuadraticClassical(ins, scale * f.get("epsilon0", 0.0))
    if kind == "hf_variant":
        s = f.get("spectroscopic", {})
        sc = SpectroscopicConstants(
            nu_e=s.get("nu_e", HF_CONSTANTS.nu_e),
            nu_e_x_e=s.get("nu_e_x_e", HF_CONSTANTS.nu_e_x_e),
            B_over_hc=s.get("B", HF_CONSTANTS.B_over_hc),
            alpha_over_hc=s.get("alpha", HF_CONSTANTS.alpha_over_hc),
            D_over_hc=s.get("D", HF_CONSTANTS.D_over_hc),
        )
        inertia = inertia_from_rotational_constant(sc.B_over_hc, constants)
        return build_hf_model(f["variant"], sc, inertia, constants, t_max, f.get("jCap", DEFAULT_J_CAP))
    raise InvalidModelError(f"unknown factor type {kind!r}")


def parse_config(doc: dict) -> ModelConfig:
    """Validate a configuration document and build the (product) model it describes."""
    jsonschema.validate(doc, load_schema())
    constants = constants_from_doc(doc)
    t_max = float(doc.get("tMax", DEFAULT_T_MAX))
    scale = constants.hc if doc.get("units", "J") == "cm-1" else 1.0
    factors = [_factor(f, scale, constants, t_max) for f in doc["factors"]]
    model = factors[0] if len(factors) == 1 else Product(tuple(factors))
    return ModelConfig(model, constants, t_max, doc)


def load_config(path) -> ModelConfig:
    with open(path) as fh:
        return parse_config(json.load(fh))


def levels_config(levels: DiscreteLevels, source: dict) -> dict:
    """Configuration document for a discrete model, keeping mass and constants of ``source``."""
    doc = {k: source[k] for k in ("molecularMass", "massUnit", "constants", "tMax") if k in source}
    doc["units"] = "J"
    doc["factors"] = [{
        "type": "discrete_levels",
        "energies": list(levels.energies),
        "degeneracies": list(levels.degeneracies),
    }]
    return doc
