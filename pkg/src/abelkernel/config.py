"""JSON ingestion and serialization of measure, matrix and run specifications.

Complex numbers are written as ``[re, im]`` pairs (plain numbers are read as
real). Atom positions and weights may be numbers or strings such as
``"0.25"`` or ``"1/3"``. Validation errors carry the JSON pointer of the offending value.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .abel import SGrid
from .coeff import CoeffMatrix, Dense, Diagonal, DiscCombination, Identity, RankOne, rank_one_from_coeffs
from .measures import IFS, Atomic, Density, DiscretizedMeasure, Lebesgue, discretize

DEFAULT_RESOLUTION = 512


class SpecError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_POSITION = {"oneOf": [{"type": "number"}, {"type": "string", "minLength": 1}]}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_WEIGHT = {"oneOf": [_POSITIVE, {"type": "string", "minLength": 1}]}

MEASURE_SCHEMAS = {
    "atomic": {
        "type": "object",
        "properties": {
            "type": {"const": "atomic"},
            "atoms": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "prefixItems": [_POSITION, _WEIGHT], "minItems": 2, "maxItems": 2},
            },
        },
        "required": ["type", "atoms"],
        "additionalProperties": False,
    },
    "lebesgue": {
        "type": "object",
        "properties": {
            "type": {"const": "lebesgue"},
            "mass": _POSITIVE,
            "resolution": {"type": "integer", "minimum": 1},
        },
        "required": ["type"],
        "additionalProperties": False,
    },
    "density": {
        "type": "object",
        "properties": {
            "type": {"const": "density"},
            "grid": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
            "mass": _POSITIVE,
            "resolution": {"type": "integer", "minimum": 1},
        },
        "required": ["type", "grid"],
        "additionalProperties": False,
    },
    "ifs": {
        "type": "object",
        "properties": {
            "type": {"const": "ifs"},
            "scale": {"type": "integer", "minimum": 2},
            "digits": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
            "depth": {"type": "integer", "minimum": 1},
            "mass": _POSITIVE,
        },
        "required": ["type", "scale", "digits"],
        "additionalProperties": False,
    },
}

_SCALE = {"type": "number", "exclusiveMinimum": 0}

MATRIX_SCHEMAS = {
    "identity": {
        "type": "object",
        "properties": {
            "type": {"const": "identity"},
            "order": {"type": ["integer", "null"], "minimum": 0},
            "scale": _SCALE,
        },
        "required": ["type"],
        "additionalProperties": False,
    },
    "diagonal": {
        "type": "object",
        "properties": {
            "type": {"const": "diagonal"},
            "d": {"type": "array", "items": _COMPLEX},
            "scale": _SCALE,
        },
        "required": ["type", "d"],
        "additionalProperties": False,
    },
    "rank_one": {
        "type": "object",
        "properties": {
            "type": {"const": "rank_one"},
            "x": {"type": "array", "minItems": 1, "items": _COMPLEX},
            "power_law": {"type": "number", "exclusiveMinimum": 0.5},
            "amplitude": _COMPLEX,
            "normalize": {"type": "boolean"},
            "normalize_measure": {"type": "object"},
            "scale": _SCALE,
        },
        "required": ["type"],
        "oneOf": [{"required": ["x"]}, {"required": ["power_law"]}],
        "additionalProperties": False,
    },
    "dense": {
        "type": "object",
        "properties": {
            "type": {"const": "dense"},
            "entries": {"type": "array", "items": {"type": "array", "items": _COMPLEX}},
            "scale": _SCALE,
        },
        "required": ["type", "entries"],
        "additionalProperties": False,
    },
}


def _pointer(base: str, path) -> str:
    parts = [str(p).replace("~", "~0").replace("/", "~1") for p in path]
    return base + "".join("/" + p for p in parts)


def _validate(doc, schema, base: str):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SpecError(_pointer(base, err.absolute_path), err.message)


def _dispatch(doc, schemas, base: str, kind: str) -> str:
    if not isinstance(doc, dict):
        raise SpecError(base, f"{kind} spec must be an object")
    t = doc.get("type")
    if t not in schemas:
        raise SpecError(base + "/type", f"unknown {kind} type {t!r}; expected one of {sorted(schemas)}")
    _validate(doc, schemas[t], base)
    return t


def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def dump_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def _fraction(v, pointer: str):
    if not isinstance(v, str):
        return v
    try:
        return Fraction(v.strip())
    except (ValueError, ZeroDivisionError):
        raise SpecError(pointer, f"cannot parse {v!r} as a number or fraction") from None


def parse_measure(doc, base: str = ""):
    """Build a measure spec object from its JSON form."""
    t = _dispatch(doc, MEASURE_SCHEMAS, base, "measure")
    try:
        if t == "atomic":
            atoms = []
            for i, (x, w) in enumerate(doc["atoms"]):
                pos = _fraction(x, f"{base}/atoms/{i}/0")
                wt = float(_fraction(w, f"{base}/atoms/{i}/1"))
                if not wt > 0:
                    raise SpecError(f"{base}/atoms/{i}/1", f"weight must be positive, got {w!r}")
                atoms.append((pos, wt))
            return Atomic(tuple(atoms))
        if t == "lebesgue":
            return Lebesgue(doc.get("mass", 1.0))
        if t == "density":
            return Density(tuple(doc["grid"]), doc.get("mass"))
        return IFS(doc["scale"], tuple(doc["digits"]), doc.get("depth", 8), doc.get("mass", 1.0))
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(base, str(exc)) from None


def load_measure(doc, resolution: int | None = None, base: str = "") -> DiscretizedMeasure:
    spec = parse_measure(doc, base)
    res = resolution or doc.get("resolution") or DEFAULT_RESOLUTION
    try:
        return discretize(spec, res)
    except ValueError as exc:
        raise SpecError(base, str(exc)) from None


def measure_to_json(spec) -> dict:
    if isinstance(spec, Atomic):
        return {"type": "atomic", "atoms": [[x, w] for x, w in spec.atoms]}
    if isinstance(spec, Lebesgue):
        return {"type": "lebesgue", "mass": spec.mass}
    if isinstance(spec, Density):
        out = {"type": "density", "grid": list(spec.density)}
        if spec.mass is not None:
            out["mass"] = spec.mass
        return out
    if isinstance(spec, IFS):
        return {"type": "ifs", "scale": spec.scale, "digits": list(spec.digits), "depth": spec.depth,
                "mass": spec.mass}
    raise TypeError(type(spec).__name__)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def parse_matrix(doc, measure: DiscretizedMeasure | None = None, base: str = "") -> CoeffMatrix:
    """Build a :class:`CoeffMatrix`.

    ``rank_one`` specs with ``"normalize": true`` are normalized against
    ``normalize_measure`` when given, else against ``measure``.
    """
    t = _dispatch(doc, MATRIX_SCHEMAS, base, "matrix")
    try:
        if t == "identity":
            C = Identity(doc.get("order"))
        elif t == "diagonal":
            C = Diagonal([parse_complex(v) for v in doc["d"]])
        elif t == "dense":
            rows = doc["entries"]
            if any(len(r) != len(rows) for r in rows):
                raise SpecError(base + "/entries", "dense matrix must be square")
            C = Dense([[parse_complex(v) for v in r] for r in rows])
        elif "power_law" in doc:
            C = RankOne(power_law=doc["power_law"], amplitude=parse_complex(doc.get("amplitude", 1.0)))
        else:
            x = np.array([parse_complex(v) for v in doc["x"]])
            if doc.get("normalize", False):
                if "normalize_measure" in doc:
                    nm = load_measure(doc["normalize_measure"], base=base + "/normalize_measure")
                elif measure is not None:
                    nm = measure
                else:
                    raise SpecError(base + "/normalize", "normalization needs a measure")
                C = rank_one_from_coeffs(x, nm, normalize=True)
            else:
                C = RankOne(x)
        if "scale" in doc:
            C = C.scaled(doc["scale"])
        return C
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(base, str(exc)) from None


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


RUN_SCHEMA = {
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "matrix": {"type": "object"},
        "measure": {"type": "object"},
        "tol": _POSITIVE,
        "resolution": {"type": "integer", "minimum": 1},
        "grid": {"type": "array", "prefixItems": [{"type": "integer"}, {"type": "integer"}],
                 "minItems": 2, "maxItems": 2},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {
            "type": "object",
            "properties": {
                "radii": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.95},
                          "minItems": 1},
                "angles": {"type": "integer", "minimum": 1},
                "combos": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "reproduction_pairs": {"type": "integer", "minimum": 0},
        "expect": {"enum": ["pass", "fail", "inconclusive"]},
    },
    "required": ["matrix", "measure"],
    "additionalProperties": False,
}

RUN_DEFAULTS = {
    "tol": 1e-8,
    "resolution": DEFAULT_RESOLUTION,
    "grid": [3, 12],
    "seed": 0,
    "samples": {"radii": [0.3, 0.6, 0.9], "angles": 8, "combos": 8},
    "reproduction_pairs": 0,
}


@dataclass
class RunConfig:
    """Normalized verify-measure configuration (defaults filled in)."""

    doc: dict
    source: str | None = field(default=None, compare=False)

    @classmethod
    def from_json(cls, raw: dict, source: str | None = None) -> "RunConfig":
        _validate(raw, RUN_SCHEMA, "")
        doc = copy.deepcopy(RUN_DEFAULTS)
        for k, v in raw.items():
            if k == "samples":
                doc["samples"].update(v)
            else:
                doc[k] = copy.deepcopy(v)
        k0, k1 = doc["grid"]
        if k1 - k0 + 1 < 4 or k0 < 1:
            raise SpecError("/grid", "grid must produce at least 4 samples with k0 >= 1")
        # validate both specs eagerly so errors surface with pointers
        parse_measure(doc["measure"], "/measure")
        _dispatch(doc["matrix"], MATRIX_SCHEMAS, "/matrix", "matrix")
        return cls(doc, source)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SpecError("", f"invalid JSON in {path}: {exc}") from None
        return cls.from_json(raw, str(path))

    def to_json(self) -> dict:
        return copy.deepcopy(self.doc)

    def digest(self) -> str:
        blob = json.dumps(self.doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def tol(self) -> float:
        return float(self.doc["tol"])

    @property
    def seed(self) -> int:
        return int(self.doc["seed"])

    def grid(self) -> SGrid:
        return SGrid.geometric(*self.doc["grid"])

    def measure(self) -> DiscretizedMeasure:
        return load_measure(self.doc["measure"], self.doc.get("resolution"), "/measure")

    def matrix(self, measure: DiscretizedMeasure) -> CoeffMatrix:
        return parse_matrix(self.doc["matrix"], measure, "/matrix")

    def sample_set(self):
        from .verify import DiscSampleSet

        s = self.doc["samples"]
        return DiscSampleSet.default(self.seed, tuple(s["radii"]), s["angles"], s["combos"])

    def reproduction_pairs(self):
        n = self.doc["reproduction_pairs"]
        rng = np.random.default_rng([self.seed, 1])
        r = 0.8 * np.sqrt(rng.uniform(size=(n, 2)))
        a = 2 * np.pi * rng.uniform(size=(n, 2))
        pts = r * np.exp(1j * a)
        return [(complex(p[0]), complex(p[1])) for p in pts]


def parse_vector(doc, base: str = ""):
    """A sequence: list of complex numbers, or {"points": [...], "coeffs": [...]} for an element of V."""
    if isinstance(doc, list):
        try:
            return np.array([parse_complex(v) for v in doc], dtype=complex)
        except (TypeError, ValueError, IndexError):
            raise SpecError(base, "vector entries must be numbers or [re, im] pairs") from None
    if isinstance(doc, dict) and "points" in doc:
        pts = [parse_complex(p) for p in doc["points"]]
        coeffs = [parse_complex(c) for c in doc.get("coeffs", [1.0] * len(pts))]
        try:
            return DiscCombination(tuple(pts), tuple(coeffs))
        except ValueError as exc:
            raise SpecError(base, str(exc)) from None
    raise SpecError(base, "expected a list of numbers or an object with 'points'")
