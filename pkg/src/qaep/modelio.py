"""Reading, writing and hashing source-model definition files.

Format::

    {"type": "iid",     "site_density": <matrix>}
    {"type": "markov",  "transition":   <matrix>}
    {"type": "dressed", "transition":   <matrix>, "unitary": <matrix>}

A matrix is a list of rows. Entries are real numbers or ``[re, im]`` pairs.
"""

import hashlib
import json
import re
from pathlib import Path

import numpy as np

from .errors import ModelError
from .states import ClassicalMarkov, DressedMarkov, IIDProduct

REQUIRED = {
    "iid": ("site_density",),
    "markov": ("transition",),
    "dressed": ("transition", "unitary"),
}


def _key_line(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _parse_matrix(value, name: str, complex_ok: bool) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ValueError(f"{name} must be a non-empty list of rows")
    width = len(value[0])
    rows = []
    for i, row in enumerate(value):
        if len(row) != width:
            raise ValueError(f"{name} row {i} has {len(row)} entries, expected {width}")
        out = []
        for j, entry in enumerate(row):
            if isinstance(entry, list):
                if not complex_ok:
                    raise ValueError(f"{name}[{i}][{j}] must be a real number")
                if len(entry) != 2 or not all(_is_number(x) for x in entry):
                    raise ValueError(f"{name}[{i}][{j}] must be a number or a [re, im] pair")
                out.append(complex(entry[0], entry[1]))
            elif _is_number(entry):
                out.append(entry)
            else:
                raise ValueError(f"{name}[{i}][{j}] must be a number or a [re, im] pair")
        rows.append(out)
    return np.array(rows, dtype=complex if complex_ok else float)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_model(text: str, source: str = "<model>"):
    """Build a source model from JSON text; errors name ``source:line``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ModelError(f"{source}:1: model must be a JSON object")
    kind = data.get("type")
    if kind not in REQUIRED:
        line = _key_line(text, "type")
        raise ModelError(f"{source}:{line}: 'type' must be one of iid, markov, dressed; got {kind!r}")
    for key in REQUIRED[kind]:
        if key not in data:
            raise ModelError(f"{source}:1: {kind} model needs the field '{key}'")

    current = REQUIRED[kind][0]
    try:
        if kind == "iid":
            return IIDProduct(_parse_matrix(data["site_density"], "site_density", True))
        chain = ClassicalMarkov(_parse_matrix(data["transition"], "transition", False))
        if kind == "markov":
            return chain
        current = "unitary"
        return DressedMarkov(chain, _parse_matrix(data["unitary"], "unitary", True))
    except (ValueError, ModelError) as exc:
        line = _key_line(text, current)
        raise ModelError(f"{source}:{line}: {exc}") from None


def load_model(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"{path}: cannot read model file ({exc.strerror})") from None
    return parse_model(text, str(path))


def _encode_matrix(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]
    return [[float(x) for x in row] for row in m]


def model_to_dict(model) -> dict:
    if isinstance(model, IIDProduct):
        return {"type": "iid", "site_density": _encode_matrix(model.site_density.matrix)}
    if isinstance(model, ClassicalMarkov):
        return {"type": "markov", "transition": _encode_matrix(model.transition)}
    if isinstance(model, DressedMarkov):
        return {
            "type": "dressed",
            "transition": _encode_matrix(model.base.transition),
            "unitary": _encode_matrix(model.site_unitary),
        }
    raise TypeError(f"unknown source model {model!r}")


def dump_model(model, indent=2) -> str:
    return json.dumps(model_to_dict(model), indent=indent)


def model_hash(model) -> str:
    """SHA-256 of the canonical JSON encoding of the model parameters."""
    canon = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
