"""JSON Schemas for every file the command line writes."""

_num = {"type": "number"}
_nullable_num = {"type": ["number", "null"]}

VERDICTS = {
    "type": "object",
    "required": ["mass", "window", "dimension"],
    "properties": {k: {"type": "boolean"} for k in ("mass", "window", "dimension")},
}

AEP_ROW = {
    "type": "object",
    "required": ["n", "entropy_rate", "betas", "typical"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "entropy_rate": _num,
        "betas": {"type": "object", "additionalProperties": _num},
        "typical": {
            "type": "object",
            "required": ["mass", "log_dim", "verdicts"],
            "properties": {
                "mass": _num,
                "count": {"type": "integer", "minimum": 0},
                "log_dim": _nullable_num,
                "verdicts": VERDICTS,
            },
        },
    },
}

SWEEP = {
    "type": "object",
    "required": ["model_hash", "s", "rows"],
    "properties": {
        "model_hash": {"type": "string"},
        "s": _num,
        "delta": _num,
        "rows": {"type": "array", "items": AEP_ROW},
        "summary": {"type": "object"},
    },
}

ANALYZE = {
    "type": "object",
    "required": ["model_hash", "s", "row"],
    "properties": {"model_hash": {"type": "string"}, "s": _num, "delta": _num, "row": AEP_ROW},
}

DECOMPOSE_ENTRY = {
    "type": "object",
    "required": ["l", "k", "divides_l", "components", "equal_entropy", "atypical_fraction"],
    "properties": {
        "l": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "divides_l": {"type": "boolean"},
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "entropy_rate_Gl", "s_finite_box"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "entropy_rate_Gl": _num,
                    "s_finite_box": _num,
                },
            },
        },
        "equal_entropy": {"type": "boolean"},
        "atypical_fraction": {"type": "number", "minimum": 0, "maximum": 1},
    },
}

DECOMPOSE = {
    "type": "object",
    "required": ["model_hash", "reports"],
    "properties": {
        "model_hash": {"type": "string"},
        "eta": _num,
        "basis_conjugated": {"type": "boolean"},
        "atypical_onset": {"type": ["integer", "null"]},
        "reports": {"type": "array", "items": DECOMPOSE_ENTRY},
    },
}

COMPRESS = {
    "type": "object",
    "required": [
        "n", "delta", "rate_qubits_per_site", "typical_mass",
        "trials", "mean_fidelity", "stderr", "seed",
    ],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "delta": _num,
        "rate_qubits_per_site": {"type": "number", "minimum": 0},
        "typical_mass": {"type": "number", "minimum": 0, "maximum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "mean_fidelity": {"type": "number", "minimum": 0, "maximum": 1},
        "stderr": {"type": "number", "minimum": 0},
        "seed": {"type": "integer"},
    },
}

SELFTEST = {
    "type": "object",
    "required": ["passed", "checks"],
    "properties": {
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "ok", "detail"],
                "properties": {"name": {"type": "string"}, "ok": {"type": "boolean"}, "detail": {"type": "string"}},
            },
        },
    },
}

BY_COMMAND = {
    "analyze": ANALYZE,
    "sweep": SWEEP,
    "decompose": DECOMPOSE,
    "compress": COMPRESS,
    "selftest": SELFTEST,
}
