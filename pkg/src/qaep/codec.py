"""
Fixed-length compression onto the typical subspace of an n-block.

A state vector is encoded by its coordinates along the typical
eigenvectors; decoding re-expands and renormalizes. The rate is the number
of qubits needed to index the typical subspace, per site.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .aep import TypicalProjector, typical_projector
from .linalg import kron_columns
from .errors import ContractError, ParameterError, StructuralError, UnsupportedModelError
from .states import BlockState, ClassicalMarkov, IIDProduct, block_density, mean_entropy

UNIT_TOL = 1e-10
SAMPLE_BATCH = 256


@dataclass(frozen=True)
class CodecConfig:
    model: object
    n: int
    delta: float
    qubit_rate: float
    projector: TypicalProjector
    block: BlockState
    basis: np.ndarray  # typical eigenvectors as columns

    @property
    def dim(self) -> int:
        return self.block.dim

    @property
    def subspace_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def qubits(self) -> int:
        return int(round(self.qubit_rate * self.n))


def build_codec(model, n: int, delta: float, delta_prime: Optional[float] = None) -> CodecConfig:
    block = block_density(model, n)
    tp = typical_projector(block, mean_entropy(model), delta, delta_prime)
    basis = block.eigenvectors(tp.indices)
    qubits = (tp.count - 1).bit_length() if tp.count else 0  # ceil(log2 count)
    rate = qubits / block.n
    if rate > math.log2(model.d) + 1e-12:
        raise StructuralError(f"codec rate {rate} exceeds log2 d = {math.log2(model.d)}")
    return CodecConfig(model, block.n, float(delta), rate, tp, block, basis)


class EncodedBlock(NamedTuple):
    coords: np.ndarray
    in_subspace_mass: float


class Decoded(NamedTuple):
    amplitudes: np.ndarray
    ok: bool


def encode(codec: CodecConfig, vector) -> EncodedBlock:
    v = np.asarray(vector, dtype=complex).ravel()
    if v.size != codec.dim:
        raise StructuralError(f"vector has dimension {v.size}, codec expects {codec.dim}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > UNIT_TOL:
        raise ContractError(f"vector norm is {norm!r}, expected 1")
    coords = codec.basis.conj().T @ v
    return EncodedBlock(coords, float(np.vdot(coords, coords).real))


def decode(codec: CodecConfig, block: EncodedBlock) -> Decoded:
    """Re-expand the coordinates; a zero projection decodes to the zero vector with ``ok=False``."""
    coords = np.asarray(block.coords, dtype=complex)
    if coords.size != codec.subspace_dim:
        raise StructuralError(f"{coords.size} coordinates for a {codec.subspace_dim}-dimensional subspace")
    if block.in_subspace_mass <= 0.0:
        return Decoded(np.zeros(codec.dim, dtype=complex), False)
    out = codec.basis @ coords
    return Decoded(out / math.sqrt(block.in_subspace_mass), True)


def fidelity(codec: CodecConfig, vector) -> float:
    """``|<v|decode(encode(v))>|^2``."""
    v = np.asarray(vector, dtype=complex).ravel()
    out = decode(codec, encode(codec, v)).amplitudes
    return float(abs(np.vdot(v, out)) ** 2)


def _sample_words(model, n: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    d = model.d
    if isinstance(model, IIDProduct):
        p = model.site_probs
        symbols = rng.choice(d, size=(trials, n), p=p / p.sum())
    elif isinstance(model, ClassicalMarkov):
        symbols = np.empty((trials, n), dtype=np.int64)
        pi = model.stationary
        symbols[:, 0] = rng.choice(d, size=trials, p=pi / pi.sum())
        cum = np.cumsum(model.transition, axis=1)
        for j in range(1, n):
            u = rng.random(trials)
            rows = cum[symbols[:, j - 1]]
            symbols[:, j] = np.minimum((u[:, None] >= rows).sum(axis=1), d - 1)
    else:
        raise UnsupportedModelError(f"ensemble sampling is not supported for {model!r}")
    weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return symbols @ weights


def ensemble_fidelity(codec: CodecConfig, trials: int, seed: int) -> dict:
    """Mean codec fidelity over eigenvectors of the block drawn with their eigenvalues as weights.

    Uses a Philox counter-based generator seeded with ``seed``. Zero
    projections are counted as failures with fidelity 0.
    """
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    model = codec.model
    if not isinstance(model, (IIDProduct, ClassicalMarkov)):
        raise UnsupportedModelError(f"ensemble sampling is not supported for {model!r}")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    words = _sample_words(model, codec.n, trials, rng)
    block = codec.block
    fids = []
    failures = 0
    for start in range(0, trials, SAMPLE_BATCH):
        chunk = words[start:start + SAMPLE_BATCH]
        vecs = _word_vectors(block, chunk)
        for v in vecs.T:
            enc = encode(codec, v)
            dec = decode(codec, enc)
            failures += not dec.ok
            fids.append(abs(np.vdot(v, dec.amplitudes)) ** 2)
    fids = np.array(fids)
    mean = math.fsum(fids.tolist()) / trials
    var = math.fsum(((fids - mean) ** 2).tolist()) / max(trials - 1, 1)
    return {
        "n": codec.n,
        "delta": codec.delta,
        "rate_qubits_per_site": codec.qubit_rate,
        "typical_mass": codec.projector.mass,
        "trials": int(trials),
        "mean_fidelity": mean,
        "stderr": math.sqrt(var / trials),
        "seed": int(seed),
        "failures": int(failures),
    }


def _word_vectors(block: BlockState, words: np.ndarray) -> np.ndarray:
    if block.diagonal:
        out = np.zeros((block.dim, len(words)), dtype=complex)
        out[words, np.arange(len(words))] = 1.0
        return out
    return kron_columns(block.site_basis, words, block.n)
