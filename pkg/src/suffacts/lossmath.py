"""Numeric kernels for the training objectives.

Implements mean pooling over token vectors, tempered cosine similarity,
the binary-NCE contrastive loss

    L = -[log sigmoid(cos(a, p) - tau) + sum_k log sigmoid(1 - (cos(a, n_k) - tau))]

with analytic gradients for every input vector, the 1/m-scaled cross-entropy

    L = -(1/m) * log p[gold]

and a central finite-difference gradient checker used to verify both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np

from .corpus import CorpusError, iter_jsonl


class LossError(ValueError):
    """A kernel received inputs outside its domain."""


class Role(str, Enum):
    ANCHOR = "ANCHOR"
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"

    @classmethod
    def parse(cls, text: str) -> "Role":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise CorpusError(f"unknown embedding role {text!r}") from None


@dataclass
class EmbeddingRecord:
    """Last-layer token vectors for one instance, pre-pooling."""

    instance_id: str
    role: Role
    token_vectors: np.ndarray

    def validate(self) -> None:
        mat = np.asarray(self.token_vectors, dtype=float)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
            raise LossError(
                f"embedding {self.instance_id}: token_vectors must be a non-empty matrix"
            )
        if not np.all(np.isfinite(mat)):
            raise LossError(f"embedding {self.instance_id}: non-finite vector entries")

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "role": self.role.value,
            "vectors": np.asarray(self.token_vectors, dtype=float).tolist(),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "EmbeddingRecord":
        try:
            record = cls(
                instance_id=str(payload["instance_id"]),
                role=Role.parse(payload["role"]),
                token_vectors=np.asarray(payload["vectors"], dtype=float),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"bad embedding record: {exc}") from None
        record.validate()
        return record


def read_embeddings(path) -> Iterator[EmbeddingRecord]:
    for line_no, payload in iter_jsonl(path):
        try:
            yield EmbeddingRecord.from_json(payload)
        except (CorpusError, LossError) as exc:
            raise CorpusError(f"{path}:{line_no}: {exc}") from None


@dataclass(frozen=True)
class LossConfig:
    tau: float = 1.5
    label_space_size: int = 3

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise LossError("tau must be finite")
        if self.label_space_size not in (2, 3):
            raise LossError("label space size must be 2 or 3")


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def _as_vector(value, name: str) -> np.ndarray:
    vec = np.asarray(value, dtype=float)
    if vec.ndim != 1 or vec.size < 1:
        raise LossError(f"{name} must be a 1-d vector")
    if not np.all(np.isfinite(vec)):
        raise LossError(f"{name} has non-finite entries")
    return vec


def _sigmoid(z: float) -> float:
    # tanh form is stable for large |z|
    return 0.5 * (1.0 + math.tanh(0.5 * z))


def _log_sigmoid(z: float) -> float:
    # log sigmoid(z) = -softplus(-z)
    return -float(np.logaddexp(0.0, -z))


def mean_pool(record) -> np.ndarray:
    """Arithmetic mean over the token axis of a [n_tokens x d] matrix."""
    mat = record.token_vectors if isinstance(record, EmbeddingRecord) else record
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 1:
        raise LossError("mean_pool needs at least one token vector")
    if not np.all(np.isfinite(mat)):
        raise LossError("mean_pool input has non-finite entries")
    return mat.mean(axis=0)


def _cosine_with_grads(a: np.ndarray, b: np.ndarray):
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise LossError("cosine similarity undefined for zero-norm vectors")
    cos = float(a @ b) / (norm_a * norm_b)
    grad_a = b / (norm_a * norm_b) - cos * a / norm_a**2
    grad_b = a / (norm_a * norm_b) - cos * b / norm_b**2
    return cos, grad_a, grad_b


def similarity(a, b, tau: float = 1.5) -> float:
    """Cosine similarity with the temperature subtracted: cos(a, b) - tau."""
    va = _as_vector(a, "a")
    vb = _as_vector(b, "b")
    if va.shape != vb.shape:
        raise LossError("similarity inputs must share a dimension")
    cos, _, _ = _cosine_with_grads(va, vb)
    return cos - tau


def contrastive_loss(
    anchor,
    positive,
    negatives: Sequence = (),
    tau: float = 1.5,
):
    """Binary-NCE contrastive loss and its analytic gradients.

    Returns (loss, grads) where grads maps "anchor" and "positive" to vectors
    and "negatives" to a list of vectors, one per negative.  The loss is
    non-negative, decreases as the anchor-positive cosine rises, and decreases
    as anchor-negative cosines fall.
    """
    a = _as_vector(anchor, "anchor")
    p = _as_vector(positive, "positive")
    if a.shape != p.shape:
        raise LossError("anchor and positive must share a dimension")

    cos_p, dcos_da, dcos_dp = _cosine_with_grads(a, p)
    z_p = (cos_p - tau)
    loss = -_log_sigmoid(z_p)
    # d(-log sigmoid(z))/dz = -sigmoid(-z)
    grad_a = -_sigmoid(-z_p) * dcos_da
    grad_p = -_sigmoid(-z_p) * dcos_dp

    grad_negatives = []
    for i, negative in enumerate(negatives):
        n = _as_vector(negative, f"negative[{i}]")
        if n.shape != a.shape:
            raise LossError(f"negative[{i}] must share the anchor dimension")
        cos_n, dncos_da, dncos_dn = _cosine_with_grads(a, n)
        z_n = 1.0 - (cos_n - tau)
        loss += -_log_sigmoid(z_n)
        coeff = _sigmoid(-z_n)  # dL/dcos_n
        grad_a = grad_a + coeff * dncos_da
        grad_negatives.append(coeff * dncos_dn)

    if not math.isfinite(loss):
        raise LossError("contrastive loss is non-finite")
    return float(loss), {"anchor": grad_a, "positive": grad_p, "negatives": grad_negatives}


def cross_entropy(probs, gold: int, m: int) -> float:
    """The 1/m-scaled negative log-likelihood of the gold class.

    The sum-to-one check is loose (1e-3) so finite-difference probes of the
    gradient stay inside the domain.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size != m:
        raise LossError(f"probs must be a vector of length m={m}")
    if not (0 <= gold < m):
        raise LossError(f"gold index {gold} out of range for m={m}")
    if np.any(p < 0):
        raise LossError("probabilities must be non-negative")
    if abs(float(p.sum()) - 1.0) > 1e-3:
        raise LossError(f"probabilities sum to {float(p.sum()):.6f}, expected 1")
    if p[gold] == 0.0:
        raise LossError("gold probability is zero: loss is infinite")
    return -math.log(float(p[gold])) / m


def cross_entropy_grad(probs, gold: int, m: int) -> np.ndarray:
    """Gradient of cross_entropy with respect to the probability vector."""
    cross_entropy(probs, gold, m)  # domain checks
    p = np.asarray(probs, dtype=float)
    grad = np.zeros(m)
    grad[gold] = -1.0 / (m * float(p[gold]))
    return grad


def joint_loss(ce: float, cl: float, anchor_is_insufficient: bool = False) -> float:
    """Supervised loss plus the contrastive term.

    The contrastive contribution is dropped for anchors whose gold label is
    the insufficient-evidence class, since no omission negative can be built
    for them.
    """
    if not (math.isfinite(ce) and math.isfinite(cl)):
        raise LossError("joint loss inputs must be finite")
    return ce if anchor_is_insufficient else ce + cl


# ---------------------------------------------------------------------------
# Gradient verification
# ---------------------------------------------------------------------------

LossFn = Callable[[List[np.ndarray]], tuple]


def grad_check(fn: LossFn, inputs: Sequence, epsilon: float = 1e-5) -> float:
    """Maximum relative error of analytic vs central-difference gradients.

    `fn` maps a list of vectors to (loss, [gradient per vector]).  The error
    for each input vector is ||analytic - numeric||_inf scaled by the larger
    gradient magnitude.
    """
    if not (1e-7 <= epsilon <= 1e-3):
        raise LossError("epsilon must lie in [1e-7, 1e-3]")
    vectors = [np.array(v, dtype=float) for v in inputs]
    _, analytic = fn(vectors)
    if len(analytic) != len(vectors):
        raise LossError("fn returned a gradient count mismatching its inputs")
    max_err = 0.0
    for i, vec in enumerate(vectors):
        numeric = np.empty_like(vec)
        for j in range(vec.size):
            original = vec.flat[j]
            vec.flat[j] = original + epsilon
            loss_plus, _ = fn(vectors)
            vec.flat[j] = original - epsilon
            loss_minus, _ = fn(vectors)
            vec.flat[j] = original
            if not (math.isfinite(loss_plus) and math.isfinite(loss_minus)):
                raise LossError("non-finite loss under perturbation")
            numeric.flat[j] = (loss_plus - loss_minus) / (2.0 * epsilon)
        expected = np.asarray(analytic[i], dtype=float)
        diff = float(np.max(np.abs(expected - numeric)))
        scale = max(
            float(np.max(np.abs(expected))), float(np.max(np.abs(numeric))), 1e-12
        )
        max_err = max(max_err, diff / scale)
    return max_err


def _contrastive_fn(n_negatives: int, tau: float) -> LossFn:
    def fn(vectors):
        loss, grads = contrastive_loss(vectors[0], vectors[1], vectors[2:], tau=tau)
        return loss, [grads["anchor"], grads["positive"], *grads["negatives"]]

    return fn


def gradient_report(
    dim: int = 8,
    trials: int = 100,
    epsilon: float = 1e-5,
    seed: int = 13,
    tau: float = 1.5,
) -> dict:
    """Randomized gradient verification over both loss kernels."""
    rng = np.random.default_rng(seed)
    max_err = 0.0
    for trial in range(trials):
        n_neg = trial % 4
        vectors = [rng.normal(size=dim) for _ in range(2 + n_neg)]
        err = grad_check(_contrastive_fn(n_neg, tau), vectors, epsilon)
        max_err = max(max_err, err)

        m = 2 + trial % 2
        logits = rng.normal(size=m)
        probs = np.exp(logits - logits.max())
        probs /= probs.sum()
        gold = int(rng.integers(m))

        def ce_fn(vecs):
            return cross_entropy(vecs[0], gold, m), [cross_entropy_grad(vecs[0], gold, m)]

        err = grad_check(ce_fn, [probs], epsilon)
        max_err = max(max_err, err)
    return {
        "max_rel_error": max_err,
        "trials": trials,
        "dim": dim,
        "epsilon": epsilon,
        "seed": seed,
        "tau": tau,
    }
