"""Finite windows of complete interpolating sequences.

Node sequences are perturbed integers ``x_j = j + delta_j`` on a symmetric
index window ``{-N, ..., N}`` with ``sup |delta_j| <= L < 1/4``.  The
quarter margin is the classical Kadec criterion guaranteeing that the
exponentials ``exp(-i x_j xi)`` form a Riesz basis of ``L^2([-pi, pi])``, so
every window generated here is a slice of a genuine complete interpolating
sequence.  ``riesz_bounds`` measures the window's frame constants through the
extreme eigenvalues of the normalized exponential Gram ``sinc(x_j - x_k)``.
"""

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, UnusableWindowError

__all__ = [
    "NodeSequence", "RieszBounds",
    "integer_sequence", "perturbed_sequence", "riesz_bounds",
]

KADEC_LIMIT = 0.25
_RIESZ_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class NodeSequence:
    """Ordered nodes ``j + delta_j`` for ``j in {-half_width, ..., half_width}``."""

    half_width: int
    perturbation_bound: float
    deltas: np.ndarray
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.half_width)
        if n < 1:
            raise DomainError("half_width must be a positive integer")
        if not 0.0 <= self.perturbation_bound < KADEC_LIMIT:
            raise DomainError(
                f"perturbation_bound {self.perturbation_bound!r} outside [0, 1/4)")
        deltas = np.asarray(self.deltas, dtype=float)
        if deltas.shape != (2 * n + 1,):
            raise DomainError(
                f"expected {2 * n + 1} deltas for half_width {n}, got {deltas.shape}")
        offenders = np.nonzero(np.abs(deltas) > self.perturbation_bound)[0]
        if offenders.size:
            j = int(offenders[0]) - n
            raise DomainError(
                f"|delta_{j}| = {abs(deltas[offenders[0]]):.6g} exceeds the "
                f"declared bound {self.perturbation_bound:g} (node index {j})")
        deltas.flags.writeable = False
        nodes = np.arange(-n, n + 1, dtype=float) + deltas
        nodes.flags.writeable = False
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("nodes must be strictly increasing")
        object.__setattr__(self, "half_width", n)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return 2 * self.half_width + 1

    @property
    def indices(self):
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def is_integer_grid(self):
        return bool(np.all(self.deltas == 0.0))

    def to_json_dict(self):
        return {
            "half_width": self.half_width,
            "perturbation_bound": self.perturbation_bound,
            "deltas": [float(d) for d in self.deltas],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(half_width=int(data["half_width"]),
                       perturbation_bound=float(data["perturbation_bound"]),
                       deltas=np.asarray(data["deltas"], dtype=float))
        except KeyError as missing:
            raise DomainError(f"node sequence document lacks field {missing}")

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


class RieszBounds(NamedTuple):
    lower: float
    upper: float


def integer_sequence(half_width):
    """The canonical window ``x_j = j`` (orthogonal exponentials, L = 0)."""
    n = int(half_width)
    if n < 1:
        raise DomainError("half_width must be a positive integer")
    return NodeSequence(half_width=n, perturbation_bound=0.0,
                        deltas=np.zeros(2 * n + 1))


def perturbed_sequence(half_width, perturbation_bound, deltas=None, seed=None):
    """Window ``x_j = j + delta_j`` with ``|delta_j| <= perturbation_bound < 1/4``.

    Provide either an explicit ``deltas`` list (length ``2N+1``) or a ``seed``
    for uniform draws on ``[-L, L]``; both routes are deterministic.  Any
    delta at or beyond the quarter margin is rejected with the index of the
    offending node.
    """
    n = int(half_width)
    if n < 1:
        raise DomainError("half_width must be a positive integer")
    bound = float(perturbation_bound)
    if not 0.0 <= bound < KADEC_LIMIT:
        raise DomainError(f"perturbation_bound {bound!r} outside [0, 1/4)")
    if deltas is not None:
        deltas = np.asarray(deltas, dtype=float)
        if deltas.shape != (2 * n + 1,):
            raise DomainError(
                f"expected {2 * n + 1} deltas for half_width {n}, got {deltas.shape}")
        offenders = np.nonzero(np.abs(deltas) >= KADEC_LIMIT)[0]
        if offenders.size:
            j = int(offenders[0]) - n
            raise DomainError(
                f"|delta_{j}| = {abs(deltas[offenders[0]]):.6g} reaches the "
                f"quarter margin; node index {j} is inadmissible")
    else:
        if seed is None:
            raise DomainError("perturbed_sequence needs explicit deltas or a seed")
        rng = np.random.default_rng(int(seed))
        deltas = rng.uniform(-bound, bound, size=2 * n + 1)
    return NodeSequence(half_width=n, perturbation_bound=bound, deltas=deltas)


def riesz_bounds(sequence):
    """Window frame-constant estimates from the normalized exponential Gram.

    Returns the extreme eigenvalues of ``S_{jk} = sinc(x_j - x_k)`` (with
    ``sinc(t) = sin(pi t)/(pi t)``, ``sinc(0) = 1``).  ``S`` equals
    ``1/(2 pi)`` times the Gram of the window exponentials in
    ``L^2([-pi, pi])``, so ``2 pi * lower`` and ``2 pi * upper`` are the sharp
    two-sided frame constants of the window.  On the integer grid ``S`` is the
    identity and both bounds are 1.

    Raises
    ------
    UnusableWindowError
        If the lower eigenvalue sits at or below the numerical floor, which
        cannot happen for admissible quarter-margin windows but guards
        externally supplied node documents.
    """
    x = sequence.nodes
    gram = np.sinc(x[:, None] - x[None, :])
    eigenvalues = np.linalg.eigvalsh(gram)
    lower, upper = float(eigenvalues[0]), float(eigenvalues[-1])
    if lower <= _RIESZ_FLOOR:
        raise UnusableWindowError(
            f"window of half_width {sequence.half_width} has exponential-Gram "
            f"floor {lower:.3e}; unusable for interpolation")
    return RieszBounds(lower=lower, upper=upper)
