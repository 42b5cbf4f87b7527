"""Information decomposition of the single-treatment model and falsification tests.

All quantities are in bits, with ``0 log 0 = 0``.  For the model indexed by
``lam`` the outcome entropy splits two ways:

    H(Z) = I(X:Z) + I(N_Z:Z | X) = I(N_Z:Z) + I(X:Z | N_Z)

and ``I(N_Z:Z) = H(Z) - H(X) (p00 + p01 - 2 lam)`` because the non-constant
functions copy ``X`` (or its negation) into ``Z``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .scm import FUNCTION_TABLE, check_lambda, counterfactual_influence, response_weights
from .trial_data import BinaryMarginal, TrivariateTable, as_marginal

SLACK_TOL = 1e-12


def entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum()) + 0.0


def binary_entropy(q: float) -> float:
    return entropy_bits([q, 1.0 - q])


def mutual_information(joint) -> float:
    """``I(A:B)`` of a 2-d table ``joint[a][b]``."""
    joint = np.asarray(joint, dtype=float)
    return entropy_bits(joint.sum(axis=1)) + entropy_bits(joint.sum(axis=0)) - entropy_bits(joint)


def conditional_mutual_information(joint) -> float:
    """``I(A:C | B)`` of a 3-d table ``joint[a][b][c]``."""
    joint = np.asarray(joint, dtype=float)
    return (
        entropy_bits(joint.sum(axis=2))
        + entropy_bits(joint.sum(axis=0))
        - entropy_bits(joint.sum(axis=(0, 2)))
        - entropy_bits(joint)
    )


@dataclass(frozen=True)
class InfoReport:
    h_z: float
    i_xz: float
    i_nz_z: float
    i_xz_given_nz: float
    i_nz_z_given_x: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class InfoInterval:
    lo: float
    hi: float

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class FalsificationVerdict:
    """Outcome of comparing an observed quantity with a hypothesised bound.

    ``slack`` is ``hypothesized - observed``; negative slack means the
    observation exceeds what the hypothesis allows.
    """

    falsified: bool
    criterion: str
    observed: float
    hypothesized: float
    slack: float

    def to_dict(self) -> dict:
        return asdict(self)


def model_joint(m: BinaryMarginal, lam: float) -> np.ndarray:
    """Joint ``P(X=x, N_Z=n, Z=z)`` as a 2x4x2 array."""
    m = as_marginal(m)
    a = response_weights(m, lam)
    px = np.array([m.p_w0, m.p_w1])
    p = np.zeros((2, 4, 2))
    for n, table in enumerate(FUNCTION_TABLE):
        for x in (0, 1):
            p[x, n, table[x]] += px[x] * a[n]
    return p


def info_report(m: BinaryMarginal, lam: float) -> InfoReport:
    """Entropies and mutual informations of the model indexed by ``lam``.

    Every field comes from direct enumeration of ``P(X, N_Z, Z)``; use
    :func:`nz_z_information` for the closed form of ``I(N_Z:Z)``.
    """
    p = model_joint(m, lam)
    p_xz = p.sum(axis=1)
    p_nz = p.sum(axis=0)
    return InfoReport(
        h_z=entropy_bits(p.sum(axis=(0, 1))),
        i_xz=mutual_information(p_xz),
        i_nz_z=mutual_information(p_nz),
        # I(X:Z|N) with axes (X, N, Z)
        i_xz_given_nz=conditional_mutual_information(p),
        # I(N:Z|X) with axes (N, X, Z)
        i_nz_z_given_x=conditional_mutual_information(p.transpose(1, 0, 2)),
    )


def nz_z_information(m: BinaryMarginal, lam: float) -> float:
    """Closed form ``I(N_Z:Z) = H(Z) - H(X) (p00 + p01 - 2 lam)``."""
    m = as_marginal(m)
    lam = check_lambda(m, lam)
    return binary_entropy(m.p_z0) - binary_entropy(m.p_w0) * counterfactual_influence(m, lam)


def conditional_outcome_entropy(m: BinaryMarginal) -> float:
    """``H(Z | W)`` for the marginal's treatment ``W``."""
    m = as_marginal(m)
    return m.p_w0 * binary_entropy(m.p_z0_w0) + m.p_w1 * binary_entropy(m.p_z0_w1)


def info_bounds(m: BinaryMarginal) -> tuple[InfoInterval, InfoInterval]:
    """Ranges ``([0, H(Z|X)], [I(X:Z), H(X)])`` of ``I(N_Z:Z)`` and ``I(X:Z|N_Z)``."""
    m = as_marginal(m)
    h_x = binary_entropy(m.p_w0)
    return (
        InfoInterval(0.0, conditional_outcome_entropy(m)),
        InfoInterval(mutual_information(m.joint()), h_x),
    )


def _verdict(criterion: str, observed: float, hyp: float) -> FalsificationVerdict:
    if hyp < 0.0:
        raise ValueError(f"hypothesised information {hyp!r} must be non-negative")
    return FalsificationVerdict(observed > hyp + SLACK_TOL, criterion, observed, hyp, hyp - observed)


def falsify_by_marginal_info(hyp_i_nz_z: float, mY: BinaryMarginal) -> FalsificationVerdict:
    """Reject a hypothesised ``I(N_Z:Z)`` when ``I(Y:Z)`` exceeds it.

    Valid whenever ``mY`` comes from the same joint model, since ``Z`` is
    independent of ``Y`` given the X-model noise.
    """
    observed = mutual_information(as_marginal(mY).joint())
    return _verdict("marginal_info", observed, float(hyp_i_nz_z))


def falsify_by_conditional_info(hyp_i_xz_given_nz: float, joint: TrivariateTable) -> FalsificationVerdict:
    """Reject a hypothesised ``I(X:Z|N_Z)`` when ``I(X:Z|Y)`` exceeds it."""
    table = joint.p if isinstance(joint, TrivariateTable) else TrivariateTable(joint).p
    observed = conditional_mutual_information(table)
    return _verdict("conditional_info", observed, float(hyp_i_xz_given_nz))
