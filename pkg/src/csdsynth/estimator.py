"""
Estimator-style wrappers: ``fit`` synthesizes a circuit for a unitary (or a
phase vector), ``transform`` runs state vectors through that circuit.

States are rows of ``X`` with shape ``(n_samples, 2^n)``.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circuit import simulate
from .matcore import DEFAULT_UNITARITY_TOL, check_state_batch, validate_unitary
from .synth import build_plan, synthesize, synthesize_diagonal


class CSDSynthesizer(TransformerMixin, BaseEstimator):
    """Synthesize a circuit for a unitary and apply it to state vectors.

    Parameters
    ----------
    mirror : bool, default=True
        Mirror every second same-target rotation so seam CNOTs cancel.
    prune_zero : bool, default=False
        Drop rotations with near-zero angle after synthesis.
    verify : bool, default=True
        Reconstruct the circuit and store the Frobenius error in ``report_``.
    tol : float, default=1e-10
        Unitarity tolerance for the input matrix.
    keep_plan : bool, default=False
        Also keep the factor chain as ``plan_``.

    Attributes
    ----------
    circuit_ : Circuit
    report_ : SynthesisReport
    n_qubits_ : int
    plan_ : DecompositionPlan or None
    """

    def __init__(self, mirror=True, prune_zero=False, verify=True, tol=DEFAULT_UNITARITY_TOL, keep_plan=False):
        self.mirror = mirror
        self.prune_zero = prune_zero
        self.verify = verify
        self.tol = tol
        self.keep_plan = keep_plan

    def fit(self, U, y=None):
        """Synthesize a circuit for the square unitary ``U``; ``y`` is ignored."""
        u = validate_unitary(U, self.tol)
        self.circuit_, self.report_ = synthesize(
            u, mirror=self.mirror, prune_zero=self.prune_zero, verify=self.verify, tol=self.tol
        )
        self.n_qubits_ = u.n_qubits
        self.plan_ = build_plan(u) if self.keep_plan and u.n_qubits >= 2 else None
        return self

    def transform(self, X):
        """Apply the circuit to each row of ``X``."""
        check_is_fitted(self, "circuit_")
        X = check_state_batch(X, 1 << self.n_qubits_)
        return simulate(self.circuit_, X.T).T

    def inverse_transform(self, X):
        """Apply the inverse circuit to each row of ``X``."""
        check_is_fitted(self, "circuit_")
        X = check_state_batch(X, 1 << self.n_qubits_)
        return simulate(self.circuit_.inverse(), X.T).T

    def fit_transform(self, U, y=None, X=None):
        """Fit on ``U`` and transform ``X`` (the computational basis when omitted).

        With no ``X`` the result is the transposed circuit matrix, i.e. row
        ``i`` is the image of basis state ``i``.
        """
        self.fit(U)
        if X is None:
            X = np.eye(1 << self.n_qubits_, dtype=np.complex128)
        return self.transform(X)


class DiagonalSynthesizer(TransformerMixin, BaseEstimator):
    """Circuit for ``diag(exp(i * phases))``; ``fit`` takes the phase vector."""

    def __init__(self, prune_zero=False, verify=True):
        self.prune_zero = prune_zero
        self.verify = verify

    def fit(self, phases, y=None):
        phases = np.asarray(phases, dtype=float).reshape(-1)
        self.circuit_, self.report_ = synthesize_diagonal(phases, prune_zero=self.prune_zero, verify=self.verify)
        self.n_qubits_ = self.circuit_.n
        return self

    def transform(self, X):
        check_is_fitted(self, "circuit_")
        X = check_state_batch(X, 1 << self.n_qubits_)
        return simulate(self.circuit_, X.T).T

    def inverse_transform(self, X):
        check_is_fitted(self, "circuit_")
        X = check_state_batch(X, 1 << self.n_qubits_)
        return simulate(self.circuit_.inverse(), X.T).T
