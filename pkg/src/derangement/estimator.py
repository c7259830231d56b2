"""scikit-learn style front end for the improvement loop."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .costs import permutation_cost
from .engine import BEST
from .loop import ImproveConfig, improve
from .permutation import ASSIGNMENT, cycle_decomposition
from .validation import check_cost_matrix, check_derangement


class DerangementImprover(BaseEstimator):
    """Lower a derangement's cost by cancelling negative cycles.

    Parameters mirror :class:`~derangement.loop.ImproveConfig`. ``fit`` takes
    a square symmetric integer cost matrix and an optional starting
    derangement (1-indexed images or text); the canonical n-cycle is used
    otherwise.

    Attributes
    ----------
    derangement_ : Permutation
        Final derangement.
    cost_ : int
        Its cost.
    status_ : str
        ``engine-fixed-point``, ``iteration-cap`` or, with ``oracle_check``,
        ``oracle-certified-optimal`` / ``oracle-refuted``.
    trace_ : ImprovementTrace
    cycles_ : CycleForm
        Cycle decomposition of ``derangement_``.

    Examples
    --------
    >>> w4 = [[0, 10, 1, 1], [10, 0, 1, 1], [1, 1, 0, 10], [1, 1, 10, 0]]
    >>> est = DerangementImprover().fit(w4, initial=[2, 1, 4, 3])
    >>> est.cost_, str(est.cycles_)
    (4, '(1 4 2 3)')
    """

    def __init__(
        self,
        mode=ASSIGNMENT,
        policy=BEST,
        labels=4,
        max_iter=1000,
        retry_limit=16,
        prune_nonnegative=True,
        negative_entries_only=False,
        oracle_check=False,
        oracle_limit=9,
    ):
        self.mode = mode
        self.policy = policy
        self.labels = labels
        self.max_iter = max_iter
        self.retry_limit = retry_limit
        self.prune_nonnegative = prune_nonnegative
        self.negative_entries_only = negative_entries_only
        self.oracle_check = oracle_check
        self.oracle_limit = oracle_limit

    def _config(self) -> ImproveConfig:
        return ImproveConfig(**self.get_params())

    def fit(self, X, y=None, initial=None):
        config = self._config()
        m = check_cost_matrix(X)
        d0 = None if initial is None else check_derangement(initial, m.n, config.mode)
        self.trace_ = improve(m, d0, config)
        self.derangement_ = self.trace_.final
        self.cost_ = self.trace_.final_cost
        self.status_ = self.trace_.status
        self.cycles_ = cycle_decomposition(self.derangement_)
        self.n_features_in_ = m.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "derangement_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def predict(self, X=None):
        """Successor of every point (1-indexed) under the fitted derangement."""
        self._check_fitted()
        if X is not None:
            m = check_cost_matrix(X)
            if m.n != self.n_features_in_:
                raise ValueError(f"expected a {self.n_features_in_}x{self.n_features_in_} matrix")
        return list(self.derangement_.images)

    def score(self, X, y=None) -> float:
        """Negated cost of the fitted derangement under ``X`` (higher is better)."""
        self._check_fitted()
        return -float(permutation_cost(check_cost_matrix(X), self.derangement_))
