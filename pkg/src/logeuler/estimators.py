"""scikit-learn compatible wrappers around the changes of variables.

Rows of ``X`` are states; ``transform`` maps them forward and
``inverse_transform`` back, so the maps drop into pipelines and
``FunctionTransformer``-style tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import classical, hydro, symmetrizer
from .eos import EosSpec, lemma1_bounds


def _default_eos(eos):
    return EosSpec.logarithmic(1.0) if eos is None else eos


def _check_width(X, width, name):
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != width:
        raise ValueError(f"{name} expects {width} columns, got {X.shape[1]}")
    return X


class SoundSpeedTransformer(TransformerMixin, BaseEstimator):
    """Density column -> ``v = (2/A)(sqrt(p') - B)``.

    ``A`` defaults to the parameter that makes ``eos`` a family member.
    """

    def __init__(self, eos=None, A=None, B=0.0):
        self.eos = eos
        self.A = A
        self.B = B

    def fit(self, X=None, y=None):
        eos = _default_eos(self.eos)
        self.eos_ = eos
        self.params_ = classical.SymmetryParams(eos.ode_parameter if self.A is None else self.A, self.B)
        self.n_features_in_ = 1
        if X is not None:
            _check_width(X, 1, type(self).__name__)
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = _check_width(X, 1, type(self).__name__)
        return np.asarray(classical.v_of_rho(self.eos_, self.params_, X[:, 0])).reshape(-1, 1)

    def inverse_transform(self, X):
        check_is_fitted(self, "params_")
        X = _check_width(X, 1, type(self).__name__)
        return np.asarray(classical.rho_of_v(self.eos_, self.params_, X[:, 0])).reshape(-1, 1)


class RelativisticSymmetrizer(TransformerMixin, BaseEstimator):
    """Rows ``(rho, v1, v2, v3)`` -> symmetrizing variables ``(w0, w1, w2, w3)``.

    ``fit`` checks the coefficient gate, fixes the admissible window and,
    with ``use_table=True``, tabulates ``phi`` once for fast evaluation.
    """

    def __init__(self, eos=None, rho_max=None, delta=None, velocity_margin=1e-6,
                 use_table=False, research=False):
        self.eos = eos
        self.rho_max = rho_max
        self.delta = delta
        self.velocity_margin = velocity_margin
        self.use_table = use_table
        self.research = research

    def fit(self, X=None, y=None):
        eos = _default_eos(self.eos)
        self.eos_ = eos
        self.window_ = lemma1_bounds(eos, rho_max=self.rho_max, delta=self.delta,
                                     velocity_margin=self.velocity_margin)
        self.table_ = symmetrizer.PhiTable(eos, self.window_.rho_max) if self.use_table else None
        self.n_features_in_ = 4
        if X is not None:
            X = _check_width(X, 4, type(self).__name__)
            for row in X:
                symmetrizer.check_state(eos, symmetrizer.PrimState(row[0], row[1:]), self.window_,
                                        research=self.research)
        return self

    def transform(self, X):
        check_is_fitted(self, "window_")
        X = _check_width(X, 4, type(self).__name__)
        out = np.empty_like(X)
        for i, row in enumerate(X):
            s = symmetrizer.PrimState(row[0], row[1:])
            out[i] = symmetrizer.to_sym(self.eos_, s, window=self.window_, research=self.research,
                                        table=self.table_).w
        return out

    def inverse_transform(self, X):
        check_is_fitted(self, "window_")
        X = _check_width(X, 4, type(self).__name__)
        out = np.empty_like(X)
        for i, row in enumerate(X):
            s = symmetrizer.from_sym(self.eos_, symmetrizer.SymState(row), window=self.window_)
            out[i] = s.as_array()
        return out


class ConservedTransformer(TransformerMixin, BaseEstimator):
    """Rows ``(rho, v)`` -> planar conserved variables ``(D, S)``."""

    def __init__(self, eos=None):
        self.eos = eos

    def fit(self, X=None, y=None):
        self.eos_ = _default_eos(self.eos)
        self.window_ = lemma1_bounds(self.eos_)
        self.n_features_in_ = 2
        if X is not None:
            _check_width(X, 2, type(self).__name__)
        return self

    def transform(self, X):
        check_is_fitted(self, "eos_")
        X = _check_width(X, 2, type(self).__name__)
        D, S = hydro.prim_to_cons(self.eos_, X[:, 0], X[:, 1])
        return np.column_stack([D, S])

    def inverse_transform(self, X):
        check_is_fitted(self, "eos_")
        X = _check_width(X, 2, type(self).__name__)
        rho, v = hydro.cons_to_prim(self.eos_, X[:, 0], X[:, 1], window=self.window_)
        return np.column_stack([rho, v])
