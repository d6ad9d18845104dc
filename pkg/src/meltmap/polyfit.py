"""Multivariate polynomial regression with explicit symbolic equations.

The pipeline expands base features into all monomials up to a total degree,
fits by least squares, and hands back the fitted polynomial as a list of
(exponents, coefficient) terms over the named base features. Terms are kept
in graded-lexicographic order: total degree ascending, and within a degree
the first-named feature carries the highest power first (1, P, V, P^2, PV,
V^2, ...).

Raw monomial designs are brutally ill-conditioned at high degree (velocity
values near 2000 raised to the 6th power), so the fit standardizes each base
column first and then maps the solution back to the raw basis by exact
binomial expansion of the affine substitution.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from . import numerics
from .dataset import Dataset, FeatureSpec, TARGET_FIELDS, build_design, train_test_split
from .ensembles import EvalReport
from .errors import ContractError, DomainError

MAX_DEGREE = 10

# Test-split R^2 improvements at or below this value count as ties, which go
# to the lower degree.
DEGREE_TIE_EPS = 1e-9


def term_count(n_features: int, degree: int) -> int:
    """Number of monomials in n_features variables with total degree <= degree."""
    return math.comb(degree + n_features, n_features)


@lru_cache(maxsize=None)
def monomial_exponents(n_features: int, degree: int) -> tuple:
    """All exponent vectors with total degree <= degree, graded-lex ordered."""
    out = []
    for grade in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_features), grade):
            e = [0] * n_features
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def expand_monomials(x, degree: int) -> np.ndarray:
    """Evaluate every monomial of ``x`` up to total degree ``degree``.

    Returns a vector of length C(degree + d, d) starting with the constant 1.
    """
    xv = np.asarray(x, dtype=float)
    if xv.ndim != 1 or xv.size < 1:
        raise ContractError("x must be a 1-D vector with at least one entry")
    if not (1 <= degree <= MAX_DEGREE):
        raise ContractError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    return expand_design(xv.reshape(1, -1), degree)[0]


def expand_design(X: np.ndarray, degree: int) -> np.ndarray:
    """Row-wise monomial expansion of an (n, d) matrix into (n, C(degree+d, d))."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if d < 1:
        raise ContractError("need at least one feature column")
    if not (1 <= degree <= MAX_DEGREE):
        raise ContractError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    exps = monomial_exponents(d, degree)
    out = np.empty((n, len(exps)))
    for k, e in enumerate(exps):
        col = np.ones(n)
        for j, ej in enumerate(e):
            if ej:
                col = col * X[:, j] ** ej
        out[:, k] = col
    return out


@dataclass(frozen=True)
class Term:
    """One monomial: exponents over the base features, and its coefficient."""

    exponents: tuple
    coefficient: float


@dataclass(frozen=True)
class FitDiagnostics:
    train_r2: Optional[float]
    rank_deficient: Optional[bool] = None


@dataclass(frozen=True)
class SymbolicEquation:
    """A polynomial over named base features, term-exhaustive up to ``degree``.

    Terms are stored in graded-lex order, the intercept first; the term list
    always holds all C(degree + d, d) monomials (zero coefficients included).
    """

    target_name: str
    base_features: tuple
    degree: int
    terms: tuple
    fit_diagnostics: Optional[FitDiagnostics] = None

    def __post_init__(self):
        object.__setattr__(self, "base_features", tuple(self.base_features))
        object.__setattr__(self, "terms", tuple(self.terms))
        d = len(self.base_features)
        expected = monomial_exponents(d, self.degree)
        got = tuple(t.exponents for t in self.terms)
        if got != expected:
            if len(got) != len(expected):
                raise ContractError(
                    f"equation must carry all {len(expected)} monomials for "
                    f"{d} features at degree {self.degree}, got {len(got)}"
                )
            raise ContractError("equation terms are not in graded-lex order")
        for t in self.terms:
            if not math.isfinite(t.coefficient):
                raise ContractError(f"non-finite coefficient in term {t.exponents}")

    @property
    def intercept(self) -> float:
        return self.terms[0].coefficient

    def evaluate(self, values: Mapping[str, float]) -> float:
        """Evaluate at named feature values, summing terms left to right."""
        xs = []
        for name in self.base_features:
            if name not in values:
                raise ContractError(f"missing value for base feature {name!r}")
            xs.append(float(values[name]))
        total = 0.0
        for term in self.terms:
            prod = term.coefficient
            for x, e in zip(xs, term.exponents):
                if e:
                    prod *= x**e
            total += prod
        return total

    def evaluate_columns(self, columns: Mapping[str, np.ndarray]) -> np.ndarray:
        """Vectorized evaluation over named feature columns."""
        cols = []
        for name in self.base_features:
            if name not in columns:
                raise ContractError(f"missing column for base feature {name!r}")
            cols.append(np.asarray(columns[name], dtype=float))
        n = cols[0].size
        total = np.zeros(n)
        for term in self.terms:
            prod = np.full(n, term.coefficient)
            for col, e in zip(cols, term.exponents):
                if e:
                    prod = prod * col**e
            total += prod
        return total


def evaluate_equation(eq: SymbolicEquation, values: Mapping[str, float]) -> float:
    """Module-level alias for :meth:`SymbolicEquation.evaluate`."""
    return eq.evaluate(values)


def _destandardized_coefficients(beta, exponents, mu, sigma):
    """Map coefficients over standardized variables z = (x - mu) / sigma back
    to the raw monomial basis by exact binomial expansion."""
    raw = defaultdict(float)
    for e, c in zip(exponents, beta):
        scale = float(c)
        for j, ej in enumerate(e):
            if ej:
                scale /= sigma[j] ** ej
        for ks in itertools.product(*(range(ej + 1) for ej in e)):
            coef = scale
            for j, (ej, kj) in enumerate(zip(e, ks)):
                if ej:
                    coef *= math.comb(ej, kj) * (-mu[j]) ** (ej - kj)
            raw[ks] += coef
    return [raw[e] for e in exponents]


def fit_polynomial(ds: Dataset, spec: FeatureSpec, target: str, degree: int) -> SymbolicEquation:
    """Fit a degree-``degree`` polynomial of the spec's columns to a target field.

    Works for any dataset of size >= 2; under-determined designs succeed via
    the minimum-norm solution and set the rank flag in the diagnostics.
    """
    if target not in TARGET_FIELDS:
        raise ContractError(f"target must be one of {TARGET_FIELDS}, got {target!r}")
    if len(ds) < 2:
        raise ContractError(f"need at least 2 records to fit, got {len(ds)}")
    X, names = build_design(ds, spec)
    y = ds.column(target)
    return _fit_core(X, tuple(names), y, target, degree)


def _fit_core(X, feature_names, y, target, degree) -> SymbolicEquation:
    n, d = X.shape
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    z = (X - mu) / sigma

    design = expand_design(z, degree)
    solution = numerics.solve_least_squares(design, y)
    y_hat = design @ solution.coefficients
    train_r2 = numerics.r_squared(y, y_hat)

    exps = monomial_exponents(d, degree)
    raw = _destandardized_coefficients(solution.coefficients, exps, mu, sigma)
    terms = tuple(Term(e, float(c)) for e, c in zip(exps, raw))
    return SymbolicEquation(
        target_name=target,
        base_features=feature_names,
        degree=degree,
        terms=terms,
        fit_diagnostics=FitDiagnostics(train_r2=train_r2, rank_deficient=solution.rank_deficient),
    )


def monomial_label(exponents, names, sep="·") -> str:
    """Human-readable monomial like ``Power^2·Velocity``; empty for the constant."""
    parts = []
    for name, e in zip(names, exponents):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return sep.join(parts)


def format_coefficient(c: float, precision: int = 6) -> str:
    """Shortest '%g'-style rendering at the given significant digits."""
    return f"{c:.{precision}g}"


def equation_to_string(eq: SymbolicEquation, precision: int = 6, elide_zero: bool = False) -> str:
    """Signed-term rendering, e.g. ``53.7694 + 1.5055·Power - 0.3504·Velocity``.

    Terms stay in graded-lex order. Zero coefficients are printed unless
    ``elide_zero`` is set; the intercept is always printed.
    """
    pieces = []
    for i, term in enumerate(eq.terms):
        label = monomial_label(term.exponents, eq.base_features)
        if elide_zero and term.coefficient == 0.0 and label:
            continue
        mag = format_coefficient(abs(term.coefficient), precision)
        body = f"{mag}·{label}" if label else mag
        if not pieces:
            pieces.append(f"-{body}" if term.coefficient < 0 else body)
        else:
            sign = "-" if term.coefficient < 0 else "+"
            pieces.append(f"{sign} {body}")
    return " ".join(pieces)


@dataclass(frozen=True)
class ImportanceEntry:
    label: str
    abs_coefficient: float
    percentage: float


@dataclass(frozen=True)
class ImportanceReport:
    """Non-intercept terms ranked by |coefficient| share, percentages summing to 100."""

    target_name: str
    entries: tuple


def feature_importance(eq: SymbolicEquation) -> ImportanceReport:
    """Rank non-intercept terms by the share of the absolute coefficient mass.

    Raw coefficient magnitudes conflate units across monomials of different
    degree; the ranking is reported as-is, matching how the stored equations
    are summarized.
    """
    contributions = []
    for term in eq.terms[1:]:
        if term.coefficient != 0.0:
            contributions.append((monomial_label(term.exponents, eq.base_features), abs(term.coefficient)))
    if not contributions:
        raise DomainError("all non-intercept coefficients are zero")
    total = sum(c for _, c in contributions)
    entries = [
        ImportanceEntry(label=label, abs_coefficient=c, percentage=100.0 * c / total)
        for label, c in contributions
    ]
    entries.sort(key=lambda e: -e.percentage)
    return ImportanceReport(target_name=eq.target_name, entries=tuple(entries))


@dataclass(frozen=True)
class DegreeSelection:
    chosen_degree: int
    equation: SymbolicEquation
    reports: dict


def select_degree(
    ds: Dataset,
    spec: FeatureSpec,
    target: str,
    degrees: Sequence[int] = (2, 3, 4, 5, 6),
    split_fraction: float = 0.2,
    seed: int = 42,
) -> DegreeSelection:
    """Fit each candidate degree on a train split and pick the best test R^2.

    Improvements within ``DEGREE_TIE_EPS`` count as ties and go to the lower
    degree. Returns the winning train-split equation plus one EvalReport per
    degree.
    """
    degrees = sorted(set(int(d) for d in degrees))
    if not degrees:
        raise ContractError("no candidate degrees given")
    train, test = train_test_split(ds, split_fraction, seed)
    x_train, names = build_design(train, spec)
    x_test, _ = build_design(test, spec)
    y_train = train.column(target)
    y_test = test.column(target)
    train_cols = {name: x_train[:, j] for j, name in enumerate(names)}
    test_cols = {name: x_test[:, j] for j, name in enumerate(names)}

    reports = {}
    equations = {}
    for deg in degrees:
        eq = fit_polynomial(train, spec, target, deg)
        pred_train = eq.evaluate_columns(train_cols)
        pred_test = eq.evaluate_columns(test_cols)
        reports[deg] = EvalReport(
            r2_train=numerics.r_squared(y_train, pred_train),
            r2_test=numerics.r_squared(y_test, pred_test),
            mae_train=numerics.mean_absolute_error(y_train, pred_train),
            mae_test=numerics.mean_absolute_error(y_test, pred_test),
        )
        equations[deg] = eq

    chosen = degrees[0]
    for deg in degrees[1:]:
        if reports[deg].r2_test > reports[chosen].r2_test + DEGREE_TIE_EPS:
            chosen = deg
    return DegreeSelection(chosen_degree=chosen, equation=equations[chosen], reports=reports)


def equation_to_json(eq: SymbolicEquation) -> dict:
    """Serialize to the equation JSON schema (intercept split from terms)."""
    return {
        "target": eq.target_name,
        "base_features": list(eq.base_features),
        "degree": eq.degree,
        "intercept": eq.intercept,
        "terms": [
            {"exponents": list(t.exponents), "coefficient": t.coefficient}
            for t in eq.terms[1:]
        ],
        "train_r2": eq.fit_diagnostics.train_r2 if eq.fit_diagnostics else None,
    }


def equation_from_json(obj: Mapping) -> SymbolicEquation:
    """Rebuild an equation from its JSON form.

    Terms may arrive in any order and may omit zero-coefficient monomials;
    they are canonicalized to the exhaustive graded-lex list.
    """
    try:
        target = str(obj["target"])
        base_features = tuple(str(f) for f in obj["base_features"])
        degree = int(obj["degree"])
        intercept = float(obj["intercept"])
        raw_terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed equation JSON: {exc}") from None
    d = len(base_features)
    if d < 1:
        raise ContractError("equation JSON has no base features")
    if not (1 <= degree <= MAX_DEGREE):
        raise ContractError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")

    coefficients = {e: 0.0 for e in monomial_exponents(d, degree)}
    zero = tuple([0] * d)
    coefficients[zero] = intercept
    for entry in raw_terms:
        e = tuple(int(v) for v in entry["exponents"])
        if e == zero:
            raise ContractError("terms list must not repeat the intercept")
        if e not in coefficients:
            raise ContractError(f"exponents {e} exceed degree {degree} or feature count {d}")
        coefficients[e] = float(entry["coefficient"])

    train_r2 = obj.get("train_r2")
    diagnostics = FitDiagnostics(train_r2=float(train_r2)) if train_r2 is not None else None
    terms = tuple(Term(e, coefficients[e]) for e in monomial_exponents(d, degree))
    return SymbolicEquation(
        target_name=target,
        base_features=base_features,
        degree=degree,
        terms=terms,
        fit_diagnostics=diagnostics,
    )


def save_equation(eq: SymbolicEquation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(equation_to_json(eq), fh, indent=2)
        fh.write("\n")


def load_equation(path) -> SymbolicEquation:
    with open(path, "r", encoding="utf-8") as fh:
        return equation_from_json(json.load(fh))
