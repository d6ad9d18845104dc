"""meltmap: polynomial and ensemble regression for LPBF process maps.

Fits multivariate polynomial equations and tree ensembles mapping process
conditions (laser power, scan velocity) and melt-pool dimensions to melt-pool
geometry and spatter volume, extracts the fitted equations in symbolic form
with feature-importance rankings, and serves predictions and (power,
velocity) sweeps through a CLI and a JSON HTTP service.
"""

from .dataset import (
    CSV_HEADER,
    Dataset,
    FeatureEntry,
    FeatureSpec,
    ProcessMapRecord,
    build_design,
    load_csv,
    synth_generate,
    train_test_split,
    velocity_magnitude,
    write_csv,
)
from .ensembles import (
    EnsembleConfig,
    EvalReport,
    RegressionTree,
    evaluate_model,
    fit_cart,
    fit_ensemble,
    knn_predict,
    load_model,
    save_model,
)
from .errors import (
    ContractError,
    CsvParseError,
    DomainError,
    MeltMapError,
    SchemaError,
    ValidationError,
)
from .numerics import (
    DenseMatrix,
    MetricPair,
    mean_absolute_error,
    pearson_correlation_matrix,
    r_squared,
    solve_least_squares,
)
from .polyfit import (
    ImportanceReport,
    SymbolicEquation,
    Term,
    equation_from_json,
    equation_to_json,
    equation_to_string,
    evaluate_equation,
    expand_monomials,
    feature_importance,
    fit_polynomial,
    load_equation,
    save_equation,
    select_degree,
)
from . import model_zoo

__version__ = "0.1.0"
