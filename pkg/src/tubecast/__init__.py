"""Joint prediction-error distributions for ARMA, ARIMA and VARMA forecasts."""

__version__ = "0.1.0"

from .errors import DimensionError, NumericalError, SpecError, TubecastError  # noqa: E402
from .model import (  # noqa: E402
    ArimaSpec,
    SeriesWindow,
    UnivariateArmaSpec,
    ValidationReport,
    VarmaSpec,
    load_model,
    load_series,
    validate_spec,
)
from .acvf import AcvfTable, ma_acvf, vma_acvf  # noqa: E402
from .distribution import ErrorJointDistribution  # noqa: E402
from .predictor import (  # noqa: E402
    ForecastVector,
    Forecaster,
    PredictorCoefficients,
    compute_y_series,
    forecast_mean,
    forecast_mean_arima,
    solve_blp,
)
from .differencing import DifferenceLift, build_T_matrix, difference, integrate, lift_sigma  # noqa: E402
from .covariance import TransformChain, build_chain, sigma_err_x, sigma_err_y  # noqa: E402
from .gaussian import (  # noqa: E402
    BoxProbability,
    ErrorBox,
    ForecastTube,
    TubeProbabilities,
    box_probability,
    tube_probabilities,
    tube_to_error_box,
    union_probability,
)
from .oracle import (  # noqa: E402
    compare_covariance,
    empirical_error_covariance,
    simulate_paths,
)
from .kernels import BACKEND  # noqa: E402
