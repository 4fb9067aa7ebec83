"""Past entropy, past varentropy and related reliability measures of lifetimes."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    Distribution,
    Exponential,
    InactivityTime,
    LinearTransform,
    MonotonicTransform,
    Power,
    PRHRFamily,
    Support,
    Uniform,
    Weibull,
    linear_transform,
    make_builtin,
    monotonic_transform,
    prhr,
)
from .exceptions import (  # noqa: E402
    ConvergenceError,
    DomainError,
    IntegrandError,
    PastvarError,
    SpecParseError,
)
from .measures import (  # noqa: E402
    MeasureValue,
    PastContext,
    cumulative_reversed_hazard,
    discrete_entropy,
    discrete_varentropy,
    entropy,
    generalized_reversed_hazard,
    mean_inactivity_time,
    past_entropy,
    past_entropy_derivative,
    past_varentropy,
    past_varentropy_derivative,
    prhr_past_entropy,
    prhr_past_varentropy,
    residual_entropy,
    residual_varentropy,
    reversed_hazard,
    variance_inactivity_time,
    varentropy,
)
from .parsing import parse_spec  # noqa: E402
from .quadrature import QuadratureConfig, QuadratureResult, differentiate, integrate  # noqa: E402
