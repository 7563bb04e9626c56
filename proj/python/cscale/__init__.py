from ._core import (
    CscaleError,
    ball_metric,
    bergman_kernel,
    catalog_names,
    defining_function,
    kobayashi_metric,
    levi,
    main,
    order_of_contact,
    poisson_ball,
    poisson_integral,
    run_command,
    sectional_curvature,
    wu_metric,
)

__all__ = [
    "CscaleError",
    "ball_metric",
    "bergman_kernel",
    "catalog_names",
    "defining_function",
    "kobayashi_metric",
    "levi",
    "main",
    "order_of_contact",
    "poisson_ball",
    "poisson_integral",
    "run_command",
    "sectional_curvature",
    "wu_metric",
]
