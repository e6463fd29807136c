from src.acquisition.expected_improvement import (
    ei_sandwich_bounds,
    ei_value,
    expected_improvement,
    h_func,
)
from src.acquisition.search import AcqConfig, maximize_ei

__all__ = [
    "AcqConfig",
    "ei_sandwich_bounds",
    "ei_value",
    "expected_improvement",
    "h_func",
    "maximize_ei",
]
