from ._core import (
    Instance,
    InstanceError,
    ParseError,
    Problem,
    SearchResult,
    Solution,
    Trace,
    generate_instance,
    load_instance,
    min_vehicles,
    parse_instance,
    rank_sum_test,
)

__all__ = [
    "Instance",
    "InstanceError",
    "ParseError",
    "Problem",
    "SearchResult",
    "Solution",
    "Trace",
    "generate_instance",
    "load_instance",
    "min_vehicles",
    "parse_instance",
    "rank_sum_test",
]
