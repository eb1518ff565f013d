"""Supply and demand function equilibria on production networks."""

try:
    from ._sdfe import (  # noqa: F401
        Economy,
        SdfeError,
        compare_regimes,
        depth_sweep,
        economy_from_json,
        merger_study,
        solve,
        solve_chain,
        solve_substitutes,
        validate,
    )
except ImportError:  # running against a bare build tree
    from _sdfe import (  # noqa: F401
        Economy,
        SdfeError,
        compare_regimes,
        depth_sweep,
        economy_from_json,
        merger_study,
        solve,
        solve_chain,
        solve_substitutes,
        validate,
    )

__all__ = [
    "Economy",
    "SdfeError",
    "compare_regimes",
    "depth_sweep",
    "economy_from_json",
    "merger_study",
    "solve",
    "solve_chain",
    "solve_substitutes",
    "validate",
]
