"""GBM price simulation, Monte Carlo portfolio optimization and forecast scoring."""

from ._core import (
    DataError,
    NumericError,
    PriceSeries,
    PricePanel,
    AssetStats,
    PortfolioStats,
    PathSet,
    load_csv,
    align_panel,
    normalize_base100,
    slice_period,
    simple_returns,
    log_returns,
    annualize_return,
    annualize_risk,
    sharpe_ratio,
    asset_stats,
    portfolio_value_series,
    random_weights,
    portfolio_stats,
    optimize_max_sharpe,
    rank_and_group,
    wiener_increments,
    gbm_path,
    simulate_ensemble,
    envelope,
    calibrate,
    pearson_correlation,
    mape,
    classify_mape,
    evaluate_ensemble,
    default_horizons,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
