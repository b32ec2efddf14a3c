"""Modal regression when the covariate is measured with error.

Thin wrapper over the C++ core. Sequences are accepted wherever the core
takes a vector; results come back as lists and dicts.
"""

from ._core import (
    ConfigError,
    DataError,
    DomainError,
    Error,
    ErrorModel,
    GridMismatchError,
    InsufficientDataError,
    SelectionError,
    SingularDesignError,
    UndefinedDistanceError,
    conditional_density,
    deconv_kernel,
    empirical_ise,
    generate,
    h2_normal_reference,
    hausdorff,
    joint_density,
    k1,
    mode_curves,
    optimal_bandwidths,
    run_cli,
    run_experiment,
    select_h1,
    sigma2_from_reliability,
    true_mode_curves,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def _floats(v):
    return [float(e) for e in v]


def estimate(w, y, model, *, h1=None, h2=None, lo=None, hi=None, delta=None,
             estimator="ll", B=15, seed=0):
    """Mode curves with bandwidths chosen the way the command line does.

    h2 defaults to the normal reference rule and h1 to CV-SIMEX (or naive CV
    without error). The grid defaults to 41 points between the 2.5th and
    97.5th percentiles of w.
    """
    w, y = _floats(w), _floats(y)
    if h2 is None:
        h2 = h2_normal_reference(y)
    selection = None
    if h1 is None:
        selection = select_h1(w, y, model, h2, estimator=estimator, B=B, seed=seed)
        h1 = selection["h1"]
    if lo is None or hi is None:
        s = sorted(w)
        lo = _quantile(s, 0.025) if lo is None else lo
        hi = _quantile(s, 0.975) if hi is None else hi
    if delta is None:
        delta = (hi - lo) / 40.0
    curves = mode_curves(w, y, h1, h2, model, lo, hi, delta, estimator=estimator)
    curves["h1"], curves["h2"] = h1, h2
    if selection is not None:
        curves["selection"] = selection
    return curves


def _quantile(sorted_values, p):
    pos = p * (len(sorted_values) - 1)
    i = int(pos)
    if i + 1 >= len(sorted_values):
        return sorted_values[-1]
    return sorted_values[i] + (pos - i) * (sorted_values[i + 1] - sorted_values[i])
