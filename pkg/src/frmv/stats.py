"""Scalar distribution functions for the moving-window detector.

The detector only needs four distribution operations: the F CDF to turn a
singular-value ratio into a probability, the chi-square quantile to convert
that probability into an additive evidence score, the chi-square CDF to map
summed scores back to a probability, and the log-gamma function the other
three are built on. They are implemented here with series and continued
fractions so the runtime package does not pull in a statistics library.
"""

import math

# Variance floor below which a second singular value is treated as zero and
# the F ratio saturates to infinity.
PSEUDO_F_SATURATION = 1e-300

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_MAX_ITER = 500


class ConvergenceError(ArithmeticError):
    """Raised when a series or continued fraction fails to converge."""


def _check_finite(name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValueError(f"{name} must be a real number, got {value!r}")
    if math.isnan(value):
        raise ValueError(f"{name} must not be NaN")
    return float(value)


def _check_df(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        if not (isinstance(value, float) and value.is_integer()):
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
        value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def log_gamma(x):
    """Natural log of the gamma function for x > 0.

    Delegates to the platform lgamma, which is exact to a couple of ulps;
    this wrapper only pins down the domain.
    """
    x = _check_finite("x", x)
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _beta_cf(a, b, x):
    """Continued fraction for the incomplete beta, evaluated by the
    modified Lentz method. Converges fast for x < (a + 1) / (a + b + 2)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def reg_inc_beta(x, a, b):
    """Regularized incomplete beta function I_x(a, b)."""
    x = _check_finite("x", x)
    a = _check_finite("a", a)
    b = _check_finite("b", b)
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        log_gamma(a + b)
        - log_gamma(a)
        - log_gamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) so the continued fraction
    # is always evaluated on its fast-converging side.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _gamma_p_series(a, x):
    # Lower series, reliable for x < a + 1.
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _CF_EPS:
            return total * math.exp(-x + a * math.log(x) - log_gamma(a))
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_q_cf(a, x):
    # Upper continued fraction, reliable for x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _CF_TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = b + an / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h * math.exp(-x + a * math.log(x) - log_gamma(a))
    raise ConvergenceError(
        f"incomplete gamma continued fraction did not converge (a={a}, x={x})"
    )


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma function P(a, x)."""
    a = _check_finite("a", a)
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return 1.0
    x = _check_finite("x", x)
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(_gamma_p_series(a, x), 1.0)
    return max(1.0 - _gamma_q_cf(a, x), 0.0)


def reg_upper_gamma(a, x):
    """Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x)."""
    a = _check_finite("a", a)
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return 0.0
    x = _check_finite("x", x)
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(1.0 - _gamma_p_series(a, x), 0.0)
    return min(_gamma_q_cf(a, x), 1.0)


def chi2_cdf(x, k):
    """Chi-square CDF with k degrees of freedom."""
    k = _check_df("k", k)
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return 1.0
    x = _check_finite("x", x)
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return reg_lower_gamma(0.5 * k, 0.5 * x)


def _chi2_sf(x, k):
    return reg_upper_gamma(0.5 * k, 0.5 * x)


def _chi2_pdf(x, a):
    # a = k / 2; valid for x > 0
    return math.exp((a - 1.0) * math.log(x) - 0.5 * x - a * math.log(2.0) - log_gamma(a))


# Hastings-type rational approximation of the normal quantile (about 4.5e-4
# absolute error). Only used to seed the quantile iteration below.
_SEED_C = (2.515517, 0.802853, 0.010328)
_SEED_D = (1.432788, 0.189269, 0.001308)


def _normal_quantile_seed(p):
    tail = min(p, 1.0 - p)
    t = math.sqrt(-2.0 * math.log(tail))
    num = _SEED_C[0] + t * (_SEED_C[1] + t * _SEED_C[2])
    den = 1.0 + t * (_SEED_D[0] + t * (_SEED_D[1] + t * _SEED_D[2]))
    z = t - num / den
    return z if p >= 0.5 else -z


def chi2_inv(p, k):
    """Chi-square quantile: the x with chi2_cdf(x, k) = p.

    Newton iteration on the CDF (or on the survival function when p > 0.5,
    which keeps the upper tail accurate), bracketed so every step either
    shrinks the bracket or bisects it. Seeded by the Wilson-Hilferty cube
    approximation.
    """
    k = _check_df("k", k)
    p = _check_finite("p", p)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    if p == 0.0:
        return 0.0

    a = 0.5 * k
    upper = p > 0.5
    q = 1.0 - p  # exact when p > 0.5

    z = _normal_quantile_seed(p)
    h = 2.0 / (9.0 * k)
    x = k * (1.0 - h + z * math.sqrt(h)) ** 3
    if x <= 0.0:
        x = 0.5 * k * math.exp((math.log(p) + log_gamma(a + 1.0)) / a) * 2.0 / k
        if x <= 0.0 or math.isnan(x):
            x = 1e-8

    lo = 0.0
    hi = max(x * 2.0, k * 2.0, 1.0)
    for _ in range(200):
        if chi2_cdf(hi, k) >= p:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"failed to bracket chi2 quantile (p={p}, k={k})")
    x = min(max(x, 1e-300), hi)

    for _ in range(200):
        if upper:
            g = q - _chi2_sf(x, k)
        else:
            g = chi2_cdf(x, k) - p
        if g >= 0.0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        if g == 0.0:
            break
        dg = _chi2_pdf(x, a)
        if dg > 0.0 and math.isfinite(dg):
            x_new = x - g / dg
        else:
            x_new = 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-14 * max(abs(x_new), 1e-300):
            x = x_new
            break
        x = x_new
    return x


def f_cdf(x, nu1, nu2):
    """CDF of the F distribution with (nu1, nu2) degrees of freedom."""
    nu1 = _check_df("nu1", nu1)
    nu2 = _check_df("nu2", nu2)
    if isinstance(x, float) and math.isinf(x) and x > 0:
        return 1.0
    x = _check_finite("x", x)
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    u = nu1 * x / (nu1 * x + nu2)
    return reg_inc_beta(u, 0.5 * nu1, 0.5 * nu2)


def pseudo_f(sigma1, sigma2):
    """Variance ratio of the two leading singular values.

    Saturates to infinity when the second singular value carries no
    variance, which downstream code maps to probability one.
    """
    sigma1 = _check_finite("sigma1", sigma1)
    sigma2 = _check_finite("sigma2", sigma2)
    if sigma2 < 0.0 or sigma1 < sigma2:
        raise ValueError(
            f"singular values must satisfy sigma1 >= sigma2 >= 0, got ({sigma1}, {sigma2})"
        )
    s2_sq = sigma2 * sigma2
    if s2_sq <= PSEUDO_F_SATURATION:
        return math.inf
    return sigma1 * sigma1 / s2_sq
