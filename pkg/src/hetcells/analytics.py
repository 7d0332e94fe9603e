"""Deterministic evaluation of the mean-area and association formulas.

For a common path-loss exponent the per-tier mean cell area has a closed
form; otherwise it is a radial integral of a gain-averaged void
probability.  The radial integral is computed after the substitution
u = r^2 (which flattens the Gaussian-type decay), with the gain
expectation evaluated by a Gauss rule matched to the gain law and the
node count doubled until the result is stable to 1e-9 relative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

from .fading import FadingModel, fractional_moment

RELATIVE_TARGET = 1e-8
NODE_CONVERGENCE = 1e-9
TAIL_FLOOR = 1e-14
_MAX_NODES = 2048


class DivergenceError(ValueError):
    """The requested integral diverges for the given configuration."""


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the accuracy target."""


class QuadratureResult(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class AnalyticPrediction:
    """Per-tier formula values for one network configuration."""

    per_tier_mean_area: np.ndarray
    per_tier_assoc_prob: np.ndarray
    transformed_densities: np.ndarray


def transformed_densities(tiers) -> np.ndarray:
    """Effective densities lambda_k * P_k^(2/a_k) * E[H_k^(2/a_k)]."""
    return np.array(
        [
            t.density
            * t.power ** (2.0 / t.path_loss_exponent)
            * fractional_moment(t.fading, 2.0 / t.path_loss_exponent)
            for t in tiers
        ]
    )


def mean_area_closed_form(tiers) -> np.ndarray:
    """Per-tier mean cell area when all tiers share one exponent.

    E_i[area] = P_i^(2/a) E[H_i^(2/a)] / sum_k lambda_k P_k^(2/a) E[H_k^(2/a)].
    """
    exps = [t.path_loss_exponent for t in tiers]
    if len(set(exps)) != 1:
        raise ValueError(
            "closed form requires a single shared path-loss exponent; "
            "use mean_area_integral for unequal exponents"
        )
    a = exps[0]
    numerators = np.array(
        [t.power ** (2.0 / a) * fractional_moment(t.fading, 2.0 / a) for t in tiers]
    )
    denom = sum(t.density * v for t, v in zip(tiers, numerators))
    return numerators / denom


def _is_degenerate(model: FadingModel) -> bool:
    return model.kind == "deterministic" or (model.kind == "lognormal" and model.sigma == 0.0)


def _gain_nodes(model: FadingModel, n: int):
    """Nodes/weights (h_j, w_j) with sum w_j f(h_j) ~ E[f(H)].

    Only degenerate and lognormal laws have a stable Gauss rule here
    (Gauss-Hermite in log-gain); exponential gains take the adaptive path
    in _void_integrand because Gauss-Laguerre converges too slowly on the
    essential boundary layer of the void integrand at h -> 0.
    """
    if _is_degenerate(model):
        return np.array([1.0]), np.array([1.0])
    if model.kind == "lognormal":
        # scipy's Golub-Welsch/asymptotic rule stays finite at large n,
        # unlike numpy's hermgauss which overflows past a few hundred nodes
        x, w = special.roots_hermite(n)
        return np.exp(model.sigma * math.sqrt(2.0) * x), w / math.sqrt(math.pi)
    raise ValueError(f"no Gauss rule for fading kind {model.kind!r}")


def _void_integrand(tiers, i: int, n_nodes: int):
    """g(u) = E_{H_i}[exp(-pi * sum_k lt_k u^(a_i/a_k) (P_i H_i)^(-2/a_k))].

    Returns a scalar callable of u >= 0 with g(0) = 1.  n_nodes selects the
    Gauss rule size for lognormal gains; exponential gains use adaptive
    quadrature in the gain variable (n_nodes ignored).
    """
    lt = transformed_densities(tiers)
    a_i = tiers[i].path_loss_exponent
    u_exps = np.array([a_i / t.path_loss_exponent for t in tiers])
    inv_exps = np.array([-2.0 / t.path_loss_exponent for t in tiers])
    p_i = tiers[i].power
    model = tiers[i].fading

    if model.kind == "exponential":
        scale = model.scale

        def g(u: float) -> float:
            if u <= 0.0:
                return 1.0
            zc = math.pi * lt * np.power(u, u_exps)  # per-tier coefficient

            def integrand(v: float) -> float:
                # h = -scale*log1p(-v) maps v ~ U(0,1) to h ~ Exp(scale)
                h = -scale * math.log1p(-v)
                if h == 0.0:
                    return 0.0
                return math.exp(-float(np.dot(zc, np.power(p_i * h, inv_exps))))

            with warnings.catch_warnings():
                # at large u the integrand is ~0 everywhere and QUADPACK
                # warns about relative accuracy; epsabs covers that regime
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, _ = integrate.quad(
                    integrand, 0.0, 1.0, epsabs=1e-16, epsrel=1e-11, limit=200
                )
            return val

        return g

    h, w = _gain_nodes(model, n_nodes)
    # coef[j, k] = lt_k * (P_i h_j)^(-2/a_k)
    coef = lt[None, :] * np.power(p_i * h[:, None], inv_exps[None, :])

    def g(u: float) -> float:
        if u <= 0.0:
            return 1.0
        z = math.pi * (coef @ np.power(u, u_exps))
        return float(np.dot(w, np.exp(-z)))

    return g


def _integrate_decaying(f, lo: float, hi: float):
    """Adaptive quadrature of a decaying integrand over [lo, hi].

    The range can span many orders of magnitude (heavy lognormal tails),
    so the part beyond max(lo, 1) is integrated in log coordinates.
    """
    split = max(lo, 1.0)
    if hi <= split:
        return integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-10, limit=500)
    total = 0.0
    err = 0.0
    if lo < split:
        v, e = integrate.quad(f, lo, split, epsabs=0.0, epsrel=1e-10, limit=500)
        total += v
        err += e
    v, e = integrate.quad(
        lambda t: f(math.exp(t)) * math.exp(t),
        math.log(split),
        math.log(hi),
        epsabs=0.0,
        epsrel=1e-10,
        limit=500,
    )
    return total + v, err + e


def _tail_cutoff(g, start: float = 1.0) -> float:
    """Smallest power-of-two u with g(u) below TAIL_FLOOR of the peak g(0)=1."""
    u = start
    for _ in range(200):
        if g(u) < TAIL_FLOOR:
            return u
        u *= 2.0
    raise QuadratureError("integrand tail does not decay; check parameters")


def _with_node_doubling(evaluate) -> QuadratureResult:
    """Run evaluate(n_nodes) -> QuadratureResult, doubling nodes to 1e-9."""
    n = 16
    prev = None
    while n <= _MAX_NODES:
        res = evaluate(n)
        if prev is not None:
            diff = abs(res.value - prev.value)
            if diff <= NODE_CONVERGENCE * max(abs(res.value), 1e-300):
                return QuadratureResult(res.value, res.error + diff)
        prev = res
        n *= 2
    raise QuadratureError(
        f"gain quadrature did not converge at {_MAX_NODES} nodes "
        f"(last change {abs(res.value - prev.value):.3g})"
    )


def mean_area_integral(tiers, i: int) -> QuadratureResult:
    """Mean cell area of tier i by radial quadrature (any exponents).

    After u = r^2 the area is pi * integral of the void integrand over u.
    """
    for t in tiers:
        if t.path_loss_exponent <= 2:
            raise ValueError("path-loss exponents must exceed 2")

    def evaluate(n_nodes):
        g = _void_integrand(tiers, i, n_nodes)
        upper = _tail_cutoff(g)
        val, err = _integrate_decaying(g, 0.0, upper)
        tail = g(upper) * upper
        return QuadratureResult(math.pi * val, math.pi * (err + tail))

    model = tiers[i].fading
    if _is_degenerate(model) or model.kind == "exponential":
        res = evaluate(1)
    else:
        res = _with_node_doubling(evaluate)
    if res.error > RELATIVE_TARGET * max(abs(res.value), 1e-300) * 100:
        raise QuadratureError(
            f"quadrature error estimate {res.error:.3g} too large for value {res.value:.3g}"
        )
    return res


def association_probability(tiers) -> np.ndarray:
    """A_i = lambda_i * mean area of tier i; sums to 1."""
    exps = {t.path_loss_exponent for t in tiers}
    if len(exps) == 1:
        areas = mean_area_closed_form(tiers)
    else:
        areas = np.array([mean_area_integral(tiers, i).value for i in range(len(tiers))])
    return np.array([t.density for t in tiers]) * areas


def campbell_functional(
    tiers,
    i: int,
    kernel_exponent: float,
    user_density: float,
    inner_cutoff: float = 0.0,
) -> QuadratureResult:
    """Mean of sum g(Y - T_0) over users Y in the cell of a typical tier-i AP.

    The kernel is g(x) = |x|^(-b) with b = kernel_exponent >= 0 (b = 0 is
    the constant kernel, giving user_density * mean cell area).  In u = r^2
    coordinates the value is pi * lambda_u * integral of u^(-b/2) * void(u)
    over u in [inner_cutoff^2, inf).  For b >= 2 the integrand is not
    integrable at 0, so a positive inner_cutoff is required.
    """
    b = float(kernel_exponent)
    if b < 0:
        raise ValueError("kernel exponent must be >= 0")
    if user_density < 0:
        raise ValueError("user_density must be >= 0")
    if inner_cutoff < 0:
        raise ValueError("inner_cutoff must be >= 0")
    if b >= 2.0 and inner_cutoff == 0.0:
        raise DivergenceError(
            f"kernel r^-{b:g} makes the radial integrand scale as r^{1 - b:g} "
            "near 0, which is not integrable; pass a positive inner_cutoff"
        )

    lo = inner_cutoff * inner_cutoff

    def evaluate(n_nodes):
        g = _void_integrand(tiers, i, n_nodes)
        upper = _tail_cutoff(g, start=max(1.0, 2.0 * lo))
        if b > 0.0 and lo == 0.0:
            # u = t^p removes the u^(-b/2) endpoint singularity exactly
            p = 2.0 / (2.0 - b)
            val, err = _integrate_decaying(lambda t: p * g(t**p), 0.0, upper ** (1.0 / p))
        else:
            val, err = _integrate_decaying(
                lambda u: u ** (-0.5 * b) * g(u) if b > 0 else g(u), lo, upper
            )
        tail = g(upper) * upper ** (1.0 - 0.5 * b) if b < 2 else g(upper)
        scale = math.pi * user_density
        return QuadratureResult(scale * val, scale * (err + tail))

    model = tiers[i].fading
    if _is_degenerate(model) or model.kind == "exponential":
        return evaluate(1)
    return _with_node_doubling(evaluate)


def predict(tiers) -> AnalyticPrediction:
    """Full per-tier analytic summary (closed form when exponents agree)."""
    exps = {t.path_loss_exponent for t in tiers}
    if len(exps) == 1:
        areas = mean_area_closed_form(tiers)
    else:
        areas = np.array([mean_area_integral(tiers, i).value for i in range(len(tiers))])
    probs = np.array([t.density for t in tiers]) * areas
    return AnalyticPrediction(
        per_tier_mean_area=areas,
        per_tier_assoc_prob=probs,
        transformed_densities=transformed_densities(tiers),
    )
