"""
Electrical-equivalent model of a PZT layer: impedance evaluation, fitting of
the simplified three-parameter model to impedance sweeps, and the impedance
envelope spanning two environmental extremes.
"""
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from src.models.circuit import (FitResult, ImpedanceEnvelope, ImpedanceSweep,
                                PztCircuitParams)
from src.models.errors import DomainError, FitError, ParameterError
from src.utils.logger import Logger

N_STARTS = 5
MAX_EVALUATIONS = 2000
# Search box for (ln R_E, ln C_E, re_zs_eff): 1 ohm to 1 Tohm, 1 fF to 1 F.
LOWER_BOUNDS = np.array([0.0, math.log(1e-15), 0.0])
UPPER_BOUNDS = np.array([math.log(1e12), 0.0, np.inf])


def _omega(f):
    f_arr = np.asarray(f, dtype=float)
    if np.any(~(f_arr > 0)):
        raise DomainError(f"frequency must be > 0 Hz, got {f}")
    return 2.0 * math.pi * f_arr


def _as_output(value):
    return complex(value) if np.ndim(value) == 0 else value


def secondary_impedance(params: PztCircuitParams, f):
    """
    Impedance of the mechanical (secondary) branch:
    R_M + j(w L_M - 1/(w C_M)) + Z_rad.

    Args:
        params: Circuit parameters carrying a mechanical branch
        f: Frequency in Hz (scalar or array)

    Returns:
        complex or np.ndarray: Z_S
    """
    if params.mechanical is None:
        raise ParameterError("secondary_impedance needs the full mechanical branch")
    w = _omega(f)
    m = params.mechanical
    z = m.r_m + 1j * (w * m.l_m - 1.0 / (w * m.c_m)) + m.z_rad
    return _as_output(z)


def dielectric_impedance(params: PztCircuitParams, f):
    """
    R_E in parallel with C_E, written as the two dielectric terms of the full model.
    """
    w = _omega(f)
    wcr = w * params.c_e * params.r_e
    denom = 1.0 + wcr ** 2
    z = params.r_e / denom - 1j * w * params.c_e * params.r_e ** 2 / denom
    return _as_output(z)


def full_impedance(params: PztCircuitParams, f):
    """
    Total impedance of the PZT layer: dielectric terms plus phi^2 * Z_S.

    Args:
        params: Circuit parameters carrying a mechanical branch
        f: Frequency in Hz

    Returns:
        complex or np.ndarray: Z_R
    """
    z_s = secondary_impedance(params, f)
    z = dielectric_impedance(params, f) + params.mechanical.turns_ratio ** 2 * np.asarray(z_s)
    return _as_output(z)


def simplified_impedance(params: PztCircuitParams, f):
    """
    High-Q approximation near resonance:
    1/(R_E (w C_E)^2) + re_zs_eff - j/(w C_E).

    Args:
        params: Circuit parameters (mechanical branch ignored)
        f: Frequency in Hz (scalar or array)

    Returns:
        complex or np.ndarray: Z_R
    """
    w = _omega(f)
    wc = w * params.c_e
    z = 1.0 / (params.r_e * wc ** 2) + params.re_zs_eff - 1j / wc
    return _as_output(z)


def synthetic_sweep(params: PztCircuitParams, freqs: Sequence[float], noise: float = 0.0,
                    rng: Optional[np.random.Generator] = None) -> ImpedanceSweep:
    """
    Sweep generated from the simplified model, with optional multiplicative noise
    applied independently to the real and imaginary parts.

    Args:
        params: Ground-truth parameters
        freqs: Increasing frequencies in Hz
        noise: Relative standard deviation of the noise
        rng: Random generator (required when noise > 0)

    Returns:
        ImpedanceSweep: The generated sweep
    """
    freqs = np.asarray(freqs, dtype=float)
    z = simplified_impedance(params, freqs)
    if noise > 0:
        if rng is None:
            raise ParameterError("a random generator is needed for a noisy sweep")
        z = (z.real * (1.0 + noise * rng.standard_normal(len(freqs)))
             + 1j * z.imag * (1.0 + noise * rng.standard_normal(len(freqs))))
    return ImpedanceSweep.from_pairs(freqs, z)


def _model_and_jacobian(x: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # x = (ln R_E, ln C_E, re_zs_eff)
    r_e, c_e, s = math.exp(x[0]), math.exp(x[1]), x[2]
    real_term = 1.0 / (r_e * (w * c_e) ** 2)
    imag_term = 1.0 / (w * c_e)
    z = real_term + s - 1j * imag_term
    jac = np.empty((len(w), 3), dtype=complex)
    jac[:, 0] = -real_term
    jac[:, 1] = -2.0 * real_term + 1j * imag_term
    jac[:, 2] = 1.0
    return z, jac


def _initial_guesses(w: np.ndarray, z_meas: np.ndarray) -> List[np.ndarray]:
    capacitive = z_meas.imag < 0
    if np.any(capacitive):
        c_center = float(np.median(-1.0 / (w[capacitive] * z_meas.imag[capacitive])))
    else:
        c_center = 1e-8
    guesses = []
    design = np.column_stack((1.0 / w ** 2, np.ones_like(w)))
    for c_guess in c_center * np.logspace(-1.0, 1.0, N_STARTS):
        (a, s), *_ = np.linalg.lstsq(design, z_meas.real, rcond=None)
        if a > 0:
            r_guess = 1.0 / (a * c_guess ** 2)
        else:
            r_guess = 100.0 / (float(np.median(w)) * c_guess)
        guesses.append(np.array([math.log(r_guess), math.log(c_guess), max(float(s), 0.0)]))
    return guesses


def relative_residual(params: PztCircuitParams, sweep: ImpedanceSweep) -> float:
    """
    sqrt(sum |Z_model - Z_meas|^2 / sum |Z_meas|^2) over the sweep.
    """
    z_meas = np.asarray(sweep.impedances)
    z_model = simplified_impedance(params, np.asarray(sweep.frequencies))
    return float(np.sqrt(np.sum(np.abs(z_model - z_meas) ** 2) / np.sum(np.abs(z_meas) ** 2)))


def fit_params(sweep: ImpedanceSweep, weighting: str = 'modulus') -> FitResult:
    """
    Fit (R_E, C_E, re_zs_eff) of the simplified model to a measured sweep.

    Damped least squares with the analytic Jacobian, started from five
    log-spaced C_E guesses; the best converged start wins.

    Args:
        sweep: At least 3 samples bracketing the band of interest
        weighting: 'modulus' divides each residual by |Z_meas|, 'none' fits raw ohms

    Returns:
        FitResult: Fitted parameters and relative residual
    """
    logger = Logger()
    if len(sweep) < 3:
        raise ParameterError(f"fitting needs at least 3 sweep points, got {len(sweep)}")
    if weighting not in ('modulus', 'none'):
        raise ParameterError(f"unknown weighting '{weighting}'")

    w = _omega(sweep.frequencies)
    z_meas = np.asarray(sweep.impedances, dtype=complex)
    weights = 1.0 / np.abs(z_meas) if weighting == 'modulus' else np.ones(len(z_meas))

    def residuals(x):
        z, _ = _model_and_jacobian(x, w)
        r = (z - z_meas) * weights
        return np.concatenate((r.real, r.imag))

    def jacobian(x):
        _, jac = _model_and_jacobian(x, w)
        jac = jac * weights[:, None]
        return np.vstack((jac.real, jac.imag))

    best = None
    best_cost = math.inf
    evaluations = 0
    history = []
    converged = False
    for index, x0 in enumerate(_initial_guesses(w, z_meas)):
        x0 = np.clip(x0, LOWER_BOUNDS, UPPER_BOUNDS)
        result = least_squares(residuals, x0, jac=jacobian, method='trf', bounds=(LOWER_BOUNDS, UPPER_BOUNDS),
                               x_scale='jac', ftol=1e-15, xtol=1e-15, gtol=1e-15,
                               max_nfev=MAX_EVALUATIONS)
        evaluations += result.nfev
        history.append(float(result.cost))
        logger.debug(f"fit start {index}: status={result.status} cost={result.cost:.6e}")
        if result.cost < best_cost:
            best, best_cost = result.x, result.cost
        converged = converged or result.status > 0

    params = PztCircuitParams(math.exp(best[0]), math.exp(best[1]), float(best[2]))
    residual = relative_residual(params, sweep)
    if not converged:
        raise FitError(f"fit did not converge within {MAX_EVALUATIONS} evaluations per start",
                       best=params, residual=residual)

    logger.info(f"Fitted R_E={params.r_e:.6g} ohm, C_E={params.c_e:.6g} F, "
                f"re_zs_eff={params.re_zs_eff:.6g} ohm (residual {residual:.3e})")
    return FitResult(params, residual, N_STARTS, evaluations, tuple(history))


def build_envelope(alpha: PztCircuitParams, beta: PztCircuitParams, n_d: int) -> ImpedanceEnvelope:
    """
    Discretize the parameters between the beta (entry 1) and alpha (entry n_d) ends.

    R_E and C_E descend from beta to alpha; re_zs_eff ascends.

    Args:
        alpha: Parameters fitting the largest-magnitude impedance at resonance
        beta: Parameters fitting the smallest-magnitude impedance at resonance
        n_d: Number of entries (>= 2)

    Returns:
        ImpedanceEnvelope: Entries 1..n_d
    """
    if n_d < 2:
        raise ParameterError(f"n_d must be >= 2, got {n_d}")
    if not (alpha.r_e < beta.r_e and alpha.c_e < beta.c_e and alpha.re_zs_eff > beta.re_zs_eff):
        raise ParameterError(
            "envelope endpoints need R_E^a < R_E^b, C_E^a < C_E^b and re_zs_eff^a > re_zs_eff^b")

    entries = []
    for i in range(1, n_d + 1):
        if i == 1:
            entries.append(PztCircuitParams(beta.r_e, beta.c_e, beta.re_zs_eff))
        elif i == n_d:
            entries.append(PztCircuitParams(alpha.r_e, alpha.c_e, alpha.re_zs_eff))
        else:
            step = (i - 1) / (n_d - 1)
            entries.append(PztCircuitParams(
                beta.r_e - (i - 1) * (beta.r_e - alpha.r_e) / (n_d - 1),
                beta.c_e - (i - 1) * (beta.c_e - alpha.c_e) / (n_d - 1),
                beta.re_zs_eff + step * (alpha.re_zs_eff - beta.re_zs_eff),
            ))
    return ImpedanceEnvelope(tuple(entries))


def envelope_endpoints(fits: Iterable[PztCircuitParams], resonance_hz: float) -> Tuple[PztCircuitParams, PztCircuitParams]:
    """
    Pick alpha (largest |Z| at resonance) and beta (smallest) among fitted conditions.

    Args:
        fits: Parameters fitted under each recorded condition
        resonance_hz: Resonance frequency used for the comparison

    Returns:
        Tuple[PztCircuitParams, PztCircuitParams]: (alpha, beta)
    """
    fits = list(fits)
    if len(fits) < 2:
        raise ParameterError("at least two fitted conditions are needed for an envelope")
    ranked = sorted(fits, key=lambda p: abs(simplified_impedance(p, resonance_hz)))
    return ranked[-1], ranked[0]


def envelope_from_sweeps(sweeps: Sequence[ImpedanceSweep], resonance_hz: float,
                         weighting: str = 'modulus') -> Tuple[PztCircuitParams, PztCircuitParams]:
    """
    Fit every recorded condition and return the (alpha, beta) envelope ends.

    Args:
        sweeps: One impedance sweep per environmental condition
        resonance_hz: Resonance frequency used to rank the fits
        weighting: Residual weighting passed to fit_params

    Returns:
        Tuple[PztCircuitParams, PztCircuitParams]: (alpha, beta)
    """
    fits = [fit_params(sweep, weighting).params for sweep in sweeps]
    alpha, beta = envelope_endpoints(fits, resonance_hz)
    if not (alpha.r_e < beta.r_e and alpha.c_e < beta.c_e and alpha.re_zs_eff > beta.re_zs_eff):
        raise ParameterError("fitted conditions do not order as an envelope "
                             "(need R_E and C_E smaller, re_zs_eff larger at the alpha end)")
    return alpha, beta
