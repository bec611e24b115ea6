"""
Three-tier cascaded high-pass L-section matching network: impedance
transformation, the P1 design cost, simulated annealing per tier, sequential
synthesis over the impedance envelope and runtime tier selection.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from src.acoustics.transducer_model import simplified_impedance
from src.models.circuit import ImpedanceEnvelope, PztCircuitParams
from src.models.errors import NumericError, ParameterError
from src.models.network import (AnnealConfig, CascadedNetwork, FrequencyBand, LMatchTier,
                                MatchReport, MatchReportRow, TierResult)
from src.utils.logger import Logger

DEGENERATE_SUM = 1e-12


def reflection_at_load(z_m: complex, z0: float) -> complex:
    """
    Reflection coefficient (z_m - z0) / (z_m + z0).

    Args:
        z_m: Load impedance in ohms
        z0: Characteristic impedance in ohms

    Returns:
        complex: Gamma
    """
    if not z0 > 0:
        raise ParameterError(f"z0 must be > 0, got {z0}")
    z_m = complex(z_m)
    if z_m == -z0:
        raise NumericError(f"reflection is singular for z_m = -z0 ({z_m})")
    return (z_m - z0) / (z_m + z0)


def tier_output_impedance(z_in, tier: LMatchTier, f):
    """
    Output impedance of one L-section: (z_in - j/(w c_m)) in parallel with j w l_m.

    Args:
        z_in: Impedance seen looking back into the previous stage (scalar or array)
        tier: The tier components
        f: Frequency in Hz (broadcasts against z_in)

    Returns:
        complex or np.ndarray: Output impedance
    """
    f_arr = np.asarray(f, dtype=float)
    if np.any(~(f_arr > 0)):
        raise ParameterError(f"frequency must be > 0 Hz, got {f}")
    w = 2.0 * math.pi * f_arr
    series = np.asarray(z_in, dtype=complex) - 1j / (w * tier.c_m)
    shunt = 1j * w * tier.l_m
    denominator = series + shunt
    if np.any(np.abs(denominator) < DEGENERATE_SUM):
        raise NumericError("degenerate parallel combination in tier output impedance")
    z_out = series * shunt / denominator
    return complex(z_out) if np.ndim(z_out) == 0 else z_out


def _apply_tiers(z, tiers: Sequence[LMatchTier], f):
    for tier in tiers:
        z = tier_output_impedance(z, tier, f)
    return z


def cascade_impedance(params: PztCircuitParams, network: CascadedNetwork, active_tiers: int, f):
    """
    Output impedance after tiers 1..active_tiers, starting from the PZT's
    simplified impedance.

    Args:
        params: PZT parameters
        network: The cascaded network
        active_tiers: Number of tiers switched in (1..len(network.tiers))
        f: Frequency in Hz (scalar or array)

    Returns:
        complex or np.ndarray: Impedance presented to the load
    """
    if not 1 <= active_tiers <= len(network.tiers):
        raise ParameterError(f"active_tiers must lie in 1..{len(network.tiers)}, got {active_tiers}")
    return _apply_tiers(simplified_impedance(params, f), network.tiers[:active_tiers], f)


def _gamma_array(z_m: np.ndarray, z0: float) -> np.ndarray:
    if not z0 > 0:
        raise ParameterError(f"z0 must be > 0, got {z0}")
    denominator = z_m + z0
    if np.any(denominator == 0):
        raise NumericError("reflection is singular for z_m = -z0")
    return (z_m - z0) / denominator


def _prefix_impedances(network_prefix: Optional[CascadedNetwork], envelope_triple: Sequence[PztCircuitParams],
                       grid: np.ndarray) -> np.ndarray:
    tiers = network_prefix.tiers if network_prefix is not None else ()
    return np.array([_apply_tiers(simplified_impedance(p, grid), tiers, grid) for p in envelope_triple])


def _cost_from_prefix(z_prefix: np.ndarray, candidate: LMatchTier, grid: np.ndarray, z0: float) -> float:
    gamma = _gamma_array(tier_output_impedance(z_prefix, candidate, grid), z0)
    return float(np.sum(np.abs(gamma) ** 3))


def p1_cost(network_prefix: Optional[CascadedNetwork], candidate: LMatchTier,
            envelope_triple: Sequence[PztCircuitParams], band: FrequencyBand, z0: float) -> float:
    """
    Sum of |Gamma|^3 over the envelope entries and the band grid for the cascade
    ending in the candidate tier.

    Args:
        network_prefix: Tiers already fixed (None when designing tier 1)
        candidate: Tier under evaluation
        envelope_triple: Envelope entries this tier is designed for
        band: Design band
        z0: Load impedance in ohms

    Returns:
        float: Non-negative cost
    """
    grid = band.grid()
    return _cost_from_prefix(_prefix_impedances(network_prefix, envelope_triple, grid), candidate, grid, z0)


def _anneal_restart(objective: Callable[[np.ndarray], float], anneal: AnnealConfig,
                    restart: int, stream: Tuple[int, ...]) -> Tuple[np.ndarray, float, float]:
    rng = np.random.default_rng([anneal.seed, *stream, restart])
    lows = np.array([anneal.log10_c_bounds[0], anneal.log10_l_bounds[0]])
    highs = np.array([anneal.log10_c_bounds[1], anneal.log10_l_bounds[1]])
    span = highs - lows

    x = lows + rng.random(2) * span
    cost = objective(x)
    reference = cost if cost > 0 else 1.0
    best_x, best_cost = x, cost
    max_accepted = cost

    temperature = anneal.initial_temperature
    for _ in range(anneal.temperature_levels):
        for _ in range(anneal.iterations_per_temperature):
            candidate = np.clip(x + rng.normal(0.0, 1.0, 2) * anneal.step_scale * temperature * span, lows, highs)
            candidate_cost = objective(candidate)
            delta = (candidate_cost - cost) / reference
            if delta <= 0 or rng.random() < math.exp(-delta / temperature):
                x, cost = candidate, candidate_cost
                max_accepted = max(max_accepted, cost)
                if cost < best_cost:
                    best_x, best_cost = x, cost
        temperature *= anneal.cooling_factor

    if anneal.polish:
        polished = minimize(lambda v: objective(np.clip(v, lows, highs)), best_x, method='Nelder-Mead',
                            options={'xatol': 1e-10, 'fatol': 1e-15, 'maxiter': 2000})
        polished_x = np.clip(polished.x, lows, highs)
        polished_cost = objective(polished_x)
        if polished_cost < best_cost:
            best_x, best_cost = polished_x, polished_cost
    return best_x, best_cost, max_accepted


def optimize_tier(network_prefix: Optional[CascadedNetwork], envelope_triple: Sequence[PztCircuitParams],
                  band: FrequencyBand, z0: float, anneal: Optional[AnnealConfig] = None,
                  stream: Tuple[int, ...] = ()) -> TierResult:
    """
    Solve P1 for one tier with simulated annealing in (log10 c_m, log10 l_m).

    Restarts are independent and may run on worker threads; each owns the
    random stream derived from (seed, stream, restart). The lowest cost wins,
    ties going to the lowest restart index.

    Args:
        network_prefix: Tiers already fixed (None for tier 1)
        envelope_triple: Envelope entries targeted by this tier
        band: Design band
        z0: Load impedance in ohms
        anneal: Annealing schedule
        stream: Extra entropy separating the streams of different tiers

    Returns:
        TierResult: Best tier and its cost
    """
    logger = Logger()
    anneal = anneal or AnnealConfig()
    grid = band.grid()
    z_prefix = _prefix_impedances(network_prefix, envelope_triple, grid)

    def objective(x: np.ndarray) -> float:
        return _cost_from_prefix(z_prefix, LMatchTier(10.0 ** x[0], 10.0 ** x[1]), grid, z0)

    def run(restart: int):
        return _anneal_restart(objective, anneal, restart, stream)

    if anneal.threads > 1:
        with ThreadPoolExecutor(max_workers=anneal.threads) as executor:
            outcomes = list(executor.map(run, range(anneal.restarts)))
    else:
        outcomes = [run(restart) for restart in range(anneal.restarts)]

    best_index = min(range(len(outcomes)), key=lambda i: (outcomes[i][1], i))
    best_x, best_cost, _ = outcomes[best_index]
    for restart, (_, cost, _) in enumerate(outcomes):
        logger.debug(f"restart {restart}: cost {cost:.6e}")

    tier = LMatchTier(float(10.0 ** best_x[0]), float(10.0 ** best_x[1]))
    logger.info(f"Tier optimized: c_m={tier.c_m:.6g} F, l_m={tier.l_m:.6g} H, cost={best_cost:.6e} "
                f"(restart {best_index})")
    return TierResult(tier, best_cost, tuple(o[1] for o in outcomes), max(o[2] for o in outcomes))


def designated_tier_count(entry_index: int) -> int:
    """
    Tier count designed for a 1-based envelope entry (entries 1-3 -> 1, 4-6 -> 2, ...).
    """
    return (entry_index - 1) // 3 + 1


def match_report_rows(envelope: ImpedanceEnvelope, network: CascadedNetwork,
                      band: FrequencyBand) -> List[MatchReportRow]:
    """
    |Gamma| of every envelope entry over the band at its designated tier count.
    """
    grid = band.grid()
    rows = []
    for index in range(1, envelope.n_d + 1):
        tier_count = min(designated_tier_count(index), len(network.tiers))
        z_out = cascade_impedance(envelope.entry(index), network, tier_count, grid)
        gamma = np.abs(_gamma_array(np.asarray(z_out), network.z0))
        rows.extend(MatchReportRow(index, tier_count, float(f), float(g)) for f, g in zip(grid, gamma))
    return rows


def synthesize_network(envelope: ImpedanceEnvelope, band: Optional[FrequencyBand] = None, z0: float = 1000.0,
                       anneal: Optional[AnnealConfig] = None) -> Tuple[CascadedNetwork, MatchReport]:
    """
    Design the tiers sequentially: tier 1 on entries 1-3, tier 2 (after the
    fixed tier 1) on entries 4-6, tier 3 on entries 7-9.

    Args:
        envelope: Impedance envelope with n_d = 3 x tier count
        band: Design band
        z0: Load impedance in ohms
        anneal: Annealing schedule

    Returns:
        Tuple[CascadedNetwork, MatchReport]: The network and its per-entry report
    """
    logger = Logger()
    band = band or FrequencyBand()
    anneal = anneal or AnnealConfig()
    if envelope.n_d % 3 != 0:
        raise ParameterError(f"n_d must be divisible by 3, got {envelope.n_d}")
    tier_count = envelope.n_d // 3
    if not 1 <= tier_count <= 3:
        raise ParameterError(f"n_d = {envelope.n_d} gives {tier_count} tiers; 1-3 are supported")

    tiers: List[LMatchTier] = []
    results: List[TierResult] = []
    for index, triple in enumerate(envelope.triples(), start=1):
        prefix = CascadedNetwork(tuple(tiers), z0) if tiers else None
        result = optimize_tier(prefix, triple, band, z0, anneal, stream=(index,))
        tiers.append(result.tier)
        results.append(result)
        logger.info(f"Tier {index} fixed with cost {result.cost:.6e}")

    network = CascadedNetwork(tuple(tiers), z0)
    report = MatchReport(results, match_report_rows(envelope, network, band))
    return network, report


def unmatched_worst_gamma(entry: PztCircuitParams, band: FrequencyBand, z0: float) -> float:
    """
    Worst-case |Gamma| over the band with the PZT connected straight to z0.
    """
    grid = band.grid()
    return float(np.max(np.abs(_gamma_array(simplified_impedance(entry, grid), z0))))


def _tier_abcd(tier: LMatchTier, f: float) -> np.ndarray:
    w = 2.0 * math.pi * f
    series = np.array([[1.0, -1j / (w * tier.c_m)], [0.0, 1.0]], dtype=complex)
    shunt = np.array([[1.0, 0.0], [1.0 / (1j * w * tier.l_m), 1.0]], dtype=complex)
    return series @ shunt


def load_voltage(source_z: complex, network: CascadedNetwork, active_tiers: int, f: float,
                 z0: Optional[float] = None) -> complex:
    """
    Voltage across z0 when a unit-EMF source with internal impedance source_z
    drives the first active_tiers tiers.

    Args:
        source_z: Source (PZT) impedance in ohms
        network: The cascaded network (z0 is its termination)
        active_tiers: Tiers switched in
        f: Probe frequency in Hz
        z0: Load impedance (defaults to the network termination)

    Returns:
        complex: Load voltage
    """
    if not f > 0:
        raise ParameterError(f"frequency must be > 0 Hz, got {f}")
    abcd = np.eye(2, dtype=complex)
    for tier in network.tiers[:active_tiers]:
        abcd = abcd @ _tier_abcd(tier, f)
    (a, b), (c, d) = abcd
    z0 = network.z0 if z0 is None else z0
    return complex(1.0 / (a + b / z0 + source_z * (c + d / z0)))


def select_tier(true_params: PztCircuitParams, network: CascadedNetwork, probe_f: float) -> int:
    """
    Emulate the runtime sweep: switch in each cascade prefix and keep the one
    with the largest load voltage; ties keep fewer tiers.

    Args:
        true_params: Current PZT parameters
        network: The cascaded network
        probe_f: Probe frequency in Hz

    Returns:
        int: Number of active tiers
    """
    source_z = simplified_impedance(true_params, probe_f)
    best_count, best_voltage = 1, -1.0
    for count in range(1, len(network.tiers) + 1):
        voltage = abs(load_voltage(source_z, network, count, probe_f))
        if voltage > best_voltage:
            best_count, best_voltage = count, voltage
    Logger().debug(f"select_tier: {best_count} tiers, |V|={best_voltage:.6g}")
    return best_count
