import math
import os

import numpy as np
import pytest

from src.acoustics import transducer_model
from src.models.circuit import ImpedanceSweep, MechanicalBranch, PztCircuitParams
from src.models.errors import DomainError, FitError, ParameterError
from src.utils.data_files import read_sweep

FREQS = np.logspace(2, math.log10(50_000.0), 200)


def resonant_branch(f, r_m, l_m=1e-3, turns_ratio=1.0, z_rad=0j):
    w = 2 * math.pi * f
    return MechanicalBranch(r_m, l_m, 1.0 / (w ** 2 * l_m), z_rad, turns_ratio)


def test_secondary_impedance_cancels_at_resonance():
    params = PztCircuitParams(1e5, 1e-8, 0.0, resonant_branch(28_200.0, 100.0))
    z = transducer_model.secondary_impedance(params, 28_200.0)
    assert z.real == pytest.approx(100.0)
    assert abs(z.imag) < 1e-6


def test_secondary_impedance_direct_evaluation():
    params = PztCircuitParams(1e5, 1e-8, 0.0, MechanicalBranch(50.0, 10e-3, 1e-6, 10 + 0j))
    w = 2 * math.pi * 1000.0
    expected = 60.0 + 1j * (w * 10e-3 - 1.0 / (w * 1e-6))
    assert transducer_model.secondary_impedance(params, 1000.0) == pytest.approx(expected)
    assert expected.imag == pytest.approx(-96.32, abs=0.01)


def test_secondary_reactance_increases_with_frequency():
    params = PztCircuitParams(1e5, 1e-8, 0.0, MechanicalBranch(50.0, 10e-3, 1e-6))
    imag = np.imag(transducer_model.secondary_impedance(params, np.linspace(2000.0, 20_000.0, 50)))
    assert np.all(np.diff(imag) > 0)


def test_secondary_impedance_needs_mechanical_branch():
    with pytest.raises(ParameterError):
        transducer_model.secondary_impedance(PztCircuitParams(1e5, 1e-8, 500.0), 1000.0)


def test_full_impedance_with_decoupled_transformer_is_dielectric():
    params = PztCircuitParams(2e4, 3e-8, 0.0, MechanicalBranch(50.0, 1e-3, 1e-6, turns_ratio=0.0))
    f = np.array([1000.0, 28_200.0])
    np.testing.assert_allclose(transducer_model.full_impedance(params, f),
                               transducer_model.dielectric_impedance(params, f), rtol=1e-12)


def test_full_impedance_converges_to_simplified():
    f = 28_200.0
    full = PztCircuitParams(1e6, 1e-8, 0.0, resonant_branch(f, 500.0))
    simplified = PztCircuitParams(1e6, 1e-8, 500.0)
    z_full = transducer_model.full_impedance(full, f)
    z_simple = transducer_model.simplified_impedance(simplified, f)
    assert abs(z_full - z_simple) / abs(z_simple) < 0.02


def test_simplified_impedance_hand_value():
    z = transducer_model.simplified_impedance(PztCircuitParams(1e5, 1e-8, 500.0), 28_200.0)
    assert z.real == pytest.approx(503.2, abs=0.05)
    assert z.imag == pytest.approx(-564.4, abs=0.05)


def test_simplified_impedance_lossless_limit():
    f = 10_000.0
    z = transducer_model.simplified_impedance(PztCircuitParams(1e15, 1e-8, 0.0), f)
    assert z.real == pytest.approx(0.0, abs=1e-6)
    assert z.imag == pytest.approx(-1.0 / (2 * math.pi * f * 1e-8))


@pytest.mark.parametrize("f", [0.0, -10.0])
def test_non_positive_frequency_is_a_domain_error(f):
    with pytest.raises(DomainError):
        transducer_model.simplified_impedance(PztCircuitParams(1e5, 1e-8, 500.0), f)


def test_fit_recovers_noiseless_sweep():
    truth = PztCircuitParams(2e5, 22e-9, 450.0)
    result = transducer_model.fit_params(transducer_model.synthetic_sweep(truth, FREQS))
    assert result.residual < 1e-9
    assert result.params.r_e == pytest.approx(truth.r_e, rel=1e-6)
    assert result.params.c_e == pytest.approx(truth.c_e, rel=1e-6)
    assert result.params.re_zs_eff == pytest.approx(truth.re_zs_eff, rel=1e-6)


def test_fit_with_one_percent_noise():
    truth = PztCircuitParams(2e5, 22e-9, 450.0)
    sweep = transducer_model.synthetic_sweep(truth, FREQS, noise=0.01, rng=np.random.default_rng(7))
    params = transducer_model.fit_params(sweep).params
    assert params.r_e == pytest.approx(truth.r_e, rel=0.05)
    assert params.c_e == pytest.approx(truth.c_e, rel=0.05)
    assert params.re_zs_eff == pytest.approx(truth.re_zs_eff, rel=0.05)


@pytest.mark.parametrize("noise, rtol", [(0.0, 1e-6), (0.01, 0.05)])
def test_fit_roundtrip_over_seeded_draws(noise, rtol):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        truth = PztCircuitParams(10 ** rng.uniform(4.0, 5.5), 10 ** rng.uniform(-8.0, -7.3),
                                 rng.uniform(100.0, 900.0))
        sweep = transducer_model.synthetic_sweep(truth, FREQS, noise=noise, rng=rng)
        params = transducer_model.fit_params(sweep).params
        np.testing.assert_allclose([params.r_e, params.c_e, params.re_zs_eff],
                                   [truth.r_e, truth.c_e, truth.re_zs_eff], rtol=rtol)


def test_fit_on_measured_sweep_reports_residual(data_dir):
    sweep = read_sweep(os.path.join(data_dir, 'fig4_9c.csv'))
    try:
        residual = transducer_model.fit_params(sweep).residual
    except FitError as e:
        assert e.best is not None
        residual = e.residual
    assert math.isfinite(residual)
    assert residual < 1.0


def test_fit_rejects_short_sweep_and_unknown_weighting():
    sweep = ImpedanceSweep.from_pairs([1000.0, 2000.0], [100 - 50j, 90 - 40j])
    with pytest.raises(ParameterError):
        transducer_model.fit_params(sweep)
    sweep = transducer_model.synthetic_sweep(PztCircuitParams(1e5, 1e-8, 500.0), FREQS[:10])
    with pytest.raises(ParameterError):
        transducer_model.fit_params(sweep, weighting='log')


def test_pinned_endpoints_match_quoted_magnitude(endpoints):
    alpha, _ = endpoints
    z = transducer_model.simplified_impedance(alpha, 28_200.0)
    assert abs(z) == pytest.approx(abs(678 + 142j), rel=0.05)


def test_pinned_endpoint_full_model_matches_quoted_magnitude(endpoints):
    alpha, _ = endpoints
    full = PztCircuitParams(alpha.r_e, alpha.c_e, 0.0, resonant_branch(28_200.0, alpha.re_zs_eff))
    z = transducer_model.full_impedance(full, 28_200.0)
    assert abs(z) == pytest.approx(abs(678 + 142j), rel=0.05)
    assert z == pytest.approx(transducer_model.simplified_impedance(alpha, 28_200.0), rel=1e-3)


def test_envelope_with_two_entries_is_the_endpoints(endpoints):
    alpha, beta = endpoints
    envelope = transducer_model.build_envelope(alpha, beta, 2)
    assert envelope.entries == (beta, alpha)


def test_envelope_midpoint():
    alpha = PztCircuitParams(1e5, 2e-8, 700.0)
    beta = PztCircuitParams(3e5, 4e-8, 500.0)
    envelope = transducer_model.build_envelope(alpha, beta, 9)
    assert envelope.entry(5).r_e == pytest.approx(2e5)
    assert envelope.entry(5).c_e == pytest.approx(3e-8)
    assert envelope.entry(5).re_zs_eff == pytest.approx(600.0)
    assert envelope.entry(1) == beta
    assert envelope.entry(9) == alpha


def test_envelope_is_monotone(envelope):
    r_e = [p.r_e for p in envelope.entries]
    c_e = [p.c_e for p in envelope.entries]
    s = [p.re_zs_eff for p in envelope.entries]
    assert all(a > b for a, b in zip(r_e, r_e[1:]))
    assert all(a > b for a, b in zip(c_e, c_e[1:]))
    assert all(a < b for a, b in zip(s, s[1:]))


def test_envelope_rejects_bad_ordering_and_size(endpoints):
    alpha, beta = endpoints
    with pytest.raises(ParameterError):
        transducer_model.build_envelope(beta, alpha, 9)
    with pytest.raises(ParameterError):
        transducer_model.build_envelope(alpha, beta, 1)


def test_envelope_endpoints_rank_by_magnitude_at_resonance(endpoints):
    alpha, beta = endpoints
    middle = PztCircuitParams(35_000.0, 33e-9, 580.0)
    assert transducer_model.envelope_endpoints([middle, beta, alpha], 28_200.0) == (alpha, beta)


def test_envelope_from_sweeps_recovers_endpoints(endpoints):
    alpha, beta = endpoints
    sweeps = [transducer_model.synthetic_sweep(p, FREQS) for p in (beta, alpha)]
    fitted_alpha, fitted_beta = transducer_model.envelope_from_sweeps(sweeps, 28_200.0)
    assert fitted_alpha.r_e == pytest.approx(alpha.r_e, rel=1e-6)
    assert fitted_beta.c_e == pytest.approx(beta.c_e, rel=1e-6)
