"""
Subcommand implementations. Each command reads its inputs, runs one
pipeline, writes its outputs plus a manifest into the output directory and
returns the process exit code.
"""
import argparse
import math
import os
from dataclasses import replace
from typing import Dict, List, Tuple

from src.acoustics import array_sim, iq_modulation, matching_network, signal_extraction, transducer_model
from src.models.array import CodingScheme, ProbeRing, SchemeComparison
from src.models.circuit import ImpedanceEnvelope, PztCircuitParams
from src.models.errors import ParameterError
from src.models.loads import LayerAssignment, ReflectionTarget, StageSet, parse_load_token
from src.models.network import FrequencyBand
from src.models.scenario import ScenarioConfig
from src.models.signals import ExtractionResult, MultipathChannel, ReflectorScene
from src.utils import data_files
from src.utils.logger import Logger
from src.utils.manifest import RunManifest

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), 'data')
DEFAULT_ENDPOINTS = os.path.join(DATA_DIR, 'fig4_endpoints.yaml')
DEFAULT_TABLE1 = os.path.join(DATA_DIR, 'table1.json')

# Channel used for synthetic extraction when the scenario has none.
DEFAULT_CHANNEL = {
    'ambient_taps': [
        {'amplitude': 1.0, 'phase_rad': 0.0, 'delay_s': 0.0020},
        {'amplitude': 0.35, 'phase_rad': 1.1, 'delay_s': 0.0031},
        {'amplitude': 0.2, 'phase_rad': -2.4, 'delay_s': 0.0046},
    ],
    'reflector_delays_s': [0.0026, 0.0038],
}


def _out_path(args: argparse.Namespace, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _manifest(args: argparse.Namespace, config: ScenarioConfig, extra: Dict) -> RunManifest:
    effective = config.to_dict()
    effective['command_args'] = {key: value for key, value in sorted(vars(args).items())
                                 if key not in ('handler', 'out_dir', 'log_dir')}
    effective.update(extra)
    anneal = _anneal(args, config)
    return RunManifest(args.command, effective, anneal.seed, anneal.threads)


def _finish(args: argparse.Namespace, manifest: RunManifest):
    path = manifest.write(args.out_dir)
    Logger().info(f"Manifest written to {path}")


def _anneal(args: argparse.Namespace, config: ScenarioConfig):
    anneal = config.anneal_config()
    overrides = {}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.threads is not None:
        overrides['threads'] = args.threads
    if getattr(args, 'budget', None):
        overrides['iterations_per_temperature'] = args.budget
    if getattr(args, 'restarts', None):
        overrides['restarts'] = args.restarts
    return replace(anneal, **overrides)


def _band(args: argparse.Namespace, config: ScenarioConfig) -> FrequencyBand:
    band = config.frequency_band()
    return FrequencyBand(args.f_low if args.f_low is not None else band.f_low,
                         args.f_high if args.f_high is not None else band.f_high,
                         args.n_grid if args.n_grid is not None else band.n_grid)


def _endpoints(args: argparse.Namespace, config: ScenarioConfig) -> Tuple[PztCircuitParams, PztCircuitParams]:
    if getattr(args, 'alpha', None) and getattr(args, 'beta', None):
        return data_files.read_params(args.alpha), data_files.read_params(args.beta)
    sweeps = getattr(args, 'sweeps', None) or config.sweep_paths
    if sweeps and not getattr(args, 'endpoints', None):
        resonance = getattr(args, 'resonance_hz', None) or config.resonance_hz
        return transducer_model.envelope_from_sweeps([data_files.read_sweep(p) for p in sweeps],
                                                     resonance, config.weighting)
    path = getattr(args, 'endpoints', None) or config.endpoints_path or DEFAULT_ENDPOINTS
    return data_files.read_envelope_endpoints(path)


def cmd_fit(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Fit the simplified model to one sweep and write params.yaml.
    """
    manifest = _manifest(args, config, {'sweep': os.path.abspath(args.sweep)})
    sweep = data_files.read_sweep(args.sweep)
    with manifest.stage('fit'):
        result = transducer_model.fit_params(sweep, args.weighting or config.weighting)
    path = _out_path(args, 'params.yaml')
    data_files.write_params(path, result.params)
    manifest.add_output(path)
    _finish(args, manifest)

    p = result.params
    print(f"R_E = {p.r_e:.6g} ohm, C_E = {p.c_e:.6g} F, re_zs_eff = {p.re_zs_eff:.6g} ohm")
    print(f"relative residual = {result.residual:.6e}")
    return 0


def cmd_envelope(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Build the impedance envelope between the alpha and beta ends.
    """
    manifest = _manifest(args, config, {})
    with manifest.stage('endpoints'):
        alpha, beta = _endpoints(args, config)
    n_d = args.nd or config.n_d
    envelope = transducer_model.build_envelope(alpha, beta, n_d)
    path = _out_path(args, 'envelope.yaml')
    data_files.write_envelope(path, envelope)
    manifest.add_output(path)
    _finish(args, manifest)

    for index, entry in enumerate(envelope.entries, start=1):
        z = transducer_model.simplified_impedance(entry, config.resonance_hz)
        print(f"entry {index}: R_E={entry.r_e:.6g} C_E={entry.c_e:.6g} re_zs_eff={entry.re_zs_eff:.6g} "
              f"|Z({config.resonance_hz:g} Hz)|={abs(z):.2f} ohm")
    return 0


def _envelope_for_match(args: argparse.Namespace, config: ScenarioConfig) -> ImpedanceEnvelope:
    if args.envelope:
        envelope = data_files.read_envelope(args.envelope)
        if args.nd and args.nd != envelope.n_d:
            raise ParameterError(f"--nd {args.nd} disagrees with the envelope file ({envelope.n_d} entries)")
        return envelope
    n_d = args.nd or (3 * args.tiers if args.tiers else config.n_d)
    if args.tiers and n_d != 3 * args.tiers:
        raise ParameterError(f"--tiers {args.tiers} needs --nd {3 * args.tiers}, got {n_d}")
    alpha, beta = _endpoints(args, config)
    return transducer_model.build_envelope(alpha, beta, n_d)


def cmd_match(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Synthesize the cascaded network and report |Gamma| per envelope entry.
    """
    logger = Logger()
    band = _band(args, config)
    anneal = _anneal(args, config)
    z0 = args.z0 or config.z0
    manifest = _manifest(args, config, {'effective_band': band.__dict__, 'effective_anneal': anneal.__dict__})

    envelope = _envelope_for_match(args, config)
    with manifest.stage('synthesis'):
        network, report = matching_network.synthesize_network(envelope, band, z0, anneal)

    network_path = _out_path(args, 'network.yaml')
    report_path = _out_path(args, 'match_report.csv')
    data_files.write_network(network_path, network)
    data_files.write_match_report(report_path, report)
    manifest.add_output(network_path)
    manifest.add_output(report_path)
    _finish(args, manifest)

    for index, tier in enumerate(network.tiers, start=1):
        print(f"tier {index}: c_m = {tier.c_m:.6g} F, l_m = {tier.l_m:.6g} H")
    for index, worst in sorted(report.worst_case().items()):
        unmatched = matching_network.unmatched_worst_gamma(envelope.entry(index), band, z0)
        print(f"entry {index}: worst |Gamma| = {worst:.4f} (unmatched {unmatched:.4f})")
    worst_all = max(report.worst_case().values())
    logger.important(f"Matching network synthesized, worst-case |Gamma| {worst_all:.4f}")
    return 0


def cmd_select_tier(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Pick the tier count that maximizes the load voltage for given parameters.
    """
    network = data_files.read_network(args.network)
    if args.params:
        params = data_files.read_params(args.params)
    else:
        alpha, beta = _endpoints(args, config)
        envelope = transducer_model.build_envelope(alpha, beta, args.nd or config.n_d)
        params = envelope.entry(args.entry)
    probe = args.probe_hz or _band(args, config).center
    manifest = _manifest(args, config, {'probe_hz': probe})
    with manifest.stage('select'):
        count = matching_network.select_tier(params, network, probe)
    os.makedirs(args.out_dir, exist_ok=True)
    _finish(args, manifest)

    source_z = transducer_model.simplified_impedance(params, probe)
    for active in range(1, len(network.tiers) + 1):
        voltage = abs(matching_network.load_voltage(source_z, network, active, probe))
        print(f"{active} tier(s): |V_load| = {voltage:.6f}")
    print(f"selected tiers: {count}")
    return 0


def _stages(args: argparse.Namespace, config: ScenarioConfig) -> StageSet:
    if args.stages:
        return StageSet(tuple(float(a) for a in args.stages.split(',')))
    return config.array_scenario().stages


def cmd_iq(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Assign loads for a reflection target, or evaluate a given assignment.
    """
    z0 = args.z0 or config.z0
    manifest = _manifest(args, config, {})
    if args.loads:
        first, second = [token.strip() for token in args.loads.split(',')]
        assignment = LayerAssignment.from_tokens(first, second)
    else:
        if args.amplitude is None or args.phase_deg is None:
            raise ParameterError("iq needs --amplitude and --phase-deg, or --loads")
        target = ReflectionTarget(args.amplitude, math.radians(args.phase_deg))
        assignment = iq_modulation.assign_loads(target, _stages(args, config), z0)
    gamma = iq_modulation.combined_gamma(assignment, z0)
    os.makedirs(args.out_dir, exist_ok=True)
    _finish(args, manifest)

    print(f"layer 1: {assignment.layer1.token}, layer 2: {assignment.layer2.token}")
    print(f"combined reflection: {gamma.magnitude:.4f} at {gamma.phase_deg:.2f} deg")
    return 0


def _table1_profile(path: str, scheme: str, z0: float):
    table = data_files.load_table1(path)
    if scheme not in table:
        raise ParameterError(f"{path} has no '{scheme}' configuration")
    return array_sim.profile_from_tokens(table[scheme], z0, f'table1-{scheme}')


def cmd_beam(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Steer the configured array and write beam and lobe tables.
    """
    scenario = config.array_scenario()
    if args.steer_deg is not None:
        scenario = replace(scenario, steer_deg=args.steer_deg)
    if args.ring_radius is not None or args.ring_count is not None:
        scenario = scenario.with_ring(ProbeRing(scenario.ring.center,
                                                args.ring_radius or scenario.ring.radius,
                                                args.ring_count or scenario.ring.count))
    scheme = args.scheme or config.scheme
    manifest = _manifest(args, config, {'scheme': scheme, 'steer_deg': scenario.steer_deg,
                                        'ring_radius_m': scenario.ring.radius, 'ring_count': scenario.ring.count})

    with manifest.stage('beam'):
        if scheme == 'all':
            comparisons = array_sim.compare_schemes(scenario)
        elif scheme == 'table1':
            table_path = args.table1 or config.table1_path or DEFAULT_TABLE1
            comparisons = []
            for name in ('iq', '2bit', '1bit'):
                profile = _table1_profile(table_path, name, scenario.z0)
                pattern = array_sim.beam_pattern(scenario.array, profile.coefficients, scenario.wave, scenario.ring)
                comparisons.append(SchemeComparison(profile.scheme, pattern, array_sim.beam_metrics(pattern)))
            strongest = max(row.metrics.main_mag for row in comparisons)
            for row in comparisons:
                row.joint_main_mag = row.metrics.main_mag / strongest
        else:
            profile, pattern = array_sim.scheme_pattern(scenario, CodingScheme.parse(scheme, scenario.stages))
            comparisons = [SchemeComparison(profile.scheme, pattern, array_sim.beam_metrics(pattern))]

    for row in comparisons:
        name = 'beam.csv' if len(comparisons) == 1 else f'beam_{row.scheme}.csv'
        path = _out_path(args, name)
        data_files.write_beam(path, row.pattern)
        manifest.add_output(path)
    metrics_path = _out_path(args, 'metrics.csv')
    data_files.write_metrics(metrics_path, comparisons)
    manifest.add_output(metrics_path)
    _finish(args, manifest)

    for row in comparisons:
        m = row.metrics
        side = f"{m.first_side_lobe.normalized:.3f} at {m.first_side_lobe.angle_deg:.2f} deg" \
            if m.first_side_lobe else 'none'
        grating = ', '.join(f"{lobe.angle_deg:.2f}" for lobe in m.grating_lobes) or 'none'
        print(f"{row.scheme}: main lobe {m.main_lobe_angle:.2f} deg (joint {row.joint_main_mag:.3f}), "
              f"first side lobe {side}, grating lobes [{grating}]")
    return 0


def _parse_scene(text: str) -> Tuple[str, LayerAssignment]:
    tokens = [token.strip() for token in text.split(',')]
    if len(tokens) != 2:
        raise ParameterError(f"a synthetic scene needs two load tokens, got '{text}'")
    loads = [parse_load_token(token) for token in tokens]
    return ','.join(tokens), LayerAssignment(loads[0], loads[1])


def cmd_extract(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """
    Recover normalized reflections from recorded or synthesized receptions.
    """
    z0 = args.z0 or config.z0
    manifest = _manifest(args, config, {})
    measured: List[ExtractionResult] = []
    theoretical: List[complex] = []
    labels: List[str] = []

    with manifest.stage('extract'):
        if args.load:
            if not (args.opop and args.shsh):
                raise ParameterError("--load needs the --opop and --shsh reference recordings")
            r_load, real = data_files.read_waveform(args.load)
            r_opop, _ = data_files.read_waveform(args.opop)
            r_shsh, _ = data_files.read_waveform(args.shsh)
            if real:
                carrier = args.carrier_hz or config.source_burst().carrier_freq
                r_load, r_opop, r_shsh = (signal_extraction.demodulate(w, carrier) for w in (r_load, r_opop, r_shsh))
            b = signal_extraction.extract_reflection(r_load, r_opop, r_shsh)
            b_open = signal_extraction.open_reference(r_opop, r_shsh)
            window = tuple(args.window) if args.window else signal_extraction.window_from_reference(
                b_open, config.window_fraction)
            if not args.loads:
                raise ParameterError("extracting from files needs --loads naming the recorded load state")
            label, assignment = _parse_scene(args.loads)
            measured.append(signal_extraction.normalized_coefficient(b, b_open, window, label))
            theoretical.append(signal_extraction.theoretical_coefficient(assignment, z0))
            labels.append(label)
        else:
            scenes = args.synthetic or [','.join(a.tokens) for a in config.load_assignments()]
            burst = config.source_burst()
            if args.carrier_hz:
                burst = replace(burst, carrier_freq=args.carrier_hz,
                                sample_rate=max(burst.sample_rate, 8 * args.carrier_hz))
            channel = config.multipath_channel() if config.channel else MultipathChannel.from_dict(DEFAULT_CHANNEL)
            r_opop = signal_extraction.synthesize_received(channel, ReflectorScene.all_open(), burst)
            r_shsh = signal_extraction.synthesize_received(channel, ReflectorScene.all_short(), burst)
            b_open = signal_extraction.open_reference(r_opop, r_shsh)
            window = tuple(args.window) if args.window else signal_extraction.steady_state_window(
                channel, burst, config.window_fraction)
            for text in scenes:
                label, assignment = _parse_scene(text)
                scene = ReflectorScene((iq_modulation.gamma_of_load(assignment.layer1, z0),
                                        iq_modulation.gamma_of_load(assignment.layer2, z0)))
                r_load = signal_extraction.synthesize_received(channel, scene, burst)
                b = signal_extraction.extract_reflection(r_load, r_opop, r_shsh)
                measured.append(signal_extraction.normalized_coefficient(b, b_open, window, label))
                theoretical.append(signal_extraction.theoretical_coefficient(assignment, z0))
                labels.append(label)

    report = signal_extraction.experiment_report(measured, theoretical, labels)
    path = _out_path(args, 'extraction_report.csv')
    data_files.write_extraction_report(path, report)
    manifest.add_output(path)
    _finish(args, manifest)

    for row in report.rows:
        print(f"{row.label}: {row.amplitude:.4f} at {row.phase_deg:.2f} deg "
              f"(theory {row.theory_amplitude:.4f} at {row.theory_phase_deg:.2f} deg)")
    return 0
