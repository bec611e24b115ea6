"""
Command-line parser for the simulator.
"""
import argparse

from src.cli import commands

SCHEME_CHOICES = ['iq', '1bit', '2bit', 'continuous', 'all', 'table1']


def _add_band_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--f-low', type=float, help='Lower band edge in Hz')
    parser.add_argument('--f-high', type=float, help='Upper band edge in Hz')
    parser.add_argument('--n-grid', type=int, help='Frequency grid points across the band')


def _add_endpoint_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--endpoints', help='YAML file with alpha and beta parameter sections')
    parser.add_argument('--alpha', help='Parameter file of the alpha (largest |Z|) end')
    parser.add_argument('--beta', help='Parameter file of the beta (smallest |Z|) end')
    parser.add_argument('--sweeps', nargs='+', help='Sweeps to fit for the envelope ends')
    parser.add_argument('--resonance-hz', type=float, help='Resonance used to rank fitted sweeps')
    parser.add_argument('--nd', type=int, help='Number of envelope entries')


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with one subcommand per pipeline.

    Returns:
        argparse.ArgumentParser: The parser
    """
    parser = argparse.ArgumentParser(
        prog='aris-sim',
        description='Multi-layer acoustic reflector simulator: transducer fitting, matching, '
                    'IQ load assignment, array beams and reflection extraction.')
    parser.add_argument('--config', help='JSON scenario file')
    parser.add_argument('--seed', type=int, help='Random seed (default: config anneal.seed, else 42)')
    parser.add_argument('--threads', type=int, help='Worker threads for annealing restarts (default: config, else 1)')
    parser.add_argument('--out-dir', default='out', help='Directory for output files')
    parser.add_argument('--log-level', help='DEBUG, INFO, WARNING, ERROR or CRITICAL')
    parser.add_argument('--log-dir', help='Directory for run logs (no log file when omitted)')
    parser.add_argument('--z0', type=float, help='Load / characteristic impedance in ohms')

    sub = parser.add_subparsers(dest='command', required=True)

    fit = sub.add_parser('fit', help='Fit the simplified PZT model to an impedance sweep')
    fit.add_argument('sweep', help='Sweep file (freq_hz,re_ohm,im_ohm)')
    fit.add_argument('--weighting', choices=['modulus', 'none'], help='Residual weighting')
    fit.set_defaults(handler=commands.cmd_fit)

    envelope = sub.add_parser('envelope', help='Build the impedance envelope')
    _add_endpoint_flags(envelope)
    envelope.set_defaults(handler=commands.cmd_envelope)

    match = sub.add_parser('match', help='Synthesize the cascaded matching network')
    _add_endpoint_flags(match)
    _add_band_flags(match)
    match.add_argument('--envelope', help='Envelope file written by the envelope command')
    match.add_argument('--tiers', type=int, choices=[1, 2, 3], help='Number of tiers (n_d = 3 x tiers)')
    match.add_argument('--budget', type=int, help='Annealing iterations per temperature level')
    match.add_argument('--restarts', type=int, help='Independent annealing restarts per tier')
    match.set_defaults(handler=commands.cmd_match)

    select = sub.add_parser('select-tier', help='Pick the tier count for given PZT parameters')
    _add_endpoint_flags(select)
    _add_band_flags(select)
    select.add_argument('--network', required=True, help='Network file written by the match command')
    select.add_argument('--params', help='Current PZT parameter file')
    select.add_argument('--entry', type=int, default=1, help='Envelope entry to use when --params is absent')
    select.add_argument('--probe-hz', type=float, help='Probe frequency (default: band centre)')
    select.set_defaults(handler=commands.cmd_select_tier)

    iq = sub.add_parser('iq', help='Assign loads for a reflection target')
    iq.add_argument('--amplitude', type=float, help='Target amplitude in [0, 1]')
    iq.add_argument('--phase-deg', type=float, help='Target phase in degrees')
    iq.add_argument('--loads', help='Evaluate a given assignment instead, e.g. R2000,C09')
    iq.add_argument('--stages', help='Quadrature stage amplitudes, e.g. 0.3,0.6,0.9')
    iq.set_defaults(handler=commands.cmd_iq)

    beam = sub.add_parser('beam', help='Compute reflected beams and lobe metrics')
    beam.add_argument('--scheme', choices=SCHEME_CHOICES, help='Coding scheme (default from config)')
    beam.add_argument('--steer-deg', type=float, help='Steering angle in degrees')
    beam.add_argument('--ring-radius', type=float, help='Probe ring radius in metres')
    beam.add_argument('--ring-count', type=int, help='Number of probes on the ring')
    beam.add_argument('--table1', help='Per-element load configurations for --scheme table1')
    beam.set_defaults(handler=commands.cmd_beam)

    extract = sub.add_parser('extract', help='Extract normalized reflections')
    extract.add_argument('--synthetic', action='append',
                         help='Synthesize a scene from two load tokens, e.g. C09,R2000 (repeatable)')
    extract.add_argument('--load', help='Recording with the load state under test')
    extract.add_argument('--opop', help='Recording with both layers open')
    extract.add_argument('--shsh', help='Recording with both layers shorted')
    extract.add_argument('--loads', help='Load tokens of the recorded state, e.g. C09,R2000')
    extract.add_argument('--carrier-hz', type=float, help='Carrier frequency in Hz')
    extract.add_argument('--window', type=float, nargs=2, metavar=('START', 'END'),
                         help='Analysis window in seconds')
    extract.set_defaults(handler=commands.cmd_extract)
    return parser
