"""Shared plumbing for the toolkit's management commands.

Every subcommand accepts the run flags below, produces a Report and maps toolkit errors to
exit codes: 2 usage, 3 data, 4 numeric or convergence failure.
"""
import argparse
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from tails import dists
from tails.exceptions import ParameterError, TailsError
from tails.ingest import ingest_csv
from tails.models import RunRecord
from tails.montecarlo import in_shard
from tails.reports import OUTPUTS, Report, RunConfig

logger = logging.getLogger(__name__)

USAGE = 2


def float_list(text):
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated numbers, got %r' % text) from None


def int_list(text):
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated integers, got %r' % text) from None


class _WarningCollector(logging.Handler):
    """Keeps toolkit warnings raised outside Monte Carlo shards for the report."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages = []

    def emit(self, record):
        if in_shard():
            return
        message = record.getMessage()
        if message not in self.messages:
            self.messages.append(message)


class TailsCommand(BaseCommand):
    topic = ''
    # options that describe how a run is executed rather than what it computes
    execution_options = {'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
                         'force_color', 'skip_checks', 'stdout', 'stderr', 'workers', 'out', 'save', 'seed',
                         'samples', 'input', 'output'}

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        if self.topic:
            parser.epilog = 'Implements: %s' % self.topic
        return parser

    def add_arguments(self, parser):
        defaults = settings.HEAVYTAILS
        parser.add_argument('--seed', type=int, default=defaults['SEED'], help='64-bit seed for every random draw')
        parser.add_argument('--samples', '--paths', dest='samples', type=int, default=self.default_samples(),
                            help='Monte Carlo sample size (paths / replications)')
        parser.add_argument('--workers', type=int, default=defaults['WORKERS'],
                            help='worker processes for Monte Carlo loops; never changes the output')
        parser.add_argument('--input', help='CSV file with one numeric value per row')
        parser.add_argument('--output', choices=OUTPUTS, default='json')
        parser.add_argument('--out', help='write the report here instead of stdout')
        parser.add_argument('--save', action='store_true', help='archive the report as a RunRecord')
        self.add_command_arguments(parser)

    def default_samples(self):
        return 10000

    def add_command_arguments(self, parser):
        pass

    def run(self, options, config):
        """Return (results, series) for the report."""
        raise NotImplementedError

    # ---------------- helpers for subclasses ----------------

    def load_input(self, options, is_returns=False, required=True):
        if not options.get('input'):
            if required:
                raise ParameterError('--input is required for %s' % self.name)
            return None
        return ingest_csv(options['input'], is_returns=is_returns)

    def require(self, options, *names):
        missing = ['--' + n.replace('_', '-') for n in names if options.get(n) is None]
        if missing:
            raise ParameterError('missing required flag(s): %s' % ', '.join(missing))

    @property
    def name(self):
        return self.__module__.rsplit('.', 1)[-1]

    # ---------------- main ----------------

    def handle(self, *args, **options):
        config = RunConfig(seed=options['seed'], samples=options['samples'], workers=options['workers'],
                           input_path=options.get('input'), output=options['output'])
        params = {k: v for k, v in sorted(options.items())
                  if k not in self.execution_options and v is not None}
        collector = _WarningCollector()
        tails_logger = logging.getLogger('tails')
        tails_logger.addHandler(collector)
        try:
            results, series = self.run(options, config)
        except TailsError as exc:
            logger.exception('%s failed: %s', self.name, exc)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        finally:
            tails_logger.removeHandler(collector)

        report = Report(subcommand=self.name, config=dict(config.echo(), **params), results=results,
                        warnings=collector.messages, series=series or {})
        text = report.render(config.output)
        if options.get('out'):
            Path(options['out']).write_text(text, encoding='utf-8')
            logger.info('wrote %s report to %s', self.name, options['out'])
        else:
            self.stdout.write(text, ending='')
        if options.get('save'):
            json_text = text if config.output == 'json' else report.render('json')
            RunRecord.objects.create(subcommand=self.name, config=report.envelope()['config'],
                                     report=json_text, seed=config.seed)
        return None


def add_distribution_arguments(parser, default='pareto'):
    group = parser.add_argument_group('distribution')
    group.add_argument('--dist', choices=sorted(dists.DISTRIBUTIONS), default=default)
    group.add_argument('--alpha', type=float, help='tail exponent (pareto, student, stable)')
    group.add_argument('--scale', type=float, default=1.0, help='L for pareto, s for student, sigma otherwise')
    group.add_argument('--beta', type=float, default=0.0, help='stable skewness')
    group.add_argument('--mu', type=float, default=0.0, help='location (lognormal: log-mean)')
    group.add_argument('--sigma', type=float, default=1.0, help='lognormal / gaussian scale')
    group.add_argument('--a', type=float, help='two-state volatility jump or gamma-variance b')
    group.add_argument('--p', type=float, default=0.5, help='two-state regime probability')
    group.add_argument('--lam', type=float, default=1.0, help='exponential rate')
    group.add_argument('--d', type=float, default=0.0, help='bimodal mode separation')


def build_distribution(options):
    """Distribution object from the --dist flags."""
    name = options['dist']
    alpha = options.get('alpha')
    if name in ('pareto', 'student', 'stable') and alpha is None:
        raise ParameterError('--alpha is required for --dist %s' % name)
    builders = {
        'pareto': lambda: dists.ParetoI(alpha, options['scale']),
        'student': lambda: dists.StudentT(alpha, options['scale'], options['mu']),
        'lognormal': lambda: dists.Lognormal(options['mu'], options['sigma']),
        'stable': lambda: dists.StableParams(alpha, options['beta'], options['mu'], options['scale']),
        'twostate': lambda: dists.TwoStateGaussian(options['sigma'], options['a'] or 0.0, options['p']),
        'gaussian': lambda: dists.Gaussian(options['mu'], options['sigma']),
        'exponential': lambda: dists.Exponential(options['lam']),
        'gammavar': lambda: dists.GammaVarianceGaussian(options['a'] or 0.0, options['sigma']),
        'bimodal': lambda: dists.BimodalGaussian(options['d'], options['sigma']),
    }
    try:
        build = builders[name]
    except KeyError:
        raise CommandError('unknown distribution %r' % name, returncode=USAGE) from None
    return build()
