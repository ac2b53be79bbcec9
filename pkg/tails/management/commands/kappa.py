import logging

from tails import dists, kappa
from tails.exceptions import TailsError

from ._base import TailsCommand, add_distribution_arguments, build_distribution, int_list

logger = logging.getLogger(__name__)


def closed_form(dist, n0, n):
    """Exact kappa(n0, n) when one is known for `dist`, else None."""
    if n0 != 1:
        return None
    try:
        if isinstance(dist, dists.Exponential):
            return kappa.kappa_exponential_exact(n)
        if isinstance(dist, dists.StudentT) and dist.alpha == 3:
            return kappa.kappa_cubic_student_exact(n)
        if isinstance(dist, dists.BimodalGaussian):
            return kappa.kappa_bimodal_exact(dist.d, dist.sigma, n)
        if isinstance(dist, dists.Gaussian):
            return 0.0
        if isinstance(dist, dists.StableParams) and dist.alpha_s > 1:
            return kappa.kappa_stable(dist.alpha_s)
    except TailsError as exc:
        logger.warning('no closed-form kappa for n=%d: %s', n, exc)
    return None


class Command(TailsCommand):
    help = 'Monte Carlo kappa(n0, n) for a chosen distribution'
    topic = 'preasymptotic convergence metric kappa'

    def default_samples(self):
        return 100000

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser)
        parser.add_argument('--n0', type=int, default=1)
        parser.add_argument('--n', dest='ns', type=int_list, default=[2], help='comma-separated horizons, all > n0')
        parser.add_argument('--batches', type=int, default=30, help='batch count for the Monte Carlo error')
        parser.add_argument('--n-gaussian', type=float,
                            help='also report the sample size matching this many Gaussian observations')

    def run(self, options, config):
        dist = build_distribution(options)
        report = kappa.kappa_empirical(dist, options['n0'], options['ns'], config.samples, config.seed,
                                       workers=config.workers, batches=options['batches'])
        results = {'distribution': str(dist), 'kappa': report}
        exact = {str(n): closed_form(dist, report.n0, n) for n in report.ns}
        if any(v is not None for v in exact.values()):
            results['closed_form'] = exact
        if options.get('n_gaussian') is not None:
            k1 = report.kappa[0]
            results['equivalent_sample_size'] = kappa.equivalent_sample_size(k1, options['n_gaussian'])
        series = {
            'mad': [(n, m) for n, m in report.mad_curve],
            'kappa': list(zip(report.ns, report.kappa)),
        }
        return results, series
