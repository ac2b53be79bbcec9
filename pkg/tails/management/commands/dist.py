import numpy as np

from tails import diagnostics, dists
from tails.exceptions import TailsError

from ._base import TailsCommand, add_distribution_arguments, build_distribution


def analytic(dist):
    """Closed-form companions of a distribution, where they exist."""
    out = {}
    checks = {
        'mean': lambda: dist.mean,
        'kurtosis': lambda: dist.kurtosis,
    }
    if isinstance(dist, (dists.Gaussian, dists.ParetoI, dists.StudentT)):
        checks['std_over_mad'] = lambda: dists.std_over_mad(dist)
    if isinstance(dist, dists.Gaussian):
        checks['crossovers'] = lambda: list(dists.gaussian_crossovers(dist.mu, dist.sigma))
    if isinstance(dist, dists.StudentT):
        checks['crossovers'] = lambda: list(dists.student_crossovers(dist.alpha, dist.s, dist.loc))
    if isinstance(dist, dists.StableParams):
        checks['mean_abs_dev'] = lambda: dists.stable_mean_abs_dev(dist)
    if isinstance(dist, dists.BimodalGaussian):
        checks['kurtosis'] = lambda: dists.mixture_kurtosis(dist.d / 2, -dist.d / 2, dist.sigma, dist.sigma)
    for key, compute in checks.items():
        try:
            out[key] = compute()
        except AttributeError:
            continue
        except TailsError as exc:
            out[key] = None
            out[key + '_note'] = str(exc)
    return out


class Command(TailsCommand):
    help = 'Sample a test-bed distribution and compare sample statistics with closed forms'
    topic = 'test-bed distributions and tail-fattening heuristics'

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser, default='gaussian')
        parser.add_argument('--head', type=int, default=0, help='also list the first draws')

    def run(self, options, config):
        dist = build_distribution(options)
        sample = dists.sample(dist, config.samples, config.seed)
        x = sample.values
        summary = {
            'mean': float(x.mean()),
            'std': float(x.std()),
            'min': float(x.min()),
            'max': float(x.max()),
            'median': float(np.median(x)),
        }
        if x.size > 1 and x.std() > 0:
            summary['kurtosis'] = diagnostics.raw_kurtosis(x)
            summary['std_over_mad'] = diagnostics.mad_std_ratio(x)
        results = {'distribution': str(dist), 'sample': summary, 'analytic': analytic(dist)}
        if options['head']:
            results['head'] = x[:options['head']].tolist()
        return results, {}
