import argparse

import numpy as np

from tails import pvmeta

from ._base import TailsCommand, float_list, int_list

DEFAULT_GRID = [0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75]


def degrees_of_freedom(text):
    if text == pvmeta.LIMIT:
        return pvmeta.LIMIT
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'limit', got %r" % text) from None


class Command(TailsCommand):
    help = 'Distribution of p-values across replications with a given median p-value'
    topic = 'meta-distribution of p-values'

    def add_command_arguments(self, parser):
        parser.add_argument('--p-median', type=float, required=True)
        parser.add_argument('--n', type=degrees_of_freedom, default=pvmeta.LIMIT,
                            help="degrees of freedom of the test statistic, or 'limit'")
        parser.add_argument('--grid', type=float_list, default=DEFAULT_GRID, help='p values to tabulate')
        parser.add_argument('--m', type=int_list, help='trial counts for the expected minimum p-value')
        parser.add_argument('--for-mean', type=float, help='report the median p-value whose mean is this')
        parser.add_argument('--simulate', action='store_true', help='draw --samples realized p-values')

    def run(self, options, config):
        spec = pvmeta.PvMetaSpec.build(options['p_median'], options['n'])
        n = spec.n
        table = [{'p': p, 'density': pvmeta.pv_density(p, spec), 'cdf': pvmeta.pv_cdf(p, spec.p_median, n)}
                 for p in options['grid']]
        results = {
            'p_median': spec.p_median,
            'n': pvmeta.LIMIT if spec.is_limit else n,
            'zeta_bar': spec.zeta_bar,
            'mean': pvmeta.pv_mean(spec.p_median, n),
            'quantiles': {str(level): pvmeta.pv_quantile(level, spec.p_median, n)
                          for level in (0.05, 0.25, 0.5, 0.75, 0.95)},
            'table': table,
        }
        for m in options.get('m') or ():
            results.setdefault('expected_minimum', []).append([m, pvmeta.pv_min_expectation(spec.p_median, m, n)])
        if options.get('for_mean') is not None:
            results['median_for_mean'] = pvmeta.pv_median_for_mean(options['for_mean'], n)

        grid = np.geomspace(1e-4, 0.999, 200)
        series = {'density': [(p, pvmeta.pv_density(p, spec)) for p in grid],
                  'cdf': [(p, pvmeta.pv_cdf(p, spec.p_median, n)) for p in grid]}
        if options['simulate']:
            draws = pvmeta.pv_simulate(spec.p_median, n, config.samples, config.seed, workers=config.workers)
            values = draws.values
            results['simulation'] = {'reps': int(values.size), 'median': float(np.median(values)),
                                     'mean': float(values.mean()),
                                     'below_005': float(np.mean(values <= 0.05))}
        return results, series
