import numpy as np

from tails import diagnostics
from tails.dists import sample as draw

from ._base import TailsCommand, add_distribution_arguments, build_distribution, float_list, int_list

MAX_SERIES_POINTS = 500


def _thin(pairs, limit=MAX_SERIES_POINTS):
    """Log-spaced subset of a long curve, always keeping the last point."""
    if len(pairs) <= limit:
        return pairs
    idx = np.unique(np.geomspace(1, len(pairs), limit).astype(int) - 1)
    return [pairs[i] for i in idx]


class Command(TailsCommand):
    help = 'Diagnostics of a series: MS plot, kurtosis under aggregation, records, drawdowns, Zipf'
    topic = 'moment convergence and memory diagnostics'

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser, default='student')
        parser.add_argument('--returns', action='store_true', help='the input holds returns, not prices')
        parser.add_argument('--ms-p', type=float, default=4.0, help='moment order of the MS plot')
        parser.add_argument('--lags', type=int_list, default=[1, 5, 10, 20, 50])
        parser.add_argument('--thresholds', type=float_list, help='K values for E(X | X > K) / K')
        parser.add_argument('--side', choices=('right', 'left'), default='right')
        parser.add_argument('--window', type=int, help='drawdown window in observations')
        parser.add_argument('--acf-lags', type=int_list, default=[1, 2, 5, 10])
        parser.add_argument('--zipf-top', type=float, default=0.1, help='top fraction used for the Zipf slope')
        parser.add_argument('--reshuffle', action='store_true',
                            help='repeat records and autocorrelation on a shuffled copy')

    def run(self, options, config):
        sample = self.load_input(options, is_returns=options['returns'], required=False)
        if sample is None:
            # no input: diagnose a draw from the chosen distribution
            sample = draw(build_distribution(options), config.samples, config.seed)

        curve = diagnostics.ms_plot(sample, options['ms_p'])
        results = {
            'n': len(sample),
            'ms': {'p': curve.p, 'final_ratio': curve.final},
            'max_quartic_contribution': diagnostics.max_moment_contribution(sample, 4),
            'kurtosis_aggregation': [{'lag': lag, 'kurtosis': k, 'excess': k - 3} for lag, k in
                                     diagnostics.kurtosis_under_aggregation(sample, options['lags'])],
            'mad_std_ratio': diagnostics.mad_std_ratio(sample),
            'records': _records_dict(diagnostics.gumbel_records(sample)),
            'subrecords': _records_dict(diagnostics.subrecords(sample)),
            'autocorrelation': [[lag, r] for lag, r in diagnostics.autocorrelation(sample, options['acf_lags'])],
        }
        slope, r2 = diagnostics.zipf_fit(sample, options['zipf_top'])
        results['zipf'] = {'slope': slope, 'r2': r2, 'alpha_estimate': -slope}

        series = {'ms': _thin(curve.pairs())}
        log_x, log_s = diagnostics.zipf_curve(sample)
        series['zipf'] = _thin(list(zip(log_x.tolist(), log_s.tolist())))

        if options.get('thresholds'):
            entries = diagnostics.excess_conditional_expectation(sample, options['thresholds'], options['side'])
            results['excess'] = entries
            series['excess'] = [(e.K, e.phi) for e in entries]
        if options.get('window'):
            dd = diagnostics.max_drawdown(sample, options['window'])
            results['drawdown'] = {'window': options['window'], 'worst': float(dd.min()),
                                   'mean': float(dd.mean()), 'count': int(dd.size)}
        if options['reshuffle']:
            shuffled = diagnostics.reshuffle(sample, config.seed)
            results['shuffled'] = {
                'records': _records_dict(diagnostics.gumbel_records(shuffled)),
                'autocorrelation': [[lag, r] for lag, r in
                                    diagnostics.autocorrelation(shuffled, options['acf_lags'])],
            }
        return results, series


def _records_dict(result):
    return {'count': result.count, 'expected': result.expected, 'stderr': result.stderr}
