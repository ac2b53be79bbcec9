from tails import tailfit
from tails.dists import sample as draw
from tails.exceptions import UndefinedMomentError

from ._base import TailsCommand, add_distribution_arguments, build_distribution, int_list


class Command(TailsCommand):
    help = 'Fit the tail exponent: Pareto MLE above L, a Hill sweep, or a GPD above u'
    topic = 'tail exponent estimation and its sampling law'

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser)
        parser.add_argument('--method', choices=('pareto', 'hill', 'gpd'), default='pareto')
        parser.add_argument('--L', dest='L', type=float, help='Pareto threshold')
        parser.add_argument('--u', type=float, help='GPD threshold')
        parser.add_argument('--ks', type=int_list, help='order statistics for the Hill sweep')
        parser.add_argument('--debiased', action='store_true', help='scale the Pareto MLE by (n - 1) / n')
        parser.add_argument('--bootstrap', type=int, default=0, help='GPD bootstrap refits')
        parser.add_argument('--perturb', type=float, help='refit with values known only within +/- this fraction')
        parser.add_argument('--truncate', type=float, help='truncate the exponent sampling law below this value')
        parser.add_argument('--hidden-K', dest='hidden_K', type=float,
                            help='split the p-th moment at K into visible and hidden parts')
        parser.add_argument('--moment-p', type=float, default=1.0)

    def run(self, options, config):
        sample = self.load_input(options, required=False)
        if sample is None:
            sample = draw(build_distribution(options), config.samples, config.seed)
        method = options['method']
        results = {'n': len(sample), 'method': method}
        series = {}

        if method == 'hill':
            self.require(options, 'ks')
            fits = tailfit.hill_sweep(sample, options['ks'])
            results['hill'] = fits
            series['hill'] = [(f.n_exceed, f.alpha_hat) for f in fits]
            return results, series

        if method == 'gpd':
            self.require(options, 'u')
            fit = tailfit.gpd_fit_mle(sample, options['u'])
            results['gpd'] = fit
            if options['bootstrap']:
                results['bootstrap'] = tailfit.gpd_bootstrap(sample, options['u'], reps=options['bootstrap'],
                                                              seed=config.seed, workers=config.workers)
            alpha, L = fit.alpha, options['u']
        else:
            self.require(options, 'L')
            fit = tailfit.pareto_mle(sample, options['L'], debiased=options['debiased'])
            results['pareto'] = fit
            try:
                results['plugin_mean'] = tailfit.plugin_pareto_mean(fit)
            except UndefinedMomentError as exc:
                results['plugin_mean'] = None
                results['plugin_mean_note'] = str(exc)
            law = tailfit.alpha_sampling_density(fit.alpha_hat, fit.n_exceed, truncate_at=options.get('truncate'),
                                                 debiased=options['debiased'])
            results['alpha_sampling_law'] = {'mean': law.mean(), 'mode': law.mode(), 'mass': law.mass}
            if options.get('perturb') is not None:
                mean, err = tailfit.perturbed_alpha(sample, options['L'], spread=options['perturb'],
                                                    reps=min(config.samples, 1000), seed=config.seed)
                results['perturbed_alpha'] = {'mean': mean, 'stderr': err, 'spread': options['perturb']}
            alpha, L = fit.alpha_hat, options['L']

        if options.get('hidden_K') is not None:
            K, p = options['hidden_K'], options['moment_p']
            results['moments'] = {
                'K': K, 'p': p,
                'visible': tailfit.visible_tail_moment(alpha, L, K, p),
                'hidden': tailfit.hidden_tail_moment(alpha, L, K, p),
            }
        return results, series
