from tails import inequality, tailfit
from tails.dists import sample as draw

from ._base import TailsCommand, add_distribution_arguments, build_distribution


class Command(TailsCommand):
    help = 'Gini index with the small-sample correction for infinite-variance data'
    topic = 'Gini estimation under fat tails'

    def default_samples(self):
        return 1000

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser)
        parser.add_argument('--tail-alpha', type=float,
                            help='exponent used for the correction; defaults to --alpha or the fitted one')
        parser.add_argument('--L', dest='L', type=float, help='fit a Pareto exponent above L for the MLE Gini')
        parser.add_argument('--reps', type=int, default=0,
                            help='also average the Gini over this many generated samples')

    def run(self, options, config):
        sample = self.load_input(options, required=False)
        dist = None
        if sample is None:
            dist = build_distribution(options)
            sample = draw(dist, config.samples, config.seed)
        alpha_hat = None
        if options.get('L') is not None:
            alpha_hat = tailfit.pareto_mle(sample, options['L'], debiased=True).alpha_hat
        alpha = options.get('tail_alpha') or options.get('alpha') or alpha_hat
        results = {'n': len(sample)}

        if alpha is not None and 1 < alpha < 2:
            report = inequality.gini_corrected(sample, alpha, alpha_hat=alpha_hat)
            results['gini'] = report
            results['stable_limit'] = inequality.gini_stable_limit(alpha, len(sample))
        else:
            results['gini'] = {'g_np': inequality.gini_nonparametric(sample),
                               'g_mle': inequality.gini_mle_pareto(alpha_hat) if alpha_hat else None}
        if alpha_hat is not None:
            results['alpha_hat'] = alpha_hat
            results['g_mle_stderr'] = inequality.gini_mle_stderr(alpha_hat, len(sample))

        if options['reps'] and dist is not None:
            values = inequality.simulate_gini(dist, config.samples, options['reps'], config.seed,
                                              workers=config.workers)
            mc = {'reps': options['reps'], 'mean_np': float(values.mean())}
            if isinstance(results['gini'], inequality.GiniReport):
                mc['mean_corrected'] = mc['mean_np'] + results['gini'].mode_shift
            if getattr(dist, 'name', '') == 'pareto' and dist.alpha > 0.5:
                mc['true'] = inequality.gini_mle_pareto(dist.alpha)
            results['monte_carlo'] = mc
        return results, {}
