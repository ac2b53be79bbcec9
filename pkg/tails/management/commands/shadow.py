from tails import shadow
from tails.ingest import ingest_csv

from ._base import TailsCommand, float_list


class Command(TailsCommand):
    help = 'Shadow mean of a bounded variable through its unbounded dual'
    topic = 'dual transformation and shadow moments of bounded fat-tailed data'

    def default_samples(self):
        return 20

    def add_command_arguments(self, parser):
        parser.add_argument('--L', dest='L', type=float, required=True, help='lower bound of the variable')
        parser.add_argument('--H', dest='H', type=float, required=True, help='upper bound of the variable')
        parser.add_argument('--Lstar', type=float, help='tail threshold, defaults to L')
        parser.add_argument('--alpha', type=float, help='dual tail exponent; fit from --input when omitted')
        parser.add_argument('--sigma', type=float, help='dual GPD scale; fit from --input when omitted')
        parser.add_argument('--populations', help='CSV of populations aligned with --input, for rescaling')
        parser.add_argument('--today-pop', type=float, help='population the casualties are rescaled to')
        parser.add_argument('--quantiles', type=float_list, help='probabilities for shadow quantiles')
        parser.add_argument('--es-u', type=float_list, help='thresholds for the expected shortfall')
        parser.add_argument('--bootstrap', action='store_true', help='refit on --samples subsamples')
        parser.add_argument('--perturb', type=float, help='refit with values known within +/- this fraction')
        parser.add_argument('--thresholds', type=float_list, help='candidate L* values to choose from')
        parser.add_argument('--whole-range', action='store_true',
                            help='also report the Lomax and truncated-Lomax means over [L, H]')

    def run(self, options, config):
        lstar = options['Lstar'] if options.get('Lstar') is not None else options['L']
        spec = shadow.DualSpec(options['L'], options['H'], lstar)
        results = {'spec': {'L': spec.L, 'H': spec.H, 'Lstar': spec.Lstar}}
        series = {}

        sample = self.load_input(options, required=False)
        if sample is not None and options.get('populations'):
            self.require(options, 'today_pop')
            pops = ingest_csv(options['populations'])
            sample = shadow.rescale_series(sample, pops, options['today_pop'])
            results['rescaled_max'] = float(sample.values.max())

        if sample is not None and options.get('thresholds'):
            u, table = shadow.choose_threshold(sample, options['thresholds'])
            spec = shadow.DualSpec(spec.L, spec.H, u)
            results['spec']['Lstar'] = u
            results['threshold_table'] = [list(row) for row in table]

        if options.get('alpha') is not None and options.get('sigma') is not None:
            alpha, sigma = options['alpha'], options['sigma']
            results['shadow_mean'] = shadow.shadow_mean(spec, alpha, sigma)
        elif sample is not None:
            fit = shadow.fit_shadow(sample, spec)
            results['fit'] = fit
            alpha, sigma = fit.alpha, fit.sigma
        else:
            self.require(options, 'alpha', 'sigma')

        for p in options.get('quantiles') or ():
            results.setdefault('quantiles', []).append([p, shadow.shadow_quantile(p, spec, alpha, sigma)])
        for u in options.get('es_u') or ():
            results.setdefault('expected_shortfall', []).append(
                [u, shadow.shadow_expected_shortfall(u, spec, alpha, sigma)])
        if options['whole_range']:
            results['lomax_mean'] = shadow.lomax_bounded_mean(spec.L, spec.H, sigma, alpha)
            results['truncated_lomax_mean'] = shadow.heaviside_conditional_mean(spec.L, spec.H, sigma, alpha)

        if sample is not None:
            dual = shadow.smooth_rescale(sample.with_values(sample.values[sample.values >= spec.L]), spec)
            series['dual'] = [(i + 1, z) for i, z in enumerate(sorted(dual.values.tolist(), reverse=True))]
            if options['bootstrap']:
                results['bootstrap'] = shadow.bootstrap_shadow(sample, spec, reps=config.samples,
                                                               seed=config.seed, workers=config.workers)
            if options.get('perturb') is not None:
                results['perturbed'] = shadow.perturbed_shadow(sample, spec, spread=options['perturb'],
                                                               seed=config.seed)
        return results, series
