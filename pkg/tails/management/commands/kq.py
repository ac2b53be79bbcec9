import numpy as np

from tails import inequality
from tails.dists import sample as draw

from ._base import TailsCommand, add_distribution_arguments, build_distribution


class Command(TailsCommand):
    help = 'Share of the total held by the top q fraction of observations'
    topic = 'quantile contribution and its small-sample bias'

    def default_samples(self):
        return 1000

    def add_command_arguments(self, parser):
        add_distribution_arguments(parser)
        parser.add_argument('--q', type=float, default=0.01, help='top fraction, in (0, 1)')
        parser.add_argument('--tail-alpha', type=float, help='exponent for the limiting share q^((a-1)/a)')
        parser.add_argument('--split', type=int, help='compare the pooled share with this many equal parts')
        parser.add_argument('--reps', type=int, default=0, help='average the share over generated samples')

    def run(self, options, config):
        sample = self.load_input(options, required=False)
        dist = None
        if sample is None:
            dist = build_distribution(options)
            sample = draw(dist, config.samples, config.seed)
        q = options['q']
        alpha = options.get('tail_alpha') or options.get('alpha')
        theory_alpha = alpha if alpha is not None and alpha > 1 else None
        results = {'n': len(sample),
                   'contribution': inequality.quantile_contribution(sample, q, alpha=theory_alpha)}

        if options.get('split'):
            parts = np.array_split(sample.values, options['split'])
            weighted, pooled = inequality.superadditivity_check(parts, q)
            results['superadditivity'] = {'parts': options['split'], 'weighted_parts': weighted,
                                          'pooled': pooled}
        if options['reps'] and dist is not None:
            shares = inequality.simulate_kappa_q(dist, config.samples, q, options['reps'], config.seed,
                                                 workers=config.workers)
            results['monte_carlo'] = {'reps': options['reps'], 'mean': float(shares.mean()),
                                      'stderr': float(shares.std(ddof=1) / np.sqrt(shares.size))
                                      if shares.size > 1 else None}
        return results, {}
