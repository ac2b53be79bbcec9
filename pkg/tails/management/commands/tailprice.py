from tails import tailoptions

from ._base import TailsCommand, float_list


class Command(TailsCommand):
    help = 'Price out-of-the-money options in the power-law tail from one anchor price'
    topic = 'tail option pricing and the no-arbitrage bound on alpha'

    def default_samples(self):
        return 100000

    def add_command_arguments(self, parser):
        parser.add_argument('--alpha', type=float, required=True)
        parser.add_argument('--anchor-k', type=float, required=True, help='strike of the anchor option')
        parser.add_argument('--anchor-c', type=float, required=True, help='price of the anchor option')
        parser.add_argument('--spot', type=float, default=1.0)
        parser.add_argument('--side', choices=tailoptions.SIDES, default='call_on_price')
        parser.add_argument('--approximate', action='store_true',
                            help='drop the truncation normalization of the put density')
        parser.add_argument('--strikes', type=float_list, required=True)
        parser.add_argument('--check-mc', action='store_true', help='compare with --paths simulated payoffs')
        bound = parser.add_argument_group('no-arbitrage bound')
        bound.add_argument('--bound-k', type=float, help='strike where the tail joins the smile')
        bound.add_argument('--sigma', type=float, help='implied volatility at --bound-k')
        bound.add_argument('--sigma-slope', type=float, default=0.0, help='d sigma / dK at --bound-k')
        bound.add_argument('--t', type=float, default=1.0, help='time to expiry in years')
        bound.add_argument('--bound-mode', choices=('return', 'price'), default='return')
        parser.add_argument('--plateau-top', type=float, default=0.2,
                            help='top fraction of --input used for the Karamata plateau')

    def run(self, options, config):
        spec = tailoptions.TailPricingSpec(alpha=options['alpha'], anchor_strike=options['anchor_k'],
                                           anchor_price=options['anchor_c'], spot=options['spot'],
                                           side=options['side'], approximate=options['approximate'])
        curve = tailoptions.price_curve(spec, options['strikes'])
        results = {'curve': curve}
        series = {'price': list(zip(curve.strikes, curve.prices))}
        if len(curve.strikes) >= 2:
            results['checks'] = tailoptions.curve_diagnostics(curve)

        if options['check_mc']:
            means, errs = tailoptions.simulate_prices(spec, curve.strikes, config.samples, config.seed,
                                                      workers=config.workers)
            results['monte_carlo'] = {'prices': means, 'stderr': errs}
            series['monte_carlo'] = list(zip(curve.strikes, means))

        if options.get('bound_k') is not None:
            self.require(options, 'sigma')
            results['min_alpha'] = tailoptions.min_alpha_no_arbitrage(
                options['bound_k'], options['sigma'], options['sigma_slope'], spec.spot, options['t'],
                curve.implied_l, mode=options['bound_mode'])

        sample = self.load_input(options, required=False)
        if sample is not None:
            plateau = tailoptions.karamata_plateau(sample, spec.alpha, options['plateau_top'])
            results['plateau'] = {'log_spread': plateau['log_spread'], 'l_estimate': plateau['l_estimate']}
            series['plateau'] = list(zip(plateau['x'], plateau['L']))
        return results, series
