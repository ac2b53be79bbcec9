import csv
import io
import json
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from tails.management.commands.tailprice import Command as TailPriceCommand
from tails.models import RunRecord
from tails.signals import report_digest

TAIL_PRICE = ['--alpha', '2', '--anchor-k', '2', '--anchor-c', '0.125']


def run(*args):
    out = io.StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def run_json(*args):
    return json.loads(run(*args))


class KappaCommandTests(SimpleTestCase):
    def test_pareto(self):
        payload = run_json('kappa', '--dist', 'pareto', '--alpha', '2', '--n', '2', '--paths', '400000', '--seed', '7')
        self.assertEqual(payload['subcommand'], 'kappa')
        self.assertAlmostEqual(payload['results']['kappa']['kappa'][0], 0.594, delta=0.05)
        self.assertNotIn('closed_form', payload['results'])

    def test_exponential_closed_form(self):
        payload = run_json('kappa', '--dist', 'exponential', '--n', '2', '--paths', '20000')
        self.assertAlmostEqual(payload['results']['closed_form']['2'], 0.2058, delta=0.001)

    def test_worker_count_does_not_change_output(self):
        args = ['kappa', '--dist', 'student', '--alpha', '3', '--n', '2,5', '--paths', '30000', '--seed', '11']
        self.assertEqual(run(*args, '--workers', '1'), run(*args, '--workers', '2'))

    def test_config_echo(self):
        payload = run_json('kappa', '--dist', 'pareto', '--alpha', '2.5', '--paths', '5000', '--seed', '3',
                           '--workers', '2')
        config = payload['config']
        self.assertEqual(config['seed'], 3)
        self.assertEqual(config['samples'], 5000)
        self.assertEqual(config['alpha'], 2.5)
        self.assertNotIn('workers', config)

    def test_plotdata(self):
        text = run('kappa', '--dist', 'pareto', '--alpha', '2', '--paths', '5000', '--output', 'plotdata')
        rows = list(csv.reader(io.StringIO(text)))
        self.assertEqual(rows[0], ['series', 'x', 'y'])
        self.assertEqual({row[0] for row in rows[1:]}, {'kappa', 'mad'})

    def test_csv(self):
        text = run('kappa', '--dist', 'pareto', '--alpha', '2', '--paths', '5000', '--output', 'csv')
        rows = dict(list(csv.reader(io.StringIO(text)))[1:])
        self.assertEqual(rows['subcommand'], 'kappa')
        self.assertIn('results.kappa.kappa.0', rows)


class TailPriceCommandTests(SimpleTestCase):
    def test_curve(self):
        payload = run_json('tailprice', *TAIL_PRICE, '--strikes', '3,4,5')
        results = payload['results']
        self.assertAlmostEqual(results['curve']['implied_l'], 0.5, places=12)
        self.assertTrue(results['checks']['ok'])
        self.assertEqual(payload['warnings'], [])

    def test_zone_warning_reaches_report(self):
        payload = run_json('tailprice', *TAIL_PRICE, '--strikes', '0.3,3')
        self.assertTrue(any('outside the tail zone' in w for w in payload['warnings']))

    def test_bound(self):
        payload = run_json('tailprice', *TAIL_PRICE, '--strikes', '3', '--bound-k', '2', '--sigma', '0.2')
        self.assertAlmostEqual(payload['results']['min_alpha'], 12.43, delta=0.01)

    def test_out_file(self):
        with TemporaryDirectory() as tmp:
            target = Path(tmp) / 'report.json'
            text = run('tailprice', *TAIL_PRICE, '--strikes', '3,4', '--out', str(target))
            self.assertEqual(text, '')
            self.assertEqual(json.loads(target.read_text())['subcommand'], 'tailprice')

    def test_help_names_topic(self):
        parser = TailPriceCommand().create_parser('manage.py', 'tailprice')
        self.assertIn('Implements:', parser.format_help())


class ExitCodeTests(SimpleTestCase):
    def assertExitCode(self, code, *args):
        with self.assertLogs('tails', 'ERROR'):
            with self.assertRaises(CommandError) as ctx:
                run(*args)
        self.assertEqual(ctx.exception.returncode, code)

    def test_bad_parameter(self):
        self.assertExitCode(2, 'tailprice', '--alpha', '0.5', '--anchor-k', '2', '--anchor-c', '0.1',
                            '--strikes', '3')

    def test_missing_input(self):
        with TemporaryDirectory() as tmp:
            self.assertExitCode(3, 'diag', '--input', str(Path(tmp) / 'absent.csv'))

    def test_unbounded_alpha(self):
        self.assertExitCode(4, 'tailprice', *TAIL_PRICE, '--strikes', '3', '--bound-k', '2', '--sigma', '0.2',
                            '--sigma-slope', '1')


class DiagCommandTests(SimpleTestCase):
    def test_input_file(self):
        rng = np.random.default_rng(5)
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / 'returns.csv'
            path.write_text('ret\n' + '\n'.join('%.10f' % v for v in rng.standard_t(3, 500)) + '\n')
            payload = run_json('diag', '--input', str(path), '--returns', '--ms-p', '4', '--window', '20')
        results = payload['results']
        self.assertEqual(results['n'], 500)
        self.assertEqual(results['ms']['p'], 4.0)
        self.assertEqual(payload['config']['input_path'], str(path))
        self.assertLess(results['drawdown']['worst'], 0)


class OtherCommandTests(SimpleTestCase):
    def test_pvmeta(self):
        payload = run_json('pvmeta', '--p-median', '0.01', '--m', '1,5', '--for-mean', '0.05')
        results = payload['results']
        self.assertEqual(results['n'], 'limit')
        self.assertAlmostEqual(results['quantiles']['0.5'], 0.01, places=6)
        self.assertGreater(results['mean'], results['p_median'])
        self.assertAlmostEqual(results['median_for_mean'], 0.01, delta=0.002)
        minima = dict(results['expected_minimum'])
        self.assertLess(minima[5], minima[1])

    def test_gini(self):
        payload = run_json('gini', '--dist', 'pareto', '--alpha', '1.5', '--samples', '1000', '--seed', '4')
        gini = payload['results']['gini']
        self.assertEqual(payload['results']['n'], 1000)
        self.assertGreater(gini['g_corrected'], gini['g_np'])
        self.assertEqual(payload['results']['stable_limit']['beta'], 1.0)

    def test_kq(self):
        payload = run_json('kq', '--dist', 'pareto', '--alpha', '1.5', '--samples', '2000', '--q', '0.05',
                           '--split', '4')
        split = payload['results']['superadditivity']
        self.assertLessEqual(split['weighted_parts'], split['pooled'] + 1e-12)

    def test_dist(self):
        payload = run_json('dist', '--samples', '20000', '--head', '3')
        results = payload['results']
        self.assertEqual(len(results['head']), 3)
        self.assertAlmostEqual(results['sample']['mean'], 0.0, delta=0.05)
        self.assertAlmostEqual(results['sample']['kurtosis'], 3.0, delta=0.15)
        self.assertAlmostEqual(results['analytic']['std_over_mad'], 1.2533141373155003, places=12)
        self.assertEqual(results['analytic']['mean'], 0.0)

    def test_shadow(self):
        payload = run_json('shadow', '--L', '1', '--H', '1000', '--alpha', '0.6', '--sigma', '2',
                           '--quantiles', '0.5', '--whole-range')
        results = payload['results']
        self.assertGreater(results['shadow_mean'], 1)
        self.assertLess(results['shadow_mean'], 1000)
        self.assertLess(results['truncated_lomax_mean'], 1000)

    def test_tailfit(self):
        payload = run_json('tailfit', '--dist', 'pareto', '--alpha', '2', '--samples', '5000', '--L', '1')
        self.assertAlmostEqual(payload['results']['pareto']['alpha_hat'], 2.0, delta=0.2)


class SaveTests(TestCase):
    def test_save_archives_report(self):
        text = run('tailprice', *TAIL_PRICE, '--strikes', '3,4', '--save')
        record = RunRecord.objects.get()
        self.assertEqual(record.subcommand, 'tailprice')
        self.assertEqual(record.report, text)
        self.assertEqual(record.digest, report_digest(text))
        self.assertEqual(record.config['alpha'], 2.0)
