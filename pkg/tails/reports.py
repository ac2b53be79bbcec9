"""Report envelope and its serializations.

JSON output is canonical: keys sorted, floats written with 17 significant digits, non-finite
floats as the strings "inf", "-inf" and "nan". The same inputs therefore always produce the
same bytes.
"""
import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field, is_dataclass

import numpy as np
from django.conf import settings
from packaging.version import InvalidVersion, Version

from . import __version__
from .exceptions import DataError

logger = logging.getLogger(__name__)

TOOL = 'heavytails'
OUTPUTS = ('json', 'csv', 'plotdata')


@dataclass
class RunConfig:
    seed: int
    samples: int
    workers: int = 1
    input_path: str | None = None
    output: str = 'json'

    def echo(self):
        # worker count never changes results, so it stays out of the report
        return {'seed': self.seed, 'samples': self.samples, 'input_path': self.input_path,
                'output': self.output}


@dataclass
class Report:
    subcommand: str
    config: dict
    results: dict
    warnings: list = field(default_factory=list)
    series: dict = field(default_factory=dict)

    def envelope(self):
        return {
            'schema': schema_version(),
            'tool': TOOL,
            'version': __version__,
            'subcommand': self.subcommand,
            'config': self.config,
            'results': self.results,
            'warnings': list(self.warnings),
        }

    def render(self, output='json'):
        if output == 'json':
            return to_json(self.envelope())
        if output == 'csv':
            return to_csv(self.envelope())
        if output == 'plotdata':
            return to_plotdata(self.series)
        raise DataError('unknown output format %r' % output)


def schema_version():
    return getattr(settings, 'HEAVYTAILS_REPORT_SCHEMA', 1)


# ---------------- Canonical JSON ----------------

def plain(value):
    """Reduce dataclasses, numpy values and tuples to JSON-shaped Python objects."""
    if hasattr(value, 'as_dict'):
        return plain(value.as_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return plain(asdict(value))
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def format_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, '.17g')
    if text.lstrip('-').isdigit():
        text += '.0'
    return text


def _encode(value, out):
    if value is None:
        out.append('null')
    elif isinstance(value, bool):
        out.append('true' if value else 'false')
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        out.append('{')
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(',')
            out.append(json.dumps(key))
            out.append(':')
            _encode(value[key], out)
        out.append('}')
    elif isinstance(value, list):
        out.append('[')
        for i, item in enumerate(value):
            if i:
                out.append(',')
            _encode(item, out)
        out.append(']')
    else:
        raise DataError('cannot serialize %r' % type(value).__name__)


def to_json(payload):
    out = []
    _encode(plain(payload), out)
    return ''.join(out) + '\n'


def read_report(text):
    """Parse a JSON report and check it was written by a compatible toolkit version."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError('report is not valid JSON: %s' % exc, line=exc.lineno) from None
    if payload.get('tool') != TOOL:
        raise DataError('not a %s report' % TOOL)
    if payload.get('schema') != schema_version():
        raise DataError('report schema %r is not supported (expected %r)'
                        % (payload.get('schema'), schema_version()))
    try:
        written = Version(str(payload.get('version')))
    except InvalidVersion:
        raise DataError('report carries an invalid version %r' % payload.get('version')) from None
    if written.major != Version(__version__).major:
        raise DataError('report written by %s %s cannot be read by %s' % (TOOL, written, __version__))
    if written > Version(__version__):
        logger.warning('report was written by a newer %s (%s)', TOOL, written)
    return payload


# ---------------- CSV ----------------

def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten('%s.%s' % (prefix, key) if prefix else key, value[key], rows)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten('%s.%d' % (prefix, i), item, rows)
    else:
        if isinstance(value, float):
            value = format_float(value).strip('"')
        rows.append((prefix, value))


def to_csv(payload):
    rows = []
    _flatten('', plain(payload), rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(('key', 'value'))
    writer.writerows(rows)
    return buf.getvalue()


def to_plotdata(series):
    """Tidy `series,x,y` rows, series in sorted order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(('series', 'x', 'y'))
    for name in sorted(series):
        for x, y in series[name]:
            writer.writerow((name, format_float(float(x)).strip('"'), format_float(float(y)).strip('"')))
    return buf.getvalue()
