import csv
import logging
import math
from pathlib import Path

from .exceptions import DataError
from .sample import Sample

logger = logging.getLogger(__name__)


def _parse(text):
    try:
        return float(text)
    except ValueError:
        return None


def ingest_csv(path, column=0, is_returns=False):
    """Read one numeric column into a Sample.

    A single non-numeric first row is taken as a header; blank lines are skipped. Any other
    unparsable or non-finite value raises DataError naming its line.
    """
    path = Path(path)
    try:
        handle = path.open(newline='', encoding='utf-8')
    except OSError as exc:
        raise DataError('cannot read %s: %s' % (path, exc.strerror)) from None

    values = []
    header = None
    reader = csv.reader(handle)
    with handle:
        try:
            for line_no, row in enumerate(reader, start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if column >= len(row):
                    raise DataError('line %d has no column %d' % (line_no, column), line=line_no)
                cell = row[column].strip()
                value = _parse(cell)
                if value is None:
                    if header is None and not values:
                        header = cell
                        continue
                    raise DataError('line %d: %r is not a number' % (line_no, cell), line=line_no)
                if not math.isfinite(value):
                    raise DataError('line %d: non-finite value %r' % (line_no, cell), line=line_no)
                values.append(value)
        except UnicodeDecodeError:
            # text is decoded in blocks, so this is the first line not fully read
            line_no = reader.line_num + 1
            raise DataError('%s: line %d is not valid UTF-8' % (path, line_no), line=line_no) from None

    if not values:
        raise DataError('%s holds no numeric values' % path)
    logger.info('read %d values from %s%s', len(values), path,
                ' (header %r)' % header if header is not None else '')
    return Sample(values, name=header or path.stem, is_returns=is_returns, meta={'path': str(path)})
