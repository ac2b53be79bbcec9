#!/usr/bin/env python
"""Entry point for the heavy-tail toolkit: `python manage.py <subcommand> [flags]`.

Subcommands: kappa, diag, tailfit, shadow, gini, kq, pvmeta, tailprice, dist.
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'HeavyTails.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the packages in requirements.txt "
            "into the active environment first."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
