"""
Django settings for the HeavyTails project.

Only the pieces a command-line toolkit needs are configured: the `tails` app, an sqlite
archive for emitted reports, and logging on stderr so stdout carries nothing but reports.

Environment (read from `.env` when present):
    HEAVYTAILS_WORKERS      default worker count for Monte Carlo loops
    HEAVYTAILS_SEED         default seed when --seed is omitted
    HEAVYTAILS_SHARD_SIZE   paths per Monte Carlo shard
    HEAVYTAILS_LOG_LEVEL    level of the `tails` logger
"""

from pathlib import Path

import environ
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / '.env')

env = environ.Env(
    DJANGO_DEBUG=(bool, False),
    HEAVYTAILS_WORKERS=(int, 1),
    HEAVYTAILS_SEED=(int, 20190101),
    HEAVYTAILS_SHARD_SIZE=(int, 10000),
    HEAVYTAILS_LOG_LEVEL=(str, 'INFO'),
    HEAVYTAILS_DB=(str, str(BASE_DIR / 'db.sqlite3')),
)

# SECURITY WARNING: nothing is served, the key only satisfies Django's checks
SECRET_KEY = env('DJANGO_SECRET_KEY', default='heavytails-cli-only-not-secret')

DEBUG = env('DJANGO_DEBUG')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'tails',
]

MIDDLEWARE = []


# Database (archive of emitted reports, see tails.models.RunRecord)

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': env('HEAVYTAILS_DB'),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ---------------- Toolkit ----------------

HEAVYTAILS = {
    'WORKERS': env('HEAVYTAILS_WORKERS'),
    'SEED': env('HEAVYTAILS_SEED'),
    'SHARD_SIZE': env('HEAVYTAILS_SHARD_SIZE'),
}

HEAVYTAILS_REPORT_SCHEMA = 1


# ---------------- Logging ----------------

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'tails': {
            'handlers': ['console'],
            'level': env('HEAVYTAILS_LOG_LEVEL'),
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}
