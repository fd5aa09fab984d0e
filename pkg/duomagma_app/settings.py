"""
Django settings for duomagma_app project.

The project has no web surface and no database; Django provides settings,
the management-command CLI, forms and the app registry for Celery.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load .env file
load_dotenv(os.path.join(BASE_DIR, '.env'))

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-placeholder-key-for-dev')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'core',
]

MIDDLEWARE = []

# No persistence beyond flat JSON files.
DATABASES = {}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Search and self-test configuration
# --------------------------------------------------------------------------
DUOMAGMA_STRATEGY = os.environ.get('DUOMAGMA_STRATEGY', 'lll')
DUOMAGMA_PIGEONHOLE_K = int(os.environ.get('DUOMAGMA_PIGEONHOLE_K', '64'))
DUOMAGMA_TIMEOUT_STEPS = int(os.environ.get('DUOMAGMA_TIMEOUT_STEPS', '200000'))
DUOMAGMA_LLL_DELTA = os.environ.get('DUOMAGMA_LLL_DELTA', '3/4')
DUOMAGMA_LLL_WEIGHT = int(os.environ.get('DUOMAGMA_LLL_WEIGHT', '1'))
DUOMAGMA_SELFTEST_CASES = int(os.environ.get('DUOMAGMA_SELFTEST_CASES', '100'))

# Logging goes to stderr so that stdout carries only command output.
DUOMAGMA_LOG_LEVEL = os.environ.get('DUOMAGMA_LOG_LEVEL', 'WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'core': {
            'handlers': ['stderr'],
            'level': DUOMAGMA_LOG_LEVEL,
            'propagate': False,
        },
        'celery': {
            'handlers': ['stderr'],
            'level': 'WARNING',
        },
    },
}

# Celery Configuration Options
# Self-test suites run in-process unless a broker is configured.
CELERY_TASK_ALWAYS_EAGER = os.environ.get('CELERY_TASK_ALWAYS_EAGER', 'True') == 'True'
CELERY_TASK_EAGER_PROPAGATES = False
CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL', 'memory://')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
