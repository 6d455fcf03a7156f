import logging
import os

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

logger = logging.getLogger("manin_d5")

MANIN_D5_CONFIG = dict()

_POSITIVE_INT_KEYS = (
    'THREADS', 'PRIME_CUTOFF', 'EXPONENT_CUTOFF', 'NAIVE_MAX_B', 'DIRECT_MAX_B', 'TORSOR_MAX_B',
    'DENSITY_MAX_WORK', 'NAIVE_DENSITY_MAX_WORK', 'MONTE_CARLO_SAMPLES',
)


def _default_threads():
    value = os.getenv('MANIN_D5_THREADS', '1')
    try:
        return int(value)
    except ValueError:
        raise ImproperlyConfigured(f'MANIN_D5_THREADS must be an integer, got {value!r}')


def conf_settings():
    global MANIN_D5_CONFIG

    MANIN_D5_CONFIG = {
        'THREADS': _default_threads(),
        'ABS_TOL': 1e-8,
        'PRIME_CUTOFF': 10 ** 5,
        'EXPONENT_CUTOFF': 40,
        'NAIVE_MAX_B': 80,
        'DIRECT_MAX_B': 10 ** 5,
        'TORSOR_MAX_B': 10 ** 6,
        'DENSITY_MAX_WORK': 10 ** 9,  # p^{4r} for the structured scan
        'NAIVE_DENSITY_MAX_WORK': 10 ** 8,  # p^{5r} for the 5-fold scan
        'MONTE_CARLO_SAMPLES': 10 ** 6,
        'SEED': 20230601,
        'PERSIST_COUNTS': False,
        'BUILD_ID': None,
    }
    user_settings = getattr(settings, 'MANIN_D5_CONFIG', {})
    MANIN_D5_CONFIG.update(user_settings)

    for key in _POSITIVE_INT_KEYS:
        value = MANIN_D5_CONFIG[key]
        if not isinstance(value, int) or value < 1:
            raise ImproperlyConfigured(f'MANIN_D5_CONFIG[{key!r}] must be a positive integer, got {value!r}')
    if not MANIN_D5_CONFIG['ABS_TOL'] > 0:
        raise ImproperlyConfigured('MANIN_D5_CONFIG["ABS_TOL"] must be positive')


conf_settings()


def get_config(key: str, default=None):
    return MANIN_D5_CONFIG.get(key, default)
