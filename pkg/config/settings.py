# -*- coding: utf-8 -*-
"""
Django settings for PERPETUA project.
Asintótica de colas de perpetuidades tipo Dickman - Configuración Base

Proyecto sin interfaz web: todas las operaciones se exponen como comandos
de gestión (``python manage.py <subcomando>``).
"""

from pathlib import Path
from decouple import config
import os
import sys

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# ==========================================
# SECURITY SETTINGS
# ==========================================

SECRET_KEY = config('SECRET_KEY', default='django-insecure-perpetua-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1').split(',')

# ==========================================
# APPLICATION DEFINITION
# ==========================================

LOCAL_APPS = [
    'apps.core',
    'apps.qmodel',
    'apps.saddle',
    'apps.tailcalc',
    'apps.expand',
    'apps.exactdens',
    'apps.montecarlo',
]

INSTALLED_APPS = [
    'django.contrib.contenttypes',
] + LOCAL_APPS

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ==========================================
# DATABASE CONFIGURATION
# ==========================================

# Solo se usa para el registro de manifiestos de ejecución
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('DB_NAME', default=str(BASE_DIR / 'perpetua.sqlite3')),
    }
}

# ==========================================
# INTERNATIONALIZATION
# ==========================================

LANGUAGE_CODE = 'es-ec'
TIME_ZONE = 'America/Guayaquil'
USE_I18N = True
USE_TZ = True

# ==========================================
# CONFIGURACIÓN NUMÉRICA
# ==========================================

# Límite de hilos para mapas sobre grillas de t y bloques de Monte Carlo
PERP_THREADS = config('PERP_THREADS', default=os.cpu_count() or 1, cast=int)

PERPETUA_SETTINGS = {
    # Versión del artefacto registrada en cada manifiesto
    'ARTIFACT_VERSION': config('PERPETUA_ARTIFACT_VERSION', default='1.0.0'),

    # Punto de silla: tolerancia relativa del residuo y techo de búsqueda
    'SADDLE_RTOL': config('SADDLE_RTOL', default=1e-10, cast=float),
    'SADDLE_S_MAX': config('SADDLE_S_MAX', default=1e4, cast=float),
    'SADDLE_T_MIN': config('SADDLE_T_MIN', default=0.0, cast=float),
    'SADDLE_MAX_ITERATIONS': config('SADDLE_MAX_ITERATIONS', default=200, cast=int),

    # Cuadratura de psi
    'QUAD_EPSREL': config('QUAD_EPSREL', default=1e-12, cast=float),
    'QUAD_LIMIT': config('QUAD_LIMIT', default=200, cast=int),
    'QUAD_PATCH_NODES': config('QUAD_PATCH_NODES', default=24, cast=int),

    # Series asintóticas
    'SERIES_DEFAULT_TERMS': config('SERIES_DEFAULT_TERMS', default=8, cast=int),
    'SERIES_MAX_TERMS': 20,
    'STIRLING_MAX_N': 64,

    # Grilla exacta de densidad
    'DENS_STEPS_PER_UNIT': config('DENS_STEPS_PER_UNIT', default=2048, cast=int),
    'DENS_TMAX_FACTOR': config('DENS_TMAX_FACTOR', default=205.0, cast=float),
    'DENS_MASS_TOL': config('DENS_MASS_TOL', default=1e-4, cast=float),
    'DENS_RICHARDSON_TOL': config('DENS_RICHARDSON_TOL', default=1e-6, cast=float),

    # Monte Carlo
    'SIM_TRUNCATION_EPS': config('SIM_TRUNCATION_EPS', default=1e-12, cast=float),
    'SIM_BLOCK_SIZE': config('SIM_BLOCK_SIZE', default=65536, cast=int),
    'SIM_MAX_FACTORS': config('SIM_MAX_FACTORS', default=1_000_000, cast=int),
    'SIM_ECDF_POINTS': config('SIM_ECDF_POINTS', default=101, cast=int),
    'MGF_UNSTABLE_RATIO': config('MGF_UNSTABLE_RATIO', default=0.1, cast=float),
    'KS_THRESHOLD': config('KS_THRESHOLD', default=1.95, cast=float),
}

ACCEPTANCE_EXPECTATIONS_FILE = config(
    'ACCEPTANCE_EXPECTATIONS_FILE',
    default=str(BASE_DIR / 'fixtures' / 'acceptance_expectations.json'),
)

# ==========================================
# LOGGING CONFIGURATION
# ==========================================

# Crear directorio de logs si no existe
LOGS_DIR = BASE_DIR / 'logs'
LOGS_DIR.mkdir(exist_ok=True)

LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        # StreamHandler escribe en stderr; stdout queda libre para CSV/JSON
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
            'level': 'WARNING',
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': LOGS_DIR / 'perpetua.log',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
        },
        'apps': {
            'handlers': ['console', 'file'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# ==========================================
# TESTING CONFIGURATION
# ==========================================

if 'test' in sys.argv or 'pytest' in sys.modules:
    # Base de datos en memoria para tests
    DATABASES['default'] = {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:'
    }

    # Los logs de tests no van al archivo
    LOGGING['loggers']['apps']['handlers'] = ['console']
