from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class ManinD5Config(AppConfig):
    default_auto_field = 'django.db.models.AutoField'
    name = 'manin_d5'
    verbose_name = _('Manin D5 point counts')
