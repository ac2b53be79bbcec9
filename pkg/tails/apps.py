from django.apps import AppConfig


class TailsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tails'
    verbose_name = 'Heavy tails'

    def ready(self):
        import tails.signals  # noqa: F401
