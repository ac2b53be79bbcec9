# tails/signals.py
import hashlib
import logging

from django.db.models.signals import post_save, pre_save
from django.dispatch import receiver

from .models import RunRecord

logger = logging.getLogger(__name__)


def report_digest(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


@receiver(pre_save, sender=RunRecord)
def fill_report_digest(sender, instance, **kwargs):
    """
    Stamp the SHA-256 of the emitted report so identical runs can be matched later.
    """
    instance.digest = report_digest(instance.report)


@receiver(post_save, sender=RunRecord)
def log_archived_run(sender, instance, created, **kwargs):
    if not created:
        return
    earlier = RunRecord.objects.filter(digest=instance.digest).exclude(pk=instance.pk).count()
    if earlier:
        logger.info("Archived %s run %s; identical to %d earlier run(s)", instance.subcommand, instance.pk, earlier)
    else:
        logger.info("Archived %s run %s with digest %s", instance.subcommand, instance.pk, instance.digest)
