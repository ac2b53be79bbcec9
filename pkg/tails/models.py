from django.db import models
from django.utils import timezone


class RunRecord(models.Model):
    SUBCOMMANDS = [
        ('kappa', 'Kappa metric'),
        ('diag', 'Diagnostics'),
        ('tailfit', 'Tail fit'),
        ('shadow', 'Shadow moments'),
        ('gini', 'Gini index'),
        ('kq', 'Quantile contribution'),
        ('pvmeta', 'P-value meta-distribution'),
        ('tailprice', 'Tail option pricing'),
        ('dist', 'Distribution checks'),
    ]

    subcommand = models.CharField(max_length=20, choices=SUBCOMMANDS)
    config = models.JSONField(default=dict)
    report = models.TextField(help_text='Report exactly as emitted (canonical JSON)')
    # filled by the pre_save receiver in tails/signals.py
    digest = models.CharField(max_length=64, blank=True, db_index=True)
    seed = models.PositiveBigIntegerField(null=True, blank=True)
    created_at = models.DateTimeField(default=timezone.now)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.subcommand} run {self.pk} ({self.digest[:12]})"
