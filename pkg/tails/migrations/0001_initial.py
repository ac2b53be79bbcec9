# Generated by Django 5.2.6 on 2026-10-18 09:12

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('subcommand', models.CharField(choices=[('kappa', 'Kappa metric'), ('diag', 'Diagnostics'), ('tailfit', 'Tail fit'), ('shadow', 'Shadow moments'), ('gini', 'Gini index'), ('kq', 'Quantile contribution'), ('pvmeta', 'P-value meta-distribution'), ('tailprice', 'Tail option pricing'), ('dist', 'Distribution checks')], max_length=20)),
                ('config', models.JSONField(default=dict)),
                ('report', models.TextField(help_text='Report exactly as emitted (canonical JSON)')),
                ('digest', models.CharField(blank=True, db_index=True, max_length=64)),
                ('seed', models.PositiveBigIntegerField(blank=True, null=True)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
