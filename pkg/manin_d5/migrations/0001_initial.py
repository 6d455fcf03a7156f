# Generated by Django 4.2 on 2026-10-17 09:12

import django.utils.timezone
import model_utils.fields
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CountRecord',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, editable=False,
                                                                verbose_name='created')),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, editable=False,
                                                                      verbose_name='modified')),
                ('height_bound', models.PositiveBigIntegerField(verbose_name='height bound')),
                ('count', models.PositiveBigIntegerField(verbose_name='count')),
                ('method', models.CharField(choices=[('naive', 'naive'), ('direct', 'direct'), ('torsor', 'torsor'),
                                                     ('degenerate', 'degenerate')],
                                            max_length=16, verbose_name='method')),
                ('quantity', models.CharField(choices=[('star', 'N(Q1,Q2;B)'), ('u', 'N_U(B)'),
                                                       ('degenerate', 'degenerate points')],
                                              default='star', max_length=16, verbose_name='quantity')),
                ('elapsed_ms', models.FloatField(default=0.0, verbose_name='elapsed (ms)')),
                ('threads', models.PositiveIntegerField(default=1, verbose_name='threads')),
                ('build_id', models.CharField(blank=True, default='', max_length=64, verbose_name='build id')),
            ],
            options={
                'verbose_name': 'Count Record',
                'verbose_name_plural': 'Count Records',
                'ordering': ('height_bound', 'method'),
            },
        ),
    ]
