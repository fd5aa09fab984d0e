"""
The `duomagma` management command.

    python manage.py duomagma build spec.json --output f_c2.json
    python manage.py duomagma witness f_c2.json --element @x.json --neighborhood @w.json
    python manage.py duomagma verify cert.json
    python manage.py duomagma shrink matrix.json --eps 1/3 --strategy lll
    python manage.py duomagma selftest --seed 7

Exit codes: 0 pass, 1 semantic failure, 2 input error, 3 budget exhausted.
"""

import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.forms import SelftestOptionsForm, ShrinkOptionsForm, WitnessOptionsForm
from core.services import codec
from core.services.construction import build_construction
from core.services.lattice import parse_rational
from core.services.semidirect import duo_witness
from core.services.unimodular import SearchBudget, shrink_columns
from core.services.verify import certificate_from_witness, check_certificate
from core.tasks import run_selftests
from core.utils.error_handlers import EXIT_FAILURE, InputError, format_error_for_user

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ('suite', 'status', 'cases', 'skipped', 'failures')


class VerificationFailed(Exception):
    """Raised after a failing verdict or self-test report has been printed."""


def _form_errors(form) -> str:
    return '; '.join(f"{name}: {' '.join(errors)}" for name, errors in form.errors.items())


def _read_json_file(path: str):
    return codec.loads(Path(path).read_text(encoding='utf-8'))


def _read_json_argument(value: str):
    """Inline JSON text, or `@path` for a file."""
    if value.startswith('@'):
        return _read_json_file(value[1:])
    return codec.loads(value)


class Command(BaseCommand):
    help = "Build magma constructions, compute and verify witness certificates, shrink matrices, run self-tests."
    requires_system_checks = []

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        build = subparsers.add_parser('build', help='Build a descriptor from a construction document.')
        build.add_argument('spec_file')
        build.add_argument('--output')

        witness = subparsers.add_parser('witness', help='Compute a witness certificate.')
        witness.add_argument('descriptor_file')
        witness.add_argument('--element', required=True, help='JSON text or @path')
        witness.add_argument('--neighborhood', required=True, help='JSON text or @path')
        witness.add_argument('--mode', default='duo')
        witness.add_argument('--output')

        verify = subparsers.add_parser('verify', help='Check a certificate exactly.')
        verify.add_argument('certificate_file')

        shrink = subparsers.add_parser('shrink', help='Find A in SL(2n, Z) making the first n columns of XA small.')
        shrink.add_argument('matrix_file')
        shrink.add_argument('--eps', required=True)
        shrink.add_argument('--strategy')
        shrink.add_argument('--output')

        selftest = subparsers.add_parser('selftest', help='Run the seeded oracle cross-check suites.')
        selftest.add_argument('--seed', type=int, default=0)
        selftest.add_argument('--cases', type=int)
        selftest.add_argument('--inject-fault', action='store_true', dest='inject_fault')

    def handle(self, *args, **options):
        subcommand = options['subcommand']
        handler = getattr(self, f"handle_{subcommand}")
        try:
            handler(options)
        except VerificationFailed as exc:
            raise CommandError(str(exc), returncode=EXIT_FAILURE)
        except Exception as exc:
            payload = format_error_for_user(exc)
            logger.error("duomagma %s failed: %s: %s", subcommand, payload['error_type'], payload['message'])
            self.stderr.write(codec.dumps(payload))
            raise CommandError(payload['message'], returncode=payload['exit_code'])

    def _emit(self, document, output=None) -> None:
        text = codec.dumps(document)
        if output:
            Path(output).write_text(text + '\n', encoding='utf-8')
            logger.info("Wrote %s", output)
        else:
            self.stdout.write(text)

    def handle_build(self, options) -> None:
        M = build_construction(_read_json_file(options['spec_file']))
        self._emit(codec.encode_descriptor_document(M), options.get('output'))

    def handle_witness(self, options) -> None:
        form = WitnessOptionsForm({'mode': options['mode']})
        if not form.is_valid():
            raise InputError(f"Invalid witness options: {_form_errors(form)}")
        M = codec.decode_descriptor_document(_read_json_file(options['descriptor_file']))
        target = codec.decode_element(M, _read_json_argument(options['element']))
        W = codec.decode_nbhd(M, _read_json_argument(options['neighborhood']))
        witness = duo_witness(M, target, W)
        certificate = certificate_from_witness(M, target, W, witness)
        verdict = check_certificate(certificate)
        if not verdict.passed:
            self.stdout.write(codec.dumps(verdict.to_dict()))
            raise VerificationFailed(f"Computed witness failed clause {verdict.clause}")
        self._emit(codec.encode_certificate(certificate), options.get('output'))

    def handle_verify(self, options) -> None:
        certificate = codec.decode_certificate(_read_json_file(options['certificate_file']))
        verdict = check_certificate(certificate)
        self.stdout.write(codec.dumps(verdict.to_dict()))
        if not verdict.passed:
            raise VerificationFailed(f"Certificate failed clause {verdict.clause}")

    def handle_shrink(self, options) -> None:
        form = ShrinkOptionsForm({'eps': options['eps'], 'strategy': options.get('strategy') or ''})
        if not form.is_valid():
            raise InputError(f"Invalid shrink options: {_form_errors(form)}")
        X = codec.decode_rational_matrix(_read_json_file(options['matrix_file']))
        overrides = {'strategy': form.cleaned_data['strategy']} if form.cleaned_data['strategy'] else {}
        A = shrink_columns(X, parse_rational(form.cleaned_data['eps']), SearchBudget.from_settings(**overrides))
        document = codec.encode_shrink_result(X, A)
        self._emit(document, options.get('output'))
        if options.get('output'):
            self.stdout.write(f"det {document['det']}")

    def handle_selftest(self, options) -> None:
        form = SelftestOptionsForm({
            'seed': options['seed'],
            'cases': options.get('cases'),
            'inject_fault': options['inject_fault'],
        })
        if not form.is_valid():
            raise InputError(f"Invalid selftest options: {_form_errors(form)}")
        data = form.cleaned_data
        results = run_selftests(seed=data['seed'] or 0, cases=data['cases'], inject_fault=data['inject_fault'])
        self.stdout.write(render_report(results))
        if any(result['status'] != 'passed' for result in results):
            raise VerificationFailed("Self-test failed")


def render_report(results) -> str:
    """A fixed-width pass/fail table; identical results give identical text."""
    widths = [max(len(column), *(len(str(r.get(column))) for r in results)) for column in TABLE_COLUMNS]
    lines = ['  '.join(column.ljust(w) for column, w in zip(TABLE_COLUMNS, widths)).rstrip()]
    for result in results:
        lines.append('  '.join(str(result.get(column)).ljust(w) for column, w in zip(TABLE_COLUMNS, widths)).rstrip())
    overall = 'passed' if all(r['status'] == 'passed' for r in results) else 'failed'
    lines.append(f"overall: {overall}")
    return '\n'.join(lines)
