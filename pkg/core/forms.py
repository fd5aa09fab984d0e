from django import forms

from core.services.lattice import parse_rational
from core.services.unimodular import ENUMERATION, LLL
from core.utils.error_handlers import InputError


def _validate_rational(value):
    try:
        parse_rational(value)
    except InputError as exc:
        raise forms.ValidationError(exc.message)


def _validate_positive_rational(value):
    _validate_rational(value)
    if parse_rational(value) <= 0:
        raise forms.ValidationError('Must be a positive rational number.')


class ConstructionBaseForm(forms.Form):
    kind = forms.ChoiceField(
        label='Base kind',
        required=True,
        choices=[('cyclic', 'Cyclic group Z/n'), ('table', 'Finite multiplication table'),
                 ('vector', 'Rational vector group Q^d'), ('torus', 'Rational torus T^d')],
        help_text='The magma the pipeline starts from.'
    )
    order = forms.IntegerField(
        label='Cyclic order',
        required=False,
        min_value=1,
        max_value=64,
    )
    dim = forms.IntegerField(
        label='Dimension',
        required=False,
        min_value=1,
        max_value=32,
    )

    def clean(self):
        cleaned = super().clean()
        kind = cleaned.get('kind')
        if kind == 'cyclic' and cleaned.get('order') is None:
            raise forms.ValidationError('Cyclic bases need an order.')
        if kind in ('vector', 'torus') and cleaned.get('dim') is None:
            raise forms.ValidationError('Vector and torus bases need a dimension.')
        return cleaned


class PipelineStepForm(forms.Form):
    op = forms.ChoiceField(
        label='Pipeline step',
        required=True,
        choices=[('hm0', 'Step-function extension HM0'),
                 ('semidirect-z', 'Semidirect product with Z'),
                 ('semidirect-aut', 'Semidirect product with a matrix group')],
    )
    factor = forms.IntegerField(
        label='Scaling factor',
        required=False,
        min_value=2,
        help_text='Generator v -> factor * v for semidirect-z over a vector group.'
    )


class WitnessOptionsForm(forms.Form):
    mode = forms.ChoiceField(
        label='Coverage mode',
        required=True,
        choices=[('duo', 'Duo-separable')],
        initial='duo',
    )


class ShrinkOptionsForm(forms.Form):
    eps = forms.CharField(
        label='Epsilon',
        required=True,
        validators=[_validate_positive_rational],
        help_text='Exact rational bound written as p/q.'
    )
    strategy = forms.ChoiceField(
        label='Search strategy',
        required=False,
        choices=[(ENUMERATION, 'Shell enumeration'), (LLL, 'LLL lattice reduction')],
    )


class SelftestOptionsForm(forms.Form):
    seed = forms.IntegerField(label='Seed', required=False, initial=0)
    cases = forms.IntegerField(label='Cases per suite', required=False, min_value=1, max_value=10000)
    inject_fault = forms.BooleanField(label='Inject a fault', required=False, initial=False)
