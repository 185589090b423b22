"""
CLI - Command-line entry point for snfdist
Subcommands for SNF, local and global densities, sampling, gcd systems and extremal checks
"""

import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import click

from app import configure_logging, settings
from errors import BudgetExceededError, InputFormatError, PrecisionError
from formats import (distribution_to_json, format_fixed, format_rational, format_sci, format_sig,
                     parse_distribution, parse_matrix, rational_json)
from health_monitor import resource_monitor
from models import BVector, GcdTargetSpec, PrimePowerSet, SnfPrefixSpec

logger = logging.getLogger(__name__)

FORMATS = click.Choice(['json', 'csv', 'text'])
TABLE_HEADER = ['ell', 'Z', 'one_minus_Z', 'scaled', 'log_column']


def _int_list(ctx, param, value: Optional[str]) -> Optional[Tuple[int, ...]]:
    """Parse '0,1,2' into a tuple of integers"""
    if value is None:
        return None
    try:
        return tuple(int(x) for x in value.split(',') if x.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def _prime_powers(ctx, param, value: Optional[str]) -> Optional[PrimePowerSet]:
    """Parse '2:1,3:2' into a prime power set"""
    if value is None:
        return None
    try:
        pairs = [tuple(int(x) for x in item.split(':')) for item in value.split(',') if item.strip()]
        if any(len(pair) != 2 for pair in pairs):
            raise ValueError(value)
        return PrimePowerSet.from_pairs(pairs)
    except ValueError as e:
        raise click.BadParameter(f"expected p:s pairs such as 2:1,3:2, got {value!r} ({e})")


def _fraction(ctx, param, value: Optional[str]) -> Optional[Fraction]:
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"expected a rational such as 1/2, got {value!r}")


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding='utf-8')


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(document, fmt: str, out: Optional[str] = None,
          header: Optional[Sequence[str]] = None, rows: Optional[Sequence[Sequence]] = None):
    """Render a document as JSON, CSV or text and write it to stdout or --out"""
    if fmt == 'json':
        text = json.dumps(document, indent=2) + '\n'
    elif rows is not None:
        text = _csv_text(header, rows) if fmt == 'csv' else '\n'.join(' '.join(str(x) for x in row) for row in rows) + '\n'
    elif fmt == 'csv':
        text = _csv_text(['key', 'value'], [[k, json.dumps(v) if isinstance(v, (dict, list)) else v]
                                           for k, v in document.items()])
    else:
        text = ''.join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}\n" for k, v in document.items())
    if out:
        Path(out).write_text(text, encoding='utf-8')
        logger.info(f"Wrote {out}")
    else:
        click.echo(text, nl=False)


def output_options(default: str = 'json'):
    def decorate(fn):
        fn = click.option('--out', type=click.Path(dir_okay=False), help='Write the document to a file')(fn)
        return click.option('--format', 'fmt', type=FORMATS, default=default, show_default=True)(fn)
    return decorate


@click.group()
@click.option('--verbose', is_flag=True, help='Log at DEBUG level')
@click.pass_context
def cli(ctx, verbose):
    """SNF distributions of random integer matrices and gcds of polynomial values"""
    configure_logging('DEBUG' if verbose else None)
    ctx.call_on_close(lambda: logger.debug(f"Resources: {resource_monitor.get_system_metrics()}"))


@cli.command()
@click.option('--matrix', 'matrix_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Matrix file: "n m" then rows, or JSON {"n", "m", "entries"}')
@click.option('--q', type=click.IntRange(min=2), help='Reduce modulo q')
@click.option('--minors', is_flag=True, help='Also report the gcds of minors')
@output_options()
def snf(matrix_path, q, minors, fmt, out):
    """Smith normal form of an integer matrix"""
    from snf_core import minors_gcd_profile, snf_integer, snf_mod

    matrix = parse_matrix(_read_text(matrix_path), matrix_path)
    result = snf_mod(matrix, q) if q else snf_integer(matrix)
    document = result.to_json_dict()
    if q:
        document['q'] = q
    if minors:
        profile = minors_gcd_profile(matrix)
        document['minor_gcds'] = list(profile.g)
    _emit(document, fmt, out, ['i', 'd'], [[i + 1, d] for i, d in enumerate(result.diag)] if fmt != 'json' else None)


@cli.command('local-density')
@click.option('--p', type=int, help='Prime')
@click.option('--s', type=click.IntRange(min=1), help='Exponent of the modulus p^s')
@click.option('--n', type=click.IntRange(min=1), help='Rows')
@click.option('--m', type=click.IntRange(min=1), help='Columns')
@click.option('--a', callback=_int_list, help='Chain a_1,...,a_s')
@click.option('--prefix', callback=_int_list, help='Prefix d_1,...,d_r')
@click.option('--all', 'all_chains', is_flag=True, help='Full distribution over all chains')
@click.option('--crt', callback=_prime_powers, help='Prefix density modulo prod p^s, given as p:s,...')
@click.option('--sj', type=click.IntRange(min=0), help='Prefix density mod p^{sj+1}, p^sj exactly dividing d_r')
@click.option('--in', 'in_path', type=click.Path(exists=True, dir_okay=False),
              help='Read a distribution document and check it')
@output_options()
def local_density(p, s, n, m, a, prefix, all_chains, crt, sj, in_path, fmt, out):
    """Exact SNF densities over Z/p^sZ"""
    from local_density import (count_matrices_with_snf, mu_crt, mu_distribution, mu_prefix_at_modulus,
                               mu_ps_point, mu_ps_prefix)

    if in_path:
        distribution = parse_distribution(_read_text(in_path), in_path)
        if distribution.total() != 1:
            raise ValueError(f"distribution in {in_path} sums to {distribution.total()}")
        _emit_distribution(distribution, fmt, out)
        return
    if crt is not None or sj is not None:
        if crt is not None and sj is not None:
            raise click.UsageError('give at most one of --crt, --sj')
        required = (('--n', n), ('--m', m), ('--prefix', prefix)) + ((('--p', p),) if sj is not None else ())
        missing = [name for name, value in required if value is None]
        if missing:
            raise click.UsageError(f"missing {', '.join(missing)}")
        spec = SnfPrefixSpec(prefix, n, m)
        document = {'n': n, 'm': m, 'prefix': list(prefix)}
        if crt is not None:
            document.update({'pairs': [list(pair) for pair in crt.pairs], 'modulus': crt.modulus,
                             'density': rational_json(mu_crt(crt, spec))})
        else:
            document.update({'p': p, 'sj': sj, 'modulus': p ** (sj + 1),
                             'density': rational_json(mu_ps_prefix(p, sj, spec))})
        _emit(document, fmt, out)
        return
    missing = [name for name, value in (('--p', p), ('--s', s), ('--n', n), ('--m', m)) if value is None]
    if missing:
        raise click.UsageError(f"missing {', '.join(missing)}")
    if sum(x is not None and x is not False for x in (a, prefix, all_chains or None)) != 1:
        raise click.UsageError('give exactly one of --a, --prefix, --all')

    if all_chains:
        _emit_distribution(mu_distribution(p, s, n, m), fmt, out)
    elif a is not None:
        density = mu_ps_point(p, s, n, m, a)
        document = {'p': p, 's': s, 'n': n, 'm': m, 'a': list(a),
                    'density': rational_json(density), 'count': str(count_matrices_with_snf(p, s, n, m, a))}
        _emit(document, fmt, out)
    else:
        density = mu_prefix_at_modulus(p, s, SnfPrefixSpec(prefix, n, m))
        _emit({'p': p, 's': s, 'n': n, 'm': m, 'prefix': list(prefix), 'density': rational_json(density)}, fmt, out)


def _emit_distribution(distribution, fmt: str, out: Optional[str]):
    if fmt == 'json':
        text = distribution_to_json(distribution) + '\n'
        if out:
            Path(out).write_text(text, encoding='utf-8')
        else:
            click.echo(text, nl=False)
        return
    rows = [[' '.join(str(x) for x in a), format_rational(value), format_sig(value)]
            for a, value in distribution.sorted_items()]
    _emit(None, fmt, out, ['a', 'density', 'decimal'], rows)


@cli.command('enumerate')
@click.option('--p', type=int, help='Prime (with --s)')
@click.option('--s', type=click.IntRange(min=1), help='Exponent (with --p)')
@click.option('--q', type=click.IntRange(min=2), help='Any modulus, counts normalized diagonals')
@click.option('--n', type=click.IntRange(min=1), required=True)
@click.option('--m', type=click.IntRange(min=1), required=True)
@click.option('--budget', type=click.IntRange(min=1), help='Maximum number of matrices')
@output_options()
def enumerate_command(p, s, q, n, m, budget, fmt, out):
    """Brute-force SNF distribution over Z/qZ"""
    from local_density import enumerate_diagonals, enumerate_distribution, mu_distribution

    if (p is None) != (s is None) or (p is None) == (q is None):
        raise click.UsageError('give either --p and --s, or --q')
    if q is None:
        distribution = enumerate_distribution(p, s, n, m, budget)
        if distribution.entries != mu_distribution(p, s, n, m).entries:
            logger.error(f"Enumeration for p={p}, s={s}, {n}x{m} disagrees with the closed form")
        _emit_distribution(distribution, fmt, out)
        return
    counts = enumerate_diagonals(q, n, m, budget)
    rows = [[' '.join(str(x) for x in diag), count] for diag, count in sorted(counts.items())]
    document = {'q': q, 'n': n, 'm': m, 'total': q ** (n * m),
                'counts': [{'diag': list(diag), 'count': count} for diag, count in sorted(counts.items())]}
    _emit(document, fmt, out, ['diag', 'count'], rows if fmt != 'json' else None)


@cli.command('global-density')
@click.option('--n', type=click.IntRange(min=1), help='Rows (with --y, the finite n of Y_n)')
@click.option('--m', type=click.IntRange(min=1), help='Columns (defaults to n)')
@click.option('--prefix', callback=_int_list, help='Prefix d_1,...,d_r')
@click.option('--cyclic', 'ell', type=click.IntRange(min=1), help='At most l non-unit entries (square only)')
@click.option('--z-l', 'z_ell', type=click.IntRange(min=1), help='Z(l), the limit of the cyclic densities')
@click.option('--residual', 'residual_ell', type=click.IntRange(min=1),
              help='Split of the scaled local residual of Z(p, l)')
@click.option('--p', type=int, default=2, show_default=True, help='Prime for --residual')
@click.option('--y', 'y_x', callback=_fraction, help='Evaluate Y(1/x, l) at x in (0, 1/2], e.g. 1/2')
@click.option('--ell', 'y_ell', type=click.IntRange(min=0), help='l for --y')
@click.option('--tol', type=float, default=1e-12, show_default=True)
@output_options()
def global_density(n, m, prefix, ell, z_ell, residual_ell, p, y_x, y_ell, tol, fmt, out):
    """Densities over Z as certified Euler products"""
    from global_density import mu_global_prefix, y_function, z_l, z_l_residual, z_n_l

    chosen = [name for name, value in (('--prefix', prefix), ('--cyclic', ell), ('--z-l', z_ell),
                                       ('--residual', residual_ell), ('--y', y_x)) if value is not None]
    if len(chosen) != 1:
        raise click.UsageError('give exactly one of --prefix, --cyclic, --z-l, --residual, --y')
    if tol <= 0:
        raise click.BadParameter('--tol must be positive')

    if y_x is not None:
        if y_ell is None:
            raise click.UsageError('--y needs --ell')
        value = y_function(y_x, y_ell, n)
        document = {'x': format_rational(y_x), 'ell': y_ell, 'n': n,
                    'value': rational_json(value), 'decimal': format_sig(value)}
        _emit(document, fmt, out)
        return
    if residual_ell is not None:
        residual = z_l_residual(residual_ell, p, tol)
        document = {'ell': residual_ell, 'p': p, 'leading': format_sig(residual.leading()),
                    'delta1': format_sci(residual.delta1), 'delta2': format_sci(residual.delta2),
                    'bounds_hold': residual.bounds_hold(),
                    'scaled_residual': residual.scaled_residual.to_json_dict()}
        if residual.scaled_global is not None:
            document['scaled_global'] = residual.scaled_global.to_json_dict()
            document['log_column'] = residual.log_column.to_json_dict()
        _emit(document, fmt, out)
        return
    if z_ell is not None:
        result = z_l(z_ell, tol)
        document = {'ell': z_ell}
    else:
        if n is None:
            raise click.UsageError(f"{chosen[0]} needs --n")
        m = n if m is None else m
        if prefix is not None:
            result = mu_global_prefix(SnfPrefixSpec(prefix, n, m), tol)
            document = {'n': n, 'm': m, 'prefix': list(prefix)}
        else:
            if n != m:
                raise ValueError(f"--cyclic needs a square matrix, got {n}x{m}")
            result = z_n_l(n, ell, tol)
            document = {'n': n, 'ell': ell}
    document.update(result.to_json_dict())
    _emit(document, fmt, out)


@cli.command('table-zl')
@click.option('--lmax', type=click.IntRange(min=1, max=40), default=10, show_default=True)
@output_options(default='csv')
def table_zl(lmax, fmt, out):
    """Z(l), 1 - Z(l), 2^{(l+1)^2}(1 - Z(l)) and the log column"""
    from global_density import z_l_table

    table = z_l_table(lmax)
    rows = [[row['ell'], format_fixed(row['Z'].value), format_sci(row['one_minus_Z'].value),
             format_sig(row['scaled'].value), format_sig(row['log_column'].value)] for row in table]
    document = [dict(zip(TABLE_HEADER, row)) for row in rows]
    _emit(document, fmt, out, TABLE_HEADER, rows)


@cli.command('figure-zl')
@click.option('--lmax', type=click.IntRange(min=1, max=40), default=20, show_default=True)
@output_options(default='csv')
def figure_zl(lmax, fmt, out):
    """Plot data for the scaled residual and the log column"""
    from global_density import figure_rows

    header = ['ell', 'scaled', 'log_column']
    rows = [[ell, format_sig(scaled.value), format_sig(log_column.value)]
            for ell, scaled, log_column in figure_rows(lmax)]
    _emit([dict(zip(header, row)) for row in rows], fmt, out, header, rows)


@cli.command()
@click.option('--n', type=click.IntRange(min=1), default=2, show_default=True)
@click.option('--m', type=click.IntRange(min=1), help='Columns (defaults to n)')
@click.option('--k', type=click.IntRange(min=1), default=lambda: settings.sample_k, show_default='SNFDIST_SAMPLE_K')
@click.option('--trials', type=click.IntRange(min=1), default=lambda: settings.sample_trials,
              show_default='SNFDIST_SAMPLE_TRIALS')
@click.option('--seed', type=click.IntRange(min=0, max=2**64 - 1), default=0, show_default=True)
@click.option('--event', default='prefix:1', show_default=True,
              help='prefix:d1,..,dr | full-rank | det-equals:c | cyclic:l')
@click.option('--system', 'system_path', type=click.Path(exists=True, dir_okay=False),
              help='Sample a gcd system instead of matrices')
@click.option('--target', callback=_int_list, help='gcd target y_1,...,y_r (with --system)')
@output_options()
def sample(n, m, k, trials, seed, event, system_path, target, fmt, out):
    """Monte Carlo estimate on the box {-k, ..., k}"""
    from polynomials import parse_system
    from sampler import SampleBox, sample_lambda, sample_mu

    box = SampleBox(k, trials, seed)
    if system_path:
        if not target:
            raise click.UsageError('--system needs --target')
        estimate = sample_lambda(parse_system(_read_text(system_path), system_path), box, GcdTargetSpec(target))
        document = {'target': list(target)}
    else:
        m = n if m is None else m
        estimate = sample_mu(n, m, box, event)
        document = {'n': n, 'm': m, 'event': event}
    document.update(estimate.to_json_dict())
    _emit(document, fmt, out)


@cli.command('gcd-density')
@click.option('--in', 'in_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Polynomial system JSON')
@click.option('--target', callback=_int_list, default='1', show_default=True, help='y_1,...,y_r')
@click.option('--p', type=int, help='Prime for a local density')
@click.option('--s', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--k', type=click.IntRange(min=1), help='Exact box density mod p^s for radius k')
@click.option('--global', 'global_product', is_flag=True, help='Truncated product over primes')
@click.option('--cutoff', type=click.IntRange(min=3), help='Prime cutoff for --global')
@click.option('--crt', callback=_prime_powers, help='Density modulo prod p^s, given as p:s,...')
@click.option('--sigma', is_flag=True, help='Probability that p divides the first polynomial')
@click.option('--budget', type=click.IntRange(min=1))
@output_options()
def gcd_density(in_path, target, p, s, k, global_product, cutoff, crt, sigma, budget, fmt, out):
    """Densities of gcds of polynomial values"""
    import gcd_density as gd
    from polynomials import parse_system

    system = parse_system(_read_text(in_path), in_path)
    spec = GcdTargetSpec(target)
    document: Dict = {'target': list(target)}
    if global_product:
        document.update(gd.lambda_global(system, spec, cutoff, budget).to_json_dict())
    elif crt is not None:
        document.update({'pairs': [list(pair) for pair in crt.pairs], 'modulus': crt.modulus,
                         'density': rational_json(gd.lambda_crt(system, crt, spec, budget))})
    elif p is None:
        raise click.UsageError('give --p, --crt or --global')
    elif sigma:
        document = {'p': p, 'sigma': rational_json(gd.sigma_p(system.polys[0], p, budget))}
        if k:
            from sampler import sigma_box
            document['sigma_box'] = rational_json(sigma_box(system.polys[0], p, k, budget))
            document['k'] = k
    else:
        document.update({'p': p, 's': s, 'density': rational_json(gd.lambda_ps(system, p, s, spec, budget))})
        if k:
            document['k'] = k
            document['box_density'] = rational_json(gd.lambda_box_mod(system, p ** s, spec, k, budget))
        distribution = gd.lambda_distribution(system, p, s, budget)
        document['distribution'] = [{'g': list(key), **rational_json(value)} for key, value in distribution.items()]
    _emit(document, fmt, out)


@cli.command()
@click.option('--p', type=int, default=2, show_default=True)
@click.option('--s', type=click.IntRange(min=1), default=1, show_default=True)
@click.option('--m', type=click.IntRange(min=1), default=2, show_default=True)
@click.option('--n-prime', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--b', callback=_int_list, help='Co-ranks b_1,...,b_s: evaluate f there (s is its length)')
@click.option('--limit-m', is_flag=True, help='With --b, the limit of f as m grows')
@click.option('--report', is_flag=True, help='Monotonicity report over the ranges below')
@click.option('--ps', callback=_int_list, default='2,3,5', show_default=True, help='Primes for --report')
@click.option('--ss', callback=_int_list, default='1,2,3', show_default=True, help='Values of s for --report')
@click.option('--ms', callback=_int_list, default='1,2,3,4', show_default=True, help='Values of m for --report')
@click.option('--n-primes', callback=_int_list, default='0,1,2', show_default=True,
              help="Values of n' for --report")
@output_options()
def extremal(p, s, m, n_prime, b, limit_m, report, ps, ss, ms, n_primes, fmt, out):
    """Extrema and monotonicity of the local density in co-rank form"""
    import extremal as ex

    if report:
        if b is not None or limit_m:
            raise click.UsageError('--report does not take --b or --limit-m')
        claims = ex.monotonicity_report(ps, ss, ms, n_primes)
        rows = [[c['claim'], json.dumps(c['params'], sort_keys=True), c['ok']] for c in claims]
        _emit(claims, fmt, out, ['claim', 'params', 'ok'], rows)
        if not all(c['ok'] for c in claims):
            raise ArithmeticError('monotonicity report has failing claims')
        return
    if limit_m and b is None:
        raise click.UsageError('--limit-m needs --b')
    if b is not None:
        document = {'p': p, 'n_prime': n_prime, 'b': list(b)}
        if limit_m:
            document.update(ex.limit_m_infinity(p, len(b), n_prime, b).to_json_dict())
        else:
            value = ex.f_value(p, BVector(len(b), b, m, n_prime))
            document.update({'m': m, 'f': rational_json(value), 'decimal': format_sig(value)})
        _emit(document, fmt, out)
        return
    _emit(ex.argmax_argmin(p, s, m, n_prime).to_json_dict(), fmt, out)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map failures to exit codes: 1 for bad input, 2 for budget or precision"""
    try:
        result = cli.main(args=argv, prog_name='snfdist', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo('Aborted', err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except InputFormatError as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except (BudgetExceededError, PrecisionError) as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except (ValueError, ArithmeticError) as e:
        click.echo(f"error: {e}", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == '__main__':
    sys.exit(main())
