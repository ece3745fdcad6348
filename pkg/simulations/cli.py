#!/usr/bin/env python3
"""
SparseReg Command-Line Runner

Subcommands:

    fit       fit a point estimator or sample a Bayesian chain for every gene
    select    active-credible-interval selection on saved chains
    evaluate  ROC, partial AUC and validated hits against validated pairs
    simulate  write a synthetic benchmark in the input formats

Exit status is 0 on success, 2 on usage or input-validation errors and 3 on
numerical failures.

Usage:
    python -m simulations.cli simulate --out-dir data --seed 1
    python -m simulations.cli fit --mrna data/mrna.csv --mirna data/mirna.csv \\
        --candidates data/candidates.csv --method nblasso --out-dir run
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from models import __version__
from models.core import (
    GeneProblem,
    InputFormatError,
    InputValidationError,
    InteractionModel,
    NumericalFailure,
    ParameterError,
    PointMethod,
    SignConvention,
    GeneStageError,
    build_problems,
    standardize,
)
from models.crossval import LambdaGrid, fit_with_cv
from models.evaluation import (
    SyntheticSpec,
    ValidatedSet,
    count_validated_hits,
    default_alpha_ladder,
    default_threshold_ladder,
    generate_synthetic,
    roc_from_scores,
)
from models.point_estimators import fit_point, select_by_threshold
from models.samplers import (
    BayesMethod,
    SamplerConfig,
    density_histograms,
    pool_chains,
    posterior_summary,
    run_chains,
)
from models.selection import select_gene

from simulations.io import (
    candidate_pairs,
    file_digest,
    load_chain_index,
    read_candidates_csv,
    read_chain,
    read_expression_csv,
    read_pairs_csv,
    read_tsv,
    write_chain,
    write_expression_csv,
    write_pairs_csv,
    write_tsv,
)
from simulations.logging_config import RunLogger, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

SEED_ENV = 'SPARSEREG_SEED'
SELECTION_FLOAT_FORMAT = '%.6g'
FITS_COLUMNS = ['gene', 'regressor', 'beta']
ACI_COLUMNS = ['gene', 'regressor', 'significance', 'interval_low']
POINT_METHODS = [m.value for m in PointMethod]
BAYES_METHODS = [m.value for m in BayesMethod]


# ---------------------------------------------------------------------------
# Argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='sparsereg', description='Sparse miRNA regulation inference')
    subparsers = parser.add_subparsers(dest='command', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out-dir', required=True, help='Directory receiving every output file')
    common.add_argument('--config', help='JSON file of flag defaults (keys are long flag names)')
    common.add_argument('--seed', type=int, default=None,
                        help=f'Random seed (falls back to ${SEED_ENV}, then 0)')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Debug output on the console')
    verbosity.add_argument('--quiet', action='store_true', help='Warnings and errors only')

    fit = subparsers.add_parser('fit', parents=[common], help='Fit every gene of a candidate map')
    fit.add_argument('--mrna', required=True, help='Gene expression CSV')
    fit.add_argument('--mirna', required=True, help='miRNA expression CSV')
    fit.add_argument('--ago', help='Argonaute expression CSV with Ago2 and Ago134 columns')
    fit.add_argument('--candidates', required=True, help='Candidate pairs CSV (gene_id,regressor_id)')
    fit.add_argument('--method', required=True, choices=POINT_METHODS + BAYES_METHODS)
    fit.add_argument('--model', default='direct', choices=[m.value for m in InteractionModel])
    fit.add_argument('--sign', default='negated', choices=[s.value for s in SignConvention])
    fit.add_argument('--lambda', dest='lambda_', type=float, help='Fixed penalty')
    fit.add_argument('--cv-k', type=int, help='Choose the penalty by K-fold cross-validation')
    fit.add_argument('--grid-j0', type=float, default=10.0)
    fit.add_argument('--grid-c', type=int, default=2)
    fit.add_argument('--grid-a', type=int, default=10)
    fit.add_argument('--threshold', type=float, default=0.0, help='Selection threshold for point fits')
    fit.add_argument('--nsamps', type=int, default=5000, help='Post-burn-in iterations')
    fit.add_argument('--burnin', type=int, default=2000)
    fit.add_argument('--thin', type=int, default=1)
    fit.add_argument('--chains', type=int, default=1, help='Replicate chains pooled per gene')
    fit.add_argument('--alpha-lambda0', type=float, default=1e-6)
    fit.add_argument('--beta-lambda0', type=float, default=1e6)
    fit.add_argument('--chain-format', default='csv', choices=['csv', 'npy'])
    fit.add_argument('--center-y', action='store_true')
    fit.add_argument('--scale-x', action='store_true')
    fit.add_argument('--jobs', type=int, default=1, help='Genes processed in parallel')

    select = subparsers.add_parser('select', parents=[common], help='ACI selection on saved chains')
    select.add_argument('--chains', required=True, help='Chain directory written by fit')
    select.add_argument('--tau', type=float, default=0.05)
    select.add_argument('--alpha', type=float, default=0.05)
    select.add_argument('--all', action='store_true', help='Keep unselected rows in selection.tsv')

    evaluate = subparsers.add_parser('evaluate', parents=[common], help='ROC and partial AUC')
    evaluate.add_argument('--candidates', required=True)
    evaluate.add_argument('--validated', required=True, help='Validated pairs CSV (gene_id,regressor_id)')
    source = evaluate.add_mutually_exclusive_group(required=True)
    source.add_argument('--fits', help='fits.tsv from a point-estimator run')
    source.add_argument('--aci', help='aci.tsv from select')
    evaluate.add_argument('--threshold', type=float, default=0.0, help='Threshold counted in hits.txt')
    evaluate.add_argument('--alpha', type=float, default=0.05, help='α counted in hits.txt')

    simulate = subparsers.add_parser('simulate', parents=[common], help='Write a synthetic benchmark')
    simulate.add_argument('--n-samples', type=int, default=60)
    simulate.add_argument('--n-genes', type=int, default=40)
    simulate.add_argument('--n-mirnas', type=int, default=30)
    simulate.add_argument('--candidates-per-gene', type=int, default=8)
    simulate.add_argument('--active-per-gene', type=int, default=2)
    simulate.add_argument('--effect-size', type=float, default=1.0)
    simulate.add_argument('--noise-sd', type=float, default=0.5)
    simulate.add_argument('--model', default='direct', choices=[m.value for m in InteractionModel])
    simulate.add_argument('--ago-level', type=float, default=4.0)
    simulate.add_argument('--ago-correlation', type=float, default=-0.8)
    simulate.add_argument('--ago-sd', type=float, default=1.0)
    simulate.add_argument('--shared-risc', action='store_true')

    parser.subcommands = subparsers.choices
    return parser


def parse_arguments(parser: argparse.ArgumentParser, argv: Optional[Sequence[str]]) -> argparse.Namespace:
    """Parse argv; a --config file supplies defaults that explicit flags override."""
    args = parser.parse_args(argv)
    if not args.config:
        return args

    try:
        with open(args.config, encoding='utf-8') as f:
            config = json.load(f)
    except FileNotFoundError:
        raise InputFormatError("configuration file not found", args.config) from None
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc.msg}", args.config, exc.lineno) from exc
    if not isinstance(config, dict):
        raise InputFormatError("configuration must be a JSON object", args.config)
    sections = [name for name in parser.subcommands if isinstance(config.get(name), dict)]
    if sections:
        config = config.get(args.command, {})

    subparser = parser.subcommands[args.command]
    known = {action.dest for action in subparser._actions}
    defaults = {}
    for key, value in config.items():
        dest = 'lambda_' if key == 'lambda' else key.replace('-', '_')
        if dest not in known or dest in ('config', 'out_dir', 'help'):
            raise InputFormatError(f"unknown configuration key '{key}' for {args.command}", args.config)
        defaults[dest] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def resolve_seed(explicit: Optional[int]) -> int:
    """--seed, then $SPARSEREG_SEED (a .env file is honored), then 0."""
    if explicit is not None:
        seed = explicit
    else:
        load_dotenv()
        raw = os.environ.get(SEED_ENV)
        if raw is None or raw.strip() == '':
            seed = 0
        else:
            try:
                seed = int(raw)
            except ValueError:
                raise ParameterError(f"{SEED_ENV} must be an integer, got '{raw}'") from None
    if not 0 <= seed < 2 ** 64:
        raise ParameterError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def parse_choice(enum_cls, value, flag: str):
    """Enum member for a flag value, including values that came from --config."""
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise ParameterError(f"{flag} must be one of {choices}, got '{value}'") from None


def gene_seed(seed: int, index: int) -> int:
    """Independent per-gene seed spawned from the run seed."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# fit

@dataclasses.dataclass(frozen=True)
class GeneTask:
    """Everything one worker needs to fit one gene."""
    index: int
    problem: GeneProblem
    method: str
    lambda_: Optional[float]
    cv_k: Optional[int]
    grid: Optional[LambdaGrid]
    sampler: Optional[SamplerConfig]
    seed: int


def run_gene(task: GeneTask) -> Dict[str, Any]:
    """
    Fit or sample one gene.

    Failures come back as an ``error`` entry rather than an exception so the
    result crosses process boundaries intact.
    """
    problem = task.problem
    result: Dict[str, Any] = {'gene': problem.gene_id, 'error': None}
    stage = f"{task.method} fit"
    try:
        if task.method in BAYES_METHODS:
            stage = f"{task.method} sampling"
            cfg = task.sampler.model_copy(update={'seed': task.seed})
            result['chain'] = pool_chains(run_chains(problem, cfg, BayesMethod(task.method)))
        elif task.cv_k is not None:
            stage = "cross-validation"
            fit, cv = fit_with_cv(problem, PointMethod(task.method), task.grid, task.cv_k, task.seed)
            result['fit'], result['cv'] = fit, cv
        else:
            result['fit'] = fit_point(problem, PointMethod(task.method), task.lambda_ or 0.0)
            result['cv'] = None
    except NumericalFailure as exc:
        result['error'] = ('numerical', stage, str(exc))
    except InputValidationError as exc:
        result['error'] = ('input', stage, str(exc))
    return result


def _raise_gene_error(gene_id: str, error):
    kind, stage, message = error
    if kind == 'numerical':
        raise GeneStageError(gene_id, stage, NumericalFailure(message))
    raise InputValidationError(f"gene {gene_id}, stage {stage}: {message}")


def _map_tasks(tasks: List[GeneTask], jobs: int) -> List[Dict[str, Any]]:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_gene(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(run_gene, tasks))


def _sampler_config(args) -> SamplerConfig:
    return SamplerConfig(
        n_samples=args.nsamps,
        burn_in=args.burnin,
        thin=args.thin,
        n_chains=args.chains,
        alpha_lambda0=args.alpha_lambda0,
        beta_lambda0=args.beta_lambda0,
    )


def cmd_fit(args, run: RunLogger, seed: int) -> Dict[str, Any]:
    method = args.method
    if method not in POINT_METHODS + BAYES_METHODS:
        raise ParameterError(f"unknown --method '{method}'")
    bayes = method in BAYES_METHODS
    penalized = method in (PointMethod.RIDGE.value, PointMethod.LASSO.value, PointMethod.NLASSO.value)
    if args.jobs < 1:
        raise ParameterError(f"--jobs must be at least 1, got {args.jobs}")
    if args.lambda_ is not None and args.cv_k is not None:
        raise ParameterError("--lambda and --cv-k are mutually exclusive")
    if penalized and args.lambda_ is None and args.cv_k is None:
        raise ParameterError(f"{method} needs --lambda or --cv-k")
    if (bayes or method == PointMethod.LSR.value) and (args.lambda_ is not None or args.cv_k is not None):
        raise ParameterError(f"{method} takes no penalty flags")
    if args.lambda_ is not None and args.lambda_ < 0:
        raise ParameterError(f"--lambda must be nonnegative, got {args.lambda_}")
    if args.threshold < 0:
        raise ParameterError(f"--threshold must be nonnegative, got {args.threshold}")

    model = parse_choice(InteractionModel, args.model, "--model")
    sign = parse_choice(SignConvention, args.sign, "--sign")
    mrna = read_expression_csv(args.mrna, "mRNA")
    mirna = read_expression_csv(args.mirna, "miRNA")
    ago = read_expression_csv(args.ago, "Argonaute") if args.ago else None
    candidates = read_candidates_csv(args.candidates)
    problems = build_problems(mrna, mirna, ago, candidates, model, sign)
    if args.center_y or args.scale_x:
        problems = [standardize(p, args.center_y, args.scale_x) for p in problems]

    grid = LambdaGrid(j0=args.grid_j0, c=args.grid_c, a=args.grid_a) if args.cv_k is not None else None
    sampler = _sampler_config(args) if bayes else None

    config: Dict[str, Any] = {
        'method': method, 'model': model.value, 'sign': sign.value, 'seed': seed,
        'center_y': args.center_y, 'scale_x': args.scale_x,
    }
    if bayes:
        config['sampler'] = sampler.model_dump(exclude={'seed'})
        config['chain_format'] = args.chain_format
    else:
        config['threshold'] = args.threshold
        if args.lambda_ is not None:
            config['lambda'] = args.lambda_
    run.log_stage_start(f"fit ({method})", config)

    tasks = [GeneTask(i, p, method, args.lambda_, args.cv_k, grid, sampler, gene_seed(seed, i))
             for i, p in enumerate(problems)]
    results = _map_tasks(tasks, args.jobs)
    for result in results:
        if result['error'] is not None:
            _raise_gene_error(result['gene'], result['error'])

    outputs: List[str] = []
    if bayes:
        outputs += _write_chains(results, tasks, args.chain_format, run)
    else:
        outputs += _write_point_fits(results, problems, args.threshold, run)
        if args.cv_k is not None:
            first = results[0]['cv']
            config['cv'] = {
                'k': args.cv_k,
                'grid': grid.model_dump(),
                'fold_sizes': list(first.fold_sizes),
            }

    digests = {'mrna': file_digest(args.mrna), 'mirna': file_digest(args.mirna),
               'candidates': file_digest(args.candidates)}
    if args.ago:
        digests['ago'] = file_digest(args.ago)
    run.log_stage_end(f"fit ({method})", {'genes': len(results)})
    return {'config': config, 'input_digests': digests, 'outputs': outputs}


def _write_point_fits(results, problems, threshold: float, run: RunLogger) -> List[str]:
    fit_rows, selected_rows, cv_rows = [], [], []
    for result, problem in zip(results, problems):
        fit = result['fit']
        fit = dataclasses.replace(fit, beta=problem.coefficients_on_original_scale(fit.beta),
                                  threshold=threshold)
        for label, beta in zip(fit.labels, fit.beta):
            fit_rows.append({'gene': fit.gene_id, 'regressor': label, 'beta': float(beta),
                             'lambda': fit.lambda_})
        for label, beta in select_by_threshold(fit):
            selected_rows.append({'gene': fit.gene_id, 'regressor': label, 'beta': beta})
        cv = result['cv']
        if cv is not None:
            for lam, error in cv.per_lambda_mean_error:
                cv_rows.append({'gene': cv.gene_id, 'lambda': lam, 'mean_error': error,
                                'chosen': 'true' if lam == cv.chosen_lambda else 'false'})

    outputs = ['fits.tsv', 'selected.tsv']
    write_tsv(fit_rows, ['gene', 'regressor', 'beta', 'lambda'], run.get_data_path('fits.tsv'))
    write_tsv(selected_rows, ['gene', 'regressor', 'beta'], run.get_data_path('selected.tsv'))
    if cv_rows:
        write_tsv(cv_rows, ['gene', 'lambda', 'mean_error', 'chosen'], run.get_data_path('cv.tsv'))
        outputs.append('cv.tsv')
    return outputs


def _write_chains(results, tasks, chain_format: str, run: RunLogger) -> List[str]:
    index_rows, summary_rows, density_rows = [], [], []
    for result, task in zip(results, tasks):
        chain = result['chain']
        name = f"chains/{chain.gene_id}.{chain_format}"
        write_chain(chain, run.get_data_path(name), binary=chain_format == 'npy')
        index_rows.append({'gene': chain.gene_id, 'method': chain.method.value,
                           'file': Path(name).name, 'seed': str(task.seed),
                           'regressors': ','.join(chain.labels)})
        summary_rows += posterior_summary(chain)
        density_rows += density_histograms(chain)

    write_tsv(index_rows, ['gene', 'method', 'file', 'seed', 'regressors'],
              run.get_data_path('chains/index.tsv'))
    write_tsv(summary_rows, ['gene', 'regressor', 'mean', 'sd', 'q025', 'q975', 'prob_positive'],
              run.get_data_path('summary.tsv'))
    write_tsv(density_rows, ['gene', 'regressor', 'bin_low', 'bin_high', 'density'],
              run.get_data_path('densities.tsv'))
    return ['chains/index.tsv', 'densities.tsv', 'summary.tsv'] + [f"chains/{r['file']}" for r in index_rows]


# ---------------------------------------------------------------------------
# select

def _interval_cell(report, position: int):
    return '' if report.interval is None else report.interval[position]


def cmd_select(args, run: RunLogger, seed: int) -> Dict[str, Any]:
    if not 0 < args.alpha < 1 or not 0 < args.tau < 1:
        raise ParameterError("--tau and --alpha must lie in (0, 1)")
    chains_dir = Path(args.chains)
    entries = load_chain_index(chains_dir)
    config = {'tau': args.tau, 'alpha': args.alpha, 'all': args.all}
    run.log_stage_start("select", config)

    rows = []
    digests = {'chain_index': file_digest(chains_dir / 'index.tsv')}
    for entry in entries:
        chain = read_chain(entry['file'], entry['gene'], entry['method'], entry['regressors'], entry['seed'])
        digests[f"chain:{entry['gene']}"] = file_digest(entry['file'])
        for report in select_gene(chain, args.tau, args.alpha):
            rows.append({
                'gene': chain.gene_id,
                'regressor': report.regressor_label,
                'significance': report.significance,
                'interval_low': _interval_cell(report, 0),
                'interval_high': _interval_cell(report, 1),
                'selected': 'true' if report.selected else 'false',
                'cluster2_size': report.cluster2_size,
            })
    rows.sort(key=lambda row: (row['gene'], row['regressor']))

    columns = ['gene', 'regressor', 'significance', 'interval_low', 'interval_high', 'selected']
    write_tsv(rows, columns + ['cluster2_size'], run.get_data_path('aci.tsv'))
    kept = rows if args.all else [row for row in rows if row['selected'] == 'true']
    write_tsv(kept, columns, run.get_data_path('selection.tsv'), float_format=SELECTION_FLOAT_FORMAT)

    run.log_stage_end("select", {'coefficients': len(rows),
                                 'selected': sum(row['selected'] == 'true' for row in rows)})
    return {'config': config, 'input_digests': digests, 'outputs': ['aci.tsv', 'selection.tsv']}


# ---------------------------------------------------------------------------
# evaluate

def cmd_evaluate(args, run: RunLogger, seed: int) -> Dict[str, Any]:
    candidates = read_candidates_csv(args.candidates)
    validated = ValidatedSet.from_candidates(read_pairs_csv(args.validated), candidates)

    if args.fits:
        source = args.fits
        table = read_tsv(args.fits, required=FITS_COLUMNS, numeric=['beta'])
        scored = list(zip(table['gene'], table['regressor'], table['beta']))
        ladder, setting = default_threshold_ladder(), args.threshold
        rule = 'threshold'
    else:
        source = args.aci
        table = read_tsv(args.aci, required=ACI_COLUMNS, numeric=['significance'])
        active = table['interval_low'].astype(str) != ''
        scores = np.where(active, table['significance'], 0.0)
        scored = list(zip(table['gene'], table['regressor'], scores))
        ladder, setting = default_alpha_ladder(), args.alpha
        rule = 'alpha'
    config = {'rule': rule, 'setting': setting}
    run.log_stage_start("evaluate", config)

    curve = roc_from_scores(scored, validated, ladder)
    write_tsv(curve.rows(), ['ladder', 'fpr', 'tpr'], run.get_data_path('roc.tsv'))
    with open(run.get_data_path('auc.txt'), 'w', encoding='utf-8') as f:
        f.write(f"{curve.partial_auc:.4f}\n")

    selected = {(gene, regressor) for gene, regressor, score in scored if score > setting}
    hits = count_validated_hits(selected, validated)
    with open(run.get_data_path('hits.txt'), 'w', encoding='utf-8') as f:
        f.write(f"{hits}\n")

    run.log_stage_end("evaluate", {'partial_auc': round(curve.partial_auc, 4), 'hits': hits})
    digests = {'candidates': file_digest(args.candidates), 'validated': file_digest(args.validated),
               'predictions': file_digest(source)}
    return {'config': config, 'input_digests': digests, 'outputs': ['auc.txt', 'hits.txt', 'roc.tsv']}


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args, run: RunLogger, seed: int) -> Dict[str, Any]:
    spec = SyntheticSpec(
        n_samples=args.n_samples,
        n_genes=args.n_genes,
        n_mirnas=args.n_mirnas,
        candidates_per_gene=args.candidates_per_gene,
        active_per_gene=args.active_per_gene,
        effect_size=args.effect_size,
        noise_sd=args.noise_sd,
        model=parse_choice(InteractionModel, args.model, "--model"),
        seed=seed,
        ago_level=args.ago_level,
        ago_correlation=args.ago_correlation,
        ago_sd=args.ago_sd,
        shared_risc=args.shared_risc,
    )
    config = spec.model_dump(mode='json')
    run.log_stage_start("simulate", config)

    data = generate_synthetic(spec)
    outputs = ['mrna.csv', 'mirna.csv', 'candidates.csv', 'truth.csv']
    write_expression_csv(data.mrna, run.get_data_path('mrna.csv'))
    write_expression_csv(data.mirna, run.get_data_path('mirna.csv'))
    if data.ago is not None:
        write_expression_csv(data.ago, run.get_data_path('ago.csv'))
        outputs.append('ago.csv')
    write_pairs_csv(candidate_pairs(data.candidates), run.get_data_path('candidates.csv'))
    write_pairs_csv(sorted(data.truth.pairs), run.get_data_path('truth.csv'))

    run.log_stage_end("simulate", {'planted_pairs': len(data.truth)})
    return {'config': config, 'input_digests': {}, 'outputs': sorted(outputs)}


COMMANDS = {
    'fit': cmd_fit,
    'select': cmd_select,
    'evaluate': cmd_evaluate,
    'simulate': cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit status."""
    parser = build_parser()
    try:
        args = parse_arguments(parser, argv)
        seed = resolve_seed(args.seed)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except InputValidationError as exc:
        logger.error(str(exc))
        return EXIT_USAGE

    run = setup_logging(args.out_dir, args.verbose, args.quiet)
    try:
        record = COMMANDS[args.command](args, run, seed)
        run.create_run_manifest({
            'command': args.command,
            'tool_version': __version__,
            **record,
        })
        return EXIT_OK
    except (InputValidationError, ValidationError) as exc:
        run.log_error(args.command, exc)
        return EXIT_USAGE
    except NumericalFailure as exc:
        run.log_error(args.command, exc)
        return EXIT_NUMERICAL
    finally:
        run.finalize()


if __name__ == "__main__":
    sys.exit(main())
