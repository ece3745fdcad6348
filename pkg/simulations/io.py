#!/usr/bin/env python3
"""
File Formats for SparseReg Runs

Expression CSVs have a ``sample_id`` column followed by one column per
feature. Pair CSVs (candidates, validated interactions, truth) have the
columns ``gene_id,regressor_id``. Results are tab-separated with floats
written to round-trip exactly.
"""

import hashlib
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from models.core import (
    CandidateMap,
    ExpressionMatrix,
    InputFormatError,
    parse_descriptor,
)
from models.samplers import BayesMethod, PosteriorChain

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
PAIR_COLUMNS = ['gene_id', 'regressor_id']
INDEX_COLUMNS = ['gene', 'method', 'file', 'seed', 'regressors']


def _read_raw(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding='utf-8')
    except FileNotFoundError:
        raise InputFormatError("file not found", str(path)) from None
    except pd.errors.EmptyDataError:
        raise InputFormatError("file is empty", str(path), 1) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise InputFormatError(str(exc).strip(), str(path)) from exc


def _to_float(cell) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return np.nan


def read_expression_csv(path, matrix: str = "expression") -> ExpressionMatrix:
    """Parse a samples × features expression CSV."""
    path = Path(path)
    raw = _read_raw(path)
    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    if header[0] != 'sample_id' or len(header) < 2:
        raise InputFormatError("header must be sample_id followed by feature ids", str(path), 1)
    if len(set(header)) != len(header):
        raise InputFormatError("duplicate column in header", str(path), 1)

    body = raw.iloc[1:]
    if body.empty:
        raise InputFormatError(f"{matrix} matrix has no samples", str(path), 2)
    values = body.iloc[:, 1:].map(_to_float)
    bad = values.isna().to_numpy()
    if bad.any():
        row, col = np.argwhere(bad)[0]
        cell = body.iat[row, col + 1]
        raise InputFormatError(f"non-numeric value '{cell}' in column '{header[col + 1]}'",
                               str(path), int(row) + 2)

    logger.debug(f"Read {matrix} matrix {path}: {values.shape[0]} samples × {values.shape[1]} features")
    return ExpressionMatrix(
        sample_ids=[s.strip() for s in body.iloc[:, 0]],
        feature_ids=header[1:],
        values=values.to_numpy(dtype=float),
    )


def write_expression_csv(matrix: ExpressionMatrix, path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(matrix.values, index=list(matrix.sample_ids), columns=list(matrix.feature_ids))
    frame.to_csv(path, index_label='sample_id', float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def read_pairs_csv(path) -> List[Tuple[str, str]]:
    """Parse a gene_id,regressor_id CSV into ordered pairs."""
    path = Path(path)
    raw = _read_raw(path)
    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    if header != PAIR_COLUMNS:
        raise InputFormatError(f"header must be {','.join(PAIR_COLUMNS)}", str(path), 1)
    pairs = []
    for offset, (gene_id, regressor_id) in enumerate(raw.iloc[1:].itertuples(index=False, name=None)):
        gene_id, regressor_id = ('' if pd.isna(v) else str(v).strip() for v in (gene_id, regressor_id))
        if not gene_id or not regressor_id:
            raise InputFormatError("empty gene or regressor id", str(path), offset + 2)
        pairs.append((gene_id, regressor_id))
    return pairs


def read_candidates_csv(path) -> CandidateMap:
    path = Path(path)
    pairs = read_pairs_csv(path)
    if not pairs:
        raise InputFormatError("candidate file lists no pairs", str(path), 2)
    if len(set(pairs)) != len(pairs):
        raise InputFormatError("candidate file lists a pair twice", str(path))
    return CandidateMap.from_pairs(pairs)


def write_pairs_csv(pairs: Iterable[Tuple[str, str]], path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(list(pairs), columns=PAIR_COLUMNS)
    frame.to_csv(path, index=False, lineterminator='\n')
    return path


def candidate_pairs(candidates: CandidateMap) -> List[Tuple[str, str]]:
    return [(gene_id, d.label) for gene_id in candidates.gene_ids for d in candidates.candidates(gene_id)]


def write_tsv(rows: Sequence[Dict], columns: Sequence[str], path,
              float_format: str = FLOAT_FORMAT) -> Path:
    """Tab-separated table with a header; an empty table keeps its header."""
    path = Path(path)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, sep='\t', index=False, float_format=float_format, lineterminator='\n')
    return path


def read_tsv(path, required: Sequence[str] = (), numeric: Sequence[str] = (),
             as_text: bool = False) -> pd.DataFrame:
    """
    Read a result table written by ``write_tsv``.

    Args:
        path: TSV file
        required: Columns that must be present
        numeric: Columns whose every cell must parse as a float
        as_text: Keep every cell as a string
    """
    path = Path(path)
    if not path.exists():
        raise InputFormatError("file not found", str(path))
    try:
        dtype = str if as_text else {'gene': str, 'regressor': str}
        frame = pd.read_csv(path, sep='\t', dtype=dtype,
                            keep_default_na=False, float_precision='round_trip')
    except pd.errors.EmptyDataError:
        raise InputFormatError("file is empty", str(path), 1) from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise InputFormatError(str(exc).strip(), str(path)) from exc

    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise InputFormatError(f"missing column(s): {', '.join(missing)}", str(path), 1)
    for column in numeric:
        values = frame[column].map(_to_float)
        if values.isna().any():
            row = int(np.flatnonzero(values.isna().to_numpy())[0])
            raise InputFormatError(f"non-numeric value '{frame[column].iat[row]}' in column '{column}'",
                                   str(path), row + 2)
        frame[column] = values.astype(float)
    return frame


def file_digest(path) -> str:
    """SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for block in iter(lambda: handle.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


# Chains: one row per retained iteration, columns β_1..β_M, σ², λ_1..λ_M

def _chain_columns(labels: Sequence[str]) -> List[str]:
    return ([f"beta[{label}]" for label in labels] + ['sigma2']
            + [f"lambda[{label}]" for label in labels])


def write_chain(chain: PosteriorChain, path, binary: bool = False) -> Path:
    path = Path(path)
    table = np.column_stack([chain.beta_draws, chain.sigma2_draws, chain.lambda_draws])
    if binary:
        np.save(path, table, allow_pickle=False)
    else:
        frame = pd.DataFrame(table, columns=_chain_columns(chain.labels))
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def read_chain(path, gene_id: str, method: BayesMethod, labels: Sequence[str],
               seed: int = 0) -> PosteriorChain:
    """Load a chain written by ``write_chain`` (CSV or .npy)."""
    path = Path(path)
    if not path.exists():
        raise InputFormatError("chain file not found", str(path))
    m = len(labels)
    if path.suffix == '.npy':
        try:
            table = np.load(path, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise InputFormatError(f"unreadable chain array: {exc}", str(path)) from exc
    else:
        raw = _read_raw(path)
        if [str(h).strip() for h in raw.iloc[0]] != _chain_columns(labels):
            raise InputFormatError("chain columns do not match the chain index", str(path), 1)
        values = raw.iloc[1:].map(_to_float)
        bad = values.isna().to_numpy()
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise InputFormatError(f"non-numeric value '{raw.iat[row + 1, col]}' in chain",
                                   str(path), int(row) + 2)
        table = values.to_numpy(dtype=float)
    if table.ndim != 2 or table.shape[1] != 2 * m + 1:
        raise InputFormatError(f"chain table must have {2 * m + 1} columns", str(path))
    return PosteriorChain(
        gene_id=gene_id,
        method=method,
        beta_draws=table[:, :m],
        sigma2_draws=table[:, m],
        lambda_draws=table[:, m + 1:],
        seed=seed,
        regressor_labels=tuple(parse_descriptor(label) for label in labels),
    )


def load_chain_index(chains_dir) -> List[Dict[str, object]]:
    """Rows of ``chains/index.tsv``: gene, method, file, seed, regressors."""
    index_path = Path(chains_dir) / 'index.tsv'
    if not index_path.exists():
        raise InputFormatError("chain index not found", str(index_path))
    frame = read_tsv(index_path, required=INDEX_COLUMNS, as_text=True)
    entries = []
    for offset, row in enumerate(frame.to_dict(orient='records')):
        line = offset + 2
        try:
            method = BayesMethod(row['method'])
        except ValueError:
            raise InputFormatError(f"unknown method '{row['method']}'", str(index_path), line) from None
        try:
            seed = int(row['seed'])
        except ValueError:
            raise InputFormatError(f"seed must be an integer, got '{row['seed']}'",
                                   str(index_path), line) from None
        regressors = [label for label in row['regressors'].split(',') if label]
        if not row['gene'] or not row['file'] or not regressors:
            raise InputFormatError("empty gene, file or regressor list", str(index_path), line)
        entries.append({
            'gene': row['gene'],
            'method': method,
            'file': Path(chains_dir) / row['file'],
            'seed': seed,
            'regressors': regressors,
        })
    return entries

