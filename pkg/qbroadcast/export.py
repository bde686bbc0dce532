"""
Result emission and state interchange
CSV and JSON writers for scan, survey and table results, and the JSON
state file format {dims: [2, d], matrix: {re: [[...]], im: [[...]]}}
"""

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
import structlog

from . import __version__, linalg
from .exceptions import ContractViolationError, OutputError, ShapeError, StateFileError
from .models import DensityMatrix
from .scan import FAMILY_AXES, ScanRecord, SurveyResult, TableReport, ThresholdResult

logger = structlog.get_logger(__name__)

SIGNIFICANT_DIGITS = 12
BASIS_CONVENTION = "Pauli x generalized Gell-Mann, Tr(O_i O_j) = 2 delta_ij, raw expectation values"

RECORD_TAIL = (
    "broadcast_class",
    "verdict_nonlocal",
    "witness_nonlocal",
    "verdict_alice_local",
    "witness_alice_local",
    "verdict_bob_local",
    "criterion_bob_local",
    "witness_bob_local",
    "pptes_bob",
    "abs_sep_alice",
    "discord_nonlocal",
    "coherence_nonlocal",
    "discord_alice_local",
    "coherence_alice_local",
    "discord_class",
    "coherence_class",
)

SURVEY_COLUMNS = (
    "index",
    "purity",
    "x_norm",
    "y_norm",
    "t_ky_fan",
    "t_column_sum",
    "nonbroadcastable",
    "output_bloch_lhs",
    "output_separable",
)


def fmt(value: Any, digits: int = SIGNIFICANT_DIGITS) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        text = format(float(value), f".{digits}g")
        return "0" if text == "-0" else text
    return str(value)


def metadata(**extra: Any) -> Dict[str, Any]:
    block = {
        "artifact_version": __version__,
        "basis_convention": BASIS_CONVENTION,
    }
    block.update(extra)
    return block


def record_columns(family: str) -> Tuple[str, ...]:
    return ("family",) + FAMILY_AXES[family] + RECORD_TAIL


def record_row(rec: ScanRecord, digits: int = SIGNIFICANT_DIGITS) -> List[str]:
    axes = FAMILY_AXES[rec.family]
    values = [rec.family] + [rec.params[a] for a in axes] + [
        rec.broadcast_class.value,
        rec.verdict_nonlocal.status.value,
        rec.verdict_nonlocal.witness,
        rec.verdict_alice_local.status.value,
        rec.verdict_alice_local.witness,
        rec.verdict_bob_local.status.value,
        rec.verdict_bob_local.criterion,
        rec.verdict_bob_local.witness,
        rec.pptes_bob,
        rec.abs_sep_alice,
        rec.discord_nonlocal,
        rec.coherence_nonlocal,
        rec.discord_alice_local,
        rec.coherence_alice_local,
        rec.discord_class.value,
        rec.coherence_class.value,
    ]
    return [fmt(v, digits) for v in values]


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def records_csv(family: str, records: Sequence[ScanRecord], digits: int = SIGNIFICANT_DIGITS) -> str:
    return _csv_text(record_columns(family), [record_row(r, digits) for r in records])


def records_json(
    family: str, records: Sequence[ScanRecord], meta: Dict[str, Any], digits: int = SIGNIFICANT_DIGITS
) -> str:
    columns = record_columns(family)
    rows = [dict(zip(columns, record_row(r, digits))) for r in records]
    return json.dumps({"metadata": meta, "records": rows}, indent=2) + "\n"


def survey_csv(result: SurveyResult, digits: int = SIGNIFICANT_DIGITS) -> str:
    rows = [[fmt(getattr(r, c), digits) for c in SURVEY_COLUMNS] for r in result.records]
    return _csv_text(SURVEY_COLUMNS, rows)


def survey_json(result: SurveyResult, meta: Dict[str, Any], digits: int = SIGNIFICANT_DIGITS) -> str:
    rows = [{c: fmt(getattr(r, c), digits) for c in SURVEY_COLUMNS} for r in result.records]
    payload = {"metadata": meta, "counts": result.counts, "records": rows}
    return json.dumps(payload, indent=2) + "\n"


def table_json(report: TableReport, meta: Dict[str, Any]) -> str:
    return json.dumps({"metadata": meta, "report": report.model_dump(mode="json")}, indent=2) + "\n"


def threshold_json(result: ThresholdResult, meta: Dict[str, Any]) -> str:
    return json.dumps({"metadata": meta, "threshold": result.model_dump(mode="json")}, indent=2) + "\n"


def write_text(text: str, path: Union[str, Path, None]) -> None:
    """Write to ``path`` or stdout when no path is given"""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(str(path), e.strerror or str(e))
    logger.info("Output written", path=str(path), bytes=len(text.encode("utf-8")))


def state_to_json(rho: DensityMatrix) -> str:
    payload = {
        "dims": list(rho.dims),
        "matrix": {"re": rho.matrix.real.tolist(), "im": rho.matrix.imag.tolist()},
    }
    return json.dumps(payload, indent=2) + "\n"


def load_state_file(
    path: Union[str, Path],
    hermitian_tol: float = linalg.HERMITIAN_TOL,
    trace_tol: float = linalg.TRACE_TOL,
    psd_tol: float = linalg.CRITERIA_TOL,
) -> DensityMatrix:
    """Read and validate a state file; any defect raises StateFileError"""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise StateFileError(str(path), "file not found")
    except json.JSONDecodeError as e:
        raise StateFileError(str(path), f"invalid JSON: {e.msg} at line {e.lineno}")

    if not isinstance(payload, dict) or "dims" not in payload or "matrix" not in payload:
        raise StateFileError(str(path), "expected an object with 'dims' and 'matrix'")
    matrix = payload["matrix"]
    if not isinstance(matrix, dict) or "re" not in matrix:
        raise StateFileError(str(path), "matrix must be an object with 're' and optional 'im'")
    try:
        re = np.array(matrix["re"], dtype=float)
        im = np.array(matrix.get("im", np.zeros_like(re)), dtype=float)
        rho = DensityMatrix(matrix=re + 1j * im, dims=payload["dims"])
    except (ValueError, TypeError) as e:
        raise StateFileError(str(path), f"malformed matrix: {e}")
    except ShapeError as e:
        raise StateFileError(str(path), e.reason)

    try:
        linalg.validate_physical(rho, hermitian_tol, trace_tol, psd_tol)
    except ContractViolationError as e:
        raise StateFileError(str(path), e.reason)
    logger.info("State file loaded", path=str(path), dims=list(rho.dims))
    return rho
