import csv
import io
import json
from pathlib import Path
from typing import Any, List, Optional

import jmespath
import typer
import yaml
from jmespath.exceptions import JMESPathError

from daugavet.exceptions import ConstructionError
from daugavet.models.enums import OutputFormat
from daugavet.models.operator import Operator
from daugavet.models.reports import Report, plain
from daugavet.models.space import NormedSpace
from daugavet.services.operator_service import OperatorService, parse_matrix
from daugavet.services.space_service import SpaceService


def load_document(path: Path) -> Any:
    """Parse a JSON or YAML descriptor file (JSON is read as the YAML subset)."""
    path = Path(path)
    if not path.is_file():
        raise ConstructionError("descriptor file exists", str(path))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConstructionError("descriptor file is valid JSON/YAML", f"{path}: {exc}") from exc


def load_space(path: Path) -> NormedSpace:
    return SpaceService.make_space(load_document(path))


def load_operator(path: Path, space: Optional[NormedSpace] = None) -> Operator:
    """Operator descriptor; its ``space`` entry may be inline or a path relative to the operator file."""
    path = Path(path)
    document = load_document(path)
    if isinstance(document, dict) and isinstance(document.get("space"), str) and space is None:
        space = load_space(path.parent / document["space"])
    return OperatorService.make_operator(document, space)


def dump_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False)


def dump_csv(rows: List[dict]) -> str:
    buffer = io.StringIO()
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    return buffer.getvalue()


def apply_query(data: Any, query: Optional[str]) -> Any:
    if not query:
        return data
    try:
        return jmespath.search(query, data)
    except JMESPathError as exc:
        raise ConstructionError("query is a valid JMESPath expression", str(exc)) from exc


def render(report: Report, fmt: OutputFormat = OutputFormat.JSON, query: Optional[str] = None) -> str:
    """Serialise a report: sorted JSON, or its CSV rows when it defines them."""
    if fmt is OutputFormat.CSV:
        rows = report.csv_rows()
        if rows is None:
            rows = [{k: v for k, v in report.to_dict().items() if k != "provenance"}]
        if query:
            rows = apply_query(rows, query)
            rows = rows if isinstance(rows, list) else [rows]
            rows = [r if isinstance(r, dict) else {"value": r} for r in rows]
        return dump_csv(plain(rows))
    return dump_json(apply_query(report.to_dict(), query)) + "\n"


def write_output(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text, nl=False)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_vector(text: str):
    """Vector from an inline JSON/YAML list such as ``[1, -2]`` or ``[[1, 0], [0, 1]]`` for complex entries."""
    try:
        entries = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConstructionError("vector is an inline JSON/YAML list", str(exc)) from exc
    if not isinstance(entries, list):
        raise ConstructionError("vector is an inline JSON/YAML list", str(text))
    return parse_matrix([entries])[0]
