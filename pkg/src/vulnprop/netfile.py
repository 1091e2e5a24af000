"""Network file and result CSV formats.

The network file is versioned JSON (schema_version 1):

    {
      "version": 1,
      "nodes": [{"label": "fw", "v": 0.5},
                {"label": "ws", "cvss_exploitability": [3.9, 8.6]}],
      "edges": [{"from": "fw", "to": "ws", "alpha": 0.7}],
      "params": {"gamma": 0.7, "theta": 2.0, "W": 1.0}
    }

Each node carries either "v" (a default vulnerability in [0, 1]) or
"cvss_exploitability" (a non-empty list of exploitability subscores in
[0, 10], averaged and divided by 10), or neither, in which case v defaults
to 0.5. Edge endpoints may be labels or zero-based indices. The "params"
section is optional and defaults to gamma 0.7, theta 2.0, W 1.0.

Result CSV files have a header row, then one row per sweep point with
columns param_value, z_0 .. z_{n-1}, objective, spent, converged. Floats
are written with nine significant digits and rows keep grid order, so a
repeated run with the same inputs produces byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json

from .errors import OutOfRangeError, ParseError, SchemaVersionError
from .network import DefenseParams, Network, build_network
from .sweep import SweepResult, SweepRow

SCHEMA_VERSION = 1

_DEFAULT_VULN = 0.5


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _require(condition: bool, message: str):
    if not condition:
        raise ParseError(message)


def _node_vuln(entry: dict, where: str) -> float:
    has_v = "v" in entry
    has_cvss = "cvss_exploitability" in entry
    _require(not (has_v and has_cvss),
             f"{where}: give either v or cvss_exploitability, not both")
    if has_v:
        _require(isinstance(entry["v"], (int, float)), f"{where}: v must be a number")
        return float(entry["v"])
    if has_cvss:
        scores = entry["cvss_exploitability"]
        _require(isinstance(scores, list) and scores,
                 f"{where}: cvss_exploitability must be a non-empty list")
        for s in scores:
            _require(isinstance(s, (int, float)), f"{where}: subscores must be numbers")
            if not 0.0 <= float(s) <= 10.0:
                raise OutOfRangeError(
                    f"{where}: exploitability subscores lie in [0, 10], got {s!r}"
                )
        mean = sum(float(s) for s in scores) / len(scores)
        return min(1.0, max(0.0, mean / 10.0))
    return _DEFAULT_VULN


def parse_network_file(text: str) -> tuple[Network, DefenseParams]:
    """Parse a network document; raises ParseError / SchemaVersionError /
    OutOfRangeError (and friends) on malformed input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "document root must be an object")
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {version!r}; this build reads "
            f"version {SCHEMA_VERSION}"
        )

    raw_nodes = doc.get("nodes")
    _require(isinstance(raw_nodes, list) and raw_nodes,
             "nodes must be a non-empty array")
    nodes = []
    labels: dict[str, int] = {}
    for pos, entry in enumerate(raw_nodes):
        where = f"nodes[{pos}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        label = entry.get("label")
        _require(isinstance(label, str) and label != "",
                 f"{where}: label must be a non-empty string")
        _require(label not in labels, f"{where}: duplicate label {label!r}")
        labels[label] = pos
        nodes.append((label, _node_vuln(entry, where)))

    def endpoint(value, where: str) -> int:
        if isinstance(value, bool):
            raise ParseError(f"{where}: endpoints are labels or indices")
        if isinstance(value, int):
            return value
        if isinstance(value, str):
            _require(value in labels, f"{where}: unknown label {value!r}")
            return labels[value]
        raise ParseError(f"{where}: endpoints are labels or indices, got {value!r}")

    edges = []
    raw_edges = doc.get("edges", [])
    _require(isinstance(raw_edges, list), "edges must be an array")
    for pos, entry in enumerate(raw_edges):
        where = f"edges[{pos}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        _require("from" in entry and "to" in entry and "alpha" in entry,
                 f"{where}: needs from, to, and alpha")
        _require(isinstance(entry["alpha"], (int, float)) and
                 not isinstance(entry["alpha"], bool),
                 f"{where}: alpha must be a number")
        edges.append(
            (endpoint(entry["from"], where), endpoint(entry["to"], where),
             float(entry["alpha"]))
        )

    raw_params = doc.get("params", {})
    _require(isinstance(raw_params, dict), "params must be an object")
    for key, value in raw_params.items():
        if key in ("gamma", "theta", "W"):
            _require(isinstance(value, (int, float)) and not isinstance(value, bool),
                     f"params.{key} must be a number")
    params = DefenseParams(
        gamma=float(raw_params.get("gamma", 0.7)),
        theta=float(raw_params.get("theta", 2.0)),
        budget_W=float(raw_params.get("W", 1.0)),
    )
    return build_network(nodes, edges), params


def write_network_file(net: Network, params: DefenseParams) -> str:
    """Serialize a network so parse_network_file reproduces it exactly."""
    doc = {
        "version": SCHEMA_VERSION,
        "nodes": [
            {"label": node.label, "v": node.default_vuln} for node in net.nodes
        ],
        "edges": [
            {"from": net.nodes[e.src].label, "to": net.nodes[e.dst].label,
             "alpha": e.alpha}
            for e in net.edges
        ],
        "params": {
            "gamma": params.gamma,
            "theta": params.theta,
            "W": params.budget_W,
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def load_network(path) -> tuple[Network, DefenseParams]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network_file(fh.read())


def save_network(path, net: Network, params: DefenseParams):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_network_file(net, params))


def result_csv_header(n: int) -> list[str]:
    return ["param_value", *[f"z_{i}" for i in range(n)], "objective", "spent",
            "converged"]


def render_result_csv(result: SweepResult) -> str:
    """Render sweep rows as CSV text (n + 4 columns, 9 significant digits)."""
    n = result.spec.base_net.n
    lines = [",".join(result_csv_header(n))]
    for row in result.rows:
        cells = [_fmt(row.param_value)]
        cells += [_fmt(z) for z in row.z]
        cells += [_fmt(row.objective), _fmt(row.spent),
                  "true" if row.converged else "false"]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_csv_table(text: str) -> tuple[list[str], list[list[str]]]:
    """Read any of the command-line CSV outputs into (header, string rows).

    Every data row must have as many cells as the header. Cells are left as
    strings; callers that know the schema convert them.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("CSV document is empty")
    rows = [cells for cells in reader if cells]
    for pos, cells in enumerate(rows):
        _require(len(cells) == len(header),
                 f"row {pos}: expected {len(header)} cells, got {len(cells)}")
    return header, rows


def parse_result_csv(text: str) -> tuple[list[str], list[SweepRow]]:
    """Read CSV produced by render_result_csv back into typed rows."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("result CSV is empty")
    _require(len(header) >= 4 and header[0] == "param_value",
             "result CSV header is malformed")
    n = len(header) - 4
    rows = []
    for pos, cells in enumerate(reader):
        if not cells:
            continue
        _require(len(cells) == len(header),
                 f"row {pos}: expected {len(header)} cells, got {len(cells)}")
        try:
            values = [float(c) for c in cells[:-1]]
        except ValueError as exc:
            raise ParseError(f"row {pos}: {exc}") from exc
        _require(cells[-1] in ("true", "false"),
                 f"row {pos}: converged must be true or false")
        rows.append(
            SweepRow(
                param_value=values[0],
                z=tuple(values[1:1 + n]),
                objective=values[1 + n],
                spent=values[2 + n],
                converged=cells[-1] == "true",
            )
        )
    return header, rows
