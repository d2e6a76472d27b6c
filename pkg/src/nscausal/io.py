"""CSV and JSON serialization for graphs, datasets, fits, and discrete SCMs."""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .graph import WeightedDag
from .poc import DiscreteScm
from .scm import Dataset


def _fmt(x) -> str:
    return repr(float(x))


def write_graph_csv(g: WeightedDag, path):
    """Adjacency matrix, header row = labels, row i = outgoing weights of i."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(g.labels)
        for row in g.weights:
            writer.writerow([_fmt(x) for x in row])


def read_graph_csv(path, outcome_index: int = -1) -> WeightedDag:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: empty graph file")
    labels = tuple(rows[0])
    dim = len(labels)
    if len(rows) != dim + 1:
        raise ValueError(f"{path}: expected {dim} weight rows, found {len(rows) - 1}")
    weights = np.array([[float(x) for x in row] for row in rows[1:]])
    return WeightedDag(weights, labels, outcome_index)


def write_edges_csv(g: WeightedDag, path, threshold: float = 0.0):
    """Edge list `from,to,weight` using node labels, strict threshold."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["from", "to", "weight"])
        for i, j in zip(*np.nonzero(np.abs(g.weights) > threshold)):
            writer.writerow([g.labels[i], g.labels[j], _fmt(g.weights[i, j])])


def write_dataset_csv(data: Dataset, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(data.labels)
        for row in data.values:
            writer.writerow([_fmt(x) for x in row])


def load_csv(path, outcome) -> Dataset:
    """Load a numeric CSV with a header row and move the outcome column last.

    ``outcome`` is a column label or an integer index (labels win when both
    readings are possible).  Blank or non-numeric cells are reported with
    their row number and column label.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one observation")
    labels = [cell.strip() for cell in rows[0]]
    if len(set(labels)) != len(labels):
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        raise ValueError(f"{path}: duplicate column labels {dupes}")
    columns = len(labels)
    values = np.empty((len(rows) - 1, columns))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != columns:
            raise ValueError(f"{path}: row {r} has {len(row)} cells, expected {columns}")
        for c, cell in enumerate(row):
            try:
                values[r - 2, c] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric cell at row {r}, column {labels[c]!r}: "
                    f"{cell!r}") from None
    if outcome in labels:
        idx = labels.index(outcome)
    else:
        try:
            idx = int(outcome)
        except (TypeError, ValueError):
            raise ValueError(
                f"{path}: unknown outcome column {outcome!r}; "
                f"available labels: {labels}") from None
        if not (0 <= idx < columns):
            raise ValueError(f"{path}: outcome index {idx} out of range")
    order = [c for c in range(columns) if c != idx] + [idx]
    return Dataset(values[:, order], tuple(labels[c] for c in order), columns - 1)


def write_selected_csv(labels, outcome_index: int, selected, path):
    features = [i for i in range(len(labels)) if i != outcome_index]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "selected"])
        for mask, i in zip(selected, features):
            writer.writerow([labels[i], int(mask)])


def write_diagnostics_csv(diagnostics, path):
    fields = ["step", "f", "h1", "h2", "lambda1", "lambda2", "c", "d", "t",
              "inner_iterations", "objective_start", "objective_end",
              "n_active", "dropped"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for entry in diagnostics:
            row = []
            for key in fields:
                value = entry[key]
                if key == "dropped":
                    row.append(";".join(str(v) for v in value))
                elif isinstance(value, float):
                    row.append(_fmt(value))
                else:
                    row.append(value)
            writer.writerow(row)


def write_fit_dir(result, outdir, meta: dict | None = None):
    """Persist a fit: graph.csv, raw_graph.csv, selected.csv, diagnostics.csv,
    meta.json."""
    import os

    os.makedirs(outdir, exist_ok=True)
    write_graph_csv(result.graph, os.path.join(outdir, "graph.csv"))
    write_graph_csv(result.raw_graph, os.path.join(outdir, "raw_graph.csv"))
    write_selected_csv(result.graph.labels, result.graph.outcome_index,
                       result.selected, os.path.join(outdir, "selected.csv"))
    write_diagnostics_csv(result.diagnostics,
                          os.path.join(outdir, "diagnostics.csv"))
    payload = {
        "delta_star": result.delta_star_used,
        "converged": result.converged,
        "config": config_to_dict(result.config) if result.config else None,
    }
    if meta:
        payload.update(meta)
    write_json(payload, os.path.join(outdir, "meta.json"))


@dataclass(frozen=True)
class LoadedFit:
    """Just enough of a persisted fit to rebuild effect tables."""

    graph: WeightedDag
    raw_graph: WeightedDag
    selected: np.ndarray


def read_fit_dir(outdir) -> LoadedFit:
    import os

    graph = read_graph_csv(os.path.join(outdir, "graph.csv"))
    raw = read_graph_csv(os.path.join(outdir, "raw_graph.csv"))
    with open(os.path.join(outdir, "selected.csv"), newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        selected = np.array([bool(int(row[1])) for row in reader if row])
    return LoadedFit(graph, raw, selected)


def config_to_dict(config) -> dict:
    from dataclasses import asdict

    return asdict(config)


def write_json(payload: dict, path):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_rows_csv(rows, fields, path):
    """Generic CSV writer for dict rows, floats via repr for exact round trips."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            out = []
            for key in fields:
                value = row.get(key, "")
                if isinstance(value, float):
                    out.append(_fmt(value))
                else:
                    out.append(value)
            writer.writerow(out)


def read_rows_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [dict(row) for row in reader]


# --------------------------------------------------------------------------
# discrete SCM fixtures


def scm_to_json(scm: DiscreteScm, path=None) -> dict:
    """Versionable JSON document for a discrete SCM fixture.

    Schema: ``labels``, ``outcome_index``, ``edges`` (structure, unit
    weights), ``domains`` per node, ``noise`` per node with ``values`` and
    ``probs``, and ``functions`` per node listing every
    ``{parents, noise, value}`` table entry (parent values ordered by
    ascending parent index).
    """
    doc = {
        "labels": list(scm.graph.labels),
        "outcome_index": scm.graph.outcome_index,
        "edges": [[int(i), int(j)] for i, j in
                  zip(*np.nonzero(scm.graph.weights))],
        "domains": [list(d) for d in scm.domains],
        "noise": [{"values": list(v), "probs": list(p)}
                  for v, p in zip(scm.noise_domains, scm.noise_probs)],
        "functions": [
            {"node": i,
             "table": [{"parents": list(pa), "noise": u, "value": out}
                       for (pa, u), out in sorted(scm.functions[i].items())]}
            for i in range(scm.dim)
        ],
    }
    if path is not None:
        write_json(doc, path)
    return doc


def scm_from_json(doc) -> DiscreteScm:
    if isinstance(doc, (str, bytes)):
        with open(doc) as fh:
            doc = json.load(fh)
    dim = len(doc["labels"])
    weights = np.zeros((dim, dim))
    for i, j in doc["edges"]:
        weights[i, j] = 1.0
    graph = WeightedDag(weights, tuple(doc["labels"]), doc["outcome_index"])
    functions = []
    for spec in doc["functions"]:
        table = {}
        for entry in spec["table"]:
            table[(tuple(entry["parents"]), entry["noise"])] = entry["value"]
        functions.append(table)
    return DiscreteScm(
        graph,
        tuple(tuple(d) for d in doc["domains"]),
        tuple(tuple(n["values"]) for n in doc["noise"]),
        tuple(tuple(n["probs"]) for n in doc["noise"]),
        tuple(functions),
    )


def write_cpdag_csv(c, path):
    """Edge list with a `kind` column: directed or undirected."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["from", "to", "kind"])
        for i, j in sorted(c.directed):
            writer.writerow([c.labels[i], c.labels[j], "directed"])
        for i, j in sorted(c.undirected):
            writer.writerow([c.labels[i], c.labels[j], "undirected"])
