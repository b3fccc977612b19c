"""
CSV Dumper - Writes embedding matrices and metric tables with full float precision.
Embeddings can also be written as JSON carrying the provenance block, and every
CLI artifact gets a provenance sidecar so the run can be reproduced.
"""

import csv
import json
import math

from config.settings import CSV_DIGITS, VERSION


def format_float(number):
    """17 significant digits: parsing the text gives back the same double."""
    return format(float(number), f'.{CSV_DIGITS}g')


def provenance_path(path):
    return f"{path}.provenance.json"


def write_provenance(path, provenance):
    """Write the provenance sidecar next to an output file."""
    sidecar = provenance_path(path)
    with open(sidecar, 'w') as f:
        json.dump({'version': VERSION, **provenance}, f, indent=2, sort_keys=True)
        f.write('\n')
    return sidecar


class EmbeddingDumper:
    """
    Writes one EmbeddingMatrix, one row per node.

    CSV layout: header "node,h1..hR", node column holding the original node label
    (or the dense id when no labels are known).
    """

    def __init__(self, matrix, node_labels=None, header=True):
        self.matrix = matrix
        self.node_labels = node_labels
        self.include_header = header

    def get_header(self):
        return ['node'] + [f'h{r}' for r in range(1, self.matrix.radius + 1)]

    def _label(self, v):
        return self.node_labels[v] if self.node_labels is not None else str(v)

    def dump_csv(self, path):
        with open(path, 'w', newline='') as csv_file:
            writer = csv.writer(csv_file)
            if self.include_header:
                writer.writerow(self.get_header())
            for v in range(self.matrix.node_count):
                writer.writerow([self._label(v)] + [format_float(x) for x in self.matrix.row(v)])
        return path

    def dump_json(self, path):
        payload = {
            'provenance': self.matrix.provenance,
            'columns': self.get_header(),
            'nodes': [self._label(v) for v in range(self.matrix.node_count)],
            'values': self.matrix.values.tolist(),
        }
        with open(path, 'w') as f:
            json.dump(payload, f, indent=1)
            f.write('\n')
        return path

    def dump(self, path):
        if path.lower().endswith('.json'):
            return self.dump_json(path)
        return self.dump_csv(path)


def dump_table(path, columns, rows):
    """Write dict rows (e.g. a noise sweep) under the given columns."""
    with open(path, 'w', newline='') as csv_file:
        writer = csv.DictWriter(csv_file, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({
                c: format_float(row[c]) if isinstance(row[c], float) and math.isfinite(row[c]) else row[c]
                for c in columns
            })
    return path


def dump_json(path, payload):
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write('\n')
    return path
