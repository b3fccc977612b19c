"""
Embedding file validator - Post-write checks on an embedding CSV.
"""

import csv
import math


def validate_embedding_file(file_path, expected_rows=None, expected_radius=None):
    """
    Validate a written embedding CSV.
    Returns a dict with validation results.
    """
    results = {
        'file': file_path,
        'total_rows': 0,
        'radius': None,
        'issues': [],
        'valid': True,
    }

    try:
        with open(file_path, 'r', newline='') as f:
            rows = list(csv.reader(f))

        if not rows:
            results['issues'].append("File is empty - no header found")
            results['valid'] = False
            return results

        header, body = rows[0], rows[1:]
        results['total_rows'] = len(body)
        radius = len(header) - 1
        results['radius'] = radius

        if header[0] != 'node' or header[1:] != [f'h{r}' for r in range(1, radius + 1)]:
            results['issues'].append(f"Unexpected header: {','.join(header)}")
            results['valid'] = False

        if len(body) == 0:
            results['issues'].append("File is empty - no data rows found")
            results['valid'] = False
            return results

        ragged = sum(1 for row in body if len(row) != radius + 1)
        if ragged:
            results['issues'].append(f"{ragged} rows do not have {radius} entropy columns")
            results['valid'] = False

        bad = 0
        lowest, highest = math.inf, -math.inf
        for row in body:
            for cell in row[1:]:
                try:
                    value = float(cell)
                except ValueError:
                    bad += 1
                    continue
                if not math.isfinite(value):
                    bad += 1
                    continue
                lowest, highest = min(lowest, value), max(highest, value)
        if bad:
            results['issues'].append(f"{bad} non-finite or non-numeric values")
            results['valid'] = False
        if math.isfinite(lowest):
            results['value_range'] = f"{lowest:.6f} - {highest:.6f}"

        nodes = [row[0] for row in body]
        if len(set(nodes)) != len(nodes):
            results['issues'].append(f"{len(nodes) - len(set(nodes))} duplicate node ids")
            results['valid'] = False

        if expected_rows is not None and len(body) != expected_rows:
            results['issues'].append(f"Expected {expected_rows} rows, found {len(body)}")
            results['valid'] = False
        if expected_radius is not None and radius != expected_radius:
            results['issues'].append(f"Expected R={expected_radius}, found R={radius}")
            results['valid'] = False

        if not results['issues']:
            results['issues'].append("No issues found")

    except OSError as e:
        results['issues'].append(f"Validation error: {str(e)}")
        results['valid'] = False

    return results


def print_validation_report(results):
    """Print a formatted validation report."""
    print(f"\n{'=' * 60}")
    print(f"  Validation Report")
    print(f"{'=' * 60}")
    print(f"  File:       {results['file']}")
    print(f"  Total Rows: {results['total_rows']:,}")
    print(f"  Radius:     {results['radius']}")
    if 'value_range' in results:
        print(f"  Range:      {results['value_range']}")
    print(f"  Status:     {'✓ VALID' if results['valid'] else '✗ ISSUES FOUND'}")
    for issue in results['issues']:
        prefix = "  ✓" if issue == "No issues found" else "  ⚠"
        print(f"{prefix} {issue}")
    print(f"{'=' * 60}\n")
