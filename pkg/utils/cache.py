"""
Embedding cache - Save/load computed entropy embeddings keyed by graph hash and config,
so repeated dataset runs skip recomputation.
"""

import json
import os
from datetime import datetime

from config.settings import CACHE_FILE


def _read(cache_dir):
    state_path = os.path.join(cache_dir, CACHE_FILE)
    if not os.path.exists(state_path):
        return {}
    try:
        with open(state_path, 'r') as f:
            return json.load(f)
    except (json.JSONDecodeError, OSError):
        return {}


def _write(cache_dir, state):
    os.makedirs(cache_dir, exist_ok=True)
    state_path = os.path.join(cache_dir, CACHE_FILE)
    tmp_path = state_path + '.tmp'
    with open(tmp_path, 'w') as f:
        json.dump(state, f)
    os.replace(tmp_path, state_path)


def cache_key(graph_hash, config_signature):
    return f"{graph_hash}:{config_signature}"


def save_embeddings(cache_dir, entries):
    """
    Merge {key: rows} into the cache file.
    Rows are lists of lists of floats (raw entropies, never standardized).
    """
    state = _read(cache_dir)
    stamp = datetime.now().isoformat()
    for key, rows in entries.items():
        state[key] = {'rows': rows, 'updated': stamp}
    _write(cache_dir, state)


def load_embeddings(cache_dir, keys):
    """
    Load cached rows for the requested keys.
    Returns {key: rows} for the keys present; missing or malformed entries are skipped.
    """
    state = _read(cache_dir)
    found = {}
    for key in keys:
        try:
            found[key] = state[key]['rows']
        except (KeyError, TypeError):
            continue
    return found


def clear_cache(cache_dir):
    """Remove the cache file."""
    state_path = os.path.join(cache_dir, CACHE_FILE)
    if os.path.exists(state_path):
        os.remove(state_path)
