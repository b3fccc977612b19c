from .graph import Graph, LabeledGraph, build_graph
from .entropy import vne_exact, vne_approx, fannes_audenaert_bound
from .embed import EmbeddingConfig, embed_graph
from .csv_dumper import EmbeddingDumper

__all__ = [
    'Graph', 'LabeledGraph', 'build_graph',
    'vne_exact', 'vne_approx', 'fannes_audenaert_bound',
    'EmbeddingConfig', 'embed_graph', 'EmbeddingDumper',
]
