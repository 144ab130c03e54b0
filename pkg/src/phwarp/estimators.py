"""scikit-learn style estimators wrapping the diagram pipeline.

``PersistenceDiagramTransformer`` turns filtered graphs (or 2-D grids) into
normalized, finitized diagrams; ``SymmetricFunctionVectorizer`` turns
diagrams into renormalized symmetric-function vectors; and
``DiagramNeighborsClassifier`` classifies diagrams by their nearest training
diagram under the bottleneck distance or the vector distance.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bottleneck import bottleneck_distance
from .diagram import PersistenceDiagram, finitize_cornerlines, normalize_filtration
from .exceptions import ConfigurationError, DimensionError, EmptyInputError, InvalidArgumentError
from .persistence import FilteredGraph, downsample_blocks, grid_to_graph, zero_dim_persistence
from .symfun import DEFAULT_K, SymVector, elementary_symmetric_batch, renormalize
from .warp import warp_diagram

__all__ = [
    "check_diagrams",
    "check_graphs",
    "PersistenceDiagramTransformer",
    "SymmetricFunctionVectorizer",
    "DiagramNeighborsClassifier",
    "METHODS",
]

METHODS = ("bottleneck", "T", "R")


def check_diagrams(X, finitized: bool = False) -> list:
    """Coerce a sequence of diagrams or ``(n, 2|3)`` arrays to PersistenceDiagrams."""
    if isinstance(X, PersistenceDiagram):
        raise InvalidArgumentError("expected a sequence of diagrams, got a single diagram")
    out = [x if isinstance(x, PersistenceDiagram) else PersistenceDiagram.from_array(x) for x in X]
    if finitized:
        for d in out:
            if d.has_cornerlines:
                raise InvalidArgumentError("diagrams must be finitized (no infinite deaths)")
    return out


def check_graphs(X, connectivity: int = 4, block: int = 1) -> list:
    """Coerce graphs or 2-D grids to FilteredGraphs, downsampling grids by ``block``."""
    out = []
    for x in X:
        if isinstance(x, FilteredGraph):
            out.append(x)
        else:
            grid = np.asarray(x, dtype=float)
            if grid.ndim != 2:
                raise InvalidArgumentError(f"expected a FilteredGraph or a 2-D grid, got shape {grid.shape}")
            out.append(grid_to_graph(downsample_blocks(grid, block), connectivity))
    if not out:
        raise EmptyInputError("no graphs given")
    return out


class PersistenceDiagramTransformer(BaseEstimator, TransformerMixin):
    """Compute 0-dimensional diagrams, normalized to ``[0, 1]`` and finitized.

    Parameters
    ----------
    value_range : (float, float), optional
        Filtration range mapped onto ``[0, 1]``. When omitted, ``fit`` takes
        the minimum and maximum vertex value over the training inputs.
    connectivity : {4, 8}
        Pixel adjacency used for grid inputs.
    block : int
        Grid inputs are block-averaged by this factor before building the graph.
    finitize : bool
        Replace cornerlines by finite cornerpoints.

    Attributes
    ----------
    value_range_ : tuple of float
    """

    def __init__(self, value_range=None, connectivity=4, block=1, finitize=True):
        self.value_range = value_range
        self.connectivity = connectivity
        self.block = block
        self.finitize = finitize

    def fit(self, X, y=None):
        graphs = check_graphs(X, self.connectivity, self.block)
        if self.value_range is not None:
            lo, hi = (float(v) for v in self.value_range)
        else:
            lo = min(min(g.vertex_values) for g in graphs)
            hi = max(max(g.vertex_values) for g in graphs)
            if lo == hi:
                # A constant filtration has no scale; map it to 0.
                hi = lo + 1.0
        self.value_range_ = (lo, hi)
        return self

    def transform(self, X):
        check_is_fitted(self, "value_range_")
        lo, hi = self.value_range_
        out = []
        for g in check_graphs(X, self.connectivity, self.block):
            d = normalize_filtration(zero_dim_persistence(g), lo, hi)
            out.append(finitize_cornerlines(d) if self.finitize else d)
        return out


class SymmetricFunctionVectorizer(BaseEstimator, TransformerMixin):
    """Warp diagrams by ``T`` or ``R`` and keep ``k`` renormalized symmetric functions.

    Stateless: ``fit`` only validates parameters. ``transform`` returns a
    complex array of shape ``(n_samples, k)``, or ``(n_samples, 2k)`` real
    and imaginary parts when ``output="real"``.

    Parameters
    ----------
    warp : {"T", "R"}
    k : int
    output : {"complex", "real"}
    """

    def __init__(self, warp="R", k=DEFAULT_K, output="complex"):
        self.warp = warp
        self.k = k
        self.output = output

    def _validate(self):
        if self.warp not in ("T", "R"):
            raise ConfigurationError(f"warp must be 'T' or 'R', got {self.warp!r}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be a positive integer, got {self.k}")
        if self.output not in ("complex", "real"):
            raise ConfigurationError(f"output must be 'complex' or 'real', got {self.output!r}")

    def fit(self, X=None, y=None):
        self._validate()
        self.n_features_out_ = self.k if self.output == "complex" else 2 * self.k
        return self

    def symvectors(self, X) -> list:
        """Same as ``transform`` but returns :class:`SymVector` objects."""
        self._validate()
        diagrams = check_diagrams(X, finitized=True)
        rows, counts = [], []
        for d in diagrams:
            w = warp_diagram(d, self.warp)
            rows.append(np.repeat(w.values, w.multiplicities))
            counts.append(w.source_count)
        raw = elementary_symmetric_batch(rows, self.k)
        return [
            SymVector(renormalize(a, n) if n else np.zeros(self.k, complex), n)
            for a, n in zip(raw, counts)
        ]

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        vecs = self.symvectors(X)
        comps = np.array([v.components for v in vecs], dtype=complex).reshape(len(vecs), self.k)
        if self.output == "real":
            return np.hstack([comps.real, comps.imag])
        return comps


class DiagramNeighborsClassifier(BaseEstimator, ClassifierMixin):
    """Nearest-neighbour classifier over persistence diagrams.

    Parameters
    ----------
    method : {"bottleneck", "T", "R"}
        ``"bottleneck"`` compares diagrams directly; ``"T"``/``"R"`` compare
        symmetric-function vectors built with that warp.
    k : int
        Number of symmetric functions for the vector methods.
    n_neighbors : int
        Majority vote among this many nearest training diagrams; ties go to
        the label met first in distance order (then training order).
    """

    def __init__(self, method="R", k=DEFAULT_K, n_neighbors=1):
        self.method = method
        self.k = k
        self.n_neighbors = n_neighbors

    def _embed(self, diagrams):
        if self.method == "bottleneck":
            return diagrams
        return SymmetricFunctionVectorizer(self.method, self.k).fit().transform(diagrams)

    def fit(self, X, y):
        if self.method not in METHODS:
            raise ConfigurationError(f"method must be one of {METHODS}, got {self.method!r}")
        diagrams = check_diagrams(X, finitized=True)
        y = np.asarray(y)
        if len(diagrams) != len(y):
            raise DimensionError(f"{len(diagrams)} diagrams for {len(y)} labels")
        if not 1 <= self.n_neighbors <= len(diagrams):
            raise InvalidArgumentError(f"n_neighbors must lie in [1, {len(diagrams)}]")
        self.classes_ = np.unique(y)
        self.train_ = self._embed(diagrams)
        self.y_ = y
        return self

    def distances(self, X) -> np.ndarray:
        """Distances from each query to each training item, shape ``(n_queries, n_train)``."""
        check_is_fitted(self, "train_")
        queries = self._embed(check_diagrams(X, finitized=True))
        if self.method == "bottleneck":
            return np.array([[bottleneck_distance(q, t) for t in self.train_] for q in queries])
        return np.abs(queries[:, None, :] - self.train_[None, :, :]).sum(axis=2)

    def predict(self, X):
        dist = self.distances(X)
        order = np.argsort(dist, axis=1, kind="stable")[:, : self.n_neighbors]
        preds = []
        for row in order:
            labels = self.y_[row]
            values, counts = np.unique(labels, return_counts=True)
            winners = set(values[counts == counts.max()].tolist())
            preds.append(next(lab for lab in labels if lab in winners))
        return np.array(preds, dtype=self.y_.dtype)
