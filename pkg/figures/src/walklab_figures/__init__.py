"""Render publication-style figures from walklab artifact files.

Strictly a downstream consumer: everything arrives through the documented
CSV/JSON formats (trajectory CSV, hist.csv, summary.json), nothing is
imported from the simulation package, and inputs are never modified.
"""

from .io import FigureDataError, config_digest, read_histogram, read_summary, read_trajectory
from .plots import plot_histogram, plot_loglog

__version__ = "0.1.0"
