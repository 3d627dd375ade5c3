"""Deterministic figure rendering for cospread harness CSV outputs."""

__version__ = "0.1.0"

from .render import RenderError, render_figure, render_spec_file  # noqa: F401
