"""P-Lyapunov exponents of classical and quantum dynamics."""

import json as _json

from ._plyap import *  # noqa: F401,F403
from ._plyap import __version__, evaluate_config, run_config


def evaluate(config):
    """Evaluate a config (dict or JSON text) and return the summary as a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(evaluate_config(text))


def run(config, output_dir=""):
    """Run a config and write its four output files; returns the summary dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(run_config(text, output_dir))
