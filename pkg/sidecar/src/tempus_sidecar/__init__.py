"""HTTP inference sidecar for the temporal-language pipeline.

Serves three-polarity aspect sentiment and per-token log-probabilities
over HTTP/JSON.  Stub mode is a pure function of the request body and
mirrors the pipeline's in-process stub bit for bit; model mode loads the
configured transformer checkpoints at startup.
"""

__version__ = "0.1.0"
