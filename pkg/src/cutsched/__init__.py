"""Cut quantum circuits, schedule the fragments over a noisy hardware pool, reconstruct."""

__version__ = "0.1.0"
