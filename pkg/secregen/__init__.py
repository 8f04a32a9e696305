"""secregen: secure exact-repair regenerating codes and their tradeoff region."""

__version__ = "0.1.0"
