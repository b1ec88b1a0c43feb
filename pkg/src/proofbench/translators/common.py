from __future__ import annotations


class TranslationError(ValueError):
    """Raised when the input cannot be translated (unsound formulation, rejected proof)."""

    def __init__(self, reason, witness=None):
        super().__init__(reason if witness is None else "%s (witness %r)" % (reason, witness))
        self.reason = reason
        self.witness = witness
