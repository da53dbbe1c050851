"""Built-in English stop-word list with file and environment overrides."""

from __future__ import annotations

import os

ENV_VAR = "SUFFACTS_STOPWORDS"

DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can could did do does doing
    down during each few for from further had has have having he her here hers
    herself him himself his how i if in into is it its itself just me more
    most my myself no nor not now of off on once only or other our ours
    ourselves out over own same she should so some such than that the their
    theirs them themselves then there these they this those through to too
    under until up very was we were what when where which while who whom why
    will with you your yours yourself yourselves
    """.split()
)


def load_stopwords(path=None) -> frozenset:
    """Return the stop-word set, honoring an explicit path or the env override."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return DEFAULT_STOPWORDS
    with open(path, "r", encoding="utf-8") as handle:
        words = [w.strip().casefold() for w in handle.read().split()]
    return frozenset(w for w in words if w)
