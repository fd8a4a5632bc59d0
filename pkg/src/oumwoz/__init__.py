"""oum-woz: a Wizard-of-Oz argumentation platform.

Argument bases with topic-relative stances, TF-IDF wizard suggestions,
boosted BM25 bot retrieval, a gated template responder, dialogue session
logging, opening-up-minds questionnaire scoring, and log analytics.
"""

__version__ = "0.1.0"
