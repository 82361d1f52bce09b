"""poslens: part-of-speech profiling and classification of two-group corpora."""

from .corpus import Corpus, Document, Label, TaggedDocument
from .explain import (
    Attribution,
    SummaryRanking,
    SummaryResult,
    brute_force_shapley,
    forest_shap,
    shap_summary,
    tree_shap,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    GroupSummary,
    PostFeatureExtractor,
    aggregate,
    extract_features,
    extract_post_features,
    formality_score,
    pronominalisation_index,
)
from .forest import Metrics, RandomForest, Tree, evaluate
from .perceptron import PerceptronTagger, tag_corpus
from .special import student_t_cdf
from .stats import KeynessEntry, KeynessResult, TTestResult, keyness, welch_t, word_counts
from .tags import (
    Number,
    Person,
    TaggedToken,
    Tense,
    assign_tense,
    pronoun_morph,
    ptb_to_upos,
)
from .tokenizer import tokenize, tokenize_sentences

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Document",
    "Label",
    "TaggedDocument",
    "TaggedToken",
    "Tense",
    "Person",
    "Number",
    "tokenize",
    "tokenize_sentences",
    "ptb_to_upos",
    "assign_tense",
    "pronoun_morph",
    "PerceptronTagger",
    "tag_corpus",
    "FEATURE_NAMES",
    "FeatureVector",
    "GroupSummary",
    "PostFeatureExtractor",
    "extract_post_features",
    "extract_features",
    "pronominalisation_index",
    "formality_score",
    "aggregate",
    "TTestResult",
    "KeynessEntry",
    "KeynessResult",
    "welch_t",
    "student_t_cdf",
    "keyness",
    "word_counts",
    "RandomForest",
    "Tree",
    "Metrics",
    "evaluate",
    "Attribution",
    "SummaryRanking",
    "SummaryResult",
    "tree_shap",
    "brute_force_shapley",
    "forest_shap",
    "shap_summary",
    "__version__",
]
