"""Evidence-sufficiency diagnostics and contrastive augmentation toolkit."""

from .corpus import (
    Dataset,
    DiagnosticInstance,
    EvidenceSentence,
    HumanAnnotation,
    Instance,
    OmissionType,
    TokenizerConfig,
    VeracityLabel,
    build_incorrect_evidence_set,
    nei_label,
    read_instances,
    write_jsonl,
)
from .syntax import ConstNode, ConstTree, excise_span, find_nodes, parse_bracketed, remove_span
from .omission import OmissionCandidate, generate_all, omit_constituents, omit_dates, omit_sentences
from .augment import (
    ContrastiveGroup,
    PredictionRecord,
    assemble_group,
    emit_cad,
    filter_negatives,
    majority_vote,
    mine_distractor,
)
from .lossmath import (
    EmbeddingRecord,
    LossConfig,
    contrastive_loss,
    cross_entropy,
    grad_check,
    joint_loss,
    mean_pool,
    similarity,
)
from .evaluate import agreement_table, macro_f1, nei_accuracy, overlap_stats, per_type_accuracy

__version__ = "0.1.0"
