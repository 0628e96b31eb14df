from .agreement import AgreementReport, OpScores, agreement, cohen_kappa
from .bleu import bleu, identical_pct
from .sari import SariScore, sari, sari_sentence
from .stats import InstanceStats, corpus_stats, instance_stats, levenshtein_similarity
from .wilcoxon import wilcoxon_signed_rank

__all__ = [
    "AgreementReport",
    "InstanceStats",
    "OpScores",
    "SariScore",
    "agreement",
    "bleu",
    "cohen_kappa",
    "corpus_stats",
    "identical_pct",
    "instance_stats",
    "levenshtein_similarity",
    "sari",
    "sari_sentence",
    "wilcoxon_signed_rank",
]
