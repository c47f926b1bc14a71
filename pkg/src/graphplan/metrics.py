"""Diversity metrics over planned event sequences.

Dist-n is the fraction of distinct n-grams among all n-gram tokens,
pooled over the whole batch of sequences (one percentage per system).
Per-sequence averaging is available as a flag.
"""

from __future__ import annotations

from dataclasses import dataclass


def _ngrams(sequence, n: int):
    return [tuple(sequence[i: i + n]) for i in range(len(sequence) - n + 1)]


def dist_n(sequences: list[list[str]], n: int) -> float:
    """Distinct n-grams / total n-grams across all sequences.

    Sequences shorter than ``n`` contribute nothing. Raises if no
    n-gram exists at all (the metric is undefined).
    """
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    total = 0
    seen = set()
    for seq in sequences:
        grams = _ngrams(seq, n)
        total += len(grams)
        seen.update(grams)
    if total == 0:
        raise ValueError(f"undefined metric: no {n}-grams in the input")
    return len(seen) / total


def sequence_mean_dist_n(sequences: list[list[str]], n: int) -> float:
    """Mean of per-sequence Dist-n over sequences long enough to score."""
    values = []
    for seq in sequences:
        grams = _ngrams(seq, n)
        if grams:
            values.append(len(set(grams)) / len(grams))
    if not values:
        raise ValueError(f"undefined metric: no {n}-grams in the input")
    return sum(values) / len(values)


@dataclass(frozen=True)
class DiversityReport:
    dist1: float
    dist2: float
    n_sequences: int
    n_unigrams: int
    n_bigrams: int

    def to_record(self) -> dict:
        return {
            "dist1": self.dist1,
            "dist2": self.dist2,
            "n_sequences": self.n_sequences,
            "n_unigrams": self.n_unigrams,
            "n_bigrams": self.n_bigrams,
        }


def diversity_report(plans) -> DiversityReport:
    """Corpus-level Dist-1/Dist-2 over the plans' event sequences."""
    if not plans:
        raise ValueError("no plans to evaluate")
    sequences = [list(p.events) for p in plans]
    n_unigrams = sum(len(s) for s in sequences)
    n_bigrams = sum(max(len(s) - 1, 0) for s in sequences)
    return DiversityReport(
        dist1=dist_n(sequences, 1),
        dist2=dist_n(sequences, 2),
        n_sequences=len(sequences),
        n_unigrams=n_unigrams,
        n_bigrams=n_bigrams,
    )
