//! Transcript tokenization and integer sequences.
//!
//! Tokens are lowercased, stripped of ASCII punctuation, and whitespace-split.
//! The vocabulary assigns 1-based ranks by descending corpus frequency (ties
//! broken by first occurrence); index 0 is reserved for padding. Sequences
//! are padded on the left and truncated from the left, and unknown tokens are
//! skipped.

pub mod embedding;

use std::collections::HashMap;

use crate::{Error, Result};

/// Characters removed before whitespace splitting (tab/newline become spaces).
const PUNCTUATION: &str = "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~";

/// Normalizes one text into its token list.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut cleaned = String::with_capacity(text.len());
    for ch in text.chars() {
        if PUNCTUATION.contains(ch) || ch == '\t' || ch == '\n' || ch == '\r' {
            cleaned.push(' ');
        } else {
            for lc in ch.to_lowercase() {
                cleaned.push(lc);
            }
        }
    }
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Frequency-ranked token table. Rank 1 is the most frequent term; index 0
/// never maps to a term.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    term_to_index: HashMap<String, usize>,
    /// terms ordered by rank; `terms[0]` has rank 1
    terms: Vec<String>,
    /// corpus frequency per rank
    frequencies: Vec<usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    /// Term for a 1-based rank.
    pub fn term(&self, index: usize) -> Option<&str> {
        if index == 0 {
            return None;
        }
        self.terms.get(index - 1).map(String::as_str)
    }

    pub fn frequency(&self, index: usize) -> Option<usize> {
        if index == 0 {
            return None;
        }
        self.frequencies.get(index - 1).copied()
    }

    /// Terms in rank order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// A left-padded, left-truncated integer sequence of fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub ids: Vec<usize>,
    pub original_length: usize,
}

/// Builds the vocabulary from a corpus of transcripts.
pub fn fit_vocabulary<S: AsRef<str>>(corpus: &[S]) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: HashMap<String, (usize, usize)> = HashMap::new(); // term -> (freq, first_pos)
    let mut position = 0usize;
    for doc in corpus {
        for tok in tokenize(doc.as_ref()) {
            let entry = counts.entry(tok).or_insert((0, position));
            entry.0 += 1;
            position += 1;
        }
    }
    let mut ordered: Vec<(String, usize, usize)> =
        counts.into_iter().map(|(t, (f, p))| (t, f, p)).collect();
    // descending frequency, ties by first occurrence
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));

    let mut term_to_index = HashMap::with_capacity(ordered.len());
    let mut terms = Vec::with_capacity(ordered.len());
    let mut frequencies = Vec::with_capacity(ordered.len());
    for (rank0, (term, freq, _)) in ordered.into_iter().enumerate() {
        term_to_index.insert(term.clone(), rank0 + 1);
        terms.push(term);
        frequencies.push(freq);
    }
    Ok(Vocabulary {
        term_to_index,
        terms,
        frequencies,
    })
}

/// Longest tokenized message in a corpus.
pub fn longest_message_len<S: AsRef<str>>(corpus: &[S]) -> usize {
    corpus
        .iter()
        .map(|d| tokenize(d.as_ref()).len())
        .max()
        .unwrap_or(0)
}

/// Converts texts to fixed-length id sequences. Unknown tokens are skipped;
/// `max_len` defaults to the longest tokenized message in this corpus.
pub fn texts_to_sequences<S: AsRef<str>>(
    vocab: &Vocabulary,
    corpus: &[S],
    max_len: Option<usize>,
) -> Vec<TokenSequence> {
    let max_len = max_len
        .unwrap_or_else(|| longest_message_len(corpus))
        .max(1);
    corpus
        .iter()
        .map(|doc| {
            let ids: Vec<usize> = tokenize(doc.as_ref())
                .iter()
                .filter_map(|t| vocab.index_of(t))
                .collect();
            let original_length = ids.len();
            let kept: Vec<usize> = if ids.len() > max_len {
                ids[ids.len() - max_len..].to_vec() // left truncation
            } else {
                ids
            };
            let mut padded = vec![0usize; max_len - kept.len()];
            padded.extend(kept);
            TokenSequence {
                ids: padded,
                original_length,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_by_frequency_then_first_occurrence() {
        let vocab = fit_vocabulary(&["a b a", "a c"]).unwrap();
        assert_eq!(vocab.index_of("a"), Some(1));
        assert_eq!(vocab.index_of("b"), Some(2));
        assert_eq!(vocab.index_of("c"), Some(3));
        assert_eq!(vocab.frequency(1), Some(3));
    }

    #[test]
    fn case_and_punctuation_fold() {
        let vocab = fit_vocabulary(&["Hello, hello!"]).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.index_of("hello"), Some(1));
        assert_eq!(vocab.frequency(1), Some(2));
    }

    #[test]
    fn known_counts_rank_stably() {
        // {the:5, pain:3, sleep:3, okay:1}, "pain" occurs before "sleep"
        let corpus = [
            "the pain the sleep",
            "the pain sleep the",
            "the pain sleep okay",
        ];
        let vocab = fit_vocabulary(&corpus).unwrap();
        assert_eq!(vocab.index_of("the"), Some(1));
        assert_eq!(vocab.index_of("pain"), Some(2));
        assert_eq!(vocab.index_of("sleep"), Some(3));
        assert_eq!(vocab.index_of("okay"), Some(4));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let empty: [&str; 0] = [];
        assert!(matches!(fit_vocabulary(&empty), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn sequences_are_left_padded() {
        let vocab = fit_vocabulary(&["a a a b b c"]).unwrap();
        let seqs = texts_to_sequences(&vocab, &["a c b"], Some(5));
        assert_eq!(seqs[0].ids, vec![0, 0, 1, 3, 2]);
    }

    #[test]
    fn unknown_tokens_are_skipped() {
        let vocab = fit_vocabulary(&["a a b"]).unwrap();
        let seqs = texts_to_sequences(&vocab, &["a z b"], Some(3));
        assert_eq!(seqs[0].ids, vec![0, 1, 2]);
        assert_eq!(seqs[0].original_length, 2);
    }

    #[test]
    fn long_texts_truncate_from_the_left() {
        let vocab =
            fit_vocabulary(&["t1 t1 t1 t1 t1 t1 t2 t2 t2 t2 t2 t3 t3 t3 t3 t4 t4 t4 t5 t5 t6"])
                .unwrap();
        let seqs = texts_to_sequences(&vocab, &["t1 t2 t3 t4 t5 t6"], Some(4));
        assert_eq!(seqs[0].ids, vec![3, 4, 5, 6]);
    }

    #[test]
    fn default_max_len_is_longest_message() {
        let vocab = fit_vocabulary(&["a b c", "a"]).unwrap();
        let seqs = texts_to_sequences(&vocab, &["a b c", "a"], None);
        assert_eq!(seqs[0].ids.len(), 3);
        assert_eq!(seqs[1].ids, vec![0, 0, 1]);
    }

    #[test]
    fn rank_monotonicity() {
        let corpus = ["d d d c c b a a a a", "b c d"];
        let vocab = fit_vocabulary(&corpus).unwrap();
        for i in 1..vocab.len() {
            assert!(vocab.frequency(i).unwrap() >= vocab.frequency(i + 1).unwrap());
        }
    }

    proptest! {
        /// Stripping pad zeros and inverting the vocabulary recovers the
        /// normalized token list for short in-vocabulary texts.
        #[test]
        fn round_trip_recovers_tokens(words in proptest::collection::vec("[a-e]{1,3}", 1..8)) {
            let doc = words.join(" ");
            let vocab = fit_vocabulary(&[doc.clone()]).unwrap();
            let seqs = texts_to_sequences(&vocab, &[doc.clone()], Some(16));
            let recovered: Vec<String> = seqs[0]
                .ids
                .iter()
                .filter(|&&id| id != 0)
                .map(|&id| vocab.term(id).unwrap().to_string())
                .collect();
            prop_assert_eq!(recovered, tokenize(&doc));
        }
    }
}
