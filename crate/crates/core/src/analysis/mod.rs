//! Exploratory statistics: per-feature chi-square tests with Bonferroni
//! correction, and lexical divergence scoring between two corpora.
//!
//! Continuous features are discretized into quantile bins of the pooled
//! sample before the chi-square test. Term association uses percentile-rank
//! scaled F-scores: per class, the harmonic mean of a term's precision
//! percentile and frequency percentile; the association is the difference
//! between the two class scores and is exactly antisymmetric under swapping
//! the corpora.

pub mod gamma;
pub mod stopwords;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::text::tokenize;
use crate::{Error, Result};
use gamma::chi_square_sf;

/// Default number of quantile bins for feature discretization.
pub const DEFAULT_BINS: usize = 4;
/// Family-wise significance level on adjusted p-values.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Chi-square result for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
    /// any expected cell count below 5 (test is a rough guide there)
    pub low_expected: bool,
}

/// Chi-square independence test on a `2 x bins` contingency table.
/// Columns with zero total are skipped; degrees of freedom stay `bins - 1`.
pub fn chi_square_from_table(table: &[Vec<usize>; 2]) -> ChiSquareTest {
    let bins = table[0].len();
    assert_eq!(table[1].len(), bins);
    let row_totals = [
        table[0].iter().sum::<usize>() as f64,
        table[1].iter().sum::<usize>() as f64,
    ];
    let col_totals: Vec<f64> = (0..bins)
        .map(|b| (table[0][b] + table[1][b]) as f64)
        .collect();
    let n: f64 = row_totals.iter().sum();
    let df = bins.saturating_sub(1).max(1);
    if n == 0.0 || row_totals.contains(&0.0) {
        return ChiSquareTest {
            statistic: 0.0,
            p_value: 1.0,
            df,
            low_expected: true,
        };
    }
    let mut statistic = 0.0;
    let mut low_expected = false;
    for r in 0..2 {
        for b in 0..bins {
            let expected = row_totals[r] * col_totals[b] / n;
            if expected == 0.0 {
                continue;
            }
            if expected < 5.0 {
                low_expected = true;
            }
            let observed = table[r][b] as f64;
            statistic += (observed - expected) * (observed - expected) / expected;
        }
    }
    ChiSquareTest {
        statistic,
        p_value: chi_square_sf(statistic, df),
        df,
        low_expected,
    }
}

/// Quantile-bin boundaries (inclusive upper edges of all bins but the last)
/// from the pooled sample.
fn quantile_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (1..bins)
        .map(|i| {
            let pos = (sorted.len() * i).div_ceil(bins).saturating_sub(1);
            sorted[pos.min(sorted.len() - 1)]
        })
        .collect()
}

fn bin_of(v: f64, edges: &[f64]) -> usize {
    edges.iter().take_while(|&&e| v > e).count()
}

/// Discretizes one feature into quantile bins of the pooled distribution and
/// tests class association. A constant feature degenerates to
/// `(statistic 0, p 1)`.
pub fn chi_square_feature_test(values: &[f64], labels: &[u8], bins: usize) -> ChiSquareTest {
    assert_eq!(values.len(), labels.len());
    assert!(bins >= 2);
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return ChiSquareTest {
            statistic: 0.0,
            p_value: 1.0,
            df: bins - 1,
            low_expected: true,
        };
    }
    let edges = quantile_edges(values, bins);
    let mut table = [vec![0usize; bins], vec![0usize; bins]];
    for (&v, &y) in values.iter().zip(labels) {
        let row = usize::from(y == 1);
        table[row][bin_of(v, &edges)] += 1;
    }
    chi_square_from_table(&table)
}

/// `p_adj = min(1, p_row * n)` with `n` the number of tests.
pub fn bonferroni(p_rows: &[f64]) -> Result<Vec<f64>> {
    let n = p_rows.len() as f64;
    p_rows
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                Err(Error::OutOfRangeP(p))
            } else {
                Ok((p * n).min(1.0))
            }
        })
        .collect()
}

/// Per-feature significance row, CSV-ready.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub feature: String,
    pub chi2: f64,
    pub df: usize,
    pub p_row: f64,
    pub p_adj: f64,
    pub significant: bool,
    pub low_expected: bool,
}

/// Tests every feature column and applies the family-wise correction across
/// all of them.
pub fn significance_report(
    feature_names: &[String],
    columns: &[Vec<f64>],
    labels: &[u8],
    bins: usize,
) -> Result<Vec<SignificanceRow>> {
    assert_eq!(feature_names.len(), columns.len());
    let tests: Vec<ChiSquareTest> = columns
        .iter()
        .map(|col| chi_square_feature_test(col, labels, bins))
        .collect();
    let p_adjs = bonferroni(&tests.iter().map(|t| t.p_value).collect::<Vec<_>>())?;
    Ok(feature_names
        .iter()
        .zip(tests.iter().zip(&p_adjs))
        .map(|(name, (t, &p_adj))| SignificanceRow {
            feature: name.clone(),
            chi2: t.statistic,
            df: t.df,
            p_row: t.p_value,
            p_adj,
            significant: p_adj < SIGNIFICANCE_LEVEL,
            low_expected: t.low_expected,
        })
        .collect())
}

/// Association of one term with corpus A over corpus B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub count_a: usize,
    pub count_b: usize,
    pub score_a: f64,
    pub score_b: f64,
    /// `score_a - score_b`, in `[-1, 1]`
    pub association: f64,
    /// frequency percentile within each corpus, for the scatter plot
    pub freq_pct_a: f64,
    pub freq_pct_b: f64,
}

/// Percentile rank of each value among all values: `(#less + ties/2) / n`.
fn percentile_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&o| o < v).count() as f64;
            let equal = values.iter().filter(|&&o| o == v).count() as f64;
            (less + equal / 2.0) / n
        })
        .collect()
}

fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Ranks every non-stopword term by how much it leans toward corpus A,
/// sorted by association descending (ties by term).
pub fn scaled_f_scores<S: AsRef<str>>(corpus_a: &[S], corpus_b: &[S]) -> Result<Vec<TermScore>> {
    let count = |corpus: &[S]| -> (BTreeMap<String, usize>, usize) {
        let mut counts = BTreeMap::new();
        let mut total = 0usize;
        for doc in corpus {
            for tok in tokenize(doc.as_ref()) {
                if stopwords::is_stopword(&tok) {
                    continue;
                }
                *counts.entry(tok).or_insert(0) += 1;
                total += 1;
            }
        }
        (counts, total)
    };
    let (counts_a, total_a) = count(corpus_a);
    let (counts_b, total_b) = count(corpus_b);
    if total_a == 0 || total_b == 0 {
        return Err(Error::EmptyAfterStopwords);
    }

    let mut terms: Vec<String> = counts_a.keys().cloned().collect();
    for t in counts_b.keys() {
        if !counts_a.contains_key(t) {
            terms.push(t.clone());
        }
    }
    terms.sort();

    let f_a: Vec<f64> = terms
        .iter()
        .map(|t| *counts_a.get(t).unwrap_or(&0) as f64)
        .collect();
    let f_b: Vec<f64> = terms
        .iter()
        .map(|t| *counts_b.get(t).unwrap_or(&0) as f64)
        .collect();

    let prec_a: Vec<f64> = f_a.iter().zip(&f_b).map(|(a, b)| a / (a + b)).collect();
    let prec_b: Vec<f64> = f_a.iter().zip(&f_b).map(|(a, b)| b / (a + b)).collect();
    let freq_a: Vec<f64> = f_a.iter().map(|a| a / total_a as f64).collect();
    let freq_b: Vec<f64> = f_b.iter().map(|b| b / total_b as f64).collect();

    let prec_a_pct = percentile_ranks(&prec_a);
    let prec_b_pct = percentile_ranks(&prec_b);
    let freq_a_pct = percentile_ranks(&freq_a);
    let freq_b_pct = percentile_ranks(&freq_b);

    let mut scores: Vec<TermScore> = terms
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let score_a = harmonic_mean(prec_a_pct[i], freq_a_pct[i]);
            let score_b = harmonic_mean(prec_b_pct[i], freq_b_pct[i]);
            TermScore {
                term: term.clone(),
                count_a: f_a[i] as usize,
                count_b: f_b[i] as usize,
                score_a,
                score_b,
                association: score_a - score_b,
                freq_pct_a: freq_a_pct[i],
                freq_pct_b: freq_b_pct[i],
            }
        })
        .collect();
    scores.sort_by(|x, y| {
        y.association
            .partial_cmp(&x.association)
            .unwrap()
            .then_with(|| x.term.cmp(&y.term))
    });
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_feature_gives_zero_statistic() {
        // identical bin distribution in both classes
        let values: Vec<f64> = (0..40).map(|i| (i % 4) as f64).collect();
        let labels: Vec<u8> = (0..40).map(|i| (i / 20) as u8).collect();
        let t = chi_square_feature_test(&values, &labels, 4);
        assert!(t.statistic < 1e-9, "statistic {}", t.statistic);
        assert!((t.p_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn textbook_two_by_two_table() {
        let table = [vec![10, 20], vec![20, 10]];
        let t = chi_square_from_table(&table);
        assert!(
            (t.statistic - 20.0 / 3.0).abs() < 1e-9,
            "chi2 {}",
            t.statistic
        );
        assert_eq!(t.df, 1);
        assert!((t.p_value - 0.009823).abs() < 1e-4, "p {}", t.p_value);
    }

    #[test]
    fn degenerate_feature_reports_null() {
        let values = vec![3.5; 30];
        let labels: Vec<u8> = (0..30).map(|i| (i % 2) as u8).collect();
        let t = chi_square_feature_test(&values, &labels, 4);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn class_swap_leaves_statistic_unchanged() {
        let values: Vec<f64> = (0..60).map(|i| ((i * 13) % 17) as f64).collect();
        let labels: Vec<u8> = (0..60).map(|i| u8::from(i % 3 == 0)).collect();
        let flipped: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
        let a = chi_square_feature_test(&values, &labels, 4);
        let b = chi_square_feature_test(&values, &flipped, 4);
        assert!((a.statistic - b.statistic).abs() < 1e-12);
    }

    #[test]
    fn bonferroni_anchors() {
        assert_eq!(bonferroni(&[0.01]).unwrap(), vec![0.01]);
        let adj = bonferroni(&vec![0.004; 136]).unwrap();
        assert!((adj[0] - 0.544).abs() < 1e-12);
        let adj = bonferroni(&vec![0.2; 10]).unwrap();
        assert_eq!(adj[0], 1.0);
    }

    #[test]
    fn bonferroni_rejects_out_of_range() {
        assert!(matches!(
            bonferroni(&[0.5, 1.2]),
            Err(Error::OutOfRangeP(_))
        ));
        assert!(matches!(bonferroni(&[-0.1]), Err(Error::OutOfRangeP(_))));
    }

    #[test]
    fn bonferroni_is_monotone_and_bounded() {
        let ps = [0.0, 0.001, 0.01, 0.02, 0.5, 1.0];
        let adj = bonferroni(&ps).unwrap();
        for w in adj.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(adj.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn exclusive_term_leans_hard_toward_its_class() {
        let a: Vec<String> = vec!["migraine pain pain migraine severe".into(); 8];
        let b: Vec<String> = vec!["walking outside garden flowers".into(); 8];
        let scores = scaled_f_scores(&a, &b).unwrap();
        let top = &scores[0];
        assert!(top.association > 0.5, "top {top:?}");
        assert_eq!(top.count_b, 0);
        // the extreme side terms only occur in corpus A
        assert!(["migraine", "pain", "severe"].contains(&top.term.as_str()));
    }

    #[test]
    fn symmetric_term_has_zero_association() {
        let a: Vec<String> = vec!["shared words here and there".into(); 5];
        let b = a.clone();
        let scores = scaled_f_scores(&a, &b).unwrap();
        for s in &scores {
            assert!(s.association.abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn association_is_antisymmetric_under_corpus_swap() {
        let a: Vec<String> = vec![
            "chronic pain problems sleeping severe worse".into(),
            "tired hurting pain chronic sleeping pills".into(),
        ];
        let b: Vec<String> = vec![
            "okay right helping appreciate improve trying".into(),
            "better function noticed improve okay helping".into(),
        ];
        let fwd = scaled_f_scores(&a, &b).unwrap();
        let rev = scaled_f_scores(&b, &a).unwrap();
        for s in &fwd {
            let mirror = rev.iter().find(|r| r.term == s.term).unwrap();
            assert!(
                (s.association + mirror.association).abs() < 1e-12,
                "{}: {} vs {}",
                s.term,
                s.association,
                mirror.association
            );
            assert!((s.score_a - mirror.score_b).abs() < 1e-12);
        }
    }

    #[test]
    fn stopwords_never_appear_in_output() {
        let a: Vec<String> = vec!["the pain is in me and the pills".into(); 3];
        let b: Vec<String> = vec!["the day was a good one for me".into(); 3];
        let scores = scaled_f_scores(&a, &b).unwrap();
        for s in &scores {
            assert!(
                !stopwords::is_stopword(&s.term),
                "stopword {} leaked",
                s.term
            );
        }
    }

    #[test]
    fn planted_class_words_take_the_extremes() {
        let planted_a = ["alphaone", "alphatwo", "alphathree"];
        let planted_b = ["betaone", "betatwo", "betathree"];
        let shared = "common words spoken every session";
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..12 {
            a.push(format!(
                "{shared} {} {}",
                planted_a[i % 3],
                planted_a[(i + 1) % 3]
            ));
            b.push(format!(
                "{shared} {} {}",
                planted_b[i % 3],
                planted_b[(i + 1) % 3]
            ));
        }
        let scores = scaled_f_scores(&a, &b).unwrap();
        let by_abs = {
            let mut v = scores.clone();
            v.sort_by(|x, y| {
                y.association
                    .abs()
                    .partial_cmp(&x.association.abs())
                    .unwrap()
            });
            v
        };
        for s in by_abs.iter().take(6) {
            assert!(
                planted_a.contains(&s.term.as_str()) || planted_b.contains(&s.term.as_str()),
                "unexpected extreme term {s:?}"
            );
        }
    }

    #[test]
    fn empty_after_stopwords_is_an_error() {
        let a: Vec<String> = vec!["the and is".into()];
        let b: Vec<String> = vec!["actual words".into()];
        assert!(matches!(
            scaled_f_scores(&a, &b),
            Err(Error::EmptyAfterStopwords)
        ));
    }

    #[test]
    fn significance_report_flags_only_associated_features() {
        // feature 0 tracks the label, feature 1 is noise
        let labels: Vec<u8> = (0..80).map(|i| u8::from(i % 2 == 0)).collect();
        let tracking: Vec<f64> = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| y as f64 * 10.0 + (i % 3) as f64)
            .collect();
        let noise: Vec<f64> = (0..80).map(|i| ((i * 29) % 11) as f64).collect();
        let names = vec!["tracking".to_string(), "noise".to_string()];
        let rows = significance_report(&names, &[tracking, noise], &labels, DEFAULT_BINS).unwrap();
        assert!(rows[0].significant, "{:?}", rows[0]);
        assert!(!rows[1].significant, "{:?}", rows[1]);
        for r in &rows {
            assert!((r.p_adj - (r.p_row * 2.0).min(1.0)).abs() < 1e-12);
        }
    }
}
