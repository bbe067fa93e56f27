//! Versioned regression corpus with expected invariants, used by the
//! acceptance suite and the `check` machinery.

use crate::error::{Error, Result};
use crate::exactalg::matrix::char_poly;
use crate::exactalg::rational::{parse_rational, Rational};
use crate::exactalg::unipoly::rational_root_factor;
use crate::lattice::SpectrumMultiset;
use serde::Deserialize;

const CORPUS_JSON: &str = include_str!("../data/corpus.json");

#[derive(Debug, Clone, Deserialize)]
pub struct CorpusEntry {
    pub poly: String,
    pub vars: Vec<String>,
    pub mu: usize,
    /// (beta, multiplicity) pairs as "p/q" strings.
    pub spectrum: Vec<(String, u64)>,
    /// Expected eigenvalues of A_0 (critical values with multiplicity).
    pub a0_eigenvalues: Vec<(String, usize)>,
    pub tags: Vec<String>,
    /// Note on where the expected values come from.
    pub provenance: String,
}

impl CorpusEntry {
    pub fn expected_spectrum(&self) -> Result<SpectrumMultiset> {
        let mut s = SpectrumMultiset::empty();
        for (beta, mult) in &self.spectrum {
            s.insert(parse_rational(beta)?, *mult);
        }
        Ok(s)
    }

    pub fn expected_a0_eigenvalues(&self) -> Result<Vec<(Rational, usize)>> {
        self.a0_eigenvalues
            .iter()
            .map(|(v, m)| Ok((parse_rational(v)?, *m)))
            .collect()
    }
}

pub fn load_corpus() -> Vec<CorpusEntry> {
    serde_json::from_str(CORPUS_JSON).expect("embedded corpus is well formed")
}

#[derive(Debug, Clone)]
pub struct EntryResult {
    pub poly: String,
    pub passed: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub results: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Run every corpus entry through both spectrum pipelines and the A_0
/// eigenvalue check; mismatches are reported with a full diff.
pub fn run_corpus() -> Result<CorpusReport> {
    let mut results = Vec::new();
    for entry in load_corpus() {
        let mut mismatches = Vec::new();
        match check_entry(&entry) {
            Ok(diffs) => mismatches.extend(diffs),
            Err(e) => mismatches.push(format!("computation failed: {e}")),
        }
        results.push(EntryResult {
            poly: entry.poly.clone(),
            passed: mismatches.is_empty(),
            mismatches,
        });
    }
    Ok(CorpusReport { results })
}

fn check_entry(entry: &CorpusEntry) -> Result<Vec<String>> {
    let mut diffs = Vec::new();
    let f = crate::poly::parse(&entry.poly, &entry.vars)?;
    let md = crate::groebner::milnor_data(&f)?;
    if md.mu != entry.mu {
        diffs.push(format!("mu: computed {}, expected {}", md.mu, entry.mu));
    }
    let expected = entry.expected_spectrum()?;

    let newton = crate::newton::newton_spectrum(&f)?;
    if newton != expected {
        diffs.push(format!(
            "newton spectrum: computed {:?}, expected {:?}",
            newton.to_pairs(),
            expected.to_pairs()
        ));
    }
    let lp = crate::brieskorn::t_matrix_from_milnor(&md)?;
    let vspec = crate::lattice::spectrum_v(&lp)?;
    if vspec != expected {
        diffs.push(format!(
            "V-spectrum: computed {:?}, expected {:?}",
            vspec.to_pairs(),
            expected.to_pairs()
        ));
    }

    let cp = char_poly(&lp.a0())?;
    let (roots, rest) = rational_root_factor(&cp)?;
    if !rest.is_constant() {
        diffs.push(format!(
            "A0 eigenvalues: irrational factor {}",
            rest.render("S")
        ));
    } else {
        let computed: Vec<(Rational, usize)> = roots;
        let expected_eigs = entry.expected_a0_eigenvalues()?;
        if computed != expected_eigs {
            diffs.push(format!(
                "A0 eigenvalues: computed {computed:?}, expected {expected_eigs:?}"
            ));
        }
    }
    Ok(diffs)
}

/// Look up a corpus entry by its polynomial text.
pub fn find_entry(poly: &str) -> Result<CorpusEntry> {
    load_corpus()
        .into_iter()
        .find(|e| e.poly == poly)
        .ok_or_else(|| Error::Inconsistency(format!("no corpus entry for {poly}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_loads() {
        let entries = load_corpus();
        assert!(entries.len() >= 6);
        // Coverage required of the corpus.
        let polys: Vec<&str> = entries.iter().map(|e| e.poly.as_str()).collect();
        for required in [
            "x^3 + y^3",
            "1/3x^3 - x + 1/2y^2",
            "x^2 + y^2",
            "x^3 + y^3 + z^3",
            "x^2 + y^3",
            "x^3 + y^4",
        ] {
            assert!(polys.contains(&required), "corpus covers {required}");
        }
        for e in &entries {
            assert!(!e.provenance.is_empty(), "provenance note for {}", e.poly);
            let total: u64 = e.spectrum.iter().map(|(_, m)| m).sum();
            assert_eq!(total as usize, e.mu, "spectrum total for {}", e.poly);
        }
    }

    #[test]
    fn corpus_passes() {
        let report = run_corpus().unwrap();
        for r in &report.results {
            assert!(r.passed, "{}: {:?}", r.poly, r.mismatches);
        }
    }
}
