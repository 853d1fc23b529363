use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED_SUFFIXES: &str = include_str!("../../data/suffixes_tr.txt");

/// Minimum number of characters a stem must keep.
pub const MIN_STEM_CHARS: usize = 2;

/// Token-to-stem mapping used by the `stem` stage. Must be pure.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;

    /// Short identifier recorded in run metadata.
    fn name(&self) -> &str {
        "custom"
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem(&self, token: &str) -> String {
        token.to_string()
    }

    fn name(&self) -> &str {
        "identity"
    }
}

/// Wraps any `Fn(&str) -> String` as a [`Stemmer`].
pub struct FnStemmer<F>(pub F);

impl<F> Stemmer for FnStemmer<F>
where
    F: Fn(&str) -> String + Send + Sync,
{
    fn stem(&self, token: &str) -> String {
        (self.0)(token)
    }
}

/// Iterative longest-match-first suffix stripper.
///
/// Repeatedly removes the longest table suffix that leaves at least
/// [`MIN_STEM_CHARS`] characters, until no suffix applies.
#[derive(Clone, Debug)]
pub struct SuffixStemmer {
    /// Sorted by char length descending, then lexicographically.
    suffixes: Vec<String>,
}

impl SuffixStemmer {
    pub fn new<I, S>(suffixes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut suffixes: Vec<String> = suffixes.into_iter().map(Into::into).filter(|s| !s.is_empty()).collect();
        if suffixes.is_empty() {
            return Err(Error::Config("suffix table is empty".into()));
        }
        suffixes.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then_with(|| a.cmp(b)));
        suffixes.dedup();
        Ok(SuffixStemmer { suffixes })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_SUFFIXES).expect("bundled suffix table is valid")
    }

    /// Parses a suffix table: one suffix per line, `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }
}

impl Stemmer for SuffixStemmer {
    fn stem(&self, token: &str) -> String {
        let mut current = token;
        'outer: loop {
            let len = current.chars().count();
            for suffix in &self.suffixes {
                if current.ends_with(suffix.as_str()) && len - suffix.chars().count() >= MIN_STEM_CHARS {
                    current = &current[..current.len() - suffix.len()];
                    continue 'outer;
                }
            }
            return current.to_string();
        }
    }

    fn name(&self) -> &str {
        "suffix-table"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_is_sorted_longest_first() {
        let s = SuffixStemmer::bundled();
        assert_eq!(s.suffixes().len(), 44);
        let lens: Vec<usize> = s.suffixes().iter().map(|x| x.chars().count()).collect();
        assert!(lens.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn strips_chained_suffixes() {
        // kitaplardan: "dan" -> kitaplar, "lar" -> kitap, nothing matches "...p".
        let s = SuffixStemmer::bundled();
        assert_eq!(s.stem("kitaplardan"), "kitap");
        assert_eq!(s.stem("kitap"), "kitap");
        assert_eq!(s.stem("romanı"), "roman");
        assert_eq!(s.stem("evlerde"), "ev");
    }

    #[test]
    fn keeps_minimum_stem_length() {
        let s = SuffixStemmer::bundled();
        assert_eq!(s.stem("ve"), "ve");
        assert_eq!(s.stem("da"), "da");
        // "da" would leave one char; the single vowel "a" leaves two.
        assert_eq!(s.stem("ada"), "ad");
    }

    #[test]
    fn longest_match_wins() {
        let s = SuffixStemmer::new(["a", "ba"]).unwrap();
        assert_eq!(s.stem("xxba"), "xx");
        let s = SuffixStemmer::new(["ba"]).unwrap();
        assert_eq!(s.stem("xba"), "xba");
    }

    #[test]
    fn parse_skips_comments() {
        let s = SuffixStemmer::parse("# c\n\nler\n lar \n").unwrap();
        assert_eq!(s.suffixes(), ["lar", "ler"]);
        assert!(SuffixStemmer::parse("# only comments\n").is_err());
    }
}
