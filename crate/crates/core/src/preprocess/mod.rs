//! Tokenization and the 16 preprocessing combinations.
//!
//! A combination is a 4-bit code over the stages, in this fixed order:
//! lowercase, strip non-alphabetic characters, stem, remove stopwords.
//! `"0000"` is plain whitespace tokenization, `"1111"` enables everything.

mod stemmer;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use stemmer::{FnStemmer, IdentityStemmer, Stemmer, SuffixStemmer, MIN_STEM_CHARS};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_tr.txt");

/// Ordered, never-empty tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    /// Drops empty strings.
    pub fn new(tokens: Vec<String>) -> Self {
        TokenStream(tokens.into_iter().filter(|t| !t.is_empty()).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: AsRef<str>> From<&[S]> for TokenStream {
    fn from(tokens: &[S]) -> Self {
        TokenStream::new(tokens.iter().map(|s| s.as_ref().to_string()).collect())
    }
}

impl<S: AsRef<str>, const N: usize> From<[S; N]> for TokenStream {
    fn from(tokens: [S; N]) -> Self {
        TokenStream::new(tokens.iter().map(|s| s.as_ref().to_string()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
    source: String,
}

impl StopwordList {
    /// Entries are case-folded with Turkish rules on insertion.
    pub fn new<I, S>(words: I, source: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: HashSet<String> =
            words.into_iter().map(|w| turkish_lower(w.as_ref().trim())).filter(|w| !w.is_empty()).collect();
        if words.is_empty() {
            return Err(Error::Config("stopword list is empty".into()));
        }
        Ok(StopwordList { words, source: source.into() })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_STOPWORDS, "bundled").expect("bundled stopword list is valid")
    }

    /// One word per line; `#` lines and blank lines ignored.
    pub fn parse(text: &str, source: impl Into<String>) -> Result<Self> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')), source)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path.display().to_string())
    }

    /// Case-folded membership test.
    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(&turkish_lower(token))
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Which stages run. The code string is derived, never stored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub strip_nonalpha: bool,
    pub stem: bool,
    pub remove_stopwords: bool,
}

impl PreprocessConfig {
    pub fn code(&self) -> String {
        [self.lowercase, self.strip_nonalpha, self.stem, self.remove_stopwords]
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Scenario position (0-based) in the canonical ordering; the code read as a binary number.
    pub fn index(&self) -> usize {
        (self.lowercase as usize) << 3
            | (self.strip_nonalpha as usize) << 2
            | (self.stem as usize) << 1
            | self.remove_stopwords as usize
    }

    pub fn from_index(i: usize) -> Self {
        PreprocessConfig {
            lowercase: i & 8 != 0,
            strip_nonalpha: i & 4 != 0,
            stem: i & 2 != 0,
            remove_stopwords: i & 1 != 0,
        }
    }
}

impl fmt::Display for PreprocessConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl FromStr for PreprocessConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<char> = s.trim().chars().collect();
        if bits.len() != 4 || bits.iter().any(|c| *c != '0' && *c != '1') {
            return Err(Error::Config(format!("invalid preprocessing code '{s}' (expected 4 characters of 0/1)")));
        }
        Ok(PreprocessConfig {
            lowercase: bits[0] == '1',
            strip_nonalpha: bits[1] == '1',
            stem: bits[2] == '1',
            remove_stopwords: bits[3] == '1',
        })
    }
}

impl Serialize for PreprocessConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for PreprocessConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All 16 combinations, scenario order 0000, 0001, ..., 1111.
pub fn enumerate_configs() -> Vec<PreprocessConfig> {
    (0..16).map(PreprocessConfig::from_index).collect()
}

/// Splits on Unicode whitespace.
pub fn tokenize(text: &str) -> TokenStream {
    TokenStream(text.split_whitespace().map(str::to_string).collect())
}

/// Turkish case folding: `I` -> `ı`, `İ` -> `i`, everything else by Unicode lowercase.
pub fn turkish_lower(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.chars() {
        match c {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            c => out.extend(c.to_lowercase()),
        }
    }
    out
}

pub fn lowercase_turkish(stream: TokenStream) -> TokenStream {
    TokenStream(stream.0.iter().map(|t| turkish_lower(t)).collect())
}

/// Removes every non-alphabetic character; tokens left empty are dropped.
pub fn strip_nonalpha(stream: TokenStream) -> TokenStream {
    TokenStream::new(stream.0.iter().map(|t| t.chars().filter(|c| c.is_alphabetic()).collect()).collect())
}

pub fn remove_stopwords(stream: TokenStream, list: &StopwordList) -> TokenStream {
    TokenStream(stream.0.into_iter().filter(|t| !list.contains(t)).collect())
}

/// A stemmer returning an empty string leaves the token unchanged.
pub fn stem(stream: TokenStream, stemmer: &dyn Stemmer) -> TokenStream {
    TokenStream(
        stream
            .0
            .into_iter()
            .map(|t| {
                let s = stemmer.stem(&t);
                if s.is_empty() {
                    t
                } else {
                    s
                }
            })
            .collect(),
    )
}

/// Stopword list and stemmer available to the pipeline.
#[derive(Clone, Default)]
pub struct PipelineResources {
    pub stopwords: Option<StopwordList>,
    pub stemmer: Option<Arc<dyn Stemmer>>,
}

impl PipelineResources {
    pub fn bundled() -> Self {
        PipelineResources {
            stopwords: Some(StopwordList::bundled()),
            stemmer: Some(Arc::new(SuffixStemmer::bundled())),
        }
    }

    /// Bundled resources, with each one replaced by a file when a path is given.
    pub fn from_paths(stopwords: Option<&Path>, suffixes: Option<&Path>) -> Result<Self> {
        let stopwords = match stopwords {
            Some(p) => StopwordList::from_file(p)?,
            None => StopwordList::bundled(),
        };
        let stemmer = match suffixes {
            Some(p) => SuffixStemmer::from_file(p)?,
            None => SuffixStemmer::bundled(),
        };
        Ok(PipelineResources { stopwords: Some(stopwords), stemmer: Some(Arc::new(stemmer)) })
    }
}

impl fmt::Debug for PipelineResources {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PipelineResources")
            .field("stopwords", &self.stopwords.as_ref().map(|s| s.source()))
            .field("stemmer", &self.stemmer.as_ref().map(|s| s.name().to_string()))
            .finish()
    }
}

/// Tokenizes and applies the enabled stages in order
/// lowercase -> strip -> stem -> stopwords.
pub fn apply_pipeline(text: &str, config: PreprocessConfig, resources: &PipelineResources) -> Result<TokenStream> {
    let mut stream = tokenize(text);
    if config.lowercase {
        stream = lowercase_turkish(stream);
    }
    if config.strip_nonalpha {
        stream = strip_nonalpha(stream);
    }
    if config.stem {
        let stemmer = resources
            .stemmer
            .as_deref()
            .ok_or_else(|| Error::Config(format!("code {config} enables stemming but no stemmer is configured")))?;
        stream = stem(stream, stemmer);
    }
    if config.remove_stopwords {
        let list = resources.stopwords.as_ref().ok_or_else(|| {
            Error::Config(format!("code {config} enables stopword removal but no list is configured"))
        })?;
        stream = remove_stopwords(stream, list);
    }
    Ok(stream)
}

/// Applies [`apply_pipeline`] to every text.
pub fn apply_all<'a, I>(texts: I, config: PreprocessConfig, resources: &PipelineResources) -> Result<Vec<TokenStream>>
where
    I: IntoIterator<Item = &'a str>,
{
    texts.into_iter().map(|t| apply_pipeline(t, config, resources)).collect()
}
