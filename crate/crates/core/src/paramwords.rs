//! Parameter words over a finite alphabet and their substitution product.
//!
//! An `m`-parameter word of length `n` is a word over `alphabet ∪ {x1..xm}` in
//! which every variable occurs and the first occurrences of the variables
//! appear in index order. Words are the morphisms of the Graham-Rothschild
//! category: a word of length `n` with `m` parameters is an arrow `m -> n`,
//! and composition is simultaneous substitution.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors raised while building or combining parameter words.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("variable x{0} does not occur in the word")]
    MissingVariable(usize),
    #[error("first occurrence of x{1} precedes first occurrence of x{0}")]
    FirstOccurrenceOrder(usize, usize),
    #[error("symbol `{0}` is neither an alphabet letter nor one of x1..xm")]
    ForeignSymbol(String),
    #[error("word has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(
        "cannot substitute a word of length {inner_len} into a word with {outer_params} parameters"
    )]
    ArityMismatch {
        outer_params: usize,
        inner_len: usize,
    },
    #[error("words are over different alphabets")]
    AlphabetMismatch,
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("{count} words exceed the enumeration cap of {cap}")]
    SizeLimitExceeded { count: u128, cap: usize },
}

/// A finite alphabet of constant letters, disjoint from the variables `x<i>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(WordError::InvalidAlphabet(format!("bad token `{s}`")));
            }
            if parse_variable(s).is_some() {
                return Err(WordError::InvalidAlphabet(format!(
                    "`{s}` collides with a variable name"
                )));
            }
            if symbols[..i].contains(s) {
                return Err(WordError::InvalidAlphabet(format!(
                    "duplicate letter `{s}`"
                )));
            }
        }
        Ok(Self { symbols })
    }

    /// The one-letter alphabet `{0}`.
    pub fn zero() -> Self {
        Self {
            symbols: vec!["0".to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    fn index_of(&self, token: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == token)
    }
}

fn parse_variable(token: &str) -> Option<usize> {
    let digits = token.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// One position of a word. Constants sort before variables, each class by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Index into the alphabet.
    Const(usize),
    /// Variable `x_i`, 1-based.
    Var(usize),
}

/// A validated parameter word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamWord {
    alphabet: Arc<Alphabet>,
    params: usize,
    letters: Vec<Letter>,
}

impl ParamWord {
    /// Validates `letters` as an `params`-parameter word of length `len`.
    pub fn validate(
        alphabet: Arc<Alphabet>,
        len: usize,
        params: usize,
        letters: Vec<Letter>,
    ) -> Result<Self, WordError> {
        if letters.len() != len {
            return Err(WordError::LengthMismatch {
                expected: len,
                found: letters.len(),
            });
        }
        let mut first = vec![usize::MAX; params];
        for (pos, letter) in letters.iter().enumerate() {
            match *letter {
                Letter::Const(c) if c < alphabet.len() => {}
                Letter::Const(c) => return Err(WordError::ForeignSymbol(format!("#{c}"))),
                Letter::Var(i) if (1..=params).contains(&i) => {
                    if first[i - 1] == usize::MAX {
                        first[i - 1] = pos;
                    }
                }
                Letter::Var(i) => return Err(WordError::ForeignSymbol(format!("x{i}"))),
            }
        }
        if let Some(i) = first.iter().position(|&p| p == usize::MAX) {
            return Err(WordError::MissingVariable(i + 1));
        }
        if let Some(i) = first.windows(2).position(|w| w[0] > w[1]) {
            return Err(WordError::FirstOccurrenceOrder(i + 1, i + 2));
        }
        Ok(Self {
            alphabet,
            params,
            letters,
        })
    }

    /// Parses whitespace-separated tokens such as `x1 0 x1 x2`.
    ///
    /// The parameter count is the largest variable index that occurs.
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        let mut params = 0;
        for token in text.split_whitespace() {
            if let Some(c) = alphabet.index_of(token) {
                letters.push(Letter::Const(c));
            } else if let Some(i) = parse_variable(token) {
                params = params.max(i);
                letters.push(Letter::Var(i));
            } else {
                return Err(WordError::ForeignSymbol(token.to_string()));
            }
        }
        let len = letters.len();
        Self::validate(alphabet, len, params, letters)
    }

    /// The identity arrow `x1 x2 .. xm` of object `m`.
    pub fn identity(alphabet: Arc<Alphabet>, m: usize) -> Self {
        Self {
            alphabet,
            params: m,
            letters: (1..=m).map(Letter::Var).collect(),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Length `n`, the codomain object.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Parameter count `m`, the domain object.
    pub fn params(&self) -> usize {
        self.params
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Simultaneous substitution `self[v_1/x_1, .., v_m/x_m]`.
    pub fn substitute(&self, v: &ParamWord) -> Result<ParamWord, WordError> {
        if self.params != v.len() {
            return Err(WordError::ArityMismatch {
                outer_params: self.params,
                inner_len: v.len(),
            });
        }
        if self.alphabet != v.alphabet {
            return Err(WordError::AlphabetMismatch);
        }
        let letters: Vec<Letter> = self
            .letters
            .iter()
            .map(|l| match *l {
                Letter::Const(c) => Letter::Const(c),
                Letter::Var(i) => v.letters[i - 1],
            })
            .collect();
        let out = ParamWord {
            alphabet: Arc::clone(&self.alphabet),
            params: v.params,
            letters,
        };
        debug_assert!(
            ParamWord::validate(
                Arc::clone(&out.alphabet),
                out.len(),
                out.params,
                out.letters.clone()
            )
            .is_ok(),
            "substitution broke the first-occurrence order"
        );
        Ok(out)
    }

    /// Position sets `X_1..X_m` (1-based) of the variables.
    pub fn variable_blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.params];
        for (pos, letter) in self.letters.iter().enumerate() {
            if let Letter::Var(i) = letter {
                blocks[i - 1].push(pos + 1);
            }
        }
        blocks
    }

    /// Canonical byte key; byte order agrees with the derived letter order.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.letters.len() * 5);
        for letter in &self.letters {
            let (tag, idx) = match *letter {
                Letter::Const(c) => (0u8, c),
                Letter::Var(i) => (1u8, i),
            };
            out.push(tag);
            out.extend_from_slice(&(idx as u32).to_be_bytes());
        }
        out
    }
}

impl fmt::Display for ParamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match *letter {
                Letter::Const(c) => f.write_str(&self.alphabet.symbols[c])?,
                Letter::Var(v) => write!(f, "x{v}")?,
            }
        }
        Ok(())
    }
}

/// Number of `m`-parameter words of length `n` over an alphabet of size `a`.
///
/// Satisfies `W(n, m) = a·W(n-1, m) + m·W(n-1, m) + W(n-1, m-1)`.
pub fn count_words(alphabet_len: usize, n: usize, m: usize) -> u128 {
    if m > n {
        return 0;
    }
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (0..=m).rev() {
            let stay = row[j].saturating_mul((alphabet_len + j) as u128);
            let fresh = if j > 0 { row[j - 1] } else { 0 };
            row[j] = stay.saturating_add(fresh);
        }
    }
    row[m]
}

/// All words of `W^n_m(alphabet)` in canonical (lexicographic) order.
pub fn enumerate_words(
    alphabet: &Arc<Alphabet>,
    n: usize,
    m: usize,
    cap: usize,
) -> Result<Vec<ParamWord>, WordError> {
    let count = count_words(alphabet.len(), n, m);
    if count > cap as u128 {
        return Err(WordError::SizeLimitExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut prefix = Vec::with_capacity(n);
    extend_words(alphabet, n, m, 0, &mut prefix, &mut out);
    Ok(out)
}

fn extend_words(
    alphabet: &Arc<Alphabet>,
    n: usize,
    m: usize,
    introduced: usize,
    prefix: &mut Vec<Letter>,
    out: &mut Vec<ParamWord>,
) {
    let remaining = n - prefix.len();
    if remaining == 0 {
        if introduced == m {
            out.push(ParamWord {
                alphabet: Arc::clone(alphabet),
                params: m,
                letters: prefix.clone(),
            });
        }
        return;
    }
    // a position may repeat an old variable or constant only if enough room
    // is left to introduce the missing ones
    let slack = remaining > m - introduced;
    if slack {
        for c in 0..alphabet.len() {
            prefix.push(Letter::Const(c));
            extend_words(alphabet, n, m, introduced, prefix, out);
            prefix.pop();
        }
        for i in 1..=introduced {
            prefix.push(Letter::Var(i));
            extend_words(alphabet, n, m, introduced, prefix, out);
            prefix.pop();
        }
    }
    if introduced < m {
        prefix.push(Letter::Var(introduced + 1));
        extend_words(alphabet, n, m, introduced + 1, prefix, out);
        prefix.pop();
    }
}
