//! One-dimensional substitutions, level-n letters and language enumeration.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::symbolic::{Alphabet, Dimension, Pattern, Subshift, Symbol};
use crate::{Error, Result};

/// Expansions longer than this abort saturation instead of exhausting memory.
const MAX_EXPANSION: usize = 1 << 24;

/// Concurrent-read cache of level expansions keyed by `(letter, level)`.
#[derive(Default)]
struct ExpansionCache(RwLock<HashMap<(Symbol, usize), Arc<Vec<Symbol>>>>);

impl Clone for ExpansionCache {
    fn clone(&self) -> Self {
        ExpansionCache::default()
    }
}

impl fmt::Debug for ExpansionCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.read().map(|m| m.len()).unwrap_or(0);
        write!(f, "ExpansionCache({n} entries)")
    }
}

/// A non-erasing substitution `ψ: A → A⁺` with at least one growing letter.
#[derive(Clone, Debug)]
pub struct Substitution1D {
    alphabet: Alphabet,
    rules: Vec<Vec<Symbol>>,
    cache: ExpansionCache,
}

impl PartialEq for Substitution1D {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.rules == other.rules
    }
}

impl Eq for Substitution1D {}

/// `ψ^k(base)` with its expansion shared from the cache.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLetter {
    pub base: Symbol,
    pub level: usize,
    expansion: Arc<Vec<Symbol>>,
}

impl LevelLetter {
    pub fn expansion(&self) -> &[Symbol] {
        &self.expansion
    }

    pub fn pattern(&self) -> Pattern {
        Pattern::word(self.expansion.to_vec())
    }

    pub fn len(&self) -> usize {
        self.expansion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expansion.is_empty()
    }
}

/// `M[i][j]` counts occurrences of letter `i` in `ψ(letter j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianizationMatrix {
    entries: Vec<Vec<u64>>,
}

impl AbelianizationMatrix {
    /// `entries[i][j]` counts letter `i` in the image of letter `j`.
    pub fn from_entries(entries: Vec<Vec<u64>>) -> Self {
        assert!(entries.iter().all(|r| r.len() == entries.len()), "square matrix");
        AbelianizationMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn column_sum(&self, col: usize) -> u64 {
        self.entries.iter().map(|r| r[col]).sum()
    }

    /// Smallest `k ≤ size²` with `M^k` entrywise positive.
    pub fn positive_power(&self) -> Option<usize> {
        let n = self.size();
        let support: Vec<Vec<bool>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let mut power = support.clone();
        for k in 1..=n * n {
            if power.iter().all(|r| r.iter().all(|&x| x)) {
                return Some(k);
            }
            let mut next = vec![vec![false; n]; n];
            for (i, row) in next.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell = (0..n).any(|l| power[i][l] && support[l][j]);
                }
            }
            power = next;
        }
        None
    }

    /// `M · v` over big integers.
    pub fn apply(&self, v: &[BigUint]) -> Vec<BigUint> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(BigUint::zero(), |acc, (&m, x)| acc + x * m)
            })
            .collect()
    }
}

impl Substitution1D {
    /// `rules[i]` is the image of the letter with index `i`.
    pub fn new(alphabet: Alphabet, rules: Vec<Vec<Symbol>>) -> Result<Self> {
        if rules.len() != alphabet.len() {
            let missing = alphabet
                .symbols()
                .nth(rules.len().min(alphabet.len()))
                .map(|s| alphabet.token(s).to_string())
                .unwrap_or_default();
            return Err(Error::MissingRule(missing));
        }
        for (i, image) in rules.iter().enumerate() {
            let token = alphabet.token(Symbol(i as u16)).to_string();
            if image.is_empty() {
                return Err(Error::EmptyImage(token));
            }
            if let Some(bad) = image.iter().find(|s| !alphabet.contains(**s)) {
                return Err(Error::UnknownLetter(format!("#{}", bad.0)));
            }
        }
        if rules.iter().all(|r| r.len() < 2) {
            return Err(Error::NoGrowth);
        }
        Ok(Substitution1D {
            alphabet,
            rules,
            cache: ExpansionCache::default(),
        })
    }

    /// Builds from `(letter, image word)` token pairs, e.g. `[("a","b"),("b","ab")]`.
    pub fn from_tokens(alphabet: Alphabet, rules: &[(&str, &str)]) -> Result<Self> {
        let mut images = vec![None; alphabet.len()];
        for (letter, image) in rules {
            let sym = alphabet.symbol(letter)?;
            images[sym.index()] = Some(alphabet.word(image)?.cells().to_vec());
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| Error::MissingRule(alphabet.token(Symbol(i as u16)).into())))
            .collect::<Result<Vec<_>>>()?;
        Substitution1D::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rule(&self, letter: Symbol) -> &[Symbol] {
        &self.rules[letter.index()]
    }

    pub fn rule_pattern(&self, letter: Symbol) -> Pattern {
        Pattern::word(self.rule(letter).to_vec())
    }

    pub fn rules(&self) -> &[Vec<Symbol>] {
        &self.rules
    }

    /// One application of ψ to a word.
    pub fn apply(&self, word: &[Symbol]) -> Vec<Symbol> {
        word.iter().flat_map(|&s| self.rule(s).iter().copied()).collect()
    }

    /// `ψ^k(letter)`, memoized per `(letter, level)`.
    pub fn expansion(&self, letter: Symbol, level: usize) -> Arc<Vec<Symbol>> {
        if let Some(hit) = self.cache.0.read().expect("cache lock").get(&(letter, level)) {
            return hit.clone();
        }
        let value = if level == 0 {
            vec![letter]
        } else {
            let mut out = Vec::new();
            for &child in self.rule(letter) {
                out.extend_from_slice(&self.expansion(child, level - 1));
            }
            out
        };
        let mut map = self.cache.0.write().expect("cache lock");
        map.entry((letter, level)).or_insert_with(|| Arc::new(value)).clone()
    }

    pub fn iterate(&self, letter: Symbol, level: usize) -> Pattern {
        Pattern::word(self.expansion(letter, level).to_vec())
    }

    pub fn level_letter(&self, base: Symbol, level: usize) -> LevelLetter {
        LevelLetter {
            base,
            level,
            expansion: self.expansion(base, level),
        }
    }

    /// `|ψ^k(letter)|` computed from the abelianization, without expanding.
    pub fn level_length(&self, letter: Symbol, level: usize) -> BigUint {
        let m = self.abelianization();
        let mut v: Vec<BigUint> = self
            .alphabet
            .symbols()
            .map(|s| BigUint::from(u8::from(s == letter)))
            .collect();
        for _ in 0..level {
            v = m.apply(&v);
        }
        v.into_iter().fold(BigUint::zero(), |a, b| a + b)
    }

    pub fn abelianization(&self) -> AbelianizationMatrix {
        let n = self.alphabet.len();
        let mut entries = vec![vec![0u64; n]; n];
        for (j, image) in self.rules.iter().enumerate() {
            for s in image {
                entries[s.index()][j] += 1;
            }
        }
        AbelianizationMatrix { entries }
    }

    pub fn is_primitive(&self) -> bool {
        self.abelianization().positive_power().is_some()
    }

    fn level_factors(&self, level: usize, len: usize) -> BTreeSet<Pattern> {
        let mut out = BTreeSet::new();
        for a in self.alphabet.symbols() {
            let e = self.expansion(a, level);
            if e.len() >= len {
                for w in e.windows(len) {
                    out.insert(Pattern::word(w.to_vec()));
                }
            }
        }
        out
    }

    /// Length-`m` factors of the subshift, by iterating until the factor set
    /// of the level-k letters stabilizes with every level-k letter at least
    /// `m` long. Requires primitivity.
    pub fn language(&self, len: usize) -> Result<BTreeSet<Pattern>> {
        self.language_capped(len, None)
    }

    /// As [`Substitution1D::language`]; `level_cap` bounds the iteration and
    /// allows non-primitive substitutions (the factors at the cap are
    /// returned if no stabilization occurs first).
    pub fn language_capped(&self, len: usize, level_cap: Option<usize>) -> Result<BTreeSet<Pattern>> {
        if len == 0 {
            return Err(Error::Invalid("word length must be >= 1".into()));
        }
        if level_cap.is_none() && !self.is_primitive() {
            return Err(Error::SaturationNotGuaranteed);
        }
        let mut prev: Option<(BTreeSet<Pattern>, bool)> = None;
        let mut level = 0;
        loop {
            let long_enough = self
                .alphabet
                .symbols()
                .all(|a| self.expansion(a, level).len() >= len);
            let current = self.level_factors(level, len);
            if let Some((p, p_long)) = &prev {
                if *p_long && *p == current {
                    return Ok(current);
                }
            }
            if Some(level) == level_cap {
                return Ok(current);
            }
            if self
                .alphabet
                .symbols()
                .any(|a| self.expansion(a, level).len() > MAX_EXPANSION)
            {
                return Err(Error::SaturationCapReached(level));
            }
            prev = Some((current, long_enough));
            level += 1;
        }
    }

    /// All two-letter factors of level letters, as the closure of the
    /// two-letter factors of `ψ(a)` under `uv ↦ 2-factors of ψ(u)ψ(v)`.
    pub fn two_letter_factors(&self) -> BTreeSet<[Symbol; 2]> {
        let mut found: BTreeSet<[Symbol; 2]> = BTreeSet::new();
        let mut todo = Vec::new();
        for image in &self.rules {
            for w in image.windows(2) {
                if found.insert([w[0], w[1]]) {
                    todo.push([w[0], w[1]]);
                }
            }
        }
        while let Some([u, v]) = todo.pop() {
            let word = self.apply(&[u, v]);
            for w in word.windows(2) {
                if found.insert([w[0], w[1]]) {
                    todo.push([w[0], w[1]]);
                }
            }
        }
        found
    }

    /// Length-`m` factors by an exact route independent of saturation: every
    /// factor lies in `ψ^k(c)` or `ψ^k(uv)` for a two-letter factor `uv` once
    /// every level-k letter has length at least `m − 1`.
    pub fn language_exact(&self, len: usize) -> Result<BTreeSet<Pattern>> {
        if len == 0 {
            return Err(Error::Invalid("word length must be >= 1".into()));
        }
        if !self.is_primitive() {
            return Err(Error::SaturationNotGuaranteed);
        }
        if len == 1 {
            return Ok(self
                .alphabet
                .symbols()
                .map(|s| Pattern::word(vec![s]))
                .collect());
        }
        let need = len - 1;
        let mut level = 0;
        while self
            .alphabet
            .symbols()
            .any(|a| self.expansion(a, level).len() < need)
        {
            level += 1;
        }
        let mut out = self.level_factors(level, len);
        for [u, v] in self.two_letter_factors() {
            let mut joined = self.expansion(u, level).to_vec();
            joined.extend_from_slice(&self.expansion(v, level));
            for w in joined.windows(len) {
                out.insert(Pattern::word(w.to_vec()));
            }
        }
        Ok(out)
    }
}

impl Subshift for Substitution1D {
    fn dimension(&self) -> Dimension {
        Dimension::One
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn factors(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        self.language(extent[0])
    }

    fn admits(&self, pattern: &Pattern) -> Result<bool> {
        if pattern.dimension() != Dimension::One {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 2,
            });
        }
        Ok(self.language(pattern.width())?.contains(pattern))
    }

    fn factors_independent(&self, extent: [usize; 2]) -> Result<BTreeSet<Pattern>> {
        self.language_exact(extent[0])
    }
}

/// The Fibonacci substitution `a ↦ b, b ↦ ab`.
pub fn fibonacci() -> Substitution1D {
    let alphabet = Alphabet::new(["a", "b"]).expect("valid alphabet");
    Substitution1D::from_tokens(alphabet, &[("a", "b"), ("b", "ab")]).expect("valid rules")
}
