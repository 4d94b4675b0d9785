use std::collections::HashMap;
use thiserror::Error;

/// Index of a symbol within an [`Alphabet`].
pub type Symbol = usize;

/// A word is a sequence of symbol indices; the owning alphabet gives labels.
pub type Word = Vec<Symbol>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("symbol label `$` is reserved for convolution padding")]
    ReservedPadding,
    #[error("empty symbol label")]
    EmptyLabel,
    #[error("duplicate symbol label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown symbol label `{0}`")]
    UnknownLabel(String),
    #[error("cannot parse `{0}` as a word over this alphabet")]
    Unparseable(String),
    #[error("invalid involution: {0}")]
    BadInvolution(String),
    #[error("label `{0}` appears in both alphabets with different roles")]
    MergeConflict(String),
}

/// An ordered set of opaque symbol labels, with an optional formal-inverse
/// pairing (a self-inverse bijection on symbols).
///
/// The declared order is the order used for shortlex enumeration everywhere.
/// The label `$` is reserved: it marks padding inside convolution alphabets
/// and is rejected in user alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    involution: Option<Vec<usize>>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(AlphabetError::EmptyLabel);
            }
            if l == "$" {
                return Err(AlphabetError::ReservedPadding);
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(AlphabetError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Alphabet { labels, index, involution: None })
    }

    /// Internal constructor for convolution alphabets, which are allowed to
    /// mention `$` inside composite labels like `(a,$)`.
    pub(crate) fn new_unchecked(labels: Vec<String>) -> Self {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            index.insert(l.clone(), i);
        }
        Alphabet { labels, index, involution: None }
    }

    /// Declares the formal-inverse pairing by label pairs. Every symbol must
    /// be covered (self-paired symbols are allowed) for the involution to be
    /// total; pairs must be symmetric.
    pub fn set_involution_pairs(&mut self, pairs: &[(usize, usize)]) -> Result<(), AlphabetError> {
        let n = self.labels.len();
        let mut inv = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(AlphabetError::BadInvolution("pair out of range".into()));
            }
            if inv[a] == b && inv[b] == a {
                continue; // consistent restatement, e.g. both (a,b) and (b,a)
            }
            if inv[a] != usize::MAX || inv[b] != usize::MAX {
                return Err(AlphabetError::BadInvolution(format!(
                    "symbol `{}` paired twice",
                    self.labels[a]
                )));
            }
            inv[a] = b;
            inv[b] = a;
        }
        if inv.iter().any(|&x| x == usize::MAX) {
            return Err(AlphabetError::BadInvolution("pairing does not cover all symbols".into()));
        }
        self.involution = Some(inv);
        Ok(())
    }

    pub(crate) fn set_involution_raw(&mut self, inv: Option<Vec<usize>>) {
        self.involution = inv;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, s: Symbol) -> &str {
        &self.labels[s]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lookup(&self, label: &str) -> Option<Symbol> {
        self.index.get(label).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.labels.len()
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    /// True when a total formal-inverse pairing has been declared.
    pub fn has_involution(&self) -> bool {
        self.involution.is_some()
    }

    /// The formal inverse of a symbol, when an involution is declared.
    pub fn inverse_symbol(&self, s: Symbol) -> Option<Symbol> {
        self.involution.as_ref().map(|inv| inv[s])
    }

    /// The formal inverse of a word (reversed, letters inverted).
    pub fn inverse_word(&self, w: &[Symbol]) -> Option<Word> {
        let inv = self.involution.as_ref()?;
        Some(w.iter().rev().map(|&s| inv[s]).collect())
    }

    /// True when all labels are single characters, so words render compactly.
    fn single_char(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders a word; empty words render as `ε`. Single-character alphabets
    /// concatenate labels, others join them with spaces.
    pub fn render(&self, w: &[Symbol]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let parts: Vec<&str> = w.iter().map(|&s| self.label(s)).collect();
        if self.single_char() {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    /// Parses a rendered word. Accepts `ε` or the empty string for the empty
    /// word, whitespace-separated labels, or (when unambiguous) a
    /// concatenation of single-character labels.
    pub fn parse_word(&self, s: &str) -> Result<Word, AlphabetError> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Vec::new());
        }
        if s.chars().any(char::is_whitespace) {
            return s
                .split_whitespace()
                .map(|tok| {
                    self.lookup(tok).ok_or_else(|| AlphabetError::UnknownLabel(tok.to_string()))
                })
                .collect();
        }
        if let Some(sym) = self.lookup(s) {
            return Ok(vec![sym]);
        }
        let mut out = Vec::new();
        for c in s.chars() {
            match self.lookup(&c.to_string()) {
                Some(sym) => out.push(sym),
                None => return Err(AlphabetError::Unparseable(s.to_string())),
            }
        }
        Ok(out)
    }

    /// Union by label. Labels present in both alphabets are identified; the
    /// result keeps `left`'s order followed by `right`'s new labels. Returns
    /// the merged alphabet and the symbol maps of each side into it.
    ///
    /// The merged involution is kept when the pairings of both sides are
    /// compatible and jointly total; otherwise the merged alphabet has none.
    pub fn merged(
        left: &Alphabet,
        right: &Alphabet,
    ) -> Result<(Alphabet, Vec<Symbol>, Vec<Symbol>), AlphabetError> {
        let mut labels = left.labels.clone();
        let mut index = left.index.clone();
        let left_map: Vec<Symbol> = (0..left.len()).collect();
        let mut right_map = Vec::with_capacity(right.len());
        for l in &right.labels {
            match index.get(l) {
                Some(&i) => right_map.push(i),
                None => {
                    labels.push(l.clone());
                    index.insert(l.clone(), labels.len() - 1);
                    right_map.push(labels.len() - 1);
                }
            }
        }
        let n = labels.len();
        let mut inv = vec![usize::MAX; n];
        let mut ok = true;
        let mut record = |a: usize, b: usize, ok: &mut bool| {
            if inv[a] == usize::MAX && (inv[b] == usize::MAX || inv[b] == a) {
                inv[a] = b;
                inv[b] = a;
            } else if inv[a] != b {
                *ok = false;
            }
        };
        if let Some(li) = &left.involution {
            for s in 0..left.len() {
                record(left_map[s], left_map[li[s]], &mut ok);
            }
        }
        if let Some(ri) = &right.involution {
            for s in 0..right.len() {
                record(right_map[s], right_map[ri[s]], &mut ok);
            }
        }
        let involution = if ok && inv.iter().all(|&x| x != usize::MAX) { Some(inv) } else { None };
        let mut merged = Alphabet { labels, index, involution: None };
        merged.involution = involution;
        Ok((merged, left_map, right_map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicate_labels() {
        assert!(matches!(Alphabet::new(["a", "$"]), Err(AlphabetError::ReservedPadding)));
        assert!(matches!(
            Alphabet::new(["a", "a"]),
            Err(AlphabetError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn involution_must_cover_all_symbols() {
        let mut al = Alphabet::new(["a", "A", "c"]).unwrap();
        assert!(al.set_involution_pairs(&[(0, 1)]).is_err());
        al.set_involution_pairs(&[(0, 1), (2, 2)]).unwrap();
        assert_eq!(al.inverse_symbol(0), Some(1));
        assert_eq!(al.inverse_word(&[0, 0, 2]), Some(vec![2, 1, 1]));
    }

    #[test]
    fn word_rendering_round_trips() {
        let al = Alphabet::new(["a", "A", "b", "B"]).unwrap();
        let w = vec![0, 2, 1];
        assert_eq!(al.render(&w), "abA");
        assert_eq!(al.parse_word("abA").unwrap(), w);
        assert_eq!(al.parse_word("ε").unwrap(), Vec::<Symbol>::new());

        let multi = Alphabet::new(["a", "A", "a2"]).unwrap();
        let w = vec![2, 0];
        assert_eq!(multi.render(&w), "a2 a");
        assert_eq!(multi.parse_word("a2 a").unwrap(), w);
    }

    #[test]
    fn merge_identifies_shared_labels() {
        let a = Alphabet::new(["a", "A"]).unwrap();
        let b = Alphabet::new(["a", "A", "a2"]).unwrap();
        let (m, la, rb) = Alphabet::merged(&a, &b).unwrap();
        assert_eq!(m.labels(), &["a".to_string(), "A".into(), "a2".into()]);
        assert_eq!(la, vec![0, 1]);
        assert_eq!(rb, vec![0, 1, 2]);
    }
}
