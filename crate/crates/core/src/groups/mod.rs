//! Evaluable group models.
//!
//! A [`GroupModel`] couples a concrete group implementation ([`GroupKind`])
//! with a marked generating alphabet and the image of each symbol, so words
//! over the alphabet evaluate to [`Element`]s.  Distances are taken in the
//! directed Cayley graph of the marked generators: there is an edge
//! `g -> g·s̄` for every marked symbol `s`.  When the alphabet is closed
//! under inversion this is the usual word metric; for one-sided alphabets it
//! is the natural directed refinement (and need not be symmetric).
//!
//! Supported kinds: finitely generated free groups, free abelian groups,
//! finite groups given by a multiplication table, direct products, and
//! free-by-finite extensions given by a coset rewriting table (see
//! [`VfPresentation`]).

mod element;
mod metric;
mod vfree;

pub use element::{
    free_inverse, is_reduced, reduce_in_place, reduced_concat, Element, FreeLetter,
};
pub use metric::{
    compare_generating_sets, geodesic_distance, DistanceOracle, MetricShortcut, PathTrace,
};
pub use vfree::{VfGenerator, VfPresentation};

use crate::fsa::{Alphabet, AlphabetError, Symbol, Word};
use thiserror::Error;

/// Errors raised while building or querying group models.
#[derive(Debug, Error)]
pub enum GroupError {
    /// The definition data does not describe a group of the requested kind.
    #[error("invalid group definition: {0}")]
    InvalidDefinition(String),
    /// A label was not found in the model's marked alphabet.
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    /// Two models that were expected to present the same group have
    /// different underlying kinds.
    #[error("group models have different underlying kinds")]
    KindMismatch,
    /// A search radius cap was reached before the query could be answered.
    #[error("distance search exceeded the radius cap {cap}")]
    ExceedsCap { cap: u32 },
    /// A ball enumeration grew past its node budget.
    #[error("ball enumeration exceeded the node cap {cap}")]
    BallCapExceeded { cap: usize },
    /// The requested operation is not available for this group kind.
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    /// Alphabet construction failed.
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

/// Multiplication table of a finite group.
///
/// Index `0` must be the identity.  Construction checks closure,
/// associativity, and the existence of inverses, so a value of this type is
/// always a genuine group.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteTable {
    order: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

/// Largest table order accepted; associativity is checked exhaustively.
pub const MAX_FINITE_ORDER: usize = 256;

impl FiniteTable {
    /// Build from explicit rows (`rows[a][b]` = product `a·b`) and optional
    /// element labels (defaults: `e`, `g1`, `g2`, ...).
    pub fn new(rows: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::InvalidDefinition(
                "multiplication table is empty".into(),
            ));
        }
        if n > MAX_FINITE_ORDER {
            return Err(GroupError::InvalidDefinition(format!(
                "multiplication table of order {n} exceeds the supported maximum {MAX_FINITE_ORDER}"
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidDefinition(format!(
                    "row {a} has length {} but the table has order {n}",
                    row.len()
                )));
            }
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::InvalidDefinition(format!(
                        "entry ({a},{b}) = {v} is out of range"
                    )));
                }
                table.push(v as u32);
            }
        }
        for x in 0..n {
            if table[x] != x as u32 || table[x * n] != x as u32 {
                return Err(GroupError::InvalidDefinition(
                    "index 0 must be the identity element".into(),
                ));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(GroupError::InvalidDefinition(format!(
                            "multiplication is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 && table[b * n + a] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(GroupError::InvalidDefinition(format!(
                    "element {a} has no inverse"
                )));
            }
        }
        let labels = match labels {
            Some(ls) => {
                if ls.len() != n {
                    return Err(GroupError::InvalidDefinition(format!(
                        "{} labels supplied for a table of order {n}",
                        ls.len()
                    )));
                }
                ls
            }
            None => (0..n)
                .map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") })
                .collect(),
        };
        Ok(FiniteTable {
            order: n,
            table,
            inv,
            labels,
        })
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Product of two element indices.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    /// Inverse of an element index.
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// Label of an element index.
    pub fn label(&self, a: u32) -> &str {
        &self.labels[a as usize]
    }
}

/// The concrete group underlying a model.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    /// Free group of the given rank, elements as reduced words.
    Free { rank: usize },
    /// Free abelian group of the given rank, elements as exponent vectors.
    FreeAbelian { rank: usize },
    /// Finite group with an explicit multiplication table.
    Finite(FiniteTable),
    /// Direct product of two groups.
    Product(Box<GroupKind>, Box<GroupKind>),
    /// Free-by-finite extension described by a coset rewriting table.
    ByFinite(VfPresentation),
}

impl GroupKind {
    /// Identity element of this kind.
    pub fn identity(&self) -> Element {
        match self {
            GroupKind::Free { .. } => Element::Free(Vec::new()),
            GroupKind::FreeAbelian { rank } => Element::Abelian(vec![0; *rank]),
            GroupKind::Finite(_) => Element::Finite(0),
            GroupKind::Product(a, b) => {
                Element::Pair(Box::new(a.identity()), Box::new(b.identity()))
            }
            GroupKind::ByFinite(_) => Element::ByFinite {
                word: Vec::new(),
                coset: 0,
            },
        }
    }

    fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (GroupKind::Free { .. }, Element::Free(x), Element::Free(y)) => {
                Element::Free(reduced_concat(x, y))
            }
            (GroupKind::FreeAbelian { .. }, Element::Abelian(x), Element::Abelian(y)) => {
                Element::Abelian(x.iter().zip(y.iter()).map(|(p, q)| p + q).collect())
            }
            (GroupKind::Finite(t), Element::Finite(x), Element::Finite(y)) => {
                Element::Finite(t.mul(*x, *y))
            }
            (GroupKind::Product(ka, kb), Element::Pair(x1, y1), Element::Pair(x2, y2)) => {
                Element::Pair(
                    Box::new(ka.multiply(x1, x2)),
                    Box::new(kb.multiply(y1, y2)),
                )
            }
            (
                GroupKind::ByFinite(p),
                Element::ByFinite { word: w1, coset: c1 },
                Element::ByFinite { word: w2, coset: c2 },
            ) => {
                let (word, coset) = p.multiply(w1, *c1, w2, *c2);
                Element::ByFinite { word, coset }
            }
            _ => panic!("element does not belong to this group model"),
        }
    }

    fn invert(&self, a: &Element) -> Element {
        match (self, a) {
            (GroupKind::Free { .. }, Element::Free(x)) => Element::Free(free_inverse(x)),
            (GroupKind::FreeAbelian { .. }, Element::Abelian(x)) => {
                Element::Abelian(x.iter().map(|v| -v).collect())
            }
            (GroupKind::Finite(t), Element::Finite(x)) => Element::Finite(t.inv(*x)),
            (GroupKind::Product(ka, kb), Element::Pair(x, y)) => {
                Element::Pair(Box::new(ka.invert(x)), Box::new(kb.invert(y)))
            }
            (GroupKind::ByFinite(p), Element::ByFinite { word, coset }) => {
                let (w, c) = p.invert(word, *coset);
                Element::ByFinite { word: w, coset: c }
            }
            _ => panic!("element does not belong to this group model"),
        }
    }

    fn contains(&self, e: &Element) -> bool {
        match (self, e) {
            (GroupKind::Free { rank }, Element::Free(w)) => {
                is_reduced(w) && w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank)
            }
            (GroupKind::FreeAbelian { rank }, Element::Abelian(v)) => v.len() == *rank,
            (GroupKind::Finite(t), Element::Finite(i)) => (*i as usize) < t.order(),
            (GroupKind::Product(a, b), Element::Pair(l, r)) => a.contains(l) && b.contains(r),
            (GroupKind::ByFinite(p), Element::ByFinite { word, coset }) => {
                is_reduced(word)
                    && word
                        .iter()
                        .all(|l| *l != 0 && l.unsigned_abs() as usize <= p.free_rank())
                    && (*coset as usize) < p.cosets()
            }
            _ => false,
        }
    }
}

/// Default letter names for free and free-abelian ranks: generator `i` is the
/// `i`-th lowercase letter, its inverse the matching uppercase letter.
fn standard_letter_labels(rank: usize) -> Result<Vec<String>, GroupError> {
    if rank == 0 || rank > 26 {
        return Err(GroupError::InvalidDefinition(format!(
            "rank {rank} is outside the supported range 1..=26"
        )));
    }
    let mut labels = Vec::with_capacity(2 * rank);
    for i in 0..rank {
        let ch = (b'a' + i as u8) as char;
        labels.push(ch.to_string());
        labels.push(ch.to_ascii_uppercase().to_string());
    }
    Ok(labels)
}

fn standard_letter_name(l: FreeLetter) -> String {
    let ch = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
    if l > 0 {
        ch.to_string()
    } else {
        ch.to_ascii_uppercase().to_string()
    }
}

/// A group together with a marked generating alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupModel {
    kind: GroupKind,
    alphabet: Alphabet,
    images: Vec<Element>,
    shortcut: Option<MetricShortcut>,
}

impl GroupModel {
    /// Free group of the given rank with alphabet `a, A, b, B, ...`
    /// (generators and inverses interleaved).
    pub fn free(rank: usize) -> Result<Self, GroupError> {
        let labels = standard_letter_labels(rank)?;
        let mut alphabet = Alphabet::new(labels)?;
        let pairs: Vec<(usize, usize)> = (0..rank).map(|i| (2 * i, 2 * i + 1)).collect();
        alphabet.set_involution_pairs(&pairs)?;
        let mut images = Vec::with_capacity(2 * rank);
        for i in 0..rank {
            images.push(Element::Free(vec![i as FreeLetter + 1]));
            images.push(Element::Free(vec![-(i as FreeLetter) - 1]));
        }
        Self::custom(GroupKind::Free { rank }, alphabet, images)
    }

    /// Free abelian group of the given rank with the same alphabet
    /// conventions as [`GroupModel::free`].
    pub fn free_abelian(rank: usize) -> Result<Self, GroupError> {
        let labels = standard_letter_labels(rank)?;
        let mut alphabet = Alphabet::new(labels)?;
        let pairs: Vec<(usize, usize)> = (0..rank).map(|i| (2 * i, 2 * i + 1)).collect();
        alphabet.set_involution_pairs(&pairs)?;
        let mut images = Vec::with_capacity(2 * rank);
        for i in 0..rank {
            let mut plus = vec![0i64; rank];
            plus[i] = 1;
            let mut minus = vec![0i64; rank];
            minus[i] = -1;
            images.push(Element::Abelian(plus));
            images.push(Element::Abelian(minus));
        }
        Self::custom(GroupKind::FreeAbelian { rank }, alphabet, images)
    }

    /// Free abelian group with an explicitly chosen marked alphabet: each
    /// mark is a label together with the exponent vector it evaluates to.
    /// An involution is inferred when the marks pair off under negation.
    pub fn free_abelian_marked(
        rank: usize,
        marks: &[(&str, Vec<i64>)],
    ) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::InvalidDefinition("rank 0 is not supported".into()));
        }
        let labels: Vec<&str> = marks.iter().map(|(l, _)| *l).collect();
        let mut alphabet = Alphabet::new(labels)?;
        let mut images = Vec::with_capacity(marks.len());
        for (label, v) in marks {
            if v.len() != rank {
                return Err(GroupError::InvalidDefinition(format!(
                    "mark {label:?} has vector length {}, expected {rank}",
                    v.len()
                )));
            }
            images.push(Element::Abelian(v.clone()));
        }
        if let Some(pairs) = infer_involution(&images, |e| {
            let Element::Abelian(v) = e else { unreachable!() };
            Element::Abelian(v.iter().map(|x| -x).collect())
        }) {
            alphabet.set_involution_pairs(&pairs)?;
        }
        Self::custom(GroupKind::FreeAbelian { rank }, alphabet, images)
    }

    /// Free group with an explicitly chosen marked alphabet of reduced words.
    pub fn free_marked(
        rank: usize,
        marks: &[(&str, Vec<FreeLetter>)],
    ) -> Result<Self, GroupError> {
        let labels: Vec<&str> = marks.iter().map(|(l, _)| *l).collect();
        let mut alphabet = Alphabet::new(labels)?;
        let kind = GroupKind::Free { rank };
        let mut images = Vec::with_capacity(marks.len());
        for (label, w) in marks {
            let e = Element::Free(w.clone());
            if !kind.contains(&e) {
                return Err(GroupError::InvalidDefinition(format!(
                    "mark {label:?} is not a reduced word in rank {rank}"
                )));
            }
            images.push(e);
        }
        if let Some(pairs) = infer_involution(&images, |e| {
            let Element::Free(w) = e else { unreachable!() };
            Element::Free(free_inverse(w))
        }) {
            alphabet.set_involution_pairs(&pairs)?;
        }
        Self::custom(kind, alphabet, images)
    }

    /// Finite group; the marked alphabet is every non-identity element,
    /// labelled by the table's element labels.
    pub fn finite(rows: &[Vec<usize>], labels: Option<Vec<String>>) -> Result<Self, GroupError> {
        let table = FiniteTable::new(rows, labels)?;
        let n = table.order();
        let labels: Vec<String> = (1..n).map(|i| table.label(i as u32).to_string()).collect();
        let mut alphabet = Alphabet::new(labels)?;
        let pairs: Vec<(usize, usize)> = (1..n)
            .map(|i| (i - 1, table.inv(i as u32) as usize - 1))
            .collect();
        alphabet.set_involution_pairs(&pairs)?;
        let images: Vec<Element> = (1..n).map(|i| Element::Finite(i as u32)).collect();
        Self::custom(GroupKind::Finite(table), alphabet, images)
    }

    /// Direct product whose alphabet is the disjoint union of the factor
    /// alphabets; a left symbol evaluates to `(s̄, 1)` and a right symbol to
    /// `(1, t̄)`.  Distances add across the factors.
    pub fn product_union(left: &GroupModel, right: &GroupModel) -> Result<Self, GroupError> {
        let mut labels: Vec<&str> = Vec::new();
        labels.extend(left.alphabet.symbols().map(|s| left.alphabet.label(s)));
        labels.extend(right.alphabet.symbols().map(|s| right.alphabet.label(s)));
        let mut alphabet = Alphabet::new(labels).map_err(|e| match e {
            AlphabetError::DuplicateLabel(l) => GroupError::InvalidDefinition(format!(
                "factor alphabets share the label {l:?}; relabel one factor"
            )),
            other => GroupError::Alphabet(other),
        })?;
        let off = left.alphabet.len();
        if left.alphabet.has_involution() && right.alphabet.has_involution() {
            let mut pairs = Vec::new();
            for s in left.alphabet.symbols() {
                pairs.push((s, left.alphabet.inverse_symbol(s).unwrap()));
            }
            for s in right.alphabet.symbols() {
                pairs.push((s + off, right.alphabet.inverse_symbol(s).unwrap() + off));
            }
            alphabet.set_involution_pairs(&pairs)?;
        }
        let kind = GroupKind::Product(
            Box::new(left.kind.clone()),
            Box::new(right.kind.clone()),
        );
        let rid = right.kind.identity();
        let lid = left.kind.identity();
        let mut images = Vec::new();
        for img in &left.images {
            images.push(Element::Pair(Box::new(img.clone()), Box::new(rid.clone())));
        }
        for img in &right.images {
            images.push(Element::Pair(Box::new(lid.clone()), Box::new(img.clone())));
        }
        let mut model = Self::custom(kind, alphabet, images)?;
        model.shortcut = match (&left.shortcut, &right.shortcut) {
            (Some(a), Some(b)) => Some(MetricShortcut::SumPair(
                Box::new(a.clone()),
                Box::new(b.clone()),
            )),
            _ => None,
        };
        Ok(model)
    }

    /// Direct product whose alphabet is the padded-pair alphabet of the two
    /// factor alphabets; the symbol `(s,t)` evaluates to `(s̄, t̄)` and padded
    /// symbols leave the padded side fixed.  Distances combine as the maximum
    /// across the factors.
    pub fn product_convolution(left: &GroupModel, right: &GroupModel) -> Result<Self, GroupError> {
        let ca = crate::fsa::ConvolutionAlphabet::new(&left.alphabet, &right.alphabet)?;
        let alphabet = ca.alphabet().clone();
        let lid = left.kind.identity();
        let rid = right.kind.identity();
        let mut images = Vec::with_capacity(alphabet.len());
        for s in alphabet.symbols() {
            let (l, r) = ca.components(s);
            let li = match l {
                Some(sym) => left.images[sym].clone(),
                None => lid.clone(),
            };
            let ri = match r {
                Some(sym) => right.images[sym].clone(),
                None => rid.clone(),
            };
            images.push(Element::Pair(Box::new(li), Box::new(ri)));
        }
        let kind = GroupKind::Product(
            Box::new(left.kind.clone()),
            Box::new(right.kind.clone()),
        );
        let mut model = Self::custom(kind, alphabet, images)?;
        model.shortcut = match (&left.shortcut, &right.shortcut) {
            (Some(a), Some(b)) => Some(MetricShortcut::MaxPair(
                Box::new(a.clone()),
                Box::new(b.clone()),
            )),
            _ => None,
        };
        Ok(model)
    }

    /// Free-by-finite extension.  The alphabet is the free part's letters and
    /// inverses followed by the non-trivial coset letters.
    pub fn by_finite(pres: VfPresentation) -> Result<Self, GroupError> {
        let rank = pres.free_rank();
        let mut labels = standard_letter_labels(rank)?;
        for i in 1..pres.cosets() {
            labels.push(pres.coset_label(i as u32).to_string());
        }
        let symbol_count = labels.len();
        let mut alphabet = Alphabet::new(labels)?;
        let mut images = Vec::with_capacity(symbol_count);
        for i in 0..rank {
            images.push(Element::ByFinite {
                word: vec![i as FreeLetter + 1],
                coset: 0,
            });
            images.push(Element::ByFinite {
                word: vec![-(i as FreeLetter) - 1],
                coset: 0,
            });
        }
        for i in 1..pres.cosets() {
            images.push(Element::ByFinite {
                word: Vec::new(),
                coset: i as u32,
            });
        }
        // Pair every letter with the letter evaluating to its inverse, when
        // such a letter exists for all of them.
        let kind = GroupKind::ByFinite(pres);
        if let Some(pairs) = infer_involution(&images, |e| kind.invert(e)) {
            alphabet.set_involution_pairs(&pairs)?;
        }
        Self::custom(kind, alphabet, images)
    }

    /// Build a model from explicit parts, validating that every image lies in
    /// the group and detecting an exact metric evaluator when the marking is
    /// a standard one.
    pub fn custom(
        kind: GroupKind,
        alphabet: Alphabet,
        images: Vec<Element>,
    ) -> Result<Self, GroupError> {
        if images.len() != alphabet.len() {
            return Err(GroupError::InvalidDefinition(format!(
                "{} images supplied for an alphabet of {} symbols",
                images.len(),
                alphabet.len()
            )));
        }
        for (s, img) in images.iter().enumerate() {
            if !kind.contains(img) {
                return Err(GroupError::InvalidDefinition(format!(
                    "image of {:?} does not lie in the group",
                    alphabet.label(s)
                )));
            }
        }
        if let Some(pairs) = alphabet_involution_pairs(&alphabet) {
            for (s, t) in pairs {
                if kind.multiply(&images[s], &images[t]) != kind.identity() {
                    return Err(GroupError::InvalidDefinition(format!(
                        "{:?} and {:?} are marked as formal inverses but their images are not inverse",
                        alphabet.label(s),
                        alphabet.label(t)
                    )));
                }
            }
        }
        let shortcut = metric::detect_shortcut(&kind, &images);
        Ok(GroupModel {
            kind,
            alphabet,
            images,
            shortcut,
        })
    }

    /// Drop the exact metric evaluator so that all distance queries go
    /// through breadth-first search.  Intended for cross-checking.
    pub fn without_metric_shortcut(mut self) -> Self {
        self.shortcut = None;
        self
    }

    /// The underlying group.
    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    /// The marked alphabet.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Image of each marked symbol, indexed by symbol.
    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// True when distances are computed by a closed form rather than search.
    pub fn has_exact_metric(&self) -> bool {
        self.shortcut.is_some()
    }

    pub(crate) fn shortcut(&self) -> Option<&MetricShortcut> {
        self.shortcut.as_ref()
    }

    /// Identity element.
    pub fn identity(&self) -> Element {
        self.kind.identity()
    }

    /// Group product.  Panics if the elements are not from this kind.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.kind.multiply(a, b)
    }

    /// Group inverse.  Panics if the element is not from this kind.
    pub fn invert(&self, a: &Element) -> Element {
        self.kind.invert(a)
    }

    /// Image of a single symbol.
    pub fn evaluate_symbol(&self, s: Symbol) -> &Element {
        &self.images[s]
    }

    /// Evaluate a word over the marked alphabet.
    pub fn evaluate(&self, w: &[Symbol]) -> Element {
        let mut acc = self.identity();
        for &s in w {
            acc = self.kind.multiply(&acc, &self.images[s]);
        }
        acc
    }

    /// Parse a word with the model's alphabet and evaluate it.
    pub fn evaluate_str(&self, text: &str) -> Result<Element, GroupError> {
        let w = self
            .alphabet
            .parse_word(text)
            .map_err(|_| GroupError::UnknownSymbol(text.to_string()))?;
        Ok(self.evaluate(&w))
    }

    /// Membership test for values produced elsewhere (deserialization).
    pub fn contains(&self, e: &Element) -> bool {
        self.kind.contains(e)
    }

    /// Human-readable form of an element.
    pub fn render_element(&self, e: &Element) -> String {
        render_in(&self.kind, e)
    }

    /// Render a word over the marked alphabet.
    pub fn render_word(&self, w: &[Symbol]) -> String {
        self.alphabet.render(w)
    }

    /// Elements whose images determine a homomorphism out of this group: the
    /// positive generators for free and free abelian kinds, every
    /// non-identity element for finite kinds, and the lifted factor bases for
    /// products.
    pub fn hom_basis(&self) -> Result<Vec<Element>, GroupError> {
        basis_of(&self.kind)
    }

    /// Write an element as a product of powers of [`hom_basis`] entries, as
    /// `(basis index, exponent)` factors in order.
    ///
    /// [`hom_basis`]: GroupModel::hom_basis
    pub fn decompose(&self, e: &Element) -> Result<Vec<(usize, i64)>, GroupError> {
        decompose_in(&self.kind, e)
    }
}

/// Involution pairs currently set on an alphabet, if any.
fn alphabet_involution_pairs(alphabet: &Alphabet) -> Option<Vec<(usize, usize)>> {
    if !alphabet.has_involution() {
        return None;
    }
    let mut pairs = Vec::new();
    for s in alphabet.symbols() {
        let t = alphabet.inverse_symbol(s).unwrap();
        if s <= t {
            pairs.push((s, t));
        }
    }
    Some(pairs)
}

/// Pair images with their inverses.  Returns `None` unless every image has a
/// unique partner (possibly itself).
fn infer_involution(
    images: &[Element],
    invert: impl Fn(&Element) -> Element,
) -> Option<Vec<(usize, usize)>> {
    let mut partner = vec![usize::MAX; images.len()];
    for (i, img) in images.iter().enumerate() {
        if partner[i] != usize::MAX {
            continue;
        }
        let inv = invert(img);
        let j = images
            .iter()
            .enumerate()
            .position(|(j, other)| partner[j] == usize::MAX && *other == inv)?;
        partner[i] = j;
        partner[j] = i;
    }
    let mut pairs = Vec::new();
    for (i, &j) in partner.iter().enumerate() {
        if i <= j {
            pairs.push((i, j));
        }
    }
    Some(pairs)
}

fn render_in(kind: &GroupKind, e: &Element) -> String {
    match (kind, e) {
        (GroupKind::Free { .. }, Element::Free(w)) => {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.iter().map(|&l| standard_letter_name(l)).collect()
            }
        }
        (GroupKind::FreeAbelian { .. }, Element::Abelian(v)) => {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("({})", parts.join(","))
        }
        (GroupKind::Finite(t), Element::Finite(i)) => t.label(*i).to_string(),
        (GroupKind::Product(ka, kb), Element::Pair(l, r)) => {
            format!("({},{})", render_in(ka, l), render_in(kb, r))
        }
        (GroupKind::ByFinite(p), Element::ByFinite { word, coset }) => {
            let w: String = word.iter().map(|&l| standard_letter_name(l)).collect();
            match (word.is_empty(), *coset) {
                (true, 0) => "ε".to_string(),
                (false, 0) => w,
                (true, c) => p.coset_label(c).to_string(),
                (false, c) => format!("{w}·{}", p.coset_label(c)),
            }
        }
        _ => panic!("element does not belong to this group model"),
    }
}

fn basis_of(kind: &GroupKind) -> Result<Vec<Element>, GroupError> {
    match kind {
        GroupKind::Free { rank } => Ok((0..*rank)
            .map(|i| Element::Free(vec![i as FreeLetter + 1]))
            .collect()),
        GroupKind::FreeAbelian { rank } => Ok((0..*rank)
            .map(|i| {
                let mut v = vec![0i64; *rank];
                v[i] = 1;
                Element::Abelian(v)
            })
            .collect()),
        GroupKind::Finite(t) => Ok((1..t.order()).map(|i| Element::Finite(i as u32)).collect()),
        GroupKind::Product(a, b) => {
            let la = basis_of(a)?;
            let lb = basis_of(b)?;
            let ida = a.identity();
            let idb = b.identity();
            let mut out = Vec::with_capacity(la.len() + lb.len());
            for x in la {
                out.push(Element::Pair(Box::new(x), Box::new(idb.clone())));
            }
            for y in lb {
                out.push(Element::Pair(Box::new(ida.clone()), Box::new(y)));
            }
            Ok(out)
        }
        GroupKind::ByFinite(_) => Err(GroupError::Unsupported(
            "homomorphisms out of free-by-finite groups are not supported".into(),
        )),
    }
}

fn decompose_in(kind: &GroupKind, e: &Element) -> Result<Vec<(usize, i64)>, GroupError> {
    match (kind, e) {
        (GroupKind::Free { .. }, Element::Free(w)) => Ok(w
            .iter()
            .map(|&l| {
                if l > 0 {
                    (l as usize - 1, 1)
                } else {
                    ((-l) as usize - 1, -1)
                }
            })
            .collect()),
        (GroupKind::FreeAbelian { .. }, Element::Abelian(v)) => Ok(v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (i, x))
            .collect()),
        (GroupKind::Finite(_), Element::Finite(i)) => {
            if *i == 0 {
                Ok(Vec::new())
            } else {
                Ok(vec![(*i as usize - 1, 1)])
            }
        }
        (GroupKind::Product(a, b), Element::Pair(l, r)) => {
            let offset = basis_of(a)?.len();
            let mut out = decompose_in(a, l)?;
            out.extend(
                decompose_in(b, r)?
                    .into_iter()
                    .map(|(i, n)| (i + offset, n)),
            );
            Ok(out)
        }
        _ => Err(GroupError::Unsupported(
            "decomposition is not available for this group kind".into(),
        )),
    }
}

/// Evaluate a word given as prefix points: not exported; see [`PathTrace`].
pub(crate) fn prefix_elements(model: &GroupModel, base: &Element, w: &[Symbol]) -> Vec<Element> {
    let mut points = Vec::with_capacity(w.len() + 1);
    points.push(base.clone());
    let mut acc = base.clone();
    for &s in w {
        acc = model.multiply(&acc, model.evaluate_symbol(s));
        points.push(acc.clone());
    }
    points
}

/// A word over the model alphabet, parsed and evaluated — convenience used
/// throughout tests.
pub fn word_of(model: &GroupModel, text: &str) -> Word {
    model
        .alphabet()
        .parse_word(text)
        .unwrap_or_else(|e| panic!("bad word {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_model_evaluates_and_renders() {
        let f2 = GroupModel::free(2).unwrap();
        assert_eq!(f2.alphabet().len(), 4);
        assert_eq!(f2.alphabet().label(0), "a");
        assert_eq!(f2.alphabet().label(1), "A");
        assert_eq!(f2.alphabet().label(3), "B");
        let e = f2.evaluate_str("abA").unwrap();
        assert_eq!(e, Element::Free(vec![1, 2, -1]));
        assert_eq!(f2.render_element(&e), "abA");
        assert_eq!(f2.evaluate_str("aA").unwrap(), f2.identity());
        assert!(f2.has_exact_metric());
    }

    #[test]
    fn abelian_model_adds_exponents() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let e = z2.evaluate_str("abAb").unwrap();
        assert_eq!(e, Element::Abelian(vec![0, 2]));
        assert_eq!(z2.render_element(&e), "(0,2)");
    }

    #[test]
    fn marked_abelian_model_may_lack_involution() {
        let marks = [
            ("a", vec![1]),
            ("A", vec![-1]),
            ("a2", vec![2]),
        ];
        let z = GroupModel::free_abelian_marked(1, &marks).unwrap();
        assert!(!z.alphabet().has_involution());
        assert!(!z.has_exact_metric());
        assert_eq!(z.evaluate_str("a2 a2 A").unwrap(), Element::Abelian(vec![3]));
    }

    #[test]
    fn finite_table_validation() {
        // Z/3 with elements 0,1,2.
        let z3 = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let m = GroupModel::finite(&z3, None).unwrap();
        assert_eq!(m.alphabet().len(), 2);
        assert_eq!(m.evaluate_str("g1 g2").unwrap(), Element::Finite(0));
        assert_eq!(m.invert(&Element::Finite(1)), Element::Finite(2));

        // Identity not at index 0.
        let bad = vec![vec![1, 0], vec![0, 1]];
        assert!(matches!(
            FiniteTable::new(&bad, None),
            Err(GroupError::InvalidDefinition(_))
        ));

        // Left-right identity but broken associativity is impossible at
        // order <= 4 without breaking closure, so use a 5-element magma.
        let mut rows: Vec<Vec<usize>> = (0..5)
            .map(|a| (0..5).map(|b| (a + b) % 5).collect())
            .collect();
        rows[2][3] = 1; // now 2·3 = 1 while (1·1)·3 ≠ 1·(1·3)
        assert!(matches!(
            FiniteTable::new(&rows, None),
            Err(GroupError::InvalidDefinition(_))
        ));
    }

    #[test]
    fn product_union_pairs_images() {
        let f2 = GroupModel::free(2).unwrap();
        let z = GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
        let p = GroupModel::product_union(&f2, &z).unwrap();
        assert_eq!(p.alphabet().len(), 6);
        let e = p.evaluate_str("atbT").unwrap();
        assert_eq!(
            e,
            Element::Pair(
                Box::new(Element::Free(vec![1, 2])),
                Box::new(Element::Abelian(vec![0]))
            )
        );
        assert_eq!(p.render_element(&e), "(ab,(0))");

        // Clashing labels are rejected.
        let z_std = GroupModel::free_abelian(1).unwrap();
        assert!(GroupModel::product_union(&f2, &z_std).is_err());
    }

    #[test]
    fn custom_rejects_bad_images() {
        let alphabet = {
            let mut a = Alphabet::new(["x"]).unwrap();
            a.set_involution_pairs(&[(0, 0)]).unwrap();
            a
        };
        // x marked self-inverse but its image has order > 2.
        let err = GroupModel::custom(
            GroupKind::FreeAbelian { rank: 1 },
            alphabet,
            vec![Element::Abelian(vec![1])],
        );
        assert!(matches!(err, Err(GroupError::InvalidDefinition(_))));
    }

    fn recompose(model: &GroupModel, e: &Element) -> Element {
        let basis = model.hom_basis().unwrap();
        let mut acc = model.identity();
        for (i, n) in model.decompose(e).unwrap() {
            let factor = if n >= 0 {
                basis[i].clone()
            } else {
                model.invert(&basis[i])
            };
            for _ in 0..n.unsigned_abs() {
                acc = model.multiply(&acc, &factor);
            }
        }
        acc
    }

    #[test]
    fn decompose_round_trips() {
        let f2 = GroupModel::free(2).unwrap();
        let zt =
            GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
        let p = GroupModel::product_union(&f2, &zt).unwrap();
        let z3 =
            GroupModel::finite(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], None).unwrap();
        for (model, text) in [
            (&f2, "aBAb"),
            (&p, "atTbA"),
            (&z3, "g2"),
        ] {
            let e = model.evaluate_str(text).unwrap();
            assert_eq!(recompose(model, &e), e, "recomposition failed for {text}");
            assert_eq!(recompose(model, &model.identity()), model.identity());
        }
        let z2 = GroupModel::free_abelian(2).unwrap();
        let e = z2.evaluate_str("abbA").unwrap();
        assert_eq!(recompose(&z2, &e), e);
    }
}
