//! JSON definition files for groups, structures and homomorphisms.
//!
//! Group documents are tagged by `"kind"`:
//!
//! ```json
//! {"kind": "free", "rank": 2}
//! {"kind": "free_abelian", "rank": 1, "alphabet": ["a", "A", ["a2", "aa"]]}
//! {"kind": "finite", "table": [[0,1,2],[1,2,0],[2,0,1]], "labels": ["t", "tt"]}
//! {"kind": "product", "left": {...}, "right": "z.json"}
//! {"kind": "product_convolution", "left": {...}, "right": {...}}
//! {"kind": "virtually_free", "free": 1, "coset_labels": ["t"],
//!  "sigma": [[1, "a", "A", 1], [1, "A", "a", 1], [1, "t", "", 0]]}
//! ```
//!
//! The optional `"alphabet"` of a free or free-abelian document re-marks the
//! group: each entry is either a word over the standard letters (serving as
//! its own label) or a `[label, word]` pair, and the letter evaluates to that
//! word's element.  Formal-inverse pairs are inferred from the images
//! whenever the pairing is total and consistent; otherwise the marking is
//! left unpaired.
//!
//! Structure documents couple a group with a language; homomorphism
//! documents give per-letter image words over the target's letters (images
//! of formal inverses may be omitted):
//!
//! ```json
//! {"name": "z_geo", "group": "z.json", "language": {automaton}}
//! {"source": "f2.json", "target": "f2.json", "images": {"a": "b", "b": "a"}}
//! ```
//!
//! Wherever a group is expected, either an inline document or a path string
//! (resolved relative to the referencing file) is accepted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fsa::{Alphabet, Automaton, FsaError, Symbol};
use crate::groups::{Element, FreeLetter, GroupError, GroupModel, VfGenerator, VfPresentation};
use crate::homs::{GroupHomomorphism, HomError};
use crate::structures::{AutomaticStructure, StructureError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid definition: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// A letter of a re-marked alphabet: a word over the standard letters,
/// optionally under its own label.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaEntry {
    /// The word is its own label.
    Word(String),
    /// `[label, word]`.
    Labelled(String, String),
}

impl AlphaEntry {
    fn label(&self) -> &str {
        match self {
            AlphaEntry::Word(w) => w,
            AlphaEntry::Labelled(l, _) => l,
        }
    }

    fn word(&self) -> &str {
        match self {
            AlphaEntry::Word(w) => w,
            AlphaEntry::Labelled(_, w) => w,
        }
    }
}

/// A group definition document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDoc {
    Free {
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<Vec<AlphaEntry>>,
    },
    FreeAbelian {
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<Vec<AlphaEntry>>,
    },
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Product {
        left: Box<GroupRef>,
        right: Box<GroupRef>,
    },
    ProductConvolution {
        left: Box<GroupRef>,
        right: Box<GroupRef>,
    },
    VirtuallyFree {
        free: usize,
        coset_labels: Vec<String>,
        /// Rows `[coset, generator label, free word, target coset]`.
        sigma: Vec<(usize, String, String, usize)>,
    },
}

/// Inline group document or path to one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupDoc),
}

/// A structure definition document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureDoc {
    pub name: String,
    pub group: GroupRef,
    pub language: Automaton,
}

/// A homomorphism definition document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomDoc {
    pub source: GroupRef,
    pub target: GroupRef,
    /// Image word per source label, read over the target's letters.
    pub images: BTreeMap<String, String>,
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Write a string, reporting the path on failure.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolve a group reference to an inline document, following path
/// references relative to `base`.
pub fn resolve_group_doc(r: &GroupRef, base: &Path) -> Result<GroupDoc, IoError> {
    match r {
        GroupRef::Inline(doc) => Ok(doc.clone()),
        GroupRef::Path(p) => {
            let path = base.join(p);
            let doc: GroupDoc = serde_json::from_str(&read_to_string(&path)?)?;
            Ok(doc)
        }
    }
}

/// Mark a free or free-abelian group by evaluated letter words, inferring
/// formal-inverse pairs from the images when the pairing is total.
fn marked_model(standard: GroupModel, entries: &[AlphaEntry]) -> Result<GroupModel, IoError> {
    let images: Vec<Element> = entries
        .iter()
        .map(|e| standard.evaluate_str(e.word()))
        .collect::<Result<_, _>>()?;
    let mut alphabet = Alphabet::new(entries.iter().map(|e| e.label().to_string()))
        .map_err(FsaError::from)?;
    let mut pairs = Vec::with_capacity(images.len());
    for img in &images {
        let inv = standard.invert(img);
        match images.iter().position(|e| *e == inv) {
            Some(j) => pairs.push(j),
            None => {
                pairs.clear();
                break;
            }
        }
    }
    let consistent = !pairs.is_empty() && pairs.iter().enumerate().all(|(i, &j)| pairs[j] == i);
    if consistent {
        let listed: Vec<(usize, usize)> = pairs.iter().copied().enumerate().collect();
        alphabet
            .set_involution_pairs(&listed)
            .map_err(FsaError::from)?;
    }
    Ok(GroupModel::custom(
        standard.kind().clone(),
        alphabet,
        images,
    )?)
}

fn parse_free_word(rank: usize, text: &str) -> Result<Vec<FreeLetter>, IoError> {
    let mut out = Vec::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        let lower = c.to_ascii_lowercase();
        if !lower.is_ascii_lowercase() {
            return Err(IoError::Invalid(format!(
                "{c:?} is not a free-group letter"
            )));
        }
        let k = (lower as u8 - b'a') as usize + 1;
        if k > rank {
            return Err(IoError::Invalid(format!(
                "letter {c:?} is outside rank {rank}"
            )));
        }
        out.push(if c.is_ascii_lowercase() {
            k as FreeLetter
        } else {
            -(k as FreeLetter)
        });
    }
    Ok(out)
}

/// Build the model a document describes.  `base` resolves nested path
/// references.
pub fn build_group(doc: &GroupDoc, base: &Path) -> Result<GroupModel, IoError> {
    match doc {
        GroupDoc::Free { rank, alphabet } => {
            let standard = GroupModel::free(*rank)?;
            match alphabet {
                None => Ok(standard),
                Some(entries) => marked_model(standard, entries),
            }
        }
        GroupDoc::FreeAbelian { rank, alphabet } => {
            let standard = GroupModel::free_abelian(*rank)?;
            match alphabet {
                None => Ok(standard),
                Some(entries) => marked_model(standard, entries),
            }
        }
        GroupDoc::Finite { table, labels } => Ok(GroupModel::finite(table, labels.clone())?),
        GroupDoc::Product { left, right } => {
            let l = build_group(&resolve_group_doc(left, base)?, base)?;
            let r = build_group(&resolve_group_doc(right, base)?, base)?;
            Ok(GroupModel::product_union(&l, &r)?)
        }
        GroupDoc::ProductConvolution { left, right } => {
            let l = build_group(&resolve_group_doc(left, base)?, base)?;
            let r = build_group(&resolve_group_doc(right, base)?, base)?;
            Ok(GroupModel::product_convolution(&l, &r)?)
        }
        GroupDoc::VirtuallyFree {
            free,
            coset_labels,
            sigma,
        } => {
            let gen_of = |label: &str| -> Result<VfGenerator, IoError> {
                if let Some(i) = coset_labels.iter().position(|l| l == label) {
                    return Ok(VfGenerator::Coset(i as u32 + 1));
                }
                let letters = parse_free_word(*free, label)?;
                match letters.as_slice() {
                    [l] => Ok(VfGenerator::Free(*l)),
                    _ => Err(IoError::Invalid(format!(
                        "{label:?} names neither a coset nor a single letter"
                    ))),
                }
            };
            let rows = sigma
                .iter()
                .map(|(i, g, w, k)| Ok((*i, gen_of(g)?, parse_free_word(*free, w)?, *k)))
                .collect::<Result<Vec<_>, IoError>>()?;
            let pres = VfPresentation::new(*free, coset_labels.clone(), rows)?;
            Ok(GroupModel::by_finite(pres)?)
        }
    }
}

/// Load a group definition file.
pub fn load_group(path: &Path) -> Result<GroupModel, IoError> {
    let doc: GroupDoc = serde_json::from_str(&read_to_string(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    build_group(&doc, base)
}

/// Rebuild a deserialized language over the model's own alphabet (the
/// serialized form carries labels but not the formal-inverse pairing).
fn align_language(lang: &Automaton, model: &GroupModel) -> Result<Automaton, IoError> {
    let want = model.alphabet();
    if lang.alphabet() == want {
        return Ok(lang.clone());
    }
    let map: Vec<Symbol> = lang
        .alphabet()
        .labels()
        .iter()
        .map(|l| {
            want.lookup(l).ok_or_else(|| {
                IoError::Invalid(format!(
                    "language uses letter {l:?} the group does not mark"
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(lang.relabel(want.clone(), &map)?)
}

/// Build the structure a document describes.
pub fn build_structure(doc: &StructureDoc, base: &Path) -> Result<AutomaticStructure, IoError> {
    let model = build_group(&resolve_group_doc(&doc.group, base)?, base)?;
    let lang = align_language(&doc.language, &model)?;
    Ok(AutomaticStructure::new(doc.name.clone(), model, lang)?)
}

/// Load a structure definition file, returning the structure and its
/// document (useful for re-embedding the group elsewhere).
pub fn load_structure(path: &Path) -> Result<(AutomaticStructure, StructureDoc), IoError> {
    let doc: StructureDoc = serde_json::from_str(&read_to_string(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let s = build_structure(&doc, base)?;
    Ok((s, doc))
}

/// Build the homomorphism a document describes.
pub fn build_hom(doc: &HomDoc, base: &Path) -> Result<GroupHomomorphism, IoError> {
    let source = build_group(&resolve_group_doc(&doc.source, base)?, base)?;
    let target = build_group(&resolve_group_doc(&doc.target, base)?, base)?;
    let named: Vec<(&str, &str)> = doc
        .images
        .iter()
        .map(|(l, w)| (l.as_str(), w.as_str()))
        .collect();
    Ok(GroupHomomorphism::from_named_images(
        &source, &target, &named,
    )?)
}

/// Load a homomorphism definition file.
pub fn load_hom(path: &Path) -> Result<GroupHomomorphism, IoError> {
    let doc: HomDoc = serde_json::from_str(&read_to_string(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    build_hom(&doc, base)
}

/// Serialize a structure document, pretty-printed with a trailing newline.
pub fn structure_to_json(doc: &StructureDoc) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serialization cannot fail");
    out.push('\n');
    out
}
