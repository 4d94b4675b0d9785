//! Homomorphisms between group models, and the bounded-reduction checks.
//!
//! A [`GroupHomomorphism`] stores one target element per marked source
//! symbol.  Construction derives the images of the source's defining
//! generators, verifies the relations those generators satisfy (commutation
//! for abelian and product sources, the full multiplication table for finite
//! sources), and checks every marked symbol against the derived map, so a
//! value that survives `new` really is a homomorphism on the whole group.
//!
//! The submodules add the empirical bounded-reduction sweeps ([`brp`]) and
//! the exact decision procedure for free-group endomorphisms on geodesics
//! ([`free_sync_brp_decide`]).

mod brp;
mod decide;

pub use brp::{BrpReport, BrpVariant};
pub use decide::{free_sync_brp_decide, FreeSyncDecision};

use crate::fsa::Symbol;
use crate::groups::{DistanceOracle, Element, GroupError, GroupKind, GroupModel};
use crate::structures::StructureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomError {
    /// The image list does not line up with the source alphabet.
    #[error("expected one image per marked symbol ({expected}), got {got}")]
    ImageCount { expected: usize, got: usize },
    /// An image element does not belong to the target group.
    #[error("image of {label:?} does not lie in the target group")]
    ImageOutsideTarget { label: String },
    /// No image was given for a symbol (and none is derivable by inversion).
    #[error("no image given for symbol {label:?}")]
    MissingImage { label: String },
    /// The stated images violate a relation of the source group.
    #[error("the images do not define a homomorphism: {0}")]
    NotAHomomorphism(String),
    /// Two models that had to match (com composition, checks) do not.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    /// The operation needs a model feature that is missing.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A homomorphism between two group models, given by the image of every
/// marked source symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupHomomorphism {
    source: GroupModel,
    target: GroupModel,
    /// Image of each marked source symbol.
    symbol_images: Vec<Element>,
    /// Image of each entry of the source's defining-generator basis.
    basis_images: Vec<Element>,
}

/// `e^n` in the model's group.
fn power(model: &GroupModel, e: &Element, n: i64) -> Element {
    let mut base = if n < 0 { model.invert(e) } else { e.clone() };
    let mut k = n.unsigned_abs();
    let mut acc = model.identity();
    while k > 0 {
        if k & 1 == 1 {
            acc = model.multiply(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = model.multiply(&base, &base);
        }
    }
    acc
}

impl GroupHomomorphism {
    /// Build and validate a homomorphism from per-symbol images.
    ///
    /// Every defining generator of the source must itself be the image of
    /// some marked symbol (true of all standard markings); the relations
    /// among the generators are then verified in the target, and every
    /// remaining symbol is checked for consistency with the generator map.
    pub fn new(
        source: GroupModel,
        target: GroupModel,
        symbol_images: Vec<Element>,
    ) -> Result<Self, HomError> {
        if symbol_images.len() != source.alphabet().len() {
            return Err(HomError::ImageCount {
                expected: source.alphabet().len(),
                got: symbol_images.len(),
            });
        }
        for (s, img) in symbol_images.iter().enumerate() {
            if !target.contains(img) {
                return Err(HomError::ImageOutsideTarget {
                    label: source.alphabet().label(s).to_string(),
                });
            }
        }
        let basis = source.hom_basis()?;
        let mut basis_images = Vec::with_capacity(basis.len());
        for b in &basis {
            let Some(s) = source
                .alphabet()
                .symbols()
                .find(|&s| source.evaluate_symbol(s) == b)
            else {
                return Err(HomError::Unsupported(format!(
                    "defining generator {} is not marked by any symbol; \
                     use a standard marking to define homomorphisms",
                    source.render_element(b)
                )));
            };
            basis_images.push(symbol_images[s].clone());
        }
        check_relations(source.kind(), &basis_images, &target)?;
        let hom = GroupHomomorphism {
            source,
            target,
            symbol_images,
            basis_images,
        };
        for s in hom.source.alphabet().symbols() {
            let expected = hom.apply(hom.source.evaluate_symbol(s))?;
            if expected != hom.symbol_images[s] {
                return Err(HomError::NotAHomomorphism(format!(
                    "image of {:?} contradicts the images of the generators it \
                     is built from (expected {}, got {})",
                    hom.source.alphabet().label(s),
                    hom.target.render_element(&expected),
                    hom.target.render_element(&hom.symbol_images[s]),
                )));
            }
        }
        Ok(hom)
    }

    /// Build from `(label, target word)` pairs.  Symbols whose label is not
    /// listed get the inverse of their involution partner's image.
    pub fn from_named_images(
        source: &GroupModel,
        target: &GroupModel,
        named: &[(&str, &str)],
    ) -> Result<Self, HomError> {
        let alphabet = source.alphabet();
        let mut images: Vec<Option<Element>> = vec![None; alphabet.len()];
        for (label, word) in named {
            let Some(s) = alphabet.symbols().find(|&s| alphabet.label(s) == *label) else {
                return Err(HomError::Group(GroupError::UnknownSymbol(
                    (*label).to_string(),
                )));
            };
            images[s] = Some(target.evaluate_str(word)?);
        }
        for s in alphabet.symbols() {
            if images[s].is_none() {
                let partner = alphabet
                    .inverse_symbol(s)
                    .and_then(|t| images[t].clone())
                    .map(|e| target.invert(&e));
                match partner {
                    Some(e) => images[s] = Some(e),
                    None => {
                        return Err(HomError::MissingImage {
                            label: alphabet.label(s).to_string(),
                        })
                    }
                }
            }
        }
        let images = images.into_iter().map(Option::unwrap).collect();
        Self::new(source.clone(), target.clone(), images)
    }

    /// The identity endomorphism of a model.
    pub fn identity(model: &GroupModel) -> Self {
        Self::new(model.clone(), model.clone(), model.images().to_vec())
            .expect("the identity map is a homomorphism")
    }

    /// The inner automorphism `x ↦ g·x·g⁻¹`.
    pub fn inner(model: &GroupModel, g: &Element) -> Result<Self, HomError> {
        if !model.contains(g) {
            return Err(HomError::Unsupported(
                "conjugating element does not belong to the model".into(),
            ));
        }
        let gi = model.invert(g);
        let images = model
            .images()
            .iter()
            .map(|e| model.multiply(&model.multiply(g, e), &gi))
            .collect();
        Self::new(model.clone(), model.clone(), images)
    }

    pub fn source(&self) -> &GroupModel {
        &self.source
    }

    pub fn target(&self) -> &GroupModel {
        &self.target
    }

    /// Is this the identity endomorphism (same model, every symbol fixed)?
    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self
                .symbol_images
                .iter()
                .enumerate()
                .all(|(s, img)| img == self.source.evaluate_symbol(s))
    }

    /// Per-symbol images, indexed by source symbol.
    pub fn symbol_images(&self) -> &[Element] {
        &self.symbol_images
    }

    /// Images of the source's defining generators ([`GroupModel::hom_basis`]).
    pub fn basis_images(&self) -> &[Element] {
        &self.basis_images
    }

    /// Apply to an arbitrary element, by decomposing it over the source's
    /// defining generators.
    pub fn apply(&self, e: &Element) -> Result<Element, HomError> {
        let mut acc = self.target.identity();
        for (i, n) in self.source.decompose(e)? {
            acc = self
                .target
                .multiply(&acc, &power(&self.target, &self.basis_images[i], n));
        }
        Ok(acc)
    }

    /// Apply to a word over the source alphabet (no decomposition needed:
    /// symbol images multiply out directly).
    pub fn apply_word(&self, w: &[Symbol]) -> Element {
        let mut acc = self.target.identity();
        for &s in w {
            acc = self.target.multiply(&acc, &self.symbol_images[s]);
        }
        acc
    }

    /// The image path of a word: images of all its prefixes, in order.
    pub fn image_path(&self, w: &[Symbol]) -> Vec<Element> {
        let mut points = Vec::with_capacity(w.len() + 1);
        let mut acc = self.target.identity();
        points.push(acc.clone());
        for &s in w {
            acc = self.target.multiply(&acc, &self.symbol_images[s]);
            points.push(acc.clone());
        }
        points
    }

    /// Composite `x ↦ (x applied to self) applied to then`.
    pub fn compose(&self, then: &GroupHomomorphism) -> Result<Self, HomError> {
        if self.target != then.source {
            return Err(HomError::ModelMismatch(
                "the first map's target must be the second map's source".into(),
            ));
        }
        let images = self
            .symbol_images
            .iter()
            .map(|e| then.apply(e))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.source.clone(), then.target.clone(), images)
    }

    /// The pairing `x ↦ (xφ, xψ)` into the padded-pair product of the common
    /// target with itself.
    pub fn diagonal(phi: &Self, psi: &Self) -> Result<Self, HomError> {
        if phi.source != psi.source {
            return Err(HomError::ModelMismatch(
                "paired maps must share a source".into(),
            ));
        }
        if phi.target != psi.target {
            return Err(HomError::ModelMismatch(
                "paired maps must share a target".into(),
            ));
        }
        let target = GroupModel::product_convolution(&phi.target, &psi.target)?;
        let images = phi
            .symbol_images
            .iter()
            .zip(&psi.symbol_images)
            .map(|(a, b)| Element::Pair(Box::new(a.clone()), Box::new(b.clone())))
            .collect();
        Self::new(phi.source.clone(), target, images)
    }

    /// Largest distance from the identity to a symbol image — the per-letter
    /// displacement bound that controls composite constants.
    pub fn displacement(&self, cap: u32) -> u32 {
        let oracle = DistanceOracle::new(&self.target);
        self.symbol_images
            .iter()
            .map(|e| oracle.distance_from_identity(e, cap).unwrap_or(cap + 1))
            .max()
            .unwrap_or(0)
    }
}

/// Verify, in the target, the defining relations of the source kind.
fn check_relations(
    kind: &GroupKind,
    basis_images: &[Element],
    target: &GroupModel,
) -> Result<(), HomError> {
    match kind {
        GroupKind::Free { .. } => Ok(()),
        GroupKind::FreeAbelian { .. } => {
            for i in 0..basis_images.len() {
                for j in (i + 1)..basis_images.len() {
                    let ab = target.multiply(&basis_images[i], &basis_images[j]);
                    let ba = target.multiply(&basis_images[j], &basis_images[i]);
                    if ab != ba {
                        return Err(HomError::NotAHomomorphism(format!(
                            "images of commuting generators {i} and {j} do not commute"
                        )));
                    }
                }
            }
            Ok(())
        }
        GroupKind::Finite(t) => {
            let image_of = |g: u32| -> Element {
                if g == 0 {
                    target.identity()
                } else {
                    basis_images[g as usize - 1].clone()
                }
            };
            for g in 0..t.order() as u32 {
                for h in 0..t.order() as u32 {
                    let lhs = image_of(t.mul(g, h));
                    let rhs = target.multiply(&image_of(g), &image_of(h));
                    if lhs != rhs {
                        return Err(HomError::NotAHomomorphism(format!(
                            "multiplication table breaks at {}·{}",
                            t.label(g),
                            t.label(h)
                        )));
                    }
                }
            }
            Ok(())
        }
        GroupKind::Product(a, b) => {
            let split = hom_basis_len(a)?;
            let (la, lb) = basis_images.split_at(split);
            check_relations(a, la, target)?;
            check_relations(b, lb, target)?;
            for (i, x) in la.iter().enumerate() {
                for (j, y) in lb.iter().enumerate() {
                    if target.multiply(x, y) != target.multiply(y, x) {
                        return Err(HomError::NotAHomomorphism(format!(
                            "images of the commuting factor generators {i} (left) \
                             and {j} (right) do not commute"
                        )));
                    }
                }
            }
            Ok(())
        }
        GroupKind::ByFinite(_) => Err(HomError::Unsupported(
            "homomorphisms out of free-by-finite models are not supported".into(),
        )),
    }
}

fn hom_basis_len(kind: &GroupKind) -> Result<usize, HomError> {
    Ok(match kind {
        GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => *rank,
        GroupKind::Finite(t) => t.order() - 1,
        GroupKind::Product(a, b) => hom_basis_len(a)? + hom_basis_len(b)?,
        GroupKind::ByFinite(_) => {
            return Err(HomError::Unsupported(
                "homomorphisms out of free-by-finite models are not supported".into(),
            ))
        }
    })
}

/// Test convenience: build a homomorphism from label/word pairs, panicking
/// on invalid data.
pub fn hom_of(source: &GroupModel, target: &GroupModel, named: &[(&str, &str)]) -> GroupHomomorphism {
    GroupHomomorphism::from_named_images(source, target, named)
        .unwrap_or_else(|e| panic!("invalid homomorphism: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::word_of;

    #[test]
    fn swap_map_applies_to_words_and_elements() {
        let f2 = GroupModel::free(2).unwrap();
        let swap = hom_of(&f2, &f2, &[("a", "b"), ("b", "a")]);
        let w = word_of(&f2, "abb");
        assert_eq!(f2.render_element(&swap.apply_word(&w)), "baa");
        let e = f2.evaluate_str("aBa").unwrap();
        assert_eq!(f2.render_element(&swap.apply(&e).unwrap()), "bAb");
    }

    #[test]
    fn inverse_images_are_filled_in() {
        let f2 = GroupModel::free(2).unwrap();
        let phi = hom_of(&f2, &f2, &[("a", "ab"), ("b", "b")]);
        let img_of_inv = &phi.symbol_images()[crate::groups::word_of(&f2, "A")[0]];
        assert_eq!(f2.render_element(img_of_inv), "BA");
    }

    #[test]
    fn abelian_images_must_commute() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let f2 = GroupModel::free(2).unwrap();
        // a↦a, b↦b into the free group: ab ≠ ba there.
        let r = GroupHomomorphism::from_named_images(&z2, &f2, &[("a", "a"), ("b", "b")]);
        assert!(matches!(r, Err(HomError::NotAHomomorphism(_))), "{r:?}");
        // a↦a, b↦aa commute fine.
        assert!(GroupHomomorphism::from_named_images(&z2, &f2, &[("a", "a"), ("b", "aa")]).is_ok());
    }

    #[test]
    fn inconsistent_marked_symbol_is_rejected() {
        // Z marked with a, A and a doubled generator a2 ↦ +2: the image of
        // a2 must be the square of the image of a.
        let z = GroupModel::free_abelian_marked(
            1,
            &[("a", vec![1]), ("A", vec![-1]), ("a2", vec![2])],
        )
        .unwrap();
        let ok = GroupHomomorphism::from_named_images(
            &z,
            &z,
            &[("a", "aa"), ("A", "AA"), ("a2", "aaaa")],
        );
        assert!(ok.is_ok(), "{ok:?}");
        let bad = GroupHomomorphism::from_named_images(
            &z,
            &z,
            &[("a", "aa"), ("A", "AA"), ("a2", "aaa")],
        );
        assert!(matches!(bad, Err(HomError::NotAHomomorphism(_))), "{bad:?}");
    }

    #[test]
    fn inner_composition_law() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.evaluate_str("a").unwrap();
        let b = f2.evaluate_str("b").unwrap();
        let la = GroupHomomorphism::inner(&f2, &a).unwrap();
        let lb = GroupHomomorphism::inner(&f2, &b).unwrap();
        // x ↦ (bxb⁻¹) then conjugate by a: λ_a ∘ λ_b = λ_{ab}.
        let ab = f2.evaluate_str("ab").unwrap();
        let composite = lb.compose(&la).unwrap();
        assert_eq!(composite, GroupHomomorphism::inner(&f2, &ab).unwrap());
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let f2 = GroupModel::free(2).unwrap();
        let phi = hom_of(&f2, &f2, &[("a", "ab"), ("b", "b")]);
        let id = GroupHomomorphism::identity(&f2);
        assert_eq!(phi.compose(&id).unwrap(), phi);
        assert_eq!(id.compose(&phi).unwrap(), phi);
    }

    #[test]
    fn diagonal_pairs_images() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.evaluate_str("a").unwrap();
        let id = GroupHomomorphism::identity(&f2);
        let la = GroupHomomorphism::inner(&f2, &a).unwrap();
        let theta = GroupHomomorphism::diagonal(&id, &la).unwrap();
        let b = f2.evaluate_str("b").unwrap();
        let img = theta.apply(&b).unwrap();
        assert_eq!(theta.target().render_element(&img), "(b,abA)");
    }

    #[test]
    fn finite_source_maps_respect_the_table() {
        // Z/3 → Z/3, g1 ↦ g2 is the inversion automorphism.
        let rows: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let z3 = GroupModel::finite(&rows, None).unwrap();
        let inv = GroupHomomorphism::from_named_images(&z3, &z3, &[("g1", "g2"), ("g2", "g1")]);
        assert!(inv.is_ok(), "{inv:?}");
        // g1 ↦ g1, g2 ↦ g1 is not a homomorphism.
        let bad = GroupHomomorphism::from_named_images(&z3, &z3, &[("g1", "g1"), ("g2", "g1")]);
        assert!(matches!(bad, Err(HomError::NotAHomomorphism(_))), "{bad:?}");
    }

    #[test]
    fn displacement_measures_longest_image() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(&f2, &a).unwrap();
        // a ↦ a has length 1; b ↦ abA has length 3.
        assert_eq!(la.displacement(16), 3);
    }
}
