//! Group elements in concrete normal form.
//!
//! Every model kind has a canonical value representation, so elements can be
//! hashed and ordered, and equality is literal equality of the representation:
//!
//! * free groups: freely reduced words over signed letters,
//! * free abelian groups: exponent vectors,
//! * finite groups: the element index into the multiplication table,
//! * direct products: pairs of the factor representations,
//! * free-by-finite extensions: a reduced word in the free part together with
//!   a coset index.

use serde::{Deserialize, Serialize};

/// Letter of a free-group word: `+k` is generator `k - 1`, `-k` its inverse.
/// Zero is never used.
pub type FreeLetter = i32;

/// Freely reduce `w` in place (cancel adjacent `x x^-1` pairs).
pub fn reduce_in_place(w: &mut Vec<FreeLetter>) {
    let mut top = 0usize;
    for i in 0..w.len() {
        let l = w[i];
        if top > 0 && w[top - 1] == -l {
            top -= 1;
        } else {
            w[top] = l;
            top += 1;
        }
    }
    w.truncate(top);
}

/// Concatenate two reduced words and reduce the result.
pub fn reduced_concat(a: &[FreeLetter], b: &[FreeLetter]) -> Vec<FreeLetter> {
    let mut cancel = 0usize;
    let max = a.len().min(b.len());
    while cancel < max && a[a.len() - 1 - cancel] == -b[cancel] {
        cancel += 1;
    }
    let mut out = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
    out.extend_from_slice(&a[..a.len() - cancel]);
    out.extend_from_slice(&b[cancel..]);
    out
}

/// Inverse of a reduced word (reverse and negate).
pub fn free_inverse(w: &[FreeLetter]) -> Vec<FreeLetter> {
    w.iter().rev().map(|&l| -l).collect()
}

/// True if no adjacent pair cancels.
pub fn is_reduced(w: &[FreeLetter]) -> bool {
    w.iter().all(|&l| l != 0) && w.windows(2).all(|p| p[0] != -p[1])
}

/// A group element. Values are only meaningful relative to the
/// [`GroupModel`](super::GroupModel) that produced them; mixing elements from
/// models of different kinds is a programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    /// Freely reduced word.
    Free(Vec<FreeLetter>),
    /// Exponent vector.
    Abelian(Vec<i64>),
    /// Index into the multiplication table.
    Finite(u32),
    /// Direct-product pair.
    Pair(Box<Element>, Box<Element>),
    /// `w · b_i` with `w` reduced in the free part and `b_i` a coset
    /// representative (`b_0` is the identity coset).
    ByFinite { word: Vec<FreeLetter>, coset: u32 },
}

impl Element {
    /// Identity check without needing the model.
    pub fn is_identity(&self) -> bool {
        match self {
            Element::Free(w) => w.is_empty(),
            Element::Abelian(v) => v.iter().all(|&x| x == 0),
            Element::Finite(i) => *i == 0,
            Element::Pair(l, r) => l.is_identity() && r.is_identity(),
            Element::ByFinite { word, coset } => word.is_empty() && *coset == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_adjacent_inverses() {
        let mut w = vec![1, 2, -2, -1, 1];
        reduce_in_place(&mut w);
        assert_eq!(w, vec![1]);

        let mut empty = vec![1, -1];
        reduce_in_place(&mut empty);
        assert!(empty.is_empty());
    }

    #[test]
    fn concat_reduces_across_the_seam() {
        assert_eq!(reduced_concat(&[1, 2], &[-2, -1, 3]), vec![3]);
        assert_eq!(reduced_concat(&[1, 2], &[3]), vec![1, 2, 3]);
        assert_eq!(reduced_concat(&[], &[2]), vec![2]);
        assert!(reduced_concat(&[1, 2], &[-2, -1]).is_empty());
    }

    #[test]
    fn inverse_reverses_and_negates() {
        assert_eq!(free_inverse(&[1, -2, 3]), vec![-3, 2, -1]);
        assert!(is_reduced(&[1, 1, -2]));
        assert!(!is_reduced(&[1, -1]));
    }
}
