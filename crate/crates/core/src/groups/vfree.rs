//! Free-by-finite extensions presented by a coset rewriting table.

use super::element::{free_inverse, is_reduced, reduced_concat, FreeLetter};
use super::GroupError;

/// A generator of the extension: either a signed letter of the free part or
/// a non-trivial coset representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VfGenerator {
    /// Signed free letter: `+k` is the `k`-th generator, `-k` its inverse.
    Free(FreeLetter),
    /// Coset representative index, `1..cosets`.
    Coset(u32),
}

/// A group `G` that contains a free group `F` of finite index, written as the
/// disjoint union `G = F·b_0 ∪ F·b_1 ∪ … ∪ F·b_m` with `b_0 = 1`.  Every
/// element has the unique normal form `w·b_i` with `w` reduced in `F`.
///
/// The table records how representatives move past generators:
///
/// ```text
/// b_i · g  =  w(i,g) · b_{k(i,g)}
/// ```
///
/// for each coset `i ≥ 1` and each generator `g` (signed free letters and
/// non-trivial coset letters); the `b_0` rows are forced since `b_0 = 1`.
/// Construction validates totality, that every generator permutes the cosets,
/// that multiplication is associative on generator triples (which propagates
/// to all products), and that every generator is invertible.
#[derive(Clone, Debug, PartialEq)]
pub struct VfPresentation {
    free_rank: usize,
    cosets: usize,
    /// Labels for cosets `1..=m`, indexed by `i - 1`.
    coset_labels: Vec<String>,
    /// `sigma[i][g] = (word, coset)`, `g` indexed by [`VfPresentation::gen_index`].
    sigma: Vec<Vec<(Vec<FreeLetter>, u32)>>,
}

impl VfPresentation {
    /// Build and validate a presentation.  `coset_labels` names the
    /// non-trivial representatives `b_1..b_m`; `rows` lists
    /// `(i, g, word, coset)` entries for all `i ≥ 1` and all generators.
    pub fn new(
        free_rank: usize,
        coset_labels: Vec<String>,
        rows: Vec<(usize, VfGenerator, Vec<FreeLetter>, usize)>,
    ) -> Result<Self, GroupError> {
        if free_rank == 0 || free_rank > 26 {
            return Err(GroupError::InvalidDefinition(format!(
                "free rank {free_rank} is outside the supported range 1..=26"
            )));
        }
        let cosets = coset_labels.len() + 1;
        let gens = 2 * free_rank + cosets - 1;
        let mut sigma: Vec<Vec<Option<(Vec<FreeLetter>, u32)>>> =
            vec![vec![None; gens]; cosets];

        // Row 0 is forced by b_0 = 1.
        for l in 1..=free_rank as FreeLetter {
            sigma[0][Self::letter_index(l)] = Some((vec![l], 0));
            sigma[0][Self::letter_index(-l)] = Some((vec![-l], 0));
        }
        for j in 1..cosets {
            sigma[0][2 * free_rank + j - 1] = Some((Vec::new(), j as u32));
        }

        for (i, g, w, k) in rows {
            if i == 0 || i >= cosets {
                return Err(GroupError::InvalidDefinition(format!(
                    "table row for coset {i} is out of range (rows cover 1..{cosets})"
                )));
            }
            if k >= cosets {
                return Err(GroupError::InvalidDefinition(format!(
                    "target coset {k} is out of range"
                )));
            }
            if !is_reduced(&w)
                || w.iter().any(|l| l.unsigned_abs() as usize > free_rank)
            {
                return Err(GroupError::InvalidDefinition(format!(
                    "table word for coset {i} is not reduced in rank {free_rank}"
                )));
            }
            let gi = Self::checked_gen_index(free_rank, cosets, g)?;
            if sigma[i][gi].is_some() {
                return Err(GroupError::InvalidDefinition(format!(
                    "duplicate table entry for coset {i} and generator {g:?}"
                )));
            }
            sigma[i][gi] = Some((w, k as u32));
        }

        let mut filled = Vec::with_capacity(cosets);
        for (i, row) in sigma.into_iter().enumerate() {
            let mut out = Vec::with_capacity(gens);
            for (gi, entry) in row.into_iter().enumerate() {
                out.push(entry.ok_or_else(|| {
                    GroupError::InvalidDefinition(format!(
                        "missing table entry for coset {i} and generator index {gi}"
                    ))
                })?);
            }
            filled.push(out);
        }

        let pres = VfPresentation {
            free_rank,
            cosets,
            coset_labels,
            sigma: filled,
        };
        pres.validate()?;
        Ok(pres)
    }

    fn validate(&self) -> Result<(), GroupError> {
        // Each generator must permute the cosets.
        for gi in 0..self.gens() {
            let mut seen = vec![false; self.cosets];
            for i in 0..self.cosets {
                let k = self.sigma[i][gi].1 as usize;
                if seen[k] {
                    return Err(GroupError::InvalidDefinition(format!(
                        "generator index {gi} does not permute the cosets"
                    )));
                }
                seen[k] = true;
            }
        }
        // Associativity on generator triples.
        let gen_elems: Vec<(Vec<FreeLetter>, u32)> = self.generator_elements();
        for i in 0..self.cosets {
            let base = (Vec::new(), i as u32);
            for g in &gen_elems {
                let bg = self.multiply(&base.0, base.1, &g.0, g.1);
                for h in &gen_elems {
                    let left = self.multiply(&bg.0, bg.1, &h.0, h.1);
                    let gh = self.multiply(&g.0, g.1, &h.0, h.1);
                    let right = self.multiply(&base.0, base.1, &gh.0, gh.1);
                    if left != right {
                        return Err(GroupError::InvalidDefinition(format!(
                            "table is not associative over coset {i} and generators {g:?}, {h:?}"
                        )));
                    }
                }
            }
        }
        // Every generator must be invertible.
        for g in &gen_elems {
            let Some((iw, ic)) = self.try_invert(&g.0, g.1) else {
                return Err(GroupError::InvalidDefinition(format!(
                    "generator {g:?} has no inverse under the table"
                )));
            };
            if self.multiply(&g.0, g.1, &iw, ic) != (Vec::new(), 0) {
                return Err(GroupError::InvalidDefinition(format!(
                    "generator {g:?} is not two-sided invertible"
                )));
            }
        }
        Ok(())
    }

    fn generator_elements(&self) -> Vec<(Vec<FreeLetter>, u32)> {
        let mut out = Vec::with_capacity(self.gens());
        for l in 1..=self.free_rank as FreeLetter {
            out.push((vec![l], 0));
            out.push((vec![-l], 0));
        }
        for j in 1..self.cosets {
            out.push((Vec::new(), j as u32));
        }
        out
    }

    fn letter_index(l: FreeLetter) -> usize {
        2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
    }

    fn checked_gen_index(
        rank: usize,
        cosets: usize,
        g: VfGenerator,
    ) -> Result<usize, GroupError> {
        match g {
            VfGenerator::Free(l) => {
                if l == 0 || l.unsigned_abs() as usize > rank {
                    Err(GroupError::InvalidDefinition(format!(
                        "free letter {l} is out of range for rank {rank}"
                    )))
                } else {
                    Ok(Self::letter_index(l))
                }
            }
            VfGenerator::Coset(j) => {
                if j == 0 || j as usize >= cosets {
                    Err(GroupError::InvalidDefinition(format!(
                        "coset letter {j} is out of range"
                    )))
                } else {
                    Ok(2 * rank + j as usize - 1)
                }
            }
        }
    }

    fn gens(&self) -> usize {
        2 * self.free_rank + self.cosets - 1
    }

    /// Rank of the finite-index free subgroup.
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Number of cosets, including the trivial one.
    pub fn cosets(&self) -> usize {
        self.cosets
    }

    /// Label of a non-trivial coset representative.
    pub fn coset_label(&self, i: u32) -> &str {
        &self.coset_labels[i as usize - 1]
    }

    /// The explicit (non-forced) table rows, for serialization.
    pub fn rows(&self) -> Vec<(usize, VfGenerator, Vec<FreeLetter>, usize)> {
        let mut out = Vec::new();
        for i in 1..self.cosets {
            for l in 1..=self.free_rank as FreeLetter {
                for signed in [l, -l] {
                    let (w, k) = &self.sigma[i][Self::letter_index(signed)];
                    out.push((i, VfGenerator::Free(signed), w.clone(), *k as usize));
                }
            }
            for j in 1..self.cosets {
                let (w, k) = &self.sigma[i][2 * self.free_rank + j - 1];
                out.push((i, VfGenerator::Coset(j as u32), w.clone(), *k as usize));
            }
        }
        out
    }

    fn push_gen(&self, word: Vec<FreeLetter>, coset: u32, gi: usize) -> (Vec<FreeLetter>, u32) {
        let (u, k) = &self.sigma[coset as usize][gi];
        (reduced_concat(&word, u), *k)
    }

    /// Product of two normal forms.
    pub fn multiply(
        &self,
        w1: &[FreeLetter],
        c1: u32,
        w2: &[FreeLetter],
        c2: u32,
    ) -> (Vec<FreeLetter>, u32) {
        let mut acc = (w1.to_vec(), c1);
        for &l in w2 {
            acc = self.push_gen(acc.0, acc.1, Self::letter_index(l));
        }
        if c2 != 0 {
            acc = self.push_gen(acc.0, acc.1, 2 * self.free_rank + c2 as usize - 1);
        }
        acc
    }

    fn try_invert(&self, w: &[FreeLetter], c: u32) -> Option<(Vec<FreeLetter>, u32)> {
        // (u·b_j)(w·b_c) = 1 requires b_j·w·b_c to land in the trivial coset,
        // and then u is the free inverse of its word part.
        for j in 0..self.cosets {
            let (pw, pc) = self.multiply(&[], j as u32, w, c);
            if pc == 0 {
                return Some((free_inverse(&pw), j as u32));
            }
        }
        None
    }

    /// Inverse of a normal form.
    pub fn invert(&self, w: &[FreeLetter], c: u32) -> (Vec<FreeLetter>, u32) {
        self.try_invert(w, c)
            .expect("validated presentation: every element is invertible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z ⋊ C2: one free generator `a`, one reflection `b` with `b² = 1` and
    /// `b·a = a⁻¹·b`.
    fn dihedral() -> VfPresentation {
        VfPresentation::new(
            1,
            vec!["b".to_string()],
            vec![
                (1, VfGenerator::Free(1), vec![-1], 1),
                (1, VfGenerator::Free(-1), vec![1], 1),
                (1, VfGenerator::Coset(1), vec![], 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dihedral_relations_hold() {
        let d = dihedral();
        // b² = 1
        assert_eq!(d.multiply(&[], 1, &[], 1), (vec![], 0));
        // b·a·b = a⁻¹
        let ba = d.multiply(&[], 1, &[1], 0);
        assert_eq!(ba, (vec![-1], 1));
        assert_eq!(d.multiply(&ba.0, ba.1, &[], 1), (vec![-1], 0));
        // (a·b)² = 1: a·b is a reflection.
        let ab = d.multiply(&[1], 0, &[], 1);
        assert_eq!(d.multiply(&ab.0, ab.1, &ab.0, ab.1), (vec![], 0));
    }

    #[test]
    fn dihedral_inverses() {
        let d = dihedral();
        // (a^3·b)⁻¹ = a^3·b since it is a reflection.
        assert_eq!(d.invert(&[1, 1, 1], 1), (vec![1, 1, 1], 1));
        assert_eq!(d.invert(&[1, 1], 0), (vec![-1, -1], 0));
    }

    #[test]
    fn bad_tables_are_rejected() {
        // b·a lands in coset 0 with a non-invertible action: coset map for
        // `a` sends both 0 and 1 to 0.
        let err = VfPresentation::new(
            1,
            vec!["b".to_string()],
            vec![
                (1, VfGenerator::Free(1), vec![1], 0),
                (1, VfGenerator::Free(-1), vec![-1], 0),
                (1, VfGenerator::Coset(1), vec![], 0),
            ],
        );
        assert!(matches!(err, Err(GroupError::InvalidDefinition(_))));

        // Missing row.
        let err = VfPresentation::new(
            1,
            vec!["b".to_string()],
            vec![(1, VfGenerator::Free(1), vec![-1], 1)],
        );
        assert!(matches!(err, Err(GroupError::InvalidDefinition(_))));
    }
}
