//! Bundled worked examples: JSON definition files for groups, structures
//! and homomorphisms, plus a pass/fail battery that exercises the main
//! checks against them.
//!
//! The files live in the repository's `gallery/` directory.  [`documents`]
//! is the canonical source: [`write_all`] materializes it (run the test
//! suite with `AUTOGRP_BLESS=1` to regenerate after a change), and a test
//! asserts the files on disk match byte-for-byte.  The battery in [`rows`]
//! loads everything back through the [`io`](crate::io) definitions the way
//! the command-line tool does, so each row doubles as an end-to-end check
//! of the file formats.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::constructions::{product_structure, tilde_structure};
use crate::fsa::{star, union, Automaton};
use crate::groups::GroupModel;
use crate::homs::{free_sync_brp_decide, FreeSyncDecision};
use crate::io::{self, AlphaEntry, GroupDoc, GroupRef, HomDoc, IoError, StructureDoc};
use crate::report::{CheckReport, Verdict};
use crate::structures::{AutomaticStructure, EquivalenceMode, SweepOptions};
use crate::subgroups::{fixed_pipeline, kernel_pipeline};

/// The `gallery/` directory at the repository root.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("gallery")
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serialization cannot fail");
    out.push('\n');
    out
}

fn path(p: &str) -> GroupRef {
    GroupRef::Path(p.into())
}

fn hom_doc(source: &str, target: &str, images: &[(&str, &str)]) -> HomDoc {
    HomDoc {
        source: path(source),
        target: path(target),
        images: images
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    }
}

fn structure_doc(name: &str, group: GroupRef, language: Automaton) -> StructureDoc {
    StructureDoc {
        name: name.into(),
        group,
        language,
    }
}

/// `Z × Z` as a disjoint-union product, second factor re-marked `b`/`B`.
fn zz_doc() -> GroupDoc {
    GroupDoc::Product {
        left: Box::new(path("z.json")),
        right: Box::new(GroupRef::Inline(GroupDoc::FreeAbelian {
            rank: 1,
            alphabet: Some(vec![
                AlphaEntry::Labelled("b".into(), "a".into()),
                AlphaEntry::Labelled("B".into(), "A".into()),
            ]),
        })),
    }
}

fn zz_model() -> GroupModel {
    let z = GroupModel::free_abelian(1).unwrap();
    let marked = GroupModel::free_abelian_marked(1, &[("b", vec![1]), ("B", vec![-1])]).unwrap();
    GroupModel::product_union(&z, &marked).unwrap()
}

/// `F₂ × Z` as a disjoint-union product, second factor re-marked `t`/`T`.
fn f2xz_group_doc() -> GroupDoc {
    GroupDoc::Product {
        left: Box::new(path("f2.json")),
        right: Box::new(GroupRef::Inline(GroupDoc::FreeAbelian {
            rank: 1,
            alphabet: Some(vec![
                AlphaEntry::Labelled("t".into(), "a".into()),
                AlphaEntry::Labelled("T".into(), "A".into()),
            ]),
        })),
    }
}

fn f2xz_model() -> GroupModel {
    let f2 = GroupModel::free(2).unwrap();
    let marked = GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
    GroupModel::product_union(&f2, &marked).unwrap()
}

fn z3_doc() -> GroupDoc {
    GroupDoc::Finite {
        table: vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
        labels: Some(vec!["e".into(), "t".into(), "T".into()]),
    }
}

fn z3_model() -> GroupModel {
    GroupModel::finite(
        &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
        Some(vec!["e".into(), "t".into(), "T".into()]),
    )
    .unwrap()
}

fn shortlex_language_of(model: &GroupModel) -> Automaton {
    AutomaticStructure::shortlex("tmp", model.clone())
        .unwrap()
        .language()
        .clone()
}

/// Union of the Kleene stars of the given letter blocks.
fn block_star_language(model: &GroupModel, blocks: &[&[crate::fsa::Symbol]]) -> Automaton {
    let alpha = model.alphabet().clone();
    let mut acc = Automaton::empty_language(alpha.clone());
    for b in blocks {
        let lit = star(&Automaton::literal(alpha.clone(), b)).unwrap();
        acc = union(&acc, &lit).unwrap();
    }
    acc.minimize().unwrap()
}

/// All words over the model's alphabet.
fn all_words_language(model: &GroupModel) -> Automaton {
    let alpha = model.alphabet().clone();
    let mut letters = Automaton::empty_language(alpha.clone());
    for s in alpha.symbols() {
        letters = union(&letters, &Automaton::literal(alpha.clone(), &[s])).unwrap();
    }
    star(&letters).unwrap().minimize().unwrap()
}

/// Marked `Z` whose third letter `a2` spells `a²` (so its language can walk
/// by twos; `a2` has no marked inverse and the alphabet carries no pairing).
fn z_squares_group_doc() -> GroupDoc {
    GroupDoc::FreeAbelian {
        rank: 1,
        alphabet: Some(vec![
            AlphaEntry::Word("a".into()),
            AlphaEntry::Word("A".into()),
            AlphaEntry::Labelled("a2".into(), "aa".into()),
        ]),
    }
}

/// Every bundled file, as `(file name, canonical contents)`.
pub fn documents() -> Vec<(&'static str, String)> {
    let z = GroupModel::free_abelian(1).unwrap();
    let f2 = GroupModel::free(2).unwrap();
    let z_geo_lang = shortlex_language_of(&z);
    let f2_lang = shortlex_language_of(&f2);
    let z_squares_model =
        io::build_group(&z_squares_group_doc(), Path::new(".")).expect("inline document builds");

    vec![
        // Groups.
        (
            "z.json",
            pretty(&GroupDoc::FreeAbelian {
                rank: 1,
                alphabet: None,
            }),
        ),
        (
            "f2.json",
            pretty(&GroupDoc::Free {
                rank: 2,
                alphabet: None,
            }),
        ),
        ("zz.json", pretty(&zz_doc())),
        ("f2xz_group.json", pretty(&f2xz_group_doc())),
        ("z3.json", pretty(&z3_doc())),
        // Structures.
        (
            "z_geo.json",
            pretty(&structure_doc("z_geo", path("z.json"), z_geo_lang.clone())),
        ),
        (
            "z_L0.json",
            pretty(&structure_doc("z_L0", path("z.json"), z_geo_lang.clone())),
        ),
        (
            // Words in blocks of three that advance one step per block.
            "z_L1.json",
            pretty(&structure_doc(
                "z_L1",
                path("z.json"),
                block_star_language(&z, &[&[0, 1, 0], &[1, 0, 1]]),
            )),
        ),
        (
            "z_squares.json",
            pretty(&structure_doc(
                "z_squares",
                GroupRef::Inline(z_squares_group_doc()),
                block_star_language(&z_squares_model, &[&[0], &[1], &[2]]),
            )),
        ),
        (
            "f2_shortlex.json",
            pretty(&structure_doc("f2_shortlex", path("f2.json"), f2_lang.clone())),
        ),
        (
            "f2_geo.json",
            pretty(&structure_doc("f2_geo", path("f2.json"), f2_lang)),
        ),
        (
            "zz_astarbstar.json",
            pretty(&structure_doc(
                "zz_astarbstar",
                path("zz.json"),
                shortlex_language_of(&zz_model()),
            )),
        ),
        (
            "f2xz.json",
            pretty(&structure_doc(
                "f2xz",
                path("f2xz_group.json"),
                shortlex_language_of(&f2xz_model()),
            )),
        ),
        (
            "finite_L_Astar.json",
            pretty(&structure_doc(
                "finite_L_Astar",
                path("z3.json"),
                all_words_language(&z3_model()),
            )),
        ),
        // Homomorphisms.
        (
            "inner_a.json",
            pretty(&hom_doc("f2.json", "f2.json", &[("a", "a"), ("b", "abA")])),
        ),
        (
            "swap.json",
            pretty(&hom_doc("f2.json", "f2.json", &[("a", "b"), ("b", "a")])),
        ),
        (
            "square.json",
            pretty(&hom_doc("z.json", "z.json", &[("a", "aa")])),
        ),
        (
            "proj.json",
            pretty(&hom_doc("zz.json", "zz.json", &[("a", "a"), ("b", "")])),
        ),
        (
            "theta_aa2.json",
            pretty(&hom_doc("z.json", "zz.json", &[("a", "abb")])),
        ),
        (
            "gersten_short.json",
            pretty(&hom_doc(
                "f2xz_group.json",
                "f2xz_group.json",
                &[("a", "a"), ("b", "bt"), ("t", "t")],
            )),
        ),
    ]
}

/// Write every bundled file into `dir`, creating it if needed.
pub fn write_all(dir: &Path) -> Result<(), IoError> {
    std::fs::create_dir_all(dir).map_err(|source| IoError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, text) in documents() {
        io::write_text(&dir.join(name), &text)?;
    }
    Ok(())
}

/// Outcome of one battery row.
pub struct RowResult {
    pub pass: bool,
    pub detail: String,
}

/// One named example run: loads its inputs from the gallery directory and
/// grades the outcome against the stated expectation.
pub struct GalleryRow {
    pub name: &'static str,
    pub topic: &'static str,
    pub expectation: &'static str,
    pub run: fn(&Path) -> Result<RowResult, String>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_s(dir: &Path, file: &str) -> Result<AutomaticStructure, String> {
    io::load_structure(&dir.join(file))
        .map(|(s, _)| s)
        .map_err(|e| format!("{file}: {e}"))
}

fn load_h(dir: &Path, file: &str) -> Result<crate::homs::GroupHomomorphism, String> {
    io::load_hom(&dir.join(file)).map_err(|e| format!("{file}: {e}"))
}

fn describe(r: &CheckReport) -> String {
    match &r.verdict {
        Verdict::Constant { value, verified_to } => {
            format!("{} = {value} (verified to {verified_to})", r.check)
        }
        Verdict::Failure { witness } => format!(
            "{} unbounded; witness {}",
            r.check,
            serde_json::to_string(witness).unwrap_or_else(|_| "?".into())
        ),
    }
}

fn graded(expect_constant: bool, r: CheckReport) -> RowResult {
    RowResult {
        pass: r.is_constant() == expect_constant,
        detail: describe(&r),
    }
}

fn run_z_geodesics_ft(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_geo.json")?;
    let r = s.ft_check(&SweepOptions::to_length(8), false).map_err(err)?;
    Ok(graded(true, r))
}

fn run_z_squares_sync_ft(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_squares.json")?;
    let r = s
        .ft_check(&SweepOptions::to_length(12), false)
        .map_err(err)?;
    Ok(graded(false, r))
}

fn run_z_squares_async_ft(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_squares.json")?;
    let r = s.async_ft_check(&SweepOptions::to_length(12)).map_err(err)?;
    let pass = r.constant_value().is_some_and(|v| v <= 2.0);
    Ok(RowResult {
        pass,
        detail: describe(&r),
    })
}

fn run_z_blocks_sync(dir: &Path) -> Result<RowResult, String> {
    let l0 = load_s(dir, "z_L0.json")?;
    let l1 = load_s(dir, "z_L1.json")?;
    let r = l0
        .equivalence_check(&l1, EquivalenceMode::Synchronous, &SweepOptions::to_length(12))
        .map_err(err)?;
    Ok(graded(false, r))
}

fn run_z_blocks_async(dir: &Path) -> Result<RowResult, String> {
    let l0 = load_s(dir, "z_L0.json")?;
    let l1 = load_s(dir, "z_L1.json")?;
    let r = l0
        .equivalence_check(&l1, EquivalenceMode::Asynchronous, &SweepOptions::to_length(12))
        .map_err(err)?;
    Ok(graded(true, r))
}

fn run_z_departure(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_geo.json")?;
    let r = s.departure_check(&SweepOptions::to_length(8)).map_err(err)?;
    Ok(graded(true, r))
}

fn run_finite_departure(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "finite_L_Astar.json")?;
    let r = s.departure_check(&SweepOptions::to_length(8)).map_err(err)?;
    Ok(graded(false, r))
}

fn run_f2_ft(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "f2_shortlex.json")?;
    let r = s.ft_check(&SweepOptions::to_length(8), false).map_err(err)?;
    Ok(graded(true, r))
}

fn run_f2_length_difference(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "f2_shortlex.json")?;
    let r = s
        .length_difference_check(&SweepOptions::to_length(8))
        .map_err(err)?;
    Ok(graded(true, r))
}

fn run_inner_sync_brp(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "f2_geo.json")?;
    let phi = load_h(dir, "inner_a.json")?;
    let r = phi.check_sync_brp(&s, &s, 6).map_err(err)?;
    Ok(graded(true, r.report))
}

fn run_square_sync_brp(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_geo.json")?;
    let phi = load_h(dir, "square.json")?;
    let r = phi.check_sync_brp(&s, &s, 8).map_err(err)?;
    Ok(graded(false, r.report))
}

fn run_swap_decide(dir: &Path) -> Result<RowResult, String> {
    let phi = load_h(dir, "swap.json")?;
    let d = free_sync_brp_decide(&phi).map_err(err)?;
    Ok(match d {
        FreeSyncDecision::Yes {
            conjugator,
            permutation,
        } => RowResult {
            pass: true,
            detail: format!(
                "letter permutation {permutation:?} conjugated by {conjugator:?}"
            ),
        },
        FreeSyncDecision::No { reason } => RowResult {
            pass: false,
            detail: reason,
        },
    })
}

fn run_proj_kernel(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "zz_astarbstar.json")?;
    let phi = load_h(dir, "proj.json")?;
    let report = kernel_pipeline(&phi, &s, 8).map_err(err)?;
    let all_constant = report.quasiconvexity.is_constant()
        && report.auxiliary.iter().all(|r| r.is_constant());
    Ok(RowResult {
        pass: all_constant && report.ball.len() == 17,
        detail: format!(
            "kernel ball has {} elements; {}",
            report.ball.len(),
            describe(&report.quasiconvexity)
        ),
    })
}

fn run_gersten_short_fixed(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "f2xz.json")?;
    let phi = load_h(dir, "gersten_short.json")?;
    let report = fixed_pipeline(&phi, &s, 9).map_err(err)?;
    Ok(RowResult {
        pass: !report.quasiconvexity.is_constant(),
        detail: describe(&report.quasiconvexity),
    })
}

fn run_product_of_lines(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "z_geo.json")?;
    let p = product_structure(&s, &s).map_err(err)?;
    let r = p.ft_check(&SweepOptions::to_length(8), false).map_err(err)?;
    Ok(graded(true, r))
}

fn run_conjugation_pull_back(dir: &Path) -> Result<RowResult, String> {
    let s = load_s(dir, "f2_shortlex.json")?;
    let phi = load_h(dir, "inner_a.json")?;
    let t = tilde_structure(&s, &phi, 6).map_err(err)?;
    let pass = t.checks.iter().all(|r| r.is_constant());
    let detail = t
        .checks
        .iter()
        .map(|r| {
            format!(
                "{}={}",
                r.check,
                r.constant_value()
                    .map_or_else(|| "fail".into(), |v| v.to_string())
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    Ok(RowResult { pass, detail })
}

/// The full battery.  Topics group related rows so a subset can be run
/// (`z_examples`, `departure`, `f2`, `brp`, `pipelines`, `constructions`).
pub fn rows() -> Vec<GalleryRow> {
    vec![
        GalleryRow {
            name: "z-geodesics-ft",
            topic: "z_examples",
            expectation: "geodesic words fellow-travel with a bounded constant",
            run: run_z_geodesics_ft,
        },
        GalleryRow {
            name: "z-squares-sync-ft",
            topic: "z_examples",
            expectation: "double-step words drift apart when read in step",
            run: run_z_squares_sync_ft,
        },
        GalleryRow {
            name: "z-squares-async-ft",
            topic: "z_examples",
            expectation: "the same words stay within 2 when either side may idle",
            run: run_z_squares_async_ft,
        },
        GalleryRow {
            name: "z-block-classes-sync",
            topic: "z_examples",
            expectation: "one-step and three-step spellings of Z diverge in step",
            run: run_z_blocks_sync,
        },
        GalleryRow {
            name: "z-block-classes-async",
            topic: "z_examples",
            expectation: "the same two spellings stay close when either side may idle",
            run: run_z_blocks_async,
        },
        GalleryRow {
            name: "z-departure",
            topic: "departure",
            expectation: "long geodesic words leave every ball",
            run: run_z_departure,
        },
        GalleryRow {
            name: "finite-departure",
            topic: "departure",
            expectation: "unreduced words over a finite group loop inside one ball",
            run: run_finite_departure,
        },
        GalleryRow {
            name: "f2-shortlex-ft",
            topic: "f2",
            expectation: "shortlex normal forms fellow-travel in the free group",
            run: run_f2_ft,
        },
        GalleryRow {
            name: "f2-length-difference",
            topic: "f2",
            expectation: "adjacent normal forms differ in length by at most 1",
            run: run_f2_length_difference,
        },
        GalleryRow {
            name: "inner-conjugation-sync-brp",
            topic: "brp",
            expectation: "conjugation moves geodesic paths a bounded distance",
            run: run_inner_sync_brp,
        },
        GalleryRow {
            name: "squaring-sync-brp",
            topic: "brp",
            expectation: "doubling stretches paths without bound when read in step",
            run: run_square_sync_brp,
        },
        GalleryRow {
            name: "swap-is-permutation",
            topic: "brp",
            expectation: "swapping the generators is a conjugated letter permutation",
            run: run_swap_decide,
        },
        GalleryRow {
            name: "projection-kernel",
            topic: "pipelines",
            expectation: "the kernel of the first-coordinate projection is the marked axis",
            run: run_proj_kernel,
        },
        GalleryRow {
            name: "gersten-short-fixed",
            topic: "pipelines",
            expectation: "the fixed subgroup of the shift map is distorted",
            run: run_gersten_short_fixed,
        },
        GalleryRow {
            name: "product-of-lines",
            topic: "constructions",
            expectation: "the product structure keeps a bounded constant",
            run: run_product_of_lines,
        },
        GalleryRow {
            name: "conjugation-pull-back",
            topic: "constructions",
            expectation: "pulling geodesics back through conjugation stays automatic",
            run: run_conjugation_pull_back,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bless_rewrites_the_bundled_files() {
        if std::env::var_os("AUTOGRP_BLESS").is_none() {
            return;
        }
        write_all(&default_dir()).unwrap();
    }

    #[test]
    fn bundled_files_match_their_builders() {
        let dir = default_dir();
        for (name, want) in documents() {
            let path = dir.join(name);
            let got = std::fs::read_to_string(&path).unwrap_or_else(|e| {
                panic!(
                    "{}: {e}; run the suite with AUTOGRP_BLESS=1 to regenerate",
                    path.display()
                )
            });
            assert_eq!(
                got, want,
                "{name} is stale; run the suite with AUTOGRP_BLESS=1 to regenerate"
            );
        }
    }

    #[test]
    fn bundled_files_load() {
        let dir = default_dir();
        for (name, text) in documents() {
            let p = dir.join(name);
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            if v.get("kind").is_some() {
                io::load_group(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            } else if v.get("images").is_some() {
                io::load_hom(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            } else {
                io::load_structure(&p)
                    .map(|_| ())
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }

    #[test]
    fn quick_rows_pass() {
        let dir = default_dir();
        for row in rows()
            .into_iter()
            .filter(|r| matches!(r.topic, "z_examples" | "departure"))
        {
            let res = (row.run)(&dir).unwrap_or_else(|e| panic!("{}: {e}", row.name));
            assert!(res.pass, "{}: {}", row.name, res.detail);
        }
    }
}
