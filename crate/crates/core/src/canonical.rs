//! One entry point for canonical forms across fields and dimensions.

use crate::charp::{canonical_max_order, classify_dim2_charp};
use crate::charzero::{canonical_char0, classify_baa2_char0, classify_ga1};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::trimap::TriangularMap;
use crate::witness::{ClassReport, Group};

/// Canonical form of `f` under conjugation by `group`:
///
/// * `n = 1`: affine maps `a x + b`, over any field;
/// * `F_p`, `n = 2`: the plane classification (identity, translation,
///   order `p`, maximal order, and the affine/unipotent/mixed/sequential
///   shapes under `Baa`);
/// * `F_p`, `n >= 3`: maximal-order maps under `Ba`;
/// * `Q`, `n = 2, 3`: strictly triangular maps, plus all plane maps under `Baa`.
pub fn canonical_form(f: &TriangularMap, group: Group) -> Result<ClassReport> {
    match (f.field(), f.nvars()) {
        (_, 1) => classify_ga1(f),
        (Field::Prime(_), 2) => classify_dim2_charp(f, group),
        (Field::Prime(_), _) => match group {
            Group::Ba => canonical_max_order(f),
            Group::Baa => Err(Error::UnsupportedInput("Baa canonical forms in positive characteristic need n = 2".into())),
        },
        (Field::Rationals, 2) if group == Group::Baa && !f.is_strictly_triangular() => classify_baa2_char0(f),
        (Field::Rationals, _) => canonical_char0(f, group),
    }
}
