//! Conjugation witnesses and classification reports.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::poly::Polynomial;
use crate::trimap::{Order, TriangularMap};

/// An ordered list of elementary conjugators `τ_1, τ_2, ...` whose product
/// `τ = τ_1 ∘ τ_2 ∘ ...` satisfies `τ⁻¹ F τ = G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationWitness {
    steps: Vec<TriangularMap>,
    composed: TriangularMap,
}

impl ConjugationWitness {
    pub fn identity(field: Field, n: usize) -> Self {
        ConjugationWitness { steps: Vec::new(), composed: TriangularMap::identity(field, n) }
    }

    pub fn steps(&self) -> &[TriangularMap] {
        &self.steps
    }

    pub fn composed(&self) -> &TriangularMap {
        &self.composed
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a step on the right: the new conjugator is `τ ∘ step`.
    pub fn push(&mut self, step: TriangularMap) -> Result<()> {
        if step.is_identity() {
            return Ok(());
        }
        self.composed = self.composed.compose(&step)?;
        self.steps.push(step);
        Ok(())
    }

    pub fn extend(&mut self, other: &ConjugationWitness) -> Result<()> {
        for s in &other.steps {
            self.push(s.clone())?;
        }
        Ok(())
    }

    /// Whether the recomposed conjugator takes `f` to `g`, and the listed
    /// steps multiply to the stored product.
    pub fn verify(&self, f: &TriangularMap, g: &TriangularMap) -> Result<bool> {
        let mut product = TriangularMap::identity(f.field(), f.nvars());
        for s in &self.steps {
            product = product.compose(s)?;
        }
        if product != self.composed {
            return Ok(false);
        }
        Ok(&f.conjugate(&self.composed)? == g)
    }
}

/// Tracks a map while it is being conjugated step by step.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    pub current: TriangularMap,
    pub witness: ConjugationWitness,
}

impl Tracker {
    pub fn new(f: &TriangularMap) -> Self {
        Tracker { current: f.clone(), witness: ConjugationWitness::identity(f.field(), f.nvars()) }
    }

    pub fn conjugate_by(&mut self, step: TriangularMap) -> Result<()> {
        if step.is_identity() {
            return Ok(());
        }
        self.current = self.current.conjugate(&step)?;
        self.witness.push(step)
    }

    /// Conjugates by `(x_i + g)`.
    pub fn shift_row(&mut self, i: usize, g: Polynomial) -> Result<()> {
        let f = self.current.field();
        let n = self.current.nvars();
        self.conjugate_by(TriangularMap::elementary(f, n, i, g)?)
    }

    /// Conjugates by the diagonal map with the given scalars.
    pub fn scale(&mut self, scalars: Vec<Scalar>) -> Result<()> {
        let f = self.current.field();
        self.conjugate_by(TriangularMap::diagonal(f, scalars)?)
    }
}

/// Which class a map falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    /// The identity map.
    Identity,
    /// Conjugate to a translation of the last coordinate.
    Translation,
    /// Fixes the last coordinate; `(x + f(y), y)` shapes of order `p`.
    OrderP,
    /// Strictly triangular of maximal order `p^n`.
    MaxOrder,
    /// Characteristic zero with the last row fixed (the canonical-form branch
    /// that reduces coefficients instead of translating).
    FixedLast,
    /// Affine class.
    Affine,
    /// Unipotent of order `p^2` with translation `y + 1`.
    Unipotent,
    /// Resonant with x-coefficient 1 and `y`-coefficient of finite order.
    Mixed,
    /// Resonant with x-coefficient different from 1.
    Sequential,
}

impl ClassLabel {
    pub fn name(&self) -> &'static str {
        match self {
            ClassLabel::Identity => "identity",
            ClassLabel::Translation => "translation",
            ClassLabel::OrderP => "order-p",
            ClassLabel::MaxOrder => "max-order",
            ClassLabel::FixedLast => "fixed-last",
            ClassLabel::Affine => "A",
            ClassLabel::Unipotent => "U",
            ClassLabel::Mixed => "M",
            ClassLabel::Sequential => "S",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A classification: label, canonical representative, witness taking the
/// input to the representative, and the order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub label: ClassLabel,
    pub canonical: TriangularMap,
    pub witness: ConjugationWitness,
    pub order: Order,
}

impl ClassReport {
    pub(crate) fn from_tracker(label: ClassLabel, tracker: Tracker, order: Order) -> Self {
        ClassReport { label, canonical: tracker.current, witness: tracker.witness, order }
    }

    /// Re-checks the witness against the original input.
    pub fn verify(&self, input: &TriangularMap) -> Result<bool> {
        self.witness.verify(input, &self.canonical)
    }

    pub(crate) fn checked(self, input: &TriangularMap) -> Result<Self> {
        if !self.verify(input)? {
            return Err(Error::UnsupportedInput("internal: witness does not verify".into()));
        }
        Ok(self)
    }
}

/// The conjugating group: strictly triangular maps (`Ba`) or all triangular
/// maps (`Baa`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Ba,
    Baa,
}

impl std::str::FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Group::Ba),
            "baa" => Ok(Group::Baa),
            other => Err(Error::UnsupportedInput(format!("unknown group '{other}' (expected ba or baa)"))),
        }
    }
}
