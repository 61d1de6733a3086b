//! Proposition-level semantics over projection lattices.
//!
//! A proposition is true in a state when the state is fixed by its
//! projection. The anchored implication adds a global side condition: the
//! consequent must commute with every generator of the anchor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, complex_norm, spectral_threshold_projection, subspace_join, subspace_meet, ComplexMatrix, EffectOp,
    ProjectionOp, StateVector, C64, DEFAULT_TOL,
};

/// Cutoff on `‖E_A ψ − ψ‖` for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Proposition {
    pub projection: ProjectionOp,
    pub label: String,
}

impl Proposition {
    pub fn new(label: impl Into<String>, projection: ProjectionOp) -> Self {
        Self { projection, label: label.into() }
    }

    pub fn dim(&self) -> usize {
        self.projection.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.projection.matrix()
    }
}

/// Finite generator list. One generator is the single-projection anchor;
/// several stand for the algebra they generate.
#[derive(Clone, Debug, PartialEq)]
pub struct Anchor {
    generators: Vec<ProjectionOp>,
}

impl Anchor {
    pub fn new(generators: Vec<ProjectionOp>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::HypothesisViolated("anchor needs at least one generator".into()))?;
        let dim = first.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        if generators.iter().all(ProjectionOp::is_zero) {
            return Err(Error::HypothesisViolated("anchor generators are all zero".into()));
        }
        Ok(Self { generators })
    }

    pub fn single(p: ProjectionOp) -> Result<Self> {
        Self::new(vec![p])
    }

    pub fn generators(&self) -> &[ProjectionOp] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    /// Largest `‖[X, P_i]‖_F` over the generators.
    pub fn max_commutator(&self, x: &ComplexMatrix) -> Result<f64> {
        self.generators.iter().try_fold(0.0f64, |acc, g| Ok(acc.max(commutator(x, g.matrix())?.frobenius_norm())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Valuation {
    pub value: bool,
    pub side_condition_held: bool,
    pub vacuous: bool,
}

impl Valuation {
    fn plain(value: bool) -> Self {
        Self { value, side_condition_held: true, vacuous: false }
    }

    pub fn bit(&self) -> u8 {
        u8::from(self.value)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn member(p: &ProjectionOp, psi: &StateVector) -> Result<bool> {
    check_dim(p.dim(), psi.dim())?;
    let image = p.matrix().mul_vec(psi.entries())?;
    let diff: Vec<C64> = image.iter().zip(psi.entries()).map(|(a, b)| a - b).collect();
    Ok(complex_norm(&diff) <= MEMBERSHIP_TOL)
}

/// Binary valuation: 1 iff `E_A ψ = ψ`.
pub fn valuate(a: &Proposition, psi: &StateVector) -> Result<Valuation> {
    Ok(Valuation::plain(member(&a.projection, psi)?))
}

pub fn commutation_side_condition(b: &Proposition, anchor: &Anchor) -> Result<bool> {
    check_dim(anchor.dim(), b.dim())?;
    Ok(anchor.max_commutator(b.matrix())? <= b.projection.tol().max(DEFAULT_TOL))
}

fn implication(antecedent: bool, consequent: bool, side: bool) -> Valuation {
    if !antecedent {
        Valuation { value: true, side_condition_held: side, vacuous: true }
    } else {
        Valuation { value: consequent && side, side_condition_held: side, vacuous: false }
    }
}

/// Anchored implication `A ⇒_P B` at `ψ`.
pub fn anchored_implication(a: &Proposition, b: &Proposition, anchor: &Anchor, psi: &StateVector) -> Result<Valuation> {
    check_dim(a.dim(), b.dim())?;
    let side = commutation_side_condition(b, anchor)?;
    let va = member(&a.projection, psi)?;
    let vb = member(&b.projection, psi)?;
    Ok(implication(va, vb, side))
}

/// `I − E_A + E_A E_B`, only in a commuting context.
///
/// Refuses when either proposition fails to commute with a generator, or
/// when `E_A` and `E_B` fail to commute with each other (the expression is
/// then not a projection).
pub fn reduced_implication_projection(a: &Proposition, b: &Proposition, anchor: &Anchor) -> Result<ProjectionOp> {
    check_dim(a.dim(), b.dim())?;
    check_dim(anchor.dim(), a.dim())?;
    let tol = a.projection.tol().max(b.projection.tol());
    for (prop, name) in [(a, "A"), (b, "B")] {
        for (i, g) in anchor.generators().iter().enumerate() {
            let residual = commutator(prop.matrix(), g.matrix())?.frobenius_norm();
            if residual > tol {
                return Err(Error::CommutationRequired {
                    what: format!("[E_{name}, P_{i}] ({})", prop.label),
                    residual,
                });
            }
        }
    }
    classical_implication(&a.projection, &b.projection)
}

fn classical_implication(ea: &ProjectionOp, eb: &ProjectionOp) -> Result<ProjectionOp> {
    let residual = commutator(ea.matrix(), eb.matrix())?.frobenius_norm();
    if residual > ea.tol().max(eb.tol()) {
        return Err(Error::CommutationRequired { what: "[E_A, E_B]".into(), residual });
    }
    let n = ea.dim();
    let m = &(&ComplexMatrix::identity(n) - ea.matrix()) + &(ea.matrix() * eb.matrix());
    ProjectionOp::with_tol(m, ea.tol().max(eb.tol()))
}

/// `A^⊥ ∨ (A ∧ B)`
pub fn sasaki_hook(a: &Proposition, b: &Proposition) -> Result<ProjectionOp> {
    let meet = subspace_meet(&a.projection, &b.projection)?;
    subspace_join(&a.projection.complement(), &meet)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoSynonymRow {
    pub a: u8,
    pub b: u8,
    /// Anchored value when `[E_B, P] ≠ 0`.
    pub noncommuting: u8,
    /// Anchored value when `[E_A, P] = [E_B, P] = 0`.
    pub commuting: u8,
    /// Material implication `¬A ∨ B`.
    pub classical: u8,
    pub mismatch: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoSynonymTable {
    pub rows: Vec<NoSynonymRow>,
}

impl NoSynonymTable {
    pub fn mismatch_rows(&self) -> Vec<(u8, u8)> {
        self.rows.iter().filter(|r| r.mismatch).map(|r| (r.a, r.b)).collect()
    }
}

/// Truth table over the two-dimensional scenario family.
///
/// For each `(a, b)` the propositions are `span{e₁}` when the bit is 1 and
/// `span{e₂}` otherwise, evaluated at `ψ = e₁`. The commuting regime uses
/// `P = diag(1, 0)`; the non-commuting one `P = ½[[1,1],[1,1]]`.
pub fn no_synonym_table() -> Result<NoSynonymTable> {
    let e1 = ProjectionOp::diag(&[1.0, 0.0])?;
    let e2 = ProjectionOp::diag(&[0.0, 1.0])?;
    let commuting = Anchor::single(ProjectionOp::diag(&[1.0, 0.0])?)?;
    let noncommuting = Anchor::single(ProjectionOp::rank_one_real(&[1.0, 1.0])?)?;
    let psi = StateVector::basis(2, 0);
    let pick = |bit: u8| if bit == 1 { e1.clone() } else { e2.clone() };

    let mut rows = Vec::with_capacity(4);
    for (a_bit, b_bit) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        let a = Proposition::new(format!("A={a_bit}"), pick(a_bit));
        let b = Proposition::new(format!("B={b_bit}"), pick(b_bit));
        debug_assert_eq!(valuate(&a, &psi)?.bit(), a_bit);
        debug_assert_eq!(valuate(&b, &psi)?.bit(), b_bit);

        let nc = anchored_implication(&a, &b, &noncommuting, &psi)?;
        let co = anchored_implication(&a, &b, &commuting, &psi)?;
        let reduced = reduced_implication_projection(&a, &b, &commuting)?;
        let classical = member(&reduced, &psi)?;
        rows.push(NoSynonymRow {
            a: a_bit,
            b: b_bit,
            noncommuting: nc.bit(),
            commuting: co.bit(),
            classical: u8::from(classical),
            mismatch: nc.value != co.value,
        });
    }
    Ok(NoSynonymTable { rows })
}

/// `(E_X ≤ I − E_A + E_A E_B, E_A E_X ≤ E_B)` for a commuting family.
pub fn residuation_check(a: &Proposition, b: &Proposition, x: &Proposition, anchor: &Anchor) -> Result<(bool, bool)> {
    for p in [a, b, x] {
        check_dim(anchor.dim(), p.dim())?;
        let r = anchor.max_commutator(p.matrix())?;
        if r > p.projection.tol().max(DEFAULT_TOL) {
            return Err(Error::HypothesisViolated(format!(
                "{} does not commute with the anchor (‖[E, P]‖ = {r:.3e})",
                p.label
            )));
        }
    }
    let r = commutator(a.matrix(), x.matrix())?.frobenius_norm();
    if r > DEFAULT_TOL {
        return Err(Error::HypothesisViolated(format!(
            "{} and {} do not commute (‖[E_A, E_X]‖ = {r:.3e})",
            a.label, x.label
        )));
    }
    let implication = reduced_implication_projection(a, b, anchor)?;
    let lhs = x.projection.le(&implication)?;
    let ax = ProjectionOp::with_tol(a.matrix() * x.matrix(), DEFAULT_TOL)?;
    let rhs = ax.le(&b.projection)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug)]
pub enum SequentRule {
    /// From `¬A` conclude `A ⇒_P B`.
    IntroVac { a: Proposition, b: Proposition, anchor: Anchor, psi: StateVector },
    /// From `A`, `B`, `[E_B, P] = 0` conclude `A ⇒_P B`.
    IntroComm { a: Proposition, b: Proposition, anchor: Anchor, psi: StateVector },
    /// From `A ⇒_P B`, `A`, `[E_B, P] = 0` conclude `B`.
    Elim { a: Proposition, b: Proposition, anchor: Anchor, psi: StateVector },
    /// From `A ≤ A'`, `[E_B, P] = 0` conclude `(A ⇒_P B) ≤ (A' ⇒_P B)` at every listed state.
    Mono { a: Proposition, a_prime: Proposition, b: Proposition, anchor: Anchor, states: Vec<StateVector> },
}

impl SequentRule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::IntroVac { .. } => "AI-Intro-Vac",
            Self::IntroComm { .. } => "AI-Intro-Comm",
            Self::Elim { .. } => "AI-Elim",
            Self::Mono { .. } => "AI-Mono(A)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequentVerdict {
    pub rule: &'static str,
    /// Whether every premise and side condition holds.
    pub premises_hold: bool,
    /// Whether the conclusion holds.
    pub conclusion_holds: bool,
    /// For `AI-Mono(A)`: index of the first listed state where the order fails.
    pub failing_state: Option<usize>,
}

impl SequentVerdict {
    /// Sound application: premises imply the conclusion.
    pub fn valid(&self) -> bool {
        !self.premises_hold || self.conclusion_holds
    }
}

pub fn sequent_apply(rule: &SequentRule) -> Result<SequentVerdict> {
    let name = rule.name();
    let verdict = |premises_hold, conclusion_holds| SequentVerdict {
        rule: name,
        premises_hold,
        conclusion_holds,
        failing_state: None,
    };
    match rule {
        SequentRule::IntroVac { a, b, anchor, psi } => {
            let va = member(&a.projection, psi)?;
            let imp = anchored_implication(a, b, anchor, psi)?;
            Ok(verdict(!va, imp.value))
        }
        SequentRule::IntroComm { a, b, anchor, psi } => {
            let premises =
                member(&a.projection, psi)? && member(&b.projection, psi)? && commutation_side_condition(b, anchor)?;
            let imp = anchored_implication(a, b, anchor, psi)?;
            Ok(verdict(premises, imp.value))
        }
        SequentRule::Elim { a, b, anchor, psi } => {
            let premises = anchored_implication(a, b, anchor, psi)?.value
                && member(&a.projection, psi)?
                && commutation_side_condition(b, anchor)?;
            Ok(verdict(premises, member(&b.projection, psi)?))
        }
        SequentRule::Mono { a, a_prime, b, anchor, states } => {
            if states.is_empty() {
                return Err(Error::MalformedPremises("AI-Mono(A) needs at least one state".into()));
            }
            check_dim(a.dim(), a_prime.dim())?;
            let premises = a.projection.le(&a_prime.projection)? && commutation_side_condition(b, anchor)?;
            // Evaluated as stated, `v(A ⇒ B) ≤ v(A' ⇒ B)`. A state in
            // A' \ A outside B gives 1 ≤ 0, so the order can fail.
            let mut failing_state = None;
            for (i, psi) in states.iter().enumerate() {
                let lo = anchored_implication(a, b, anchor, psi)?;
                let hi = anchored_implication(a_prime, b, anchor, psi)?;
                if lo.bit() > hi.bit() {
                    failing_state = Some(i);
                    break;
                }
            }
            Ok(SequentVerdict { failing_state, ..verdict(premises, failing_state.is_none()) })
        }
    }
}

/// Result of the thresholded-effect implication.
#[derive(Clone, Debug)]
pub struct TauImplication {
    pub valuation: Valuation,
    pub threshold_a: ProjectionOp,
    pub threshold_b: ProjectionOp,
    /// `I − P_{A,τ} + P_{A,τ} P_{B,τ}` when `[A, P] = [B, P] = 0`.
    pub reduced: Option<ProjectionOp>,
    /// `[B, P] ≠ 0` yet `[P_{B,τ}, P] = 0`: the effect-level and
    /// projection-level side conditions disagree.
    pub side_condition_ambiguous: bool,
    /// Eigenvalues of either effect that tied with `τ`.
    pub ties: Vec<f64>,
}

/// `τ`-anchored implication between effects. The side condition is
/// checked on the effect `B` itself.
pub fn tau_anchored_implication(
    a: &EffectOp,
    b: &EffectOp,
    anchor: &Anchor,
    tau: f64,
    psi: &StateVector,
) -> Result<TauImplication> {
    check_dim(a.dim(), b.dim())?;
    check_dim(anchor.dim(), a.dim())?;
    check_dim(a.dim(), psi.dim())?;
    let ta = spectral_threshold_projection(a, tau)?;
    let tb = spectral_threshold_projection(b, tau)?;
    let tol = a.tol().max(b.tol()).max(DEFAULT_TOL);

    let side = anchor.max_commutator(b.matrix())? <= tol;
    let a_commutes = anchor.max_commutator(a.matrix())? <= tol;
    let tb_commutes = anchor.max_commutator(tb.projection.matrix())? <= tol;

    let va = member(&ta.projection, psi)?;
    let vb = member(&tb.projection, psi)?;
    let reduced = if side && a_commutes { Some(classical_implication(&ta.projection, &tb.projection)?) } else { None };
    let mut ties = ta.ties;
    ties.extend(tb.ties);
    Ok(TauImplication {
        valuation: implication(va, vb, side),
        threshold_a: ta.projection,
        threshold_b: tb.projection,
        reduced,
        side_condition_ambiguous: !side && tb_commutes,
        ties,
    })
}
