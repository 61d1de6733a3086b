//! Acceptance run: twelve criteria, one PASS/FAIL line each.
//!
//! Criterion 12 aggregates the randomized property checks of every module
//! and prints one indented line per property. The antecedent-monotonicity
//! property is known to be false; the run expects that single failure,
//! requires a concrete counterexample for it, and fails on anything else.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anchorlab::iteration::{certify_block, Block, EnvelopeSpec, EventSchedule, PowerIndex};
use anchorlab::linalg::{distance, norm};
use anchorlab::operators::lipschitz_sampled_lower;
use anchorlab::{
    anchored_implication, anchored_run, block_certify, classical_rate_check, common_fixed_point, commutator,
    envelope_check, hermitian_eigendecomposition, lipschitz_certified, no_synonym_table, operator_norm,
    power_contraction_index, reduced_implication_projection, residuation_check, run_orbit, sasaki_hook,
    spectral_threshold_projection, subspace_join, subspace_meet, tau_anchored_implication, tightness_schedule, valuate,
    Anchor, ComplexMatrix, ConvexSet, EffectOp, FixedPointPolicy, OperatorMap, OperatorSequence, ProjectionOp,
    Proposition, RealMatrix, StateVector, TightnessVariant, C64,
};
use anchorlab_cli::report::{render, Format};
use anchorlab_cli::scenarios::{random_unitary, run_builtin, CommutingTriple, RunOptions, CATALOG};
use anchorlab_cli::ScenarioReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const EXACT: f64 = 1e-12;
const ALG_TOL: f64 = 1e-10;

struct Line {
    label: String,
    passed: bool,
    detail: String,
}

impl Line {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { label: label.into(), passed, detail: detail.into() }
    }

    fn print(&self, indent: &str) {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            println!("{indent}{verdict} {}", self.label);
        } else {
            println!("{indent}{verdict} {} ({})", self.label, self.detail);
        }
    }
}

fn scenario(name: &str) -> ScenarioReport {
    run_builtin(name, &RunOptions::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn failures(r: &ScenarioReport) -> String {
    r.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join("; ")
}

/// Checks whose name starts with `prefix`, all passing and at least one present.
fn checks_pass(r: &ScenarioReport, prefix: &str) -> bool {
    let mut any = false;
    for c in r.checks.iter().filter(|c| c.name.starts_with(prefix)) {
        any = true;
        if !c.passed {
            return false;
        }
    }
    any
}

fn trace_dists(r: &ScenarioReport) -> Vec<f64> {
    r.table.trace_rows().expect("trace table").iter().map(|t| t.dist).collect()
}

// ---------------------------------------------------------------------------
// criteria 1-11
// ---------------------------------------------------------------------------

/// Staircase coordinates, transcribed independently of the scenario table.
fn staircase_oracle(n: usize) -> f64 {
    match n / 4 {
        0 => 1.0,
        1 => 0.8,
        2 => 0.64,
        3 => 0.512,
        4 => 0.4096,
        5 => 0.32768,
        6 => 0.262144,
        _ => 0.2097152,
    }
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let r = scenario("fig1-periodic");
    let elapsed = start.elapsed();
    let d = trace_dists(&r);
    let worst = (0..32).map(|n| (d[n] - staircase_oracle(n)).abs()).fold(0.0, f64::max);
    let ok = r.passed && d.len() == 32 && worst <= EXACT && elapsed < Duration::from_secs(1);
    Line::new(
        "1 fig1 staircase 0.8^⌊n/4⌋, 32 coordinates",
        ok,
        format!("max error {worst:.1e}, {elapsed:.2?} {}", failures(&r)),
    )
}

fn criterion_2() -> Line {
    let r = scenario("fig2-envelope");
    let d = trace_dists(&r);
    let rows = r.table.trace_rows().unwrap();
    let mut ok = r.passed;
    // envelope multiplies dist(0); equality at every event 4..28
    for n in (4..=28).step_by(4) {
        let bound = 0.8f64.powi((n / 4) as i32) * d[0];
        ok &= (d[n] - bound).abs() <= EXACT && rows[n].event_flag;
    }
    for n in 4..d.len() {
        ok &= d[n] <= 0.8f64.powi((n / 4) as i32) * d[0] + EXACT;
        ok &= d[n] <= 0.8f64.powi(((n - 4) / 4) as i32) * d[4] + EXACT;
    }
    let slope = (d[28].ln() - d[4].ln()) / 24.0;
    ok &= (slope - 0.8f64.ln() / 4.0).abs() <= EXACT;
    Line::new(
        "2 fig2 envelope equality at n = 4..28, slope ln(0.8)/4",
        ok,
        format!("slope {slope:.15} {}", failures(&r)),
    )
}

fn criterion_3() -> Line {
    let e_b = ComplexMatrix::diag(&[1.0, 0.0]);
    let p = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    // [E_B, P] by hand: E_B P − P E_B
    let ep = [[0.5, 0.5], [0.0, 0.0]];
    let pe = [[0.5, 0.0], [0.5, 0.0]];
    let c = commutator(&e_b, &p).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = ep[i][j] - pe[i][j];
            worst = worst.max((c.get(i, j) - C64::new(expected, 0.0)).norm());
        }
    }
    let r = scenario("logic-noncommuting-anchor");
    Line::new(
        "3 non-commuting anchor: [E_B,P] = ½[[0,1],[−1,0]], implication 0 at e₁",
        r.passed && worst <= 1e-15,
        format!("max entry error {worst:.1e} {}", failures(&r)),
    )
}

fn criterion_4() -> Line {
    let r = scenario("logic-no-synonym");
    let table = no_synonym_table().unwrap();
    let rows: Vec<String> = table.rows.iter().filter(|r| r.mismatch).map(|r| format!("{}{}", r.a, r.b)).collect();
    let material_ok = table.rows.iter().all(|r| r.classical == u8::from(r.a == 0 || r.b == 1));
    Line::new(
        "4 no-synonym tables differ exactly at row 11",
        r.passed && rows == ["11"] && material_ok && table.rows.len() == 4,
        format!("mismatch rows {rows:?}"),
    )
}

fn criterion_5() -> Line {
    let start = Instant::now();
    let r = scenario("logic-commuting-reduction");
    let elapsed = start.elapsed();
    let mismatches = r.checks[0].observed.unwrap_or(f64::NAN);
    Line::new(
        "5 commuting reduction: 500 triples × 100 eigenstates",
        r.passed && mismatches == 0.0 && elapsed < Duration::from_secs(30),
        format!("{mismatches} mismatches, {elapsed:.2?}"),
    )
}

fn criterion_6() -> Line {
    let r = scenario("hetero-alternating");
    let d = trace_dists(&r);
    let mut ok = r.passed;
    for k in (2..=20).step_by(2) {
        ok &= (d[5 * k / 2] - 0.63f64.powi((k / 2) as i32)).abs() <= EXACT;
    }
    let expected = (0.7f64.ln() + 0.9f64.ln()) / 5.0;
    for p in 1..=10 {
        let n = 5 * p;
        ok &= ((d[n].ln() - d[0].ln()) / n as f64 - expected).abs() <= EXACT;
    }
    Line::new("6 heterogeneous (0.7,2),(0.9,3): 0.63^(K/2), slope per period", ok, failures(&r))
}

fn criterion_7() -> Line {
    let r = scenario("borderline-slope");
    // direct summation as a second oracle next to the telescoped one
    let slope = |k: usize| {
        let (mut log_sum, mut steps) = (0.0, 0usize);
        for j in 2..=k + 1 {
            log_sum += (1.0 - 1.0 / (j * j) as f64).ln();
            steps += j * j;
        }
        log_sum / steps as f64
    };
    let s: Vec<f64> = [10, 100, 1000].iter().map(|&k| slope(k)).collect();
    let ok = r.passed && s.iter().all(|v| *v < 0.0) && s[2] >= -1e-3 && s[0] < s[1] && s[1] < s[2];
    Line::new(
        "7 borderline slope negative, ≥ −1e−3 at K = 10³, increasing",
        ok,
        format!("K=10 {:.3e}, K=100 {:.3e}, K=1000 {:.3e} {}", s[0], s[1], s[2], failures(&r)),
    )
}

fn criterion_8() -> Line {
    let r = scenario("no-events-rotation");
    let d = trace_dists(&r);
    let drift = d.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let ok = r.passed && d.len() == 10_001 && drift <= EXACT;
    Line::new(
        "8 no events: dist = 1 for 10⁴ steps, envelopes fail at first event",
        ok,
        format!("drift {drift:.1e} {}", failures(&r)),
    )
}

fn criterion_9() -> Line {
    let r = scenario("anchored-invariant");
    let d = trace_dists(&r);
    let ok = r.passed
        && d.len() == 101
        && d.iter().enumerate().all(|(n, v)| (v - 2.0 * 0.5f64.powi(n as i32)).abs() <= EXACT)
        && checks_pass(&r, "non-commuting pair");
    Line::new("9 anchored invariance: fixed point 0, rate 0.5^n, refusal", ok, failures(&r))
}

fn criterion_10() -> Line {
    let m1 = scenario("effects-mini1");
    let m2 = scenario("effects-mini2");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = EffectOp::new(ComplexMatrix::from_real_rows(&[vec![0.5, -0.4], vec![-0.4, 0.5]]).unwrap()).unwrap();
    let pb = spectral_threshold_projection(&b, 0.8).unwrap().projection;
    let oracle = ProjectionOp::rank_one_real(&[s, -s]).unwrap();
    let entry_err = (pb.matrix() - oracle.matrix()).max_abs();
    Line::new(
        "10 threshold effects: mini-1 reduced = I, mini-2 rank-one, valuation 0",
        m1.passed && m2.passed && entry_err <= 1e-9,
        format!("P_(B,0.8) entry error {entry_err:.1e} {}{}", failures(&m1), failures(&m2)),
    )
}

fn criterion_11() -> Line {
    let t = OperatorMap::linear(RealMatrix::from_rows(vec![vec![0.0, -0.8], vec![0.8, 0.0]]).unwrap()).unwrap();
    let idx = power_contraction_index(&t, 0.7, 1000).unwrap();
    let n = idx.index();
    let mut ok = n == Some(2);
    let eq = classical_rate_check(&t, 1, 0.8, &[1.0, 0.0], None, 100).unwrap();
    ok &= eq.equality;
    ok &= eq.distances.iter().enumerate().all(|(k, d)| (d - 0.8f64.powi(k as i32)).abs() <= EXACT);
    for rot in [OperatorMap::quarter_turn(), OperatorMap::rotation(1.0)] {
        ok &= matches!(power_contraction_index(&rot, 0.99, 1000).unwrap(), PowerIndex::Absent { .. });
    }
    Line::new(
        "11 single map: 0.8·R90 gives N = 2 and equality 0.8^n, rotations absent to 10³",
        ok,
        format!("N = {n:?}"),
    )
}

// ---------------------------------------------------------------------------
// criterion 12: randomized properties
// ---------------------------------------------------------------------------

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c(r: &mut ChaCha8Rng) -> C64 {
    C64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn random_vec(r: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| gaussian_c(r)).collect()
}

/// `U diag(d) U*` with `U` given by its columns.
fn with_spectrum(u: &[Vec<C64>], d: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), |i, j| u.iter().zip(d).map(|(c, &w)| c[i] * c[j].conj() * w).sum())
}

fn bits(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| if r.random::<bool>() { 1.0 } else { 0.0 }).collect()
}

fn random_projection(r: &mut ChaCha8Rng, dim: usize) -> ProjectionOp {
    let k = r.random_range(0..=dim);
    if k == 0 {
        return ProjectionOp::zero(dim);
    }
    let vs: Vec<Vec<C64>> = (0..k).map(|_| random_vec(r, dim)).collect();
    ProjectionOp::onto_span(&vs).unwrap()
}

fn random_state(r: &mut ChaCha8Rng, dim: usize) -> StateVector {
    StateVector::normalized(random_vec(r, dim)).unwrap()
}

/// Unit vector in the range of `e`, when the range is nonzero.
fn state_in(r: &mut ChaCha8Rng, e: &ProjectionOp) -> Option<StateVector> {
    if e.is_zero() {
        return None;
    }
    let v = e.matrix().mul_vec(&random_vec(r, e.dim())).unwrap();
    StateVector::normalized(v).ok()
}

fn projection_residuals(e: &ProjectionOp) -> f64 {
    let m = e.matrix();
    (&(m * m) - m).frobenius_norm().max(m.hermitian_residual())
}

fn prop_projection_invariants() -> Line {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = r.random_range(1..=6);
        let e = random_projection(&mut r, dim);
        let f = random_projection(&mut r, dim);
        let u = random_unitary(dim, &mut r);
        let spectrum: Vec<f64> = (0..dim).map(|_| r.random::<f64>()).collect();
        let a = EffectOp::new(with_spectrum(&u, &spectrum)).unwrap();
        let tau = r.random_range(0.05..1.0);
        let made = [
            e.complement(),
            subspace_meet(&e, &f).unwrap(),
            subspace_join(&e, &f).unwrap(),
            spectral_threshold_projection(&a, tau).unwrap().projection,
            e.clone(),
        ];
        for m in &made {
            worst = worst.max(projection_residuals(m));
        }
    }
    let mut r = rng(102);
    for _ in 0..50 {
        let t = CommutingTriple::random(&mut r).unwrap();
        let red = reduced_implication_projection(&t.a, &t.b, &t.anchor).unwrap();
        worst = worst.max(projection_residuals(&red));
    }
    Line::new("linalg: ‖E² − E‖, ‖E − E*‖ ≤ tol for constructed projections", worst <= ALG_TOL, format!("{worst:.1e}"))
}

fn prop_threshold_commutes() -> Line {
    let mut r = rng(103);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let dim = r.random_range(1..=6);
        let u = random_unitary(dim, &mut r);
        // repeated eigenvalues in a third of the cases
        let spectrum: Vec<f64> = (0..dim).map(|i| if i % 3 == 2 { 0.5 } else { r.random::<f64>() }).collect();
        let a = EffectOp::new(with_spectrum(&u, &spectrum)).unwrap();
        let p = spectral_threshold_projection(&a, r.random_range(0.05..1.0)).unwrap().projection;
        worst = worst.max(commutator(a.matrix(), p.matrix()).unwrap().frobenius_norm());
    }
    Line::new("linalg: ‖[A, P_(A,τ)]‖ ≤ tol", worst <= ALG_TOL, format!("{worst:.1e}"))
}

fn prop_meet_join_duality() -> Line {
    let mut r = rng(104);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let dim = r.random_range(1..=6);
        // a shared direction half of the time so meets are not always zero
        let shared = random_vec(&mut r, dim);
        let span = |r: &mut ChaCha8Rng| {
            let k = r.random_range(0..dim);
            let mut vs: Vec<Vec<C64>> = (0..k).map(|_| random_vec(r, dim)).collect();
            if r.random::<bool>() {
                vs.push(shared.clone());
            }
            if vs.is_empty() {
                ProjectionOp::zero(dim)
            } else {
                ProjectionOp::onto_span(&vs).unwrap()
            }
        };
        let e = span(&mut r);
        let f = span(&mut r);
        let join = subspace_join(&e, &f).unwrap();
        let dual = subspace_meet(&e.complement(), &f.complement()).unwrap().complement();
        worst = worst.max((join.matrix() - dual.matrix()).max_abs());
    }
    Line::new("linalg: join(E,F) = I − meet(I−E, I−F)", worst <= ALG_TOL, format!("{worst:.1e}"))
}

fn prop_submultiplicative() -> Line {
    let mut r = rng(105);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..300 {
        let dim = r.random_range(1..=6);
        let a = ComplexMatrix::from_fn(dim, |_, _| gaussian_c(&mut r));
        let b = ComplexMatrix::from_fn(dim, |_, _| gaussian_c(&mut r));
        worst = worst.max(operator_norm(&(&a * &b)) - operator_norm(&a) * operator_norm(&b));
    }
    Line::new("linalg: ‖AB‖ ≤ ‖A‖‖B‖ + tol", worst <= ALG_TOL, format!("max excess {worst:.1e}"))
}

fn prop_eigen_reconstruction() -> Line {
    let mut r = rng(106);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let dim = r.random_range(1..=8);
        let g = ComplexMatrix::from_fn(dim, |_, _| gaussian_c(&mut r));
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let pairs = hermitian_eigendecomposition(&h).unwrap();
        let rebuilt =
            ComplexMatrix::from_fn(dim, |i, j| pairs.iter().map(|p| p.vector[i] * p.vector[j].conj() * p.value).sum());
        worst = worst.max((&rebuilt - &h).max_abs());
    }
    Line::new("linalg: eigendecomposition reconstruction ≤ 1e−9 to dim 8", worst <= 1e-9, format!("{worst:.1e}"))
}

fn prop_reduction() -> Line {
    let mut r = rng(201);
    let mut mismatches = 0;
    for _ in 0..200 {
        let t = CommutingTriple::random(&mut r).unwrap();
        let red = Proposition::new("R", reduced_implication_projection(&t.a, &t.b, &t.anchor).unwrap());
        for _ in 0..100 {
            let psi = t.eigenstate(&mut r).unwrap();
            let anchored = anchored_implication(&t.a, &t.b, &t.anchor, &psi).unwrap().value;
            mismatches += usize::from(anchored != valuate(&red, &psi).unwrap().value);
        }
    }
    Line::new("logic: reduction on commuting triples", mismatches == 0, format!("{mismatches} mismatches"))
}

fn prop_classical_at_identity() -> Line {
    let mut r = rng(202);
    let mut mismatches = 0;
    let mut checked = 0;
    for _ in 0..300 {
        let dim = r.random_range(1..=5);
        let a = random_projection(&mut r, dim);
        let b = random_projection(&mut r, dim);
        let anchor = Anchor::single(ProjectionOp::identity(dim)).unwrap();
        let (pa, pb) = (Proposition::new("A", a.clone()), Proposition::new("B", b.clone()));
        let meet = subspace_meet(&a, &b).unwrap();
        let candidates = [
            state_in(&mut r, &a),
            state_in(&mut r, &a.complement()),
            state_in(&mut r, &b),
            state_in(&mut r, &meet),
            Some(random_state(&mut r, dim)),
        ];
        for psi in candidates.into_iter().flatten() {
            let v = anchored_implication(&pa, &pb, &anchor, &psi).unwrap().value;
            let material = !valuate(&pa, &psi).unwrap().value || valuate(&pb, &psi).unwrap().value;
            mismatches += usize::from(v != material);
            checked += 1;
        }
    }
    Line::new("logic: P = I gives material implication", mismatches == 0, format!("{mismatches}/{checked}"))
}

/// A commuting family `A ≤ A'`, `B`, `P` diagonal in one random basis.
struct MonoFamily {
    a: Proposition,
    a_wide: Proposition,
    b: Proposition,
    anchor: Anchor,
    basis: Vec<Vec<C64>>,
}

fn mono_family(r: &mut ChaCha8Rng) -> MonoFamily {
    let dim = r.random_range(1..=5);
    let basis = random_unitary(dim, r);
    let a = bits(r, dim);
    let a_wide: Vec<f64> = a.iter().map(|&x| if x == 1.0 || r.random::<bool>() { 1.0 } else { 0.0 }).collect();
    let b = bits(r, dim);
    let mut p = bits(r, dim);
    if p.iter().all(|x| *x == 0.0) {
        p[0] = 1.0;
    }
    let proj = |d: &[f64]| ProjectionOp::new(with_spectrum(&basis, d)).unwrap();
    MonoFamily {
        a: Proposition::new("A", proj(&a)),
        a_wide: Proposition::new("A'", proj(&a_wide)),
        b: Proposition::new("B", proj(&b)),
        anchor: Anchor::single(proj(&p)).unwrap(),
        basis,
    }
}

/// Returns `(violations of narrow ≤ wide, violations of wide ≤ narrow, first counterexample)`.
fn monotonicity_scan() -> (usize, usize, usize, Option<String>) {
    let mut r = rng(203);
    let (mut up, mut down, mut checked) = (0, 0, 0);
    let mut example = None;
    for _ in 0..300 {
        let f = mono_family(&mut r);
        let dim = f.basis.len();
        let mut states: Vec<StateVector> =
            f.basis.iter().map(|c| StateVector::normalized(c.clone()).unwrap()).collect();
        states.push(random_state(&mut r, dim));
        for psi in &states {
            let narrow = anchored_implication(&f.a, &f.b, &f.anchor, psi).unwrap().value;
            let wide = anchored_implication(&f.a_wide, &f.b, &f.anchor, psi).unwrap().value;
            checked += 1;
            if narrow && !wide {
                up += 1;
                if example.is_none() {
                    example = Some(format!(
                        "dim {dim}: rank A = {}, rank A' = {}, rank B = {}, v(A⇒B) = 1, v(A'⇒B) = 0",
                        f.a.projection.rank(),
                        f.a_wide.projection.rank(),
                        f.b.projection.rank()
                    ));
                }
            }
            down += usize::from(wide && !narrow);
        }
    }
    (up, down, checked, example)
}

fn minimal_monotonicity_counterexample() -> bool {
    // A = 0 ≤ A' = I, B = 0, P = I
    let a = Proposition::new("A", ProjectionOp::zero(1));
    let a_wide = Proposition::new("A'", ProjectionOp::identity(1));
    let b = Proposition::new("B", ProjectionOp::zero(1));
    let anchor = Anchor::single(ProjectionOp::identity(1)).unwrap();
    let psi = StateVector::basis(1, 0);
    let narrow = anchored_implication(&a, &b, &anchor, &psi).unwrap().value;
    let wide = anchored_implication(&a_wide, &b, &anchor, &psi).unwrap().value;
    narrow && !wide
}

fn prop_no_synonym() -> Line {
    let t = no_synonym_table().unwrap();
    Line::new("logic: no-synonym tables differ exactly at (1,1)", t.mismatch_rows() == vec![(1, 1)], "")
}

fn prop_residuation() -> Line {
    let mut r = rng(204);
    let (mut bad, mut checked) = (0, 0);
    for _ in 0..300 {
        let dim = r.random_range(1..=5);
        let basis = random_unitary(dim, &mut r);
        let (a, b, x) = (bits(&mut r, dim), bits(&mut r, dim), bits(&mut r, dim));
        let mut p = bits(&mut r, dim);
        p[0] = 1.0;
        let prop = |l: &str, d: &[f64]| Proposition::new(l, ProjectionOp::new(with_spectrum(&basis, d)).unwrap());
        let anchor = Anchor::single(ProjectionOp::new(with_spectrum(&basis, &p)).unwrap()).unwrap();
        let (lhs, rhs) = residuation_check(&prop("A", &a), &prop("B", &b), &prop("X", &x), &anchor).unwrap();
        // coordinatewise: x ≤ ¬a ∨ b  and  a ∧ x ≤ b
        let oracle = (0..dim).all(|i| x[i] == 0.0 || a[i] == 0.0 || b[i] == 1.0);
        bad += usize::from(lhs != rhs || lhs != oracle);
        checked += 1;
    }
    Line::new("logic: residuation lhs ⟺ rhs", bad == 0, format!("{bad}/{checked} disagreements"))
}

fn prop_tau_reduction() -> Line {
    let mut r = rng(205);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for _ in 0..300 {
        let dim = r.random_range(1..=5);
        let basis = random_unitary(dim, &mut r);
        let tau = r.random_range(0.1..0.9);
        // keep eigenvalues away from τ so the oracle is unambiguous
        let away = |r: &mut ChaCha8Rng| loop {
            let v: f64 = r.random();
            if (v - tau).abs() > 1e-6 {
                return v;
            }
        };
        let sa: Vec<f64> = (0..dim).map(|_| away(&mut r)).collect();
        let sb: Vec<f64> = (0..dim).map(|_| away(&mut r)).collect();
        let mut p = bits(&mut r, dim);
        p[0] = 1.0;
        let a = EffectOp::new(with_spectrum(&basis, &sa)).unwrap();
        let b = EffectOp::new(with_spectrum(&basis, &sb)).unwrap();
        let anchor = Anchor::single(ProjectionOp::new(with_spectrum(&basis, &p)).unwrap()).unwrap();
        let psi = random_state(&mut r, dim);
        let got = tau_anchored_implication(&a, &b, &anchor, tau, &psi).unwrap();
        let expected: Vec<f64> = (0..dim).map(|i| if sa[i] < tau || sb[i] >= tau { 1.0 } else { 0.0 }).collect();
        match got.reduced {
            Some(red) => worst = worst.max((red.matrix() - &with_spectrum(&basis, &expected)).max_abs()),
            None => missing += 1,
        }
    }
    Line::new(
        "logic: τ-reduction equals I − P_A,τ + P_A,τ P_B,τ",
        worst <= 1e-9 && missing == 0,
        format!("{worst:.1e}, {missing} missing"),
    )
}

fn prop_sasaki() -> Line {
    let mut r = rng(206);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let dim = r.random_range(1..=5);
        let basis = random_unitary(dim, &mut r);
        let proj = |d: &[f64]| ProjectionOp::new(with_spectrum(&basis, d)).unwrap();
        let a = Proposition::new("A", proj(&bits(&mut r, dim)));
        let b = Proposition::new("B", proj(&bits(&mut r, dim)));
        let anchor = Anchor::single(ProjectionOp::identity(dim)).unwrap();
        let hook = sasaki_hook(&a, &b).unwrap();
        let red = reduced_implication_projection(&a, &b, &anchor).unwrap();
        worst = worst.max((hook.matrix() - red.matrix()).max_abs());
    }
    Line::new("logic: Sasaki hook = reduction for commuting A, B, P = I", worst <= ALG_TOL, format!("{worst:.1e}"))
}

fn random_set(r: &mut ChaCha8Rng, dim: usize, inside: &[f64]) -> ConvexSet {
    match r.random_range(0..3) {
        0 => {
            let normal: Vec<f64> = (0..dim).map(|_| r.sample(StandardNormal)).collect();
            let offset = normal.iter().zip(inside).map(|(a, x)| a * x).sum::<f64>() + r.random::<f64>();
            ConvexSet::Halfspace { normal, offset }
        }
        1 => {
            let lower: Vec<f64> = inside.iter().map(|x| x - r.random_range(0.0..3.0)).collect();
            let upper: Vec<f64> = inside.iter().map(|x| x + r.random_range(0.0..3.0)).collect();
            ConvexSet::Box { lower, upper }
        }
        _ => {
            let center: Vec<f64> = inside.iter().map(|x| x + r.random_range(-1.0..1.0)).collect();
            let radius = distance(&center, inside) + r.random_range(0.0..2.0);
            ConvexSet::Ball { center, radius }
        }
    }
}

fn random_nonexpansive_2d(r: &mut ChaCha8Rng) -> OperatorMap {
    match r.random_range(0..6) {
        0 => OperatorMap::rotation(r.random_range(-3.0..3.0)),
        1 => OperatorMap::scaling(2, r.random_range(0.3..1.0)),
        2 => OperatorMap::prox_l1(2, r.random_range(0.0..2.0)).unwrap(),
        3 => OperatorMap::projection(random_set(r, 2, &[0.0, 0.0])).unwrap(),
        4 => {
            OperatorMap::averaged(r.random_range(0.05..0.95), OperatorMap::rotation(r.random_range(-3.0..3.0))).unwrap()
        }
        _ => {
            let g = RealMatrix::from_rows(vec![
                vec![r.sample(StandardNormal), r.sample(StandardNormal)],
                vec![r.sample(StandardNormal), r.sample(StandardNormal)],
            ])
            .unwrap();
            let m = g.transpose().mul(&g).unwrap();
            OperatorMap::resolvent(m, r.random_range(0.1..5.0)).unwrap()
        }
    }
}

fn prop_composition_bound() -> Line {
    let mut r = rng(301);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        let k = r.random_range(2..=3);
        let factors: Vec<OperatorMap> = (0..k).map(|_| random_nonexpansive_2d(&mut r)).collect();
        let bound: f64 = factors.iter().map(lipschitz_certified).product();
        let comp = OperatorMap::compose(factors).unwrap();
        worst = worst.max(lipschitz_sampled_lower(&comp, 200, 42 + i).unwrap() - bound);
    }
    Line::new("operators: sampled Lip(S∘T) ≤ Lip(S)·Lip(T)", worst <= 1e-9, format!("max excess {worst:.1e}"))
}

fn prop_projection_idempotent() -> Line {
    let mut r = rng(302);
    let mut worst: f64 = 0.0;
    for _ in 0..300 {
        let dim = r.random_range(1..=5);
        let inside: Vec<f64> = (0..dim).map(|_| r.random_range(-3.0..3.0)).collect();
        let p = OperatorMap::projection(random_set(&mut r, dim, &inside)).unwrap();
        let x: Vec<f64> = (0..dim).map(|_| r.random_range(-10.0..10.0)).collect();
        let px = p.apply(&x).unwrap();
        worst = worst.max(distance(&p.apply(&px).unwrap(), &px));
    }
    Line::new("operators: projections are idempotent", worst <= ALG_TOL, format!("{worst:.1e}"))
}

fn prop_resolvent() -> Line {
    let mut r = rng(303);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let dim = r.random_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| r.sample(StandardNormal)).collect()).collect();
        let g = RealMatrix::from_rows(rows).unwrap();
        let m = g.transpose().mul(&g).unwrap();
        let op = OperatorMap::resolvent(m, r.random_range(0.01..10.0)).unwrap();
        worst = worst.max(lipschitz_sampled_lower(&op, 200, 7 + i).unwrap());
    }
    Line::new("operators: resolvent sampled ratio ≤ 1", worst <= 1.0 + 1e-9, format!("max ratio {worst:.12}"))
}

fn prop_averaged() -> Line {
    let mut r = rng(304);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let inner = random_nonexpansive_2d(&mut r);
        let op = OperatorMap::averaged(r.random_range(0.01..0.99), inner).unwrap();
        worst = worst.max(lipschitz_sampled_lower(&op, 200, 11 + i).unwrap());
    }
    Line::new("operators: averaged sampled ratio ≤ 1", worst <= 1.0 + 1e-9, format!("max ratio {worst:.12}"))
}

fn prop_common_fixed_point() -> Line {
    let mut r = rng(305);
    let (mut worst, mut absent): (f64, usize) = (0.0, 0);
    for _ in 0..100 {
        let dim = r.random_range(1..=4);
        let inside: Vec<f64> = (0..dim).map(|_| r.random_range(-3.0..3.0)).collect();
        let k = r.random_range(1..=4);
        let family: Vec<OperatorMap> =
            (0..k).map(|_| OperatorMap::projection(random_set(&mut r, dim, &inside)).unwrap()).collect();
        match common_fixed_point(&family).unwrap().point() {
            Some(z) => {
                for t in &family {
                    worst = worst.max(t.fixed_point_residual(z).unwrap());
                }
            }
            None => absent += 1,
        }
    }
    Line::new(
        "operators: common fixed points are fixed by every member",
        worst <= 1e-9 && absent == 0,
        format!("{worst:.1e}, {absent} absent"),
    )
}

fn prop_non_increase() -> Line {
    let mut r = rng(401);
    let mut bad = 0;
    for _ in 0..200 {
        let k = r.random_range(1..=6);
        let ops: Vec<OperatorMap> = (0..k).map(|_| random_nonexpansive_2d(&mut r)).collect();
        let seq = OperatorSequence::cyclic(ops).unwrap();
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let trace = run_orbit(&seq, &x0, &[0.0, 0.0], 200, FixedPointPolicy::Verify).unwrap();
        let d = trace.distances();
        bad += usize::from(d.windows(2).any(|w| w[1] > w[0] + EXACT));
    }
    Line::new("iteration: dist(n+1) ≤ dist(n) + 1e−12", bad == 0, format!("{bad} violating traces"))
}

/// Random blocks of nonexpansive maps, each closed by a `λ_k` scaling.
fn random_blocks(r: &mut ChaCha8Rng) -> (Vec<OperatorMap>, Vec<Block>) {
    let mut ops = Vec::new();
    let mut blocks = Vec::new();
    for _ in 0..r.random_range(1..=8) {
        let len = r.random_range(1..=5);
        ops.extend((1..len).map(|_| random_nonexpansive_2d(r)));
        let lambda = r.random_range(0.3..0.99);
        ops.push(OperatorMap::scaling(2, lambda));
        blocks.push(Block::new(lambda, len));
    }
    (ops, blocks)
}

fn prop_event_drop_and_dominance() -> (Line, Line) {
    let mut r = rng(402);
    let (mut drop_bad, mut env_bad, mut cert_bad) = (0, 0, 0);
    for _ in 0..200 {
        let (ops, blocks) = random_blocks(&mut r);
        let n_max = ops.len();
        let seq = OperatorSequence::finite(ops.clone()).unwrap();
        let schedule = EventSchedule::heterogeneous(blocks.clone()).unwrap();
        if block_certify(&seq, &schedule, n_max).is_err() {
            cert_bad += 1;
            continue;
        }
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let trace = run_orbit(&seq, &x0, &[0.0, 0.0], n_max, FixedPointPolicy::Verify).unwrap();
        let d = trace.distances();
        let mut prev = 0;
        for b in &blocks {
            let end = prev + b.len;
            drop_bad += usize::from(d[end] > b.lambda * d[prev] + EXACT);
            prev = end;
        }
        let env = envelope_check(&trace, &EnvelopeSpec::from_schedule(&schedule, n_max), EXACT).unwrap();
        env_bad += usize::from(!env.certified);
    }
    // periodic runs: gap − 1 random maps then λ I, repeated
    for _ in 0..100 {
        let gap = r.random_range(1..=5);
        let lambda = r.random_range(0.3..0.99);
        let mut ops: Vec<OperatorMap> = (1..gap).map(|_| random_nonexpansive_2d(&mut r)).collect();
        ops.push(OperatorMap::scaling(2, lambda));
        let seq = OperatorSequence::cyclic(ops.clone()).unwrap();
        let schedule = EventSchedule::periodic(lambda, gap, gap).unwrap();
        cert_bad += usize::from(certify_block(&ops).map_or(true, |c| c.certificate > lambda + EXACT));
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let trace = run_orbit(&seq, &x0, &[0.0, 0.0], 10 * gap, FixedPointPolicy::Verify).unwrap();
        let env = envelope_check(&trace, &EnvelopeSpec::from_schedule(&schedule, 0), EXACT).unwrap();
        env_bad += usize::from(!env.certified);
    }
    (
        Line::new(
            "iteration: dist(n_k) ≤ λ_k·dist(n_(k−1)) at certified boundaries",
            drop_bad == 0 && cert_bad == 0,
            format!("{drop_bad} drops, {cert_bad} uncertified"),
        ),
        Line::new("iteration: envelope dominates certified runs", env_bad == 0, format!("{env_bad} violations")),
    )
}

fn prop_tightness() -> Line {
    let mut r = rng(403);
    let mut bad = 0;
    for i in 0..200 {
        let variant = if i % 4 == 0 {
            TightnessVariant::Periodic { lambda: r.random_range(0.3..0.99), gap: r.random_range(1..=6) }
        } else {
            let blocks = (0..r.random_range(1..=10))
                .map(|_| Block::new(r.random_range(0.3..0.99), r.random_range(1..=6)))
                .collect();
            TightnessVariant::HeterogeneousExact { blocks }
        };
        let t = tightness_schedule(&variant).unwrap();
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let trace = run_orbit(&t.sequence, &x0, &[0.0, 0.0], t.n_max, FixedPointPolicy::Verify).unwrap();
        let env = envelope_check(&trace, &t.envelope, EXACT * norm(&x0).max(1.0)).unwrap();
        bad += usize::from(!(env.certified && env.tight_everywhere()));
    }
    Line::new("iteration: tightness traces meet the envelope with equality", bad == 0, format!("{bad} loose"))
}

/// Random affine-free `T` with `‖T‖ = 1` whose powers eventually contract.
fn random_eventual_contraction(r: &mut ChaCha8Rng) -> RealMatrix {
    let dim = r.random_range(2..=3);
    // upper triangular with |diagonal| < 1, rescaled to spectral norm 1
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => 0.0,
                    std::cmp::Ordering::Equal => r.random_range(-0.9..0.9),
                    std::cmp::Ordering::Greater => r.sample(StandardNormal),
                })
                .collect()
        })
        .collect();
    let m = RealMatrix::from_rows(rows).unwrap();
    m.scale(1.0 / m.spectral_norm().max(1e-12))
}

struct Collapse {
    literal: Line,
    later_powers: Line,
    companion: Line,
    /// Every literal failure has `N ≥ 2`.
    failures_need_power: bool,
    /// `0.8·R90`, `N = 2`, `λ = 0.7` is refused at `n = 2`.
    minimal: bool,
}

fn prop_single_map_collapse() -> Collapse {
    let mut r = rng(404);
    let (mut literal_bad, mut later_bad, mut companion_bad, mut found) = (0, 0, 0, 0);
    let mut failures_need_power = true;
    let mut smallest_failing_n = usize::MAX;
    for _ in 0..150 {
        let m = random_eventual_contraction(&mut r);
        let dim = m.nrows();
        let t = OperatorMap::linear(m.clone()).unwrap();
        let target = r.random_range(0.3..0.9);
        let PowerIndex::Found { n, .. } = power_contraction_index(&t, target, 1000).unwrap() else { continue };
        found += 1;
        let x0: Vec<f64> = (0..dim).map(|_| r.random_range(-10.0..10.0)).collect();
        if classical_rate_check(&t, n, target, &x0, None, 200).is_err() {
            literal_bad += 1;
            failures_need_power &= n >= 2;
            smallest_failing_n = smallest_failing_n.min(n);
        }
        later_bad += usize::from(!(n..n + 20).all(|p| m.powi(p).unwrap().spectral_norm() <= target + EXACT));
        // ‖T^k x‖ ≤ λ^⌊k/N⌋ ‖x‖ by direct iteration; z = 0 is the fixed point
        let mut x = x0.clone();
        for k in 1..=200 {
            x = m.mul_vec(&x).unwrap();
            let bound = target.powi((k / n) as i32) * norm(&x0);
            companion_bad += usize::from(norm(&x) > bound + EXACT);
        }
    }
    let t = OperatorMap::linear(RealMatrix::from_rows(vec![vec![0.0, -0.8], vec![0.8, 0.0]]).unwrap()).unwrap();
    let minimal = matches!(
        classical_rate_check(&t, 2, 0.7, &[1.0, 0.0], None, 10),
        Err(anchorlab::Error::RateViolation { n: 2, .. })
    );
    Collapse {
        literal: Line::new(
            "iteration: power index found ⟹ rate λ^(n−N+1) passes with the same λ",
            literal_bad == 0 && found > 0,
            format!(
                "{literal_bad}/{found} refused, smallest failing N = {}; 0.8·R90 with N = 2, λ = 0.7 gives 0.64 > 0.56 at n = 2",
                if smallest_failing_n == usize::MAX { "none".to_string() } else { smallest_failing_n.to_string() }
            ),
        ),
        later_powers: Line::new(
            "iteration: Lip(T^p) ≤ λ for p ≥ N",
            later_bad == 0 && found > 0,
            format!("{later_bad}/{found} violations"),
        ),
        companion: Line::new(
            "iteration: floor companion ‖T^n x − z‖ ≤ λ^⌊n/N⌋ ‖x − z‖",
            companion_bad == 0 && found > 0,
            format!("{companion_bad} violations over {found} maps"),
        ),
        failures_need_power,
        minimal,
    }
}

fn prop_no_events() -> Line {
    let mut r = rng(405);
    let mut worst: f64 = 0.0;
    let seq = OperatorSequence::cyclic(vec![OperatorMap::rotation(FRAC_PI_2)]).unwrap();
    for _ in 0..5 {
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let d = run_orbit(&seq, &x0, &[0.0, 0.0], 10_000, FixedPointPolicy::Verify).unwrap().distances();
        worst = worst.max(d.iter().map(|v| (v - d[0]).abs()).fold(0.0, f64::max));
    }
    Line::new("iteration: rotation-only traces keep dist(0) for 10⁴ steps", worst <= EXACT, format!("{worst:.1e}"))
}

fn prop_anchored_contrast() -> Line {
    let mut r = rng(406);
    let t = OperatorMap::linear(RealMatrix::diag(&[1.0, 0.5])).unwrap();
    let p = ProjectionOp::diag(&[0.0, 1.0]).unwrap();
    let mut ok = true;
    for _ in 0..50 {
        let c = loop {
            let c: f64 = r.random_range(-10.0..10.0);
            if c != 0.0 {
                break c;
            }
        };
        ok &= t.fixed_point_residual(&[c, 0.0]).unwrap() <= EXACT;
        let x0 = [r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)];
        let rep = anchored_run(&t, &p, &x0, 1, 0.5, 50).unwrap();
        ok &= norm(&rep.fixed_point) <= EXACT && rep.global_fixed_dim == 1;
    }
    Line::new("iteration: (c,0) fixed globally, 0 unique on PH", ok, "")
}

fn prop_determinism() -> Line {
    let mut ok = true;
    for s in &CATALOG {
        let a = render(&scenario(s.name), Format::Csv).unwrap();
        let b = render(&scenario(s.name), Format::Csv).unwrap();
        ok &= a == b;
    }
    Line::new("cli: identical seed gives byte-identical CSV", ok, "")
}

fn prop_self_checking() -> Line {
    let mut ok = true;
    for s in &CATALOG {
        let rep = scenario(s.name);
        ok &= !rep.checks.is_empty() && rep.passed == rep.checks.iter().all(|c| c.passed);
    }
    Line::new("cli: every scenario embeds its checks", ok, "")
}

/// A property that is false as stated. `witnessed` requires the concrete
/// counterexample to be reproduced, so the failure is never silent.
struct Defect {
    line: Line,
    witnessed: bool,
}

struct Twelve {
    lines: Vec<Line>,
    defects: Vec<Defect>,
    companions: Vec<Line>,
    elapsed: Duration,
}

fn criterion_12() -> Twelve {
    let start = Instant::now();
    let (drop, dominance) = prop_event_drop_and_dominance();
    let collapse = prop_single_map_collapse();
    let lines = vec![
        prop_projection_invariants(),
        prop_threshold_commutes(),
        prop_meet_join_duality(),
        prop_submultiplicative(),
        prop_eigen_reconstruction(),
        prop_reduction(),
        prop_classical_at_identity(),
        prop_no_synonym(),
        prop_residuation(),
        prop_tau_reduction(),
        prop_sasaki(),
        prop_composition_bound(),
        prop_projection_idempotent(),
        prop_resolvent(),
        prop_averaged(),
        prop_common_fixed_point(),
        prop_non_increase(),
        drop,
        dominance,
        prop_tightness(),
        collapse.later_powers,
        prop_no_events(),
        prop_anchored_contrast(),
        prop_determinism(),
        prop_self_checking(),
    ];
    let (up, down, checked, example) = monotonicity_scan();
    let minimal = minimal_monotonicity_counterexample();
    let monotonicity = Line::new(
        "logic: antecedent monotonicity v(A⇒B) ≤ v(A'⇒B) for A ≤ A'",
        up == 0 && !minimal,
        format!(
            "{up}/{checked} violations; A = 0, A' = I, B = 0, P = I gives 1 vs 0; first random: {}",
            example.as_deref().unwrap_or("none")
        ),
    );
    let antitone = Line::new(
        "logic: antitone companion v(A'⇒B) ≤ v(A⇒B) for A ≤ A'",
        down == 0,
        format!("{down}/{checked} violations"),
    );
    Twelve {
        lines,
        defects: vec![
            Defect { line: monotonicity, witnessed: minimal && up > 0 },
            Defect { line: collapse.literal, witnessed: collapse.minimal && collapse.failures_need_power },
        ],
        companions: vec![antitone, collapse.companion],
        elapsed: start.elapsed(),
    }
}

fn main() -> ExitCode {
    let total = Instant::now();
    let criteria: Vec<Line> = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    for c in &criteria {
        c.print("");
    }
    let twelve = criterion_12();
    let in_time = twelve.elapsed < Duration::from_secs(120);
    let stated = twelve.lines.len() + twelve.defects.len();
    let passing =
        twelve.lines.iter().filter(|l| l.passed).count() + twelve.defects.iter().filter(|d| d.line.passed).count();
    Line::new(
        "12 property suites green under fixed seeds",
        passing == stated && in_time,
        format!("{passing} of {stated} properties pass, {:.2?}", twelve.elapsed),
    )
    .print("");
    for l in &twelve.lines {
        l.print("    ");
    }
    for d in &twelve.defects {
        d.line.print("    ");
    }
    for l in &twelve.companions {
        l.print("    ");
    }
    println!("total {:.2?}", total.elapsed());

    // Criterion 12 cannot pass: two of its properties are false as stated.
    // Each must fail with its counterexample reproduced; everything else,
    // including the corrected companions, must pass.
    let expected = criteria.iter().all(|c| c.passed)
        && in_time
        && twelve.lines.iter().all(|l| l.passed)
        && twelve.companions.iter().all(|l| l.passed)
        && twelve.defects.iter().all(|d| !d.line.passed && d.witnessed);
    if expected {
        println!("outcome: criteria 1-11 pass; 12 fails only on the two properties that are false as stated");
        ExitCode::SUCCESS
    } else {
        println!("outcome: unexpected result");
        ExitCode::FAILURE
    }
}
