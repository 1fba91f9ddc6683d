//! Acceptance suite: one line per criterion, then a single assertion over all of them.
//!
//! Run with `cargo test -p kreinrel --test acceptance -- --nocapture` to see the lines.

use kreinrel::boundary::{main_transform, spectral_sets, weyl, BoundaryPair};
use kreinrel::harness::checks::{check_theorem, check_theorem_with, run_trial, CheckReport, DimRange, Execution, Status};
use kreinrel::harness::gen::{trial_rng, unitary_pair_with};
use kreinrel::nevanlinna::{gen_nevanlinna_probe, KernelSampleGrid};
use kreinrel::numkernel::{Tolerance, C64};
use kreinrel::relcalc::in_resolvent;
use kreinrel::transforms::scale_eps;

const SEED: u64 = 20_240_611;
const ANGLE_TOL: f64 = 1e-8;

fn dims() -> DimRange {
    DimRange::new(1, 4).unwrap()
}

fn tol() -> Tolerance {
    Tolerance::new(1e-12, ANGLE_TOL).unwrap()
}

struct Line {
    ok: bool,
    text: String,
}

struct Criterion {
    number: u8,
    title: &'static str,
    lines: Vec<Line>,
}

impl Criterion {
    fn new(number: u8, title: &'static str) -> Self {
        Criterion { number, title, lines: Vec::new() }
    }

    fn note(&mut self, ok: bool, text: String) {
        self.lines.push(Line { ok, text });
    }

    fn report(&mut self, r: &CheckReport, min_exercised: u64) {
        let ok = r.failures == 0 && r.exercised() >= min_exercised && r.worst_residual < ANGLE_TOL;
        let mut text = format!(
            "{}: {} trials, {} exercised (need {}), {} failures, worst residual {:.1e}",
            r.theorem_id,
            r.trials,
            r.exercised(),
            min_exercised,
            r.failures,
            r.worst_residual
        );
        if let Some(f) = r.failure_details.first() {
            text.push_str(&format!("; first failure at trial {}: {}", f.trial, f.message));
        }
        self.note(ok, text);
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }

    fn print(&self) {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{verdict}] {}", self.number, self.title);
        for l in &self.lines {
            println!("      {} {}", if l.ok { "ok  " } else { "FAIL" }, l.text);
        }
    }
}

/// Runs `id` with growing trial counts until at least `target` trials met the hypotheses.
fn exercised(id: &str, target: u64) -> CheckReport {
    let mut trials = target;
    loop {
        let r = check_theorem(id, trials, dims(), SEED, tol()).unwrap();
        if r.exercised() >= target || trials >= 16 * target {
            return r;
        }
        trials *= 2;
    }
}

fn c1() -> Criterion {
    let mut c = Criterion::new(1, "adjoint involution and (V ∔ W)⁺ = V⁺ ∩ W⁺");
    c.report(&check_theorem("cwsum_adjoint", 500, dims(), SEED, tol()).unwrap(), 500);
    c
}

fn c2() -> Criterion {
    let mut c = Criterion::new(2, "composition, equality and decomposition lemmas");
    for id in ["derk_lemma", "pop_lemma", "behrndt20"] {
        c.report(&check_theorem(id, 300, dims(), SEED, tol()).unwrap(), 300);
    }
    c.report(&exercised("projp1", 300), 300);
    // Both truth values of the equivalence must be exercised.
    let (mut yes, mut no) = (0, 0);
    for i in 0..300 {
        let o = run_trial("behrndt20", SEED, i, dims(), tol()).unwrap();
        match o.note.as_deref() {
            Some(n) if n.starts_with("(i) = true") => yes += 1,
            Some(_) => no += 1,
            None => {}
        }
    }
    c.note(yes > 0 && no > 0, format!("behrndt20 directions: {yes} instances with (i), {no} without"));
    c
}

fn c3() -> Criterion {
    let mut c = Criterion::new(3, "Shmul'yan round trip and V(T)⁺ = V_#(T⁺)");
    c.report(&check_theorem("torth", 200, dims(), SEED, tol()).unwrap(), 200);
    c
}

fn c4() -> Criterion {
    let mut c = Criterion::new(4, "M(z)* = M_{Γ#}(z̄), 200 pairs × 5 points");
    c.report(&check_theorem("rrz", 200, dims(), SEED, tol()).unwrap(), 200);
    c
}

/// The invariant is enforced inside every Weyl sample taken by the checks; this adds a
/// dedicated sweep plus the documented counterexample outside the supported regime.
fn c5() -> Criterion {
    let mut c = Criterion::new(5, "Weyl-sample invariants for mul M(z) and ker M(z)");
    let mut samples = 0;
    let mut bad = 0;
    for trial in 0..200 {
        let mut rng = trial_rng(SEED, trial);
        let n = 1 + (trial as usize % 4);
        let m = 1 + (trial as usize / 4) % n.min(3);
        let kappa = [0, 1, n][trial as usize % 3];
        let bp = unitary_pair_with(&mut rng, n, m, kappa).unwrap();
        for z in [C64::new(0.3, 1.1), C64::new(-1.2, -0.4), C64::new(0.0, 2.0)] {
            samples += 1;
            if !weyl(&bp, z).unwrap().invariants_hold() {
                bad += 1;
            }
        }
    }
    c.note(bad == 0, format!("{samples} samples over random unitary pairs with m ≤ n: {bad} violations"));

    // Every check id routes its Weyl samples through the invariant guard, so a violation
    // anywhere surfaces as a trial error mentioning it.
    let mut hits = 0;
    for e in &kreinrel::harness::THEOREMS {
        let r = check_theorem(e.id, 20, dims(), SEED + 1, tol()).unwrap();
        hits += r.failure_details.iter().filter(|f| f.message.contains("mul M(z)") || f.message.contains("ker M(z)")).count();
    }
    c.note(hits == 0, format!("invariant guard across all 29 check ids (20 trials each): {hits} violations"));

    // Outside the supported regime (boundary space larger than the state space) the mul
    // identity can fail for unitary pairs; shown for the record, not counted.
    let mut found = None;
    for trial in 0..64 {
        let bp = unitary_pair_with(&mut trial_rng(SEED, trial), 1, 2, 0).unwrap();
        let s = weyl(&bp, C64::new(0.0, 1.0)).unwrap();
        if !s.mul_invariant {
            found = Some((trial, s.m.mul().dim()));
            break;
        }
    }
    let text = match found {
        Some((t, d)) => format!("info: n = 1, m = 2 draw {t} has dim mul M(i) = {d} while Γ₁(N̂_i(T₀)) differs (excluded regime)"),
        None => "info: no m > n counterexample in 64 draws".to_string(),
    };
    c.note(true, text);
    c
}

fn c6() -> Criterion {
    let mut c = Criterion::new(6, "main transform: selfadjointness, corner identity, point spectrum, empty resolvent");
    c.report(&check_theorem("mrTG_selfadjoint", 200, dims(), SEED, tol()).unwrap(), 200);
    let flip = BoundaryPair::flip_fixture(1);
    let a = main_transform(&flip);
    let grid = KernelSampleGrid::lattice((-2.0, 2.0), (0.1, 2.0), 10, 5).unwrap();
    let pts = grid.points();
    let in_res = pts.iter().filter(|&&z| in_resolvent(&a, z, tol()).unwrap()).count();
    c.note(
        pts.len() == 100 && in_res == 0 && a.dim() == 2,
        format!("J = −1 fixture, 𝒥(Γ) = {{((c, c), (d, d))}}: {in_res} of {} probe points in the resolvent set", pts.len()),
    );
    c
}

fn c7() -> Criterion {
    let mut c = Criterion::new(7, "Σ_Γ ⊆ res 𝒥(Γ), bijectivity after ε-scaling, z ∈ res 𝒥(Γ_ε)");
    for id in ["lemma_r", "lemma_r2", "resTG_pipeline"] {
        c.report(&exercised(id, 100), 100);
    }
    // Exceptional radius: for the J = −1 fixture M(z) = −z, so M_ε(z) + z = (1 − ε) z vanishes at ε = 1.
    let flip = BoundaryPair::flip_fixture(1);
    let z = C64::new(0.0, 2.0);
    let eps = z.norm() / 2.0;
    let in_b = spectral_sets(&flip, eps, &[z]).unwrap().samples[0].in_b_eps;
    let shifted = weyl(&scale_eps(&flip, eps).unwrap(), z).unwrap().m.shift(-z).unwrap();
    let degenerate = in_b && shifted.ker().dim() == 1;
    c.note(
        true,
        format!(
            "info: J = −1 fixture at z = 2i, ε = 1: z in B^ε = {in_b}, dim ker(M_ε(z) + z) = {} ({})",
            shifted.ker().dim(),
            if degenerate { "bijectivity fails at this single radius" } else { "no degeneracy" }
        ),
    );
    c
}

fn c8() -> Criterion {
    let mut c = Criterion::new(8, "M' = M + Δ on ρ_V, including the U_J family");
    c.report(&exercised("IUBP3", 100), 100);
    c.report(&exercised("fTex", 100), 100);
    c
}

fn c9() -> Criterion {
    let mut c = Criterion::new(9, "Δ(z) = 0 criteria in both directions; M' = κ²M for scaled triples");
    let (mut contained, mut avoided, mut fails) = (0, 0, 0);
    let mut i = 0;
    while (contained < 20 || avoided < 20) && i < 400 {
        let o = run_trial("delta0", SEED, i, dims(), tol()).unwrap();
        match o.status {
            Status::Pass if o.note.as_deref() == Some("direction: contained") => contained += 1,
            Status::Pass => avoided += 1,
            Status::Fail => fails += 1,
            Status::Skip => {}
        }
        i += 1;
    }
    c.note(
        contained >= 20 && avoided >= 20 && fails == 0,
        format!("delta0 fixtures: {contained} with N_z(T⁺) ⊆ ker p_V(z), {avoided} without, {fails} failures"),
    );
    c.report(&exercised("delta0b", 50), 50);
    c.report(&check_theorem("scaled_obt", 51, dims(), SEED, tol()).unwrap(), 51);
    c
}

fn c10() -> Criterion {
    let mut c = Criterion::new(10, "Γ ↦ VΓ: Weyl law, round trip, symmetric T', quasi boundary triple maps");
    for id in ["IBP0", "IUBP2xxcor", "GunTp", "VVV", "Vstar", "propVVV", "QBTex", "thmVVV"] {
        c.report(&exercised(id, 100), 100);
    }
    c
}

fn c11() -> Criterion {
    let mut c = Criterion::new(11, "generalized Nevanlinna probe");
    c.report(&check_theorem("pstan2_probe", 100, dims(), SEED, tol()).unwrap(), 100);
    let grid = KernelSampleGrid::lattice((-1.5, 1.5), (0.5, 1.5), 4, 3).unwrap();
    let mut zero_ok = true;
    for trial in 0..20 {
        let n = 1 + trial % 3;
        let bp = unitary_pair_with(&mut trial_rng(SEED, trial as u64), n, 1, 0).unwrap();
        let p = gen_nevanlinna_probe(&bp, 0.25, &grid).unwrap();
        zero_ok &= p.kappa_prime == 0 && p.condition1;
    }
    c.note(zero_ok, "J = I: 20 unitary pairs, 0 negative squares and condition (1) on every grid".to_string());
    let p = gen_nevanlinna_probe(&BoundaryPair::flip_fixture(1), 0.25, &grid).unwrap();
    c.note(
        p.kappa_prime <= p.kappa_bound && p.kappa_bound == 1 && p.condition1,
        format!("κ₋ = 1 fixture: κ' = {} ≤ {}", p.kappa_prime, p.kappa_bound),
    );
    c
}

fn c12() -> Criterion {
    let mut c = Criterion::new(12, "byte-identical reports for identical seeds");
    for id in ["rrz", "delta0", "pstan2_probe"] {
        let a = check_theorem_with(id, 40, dims(), 7, tol(), Execution::Parallel).unwrap().to_json();
        let b = check_theorem_with(id, 40, dims(), 7, tol(), Execution::Parallel).unwrap().to_json();
        let s = check_theorem_with(id, 40, dims(), 7, tol(), Execution::Sequential).unwrap().to_json();
        c.note(a == b && a == s, format!("{id}: repeat and sequential reports identical ({} bytes)", a.len()));
    }
    c
}

// Runs without the libtest harness so the per-criterion lines always reach
// the terminal, not only under `--nocapture`.
fn main() {
    assert_eq!(tol().angle_tol, ANGLE_TOL);
    let all = [c1(), c2(), c3(), c4(), c5(), c6(), c7(), c8(), c9(), c10(), c11(), c12()];
    for c in &all {
        c.print();
    }
    let failed: Vec<u8> = all.iter().filter(|c| !c.passed()).map(|c| c.number).collect();
    println!("{} of {} criteria passed", all.len() - failed.len(), all.len());
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
