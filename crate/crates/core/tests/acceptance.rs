//! Acceptance gate: nine end-to-end criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Shared band structures are built once per process via `OnceLock`.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;

use chiral_pcw::cascade::{
    closed_form_cascade_pops, nonreciprocity_witness, CascadeModel, MasterEquation, M3,
};
use chiral_pcw::coupler::{calibrate_prefactor, omega_q_eff, optimal_phase, CouplingModel};
use chiral_pcw::dynamics::{beta_momentum, fit_decay_rate, matrix_exponential_reference, EmissionSim};
use chiral_pcw::nonmarkov::{channel_weights, markovian_rates, SelfEnergyModel};
use chiral_pcw::pcw_band::{build_band_structure, BandStructure, PcwParams, LAMBDA_M_DEFAULT};
use chiral_pcw::report::{sha256_hex, write_csv};
use chiral_pcw::transfer::{build_setup, run_transfer, sweep_gap};

const TWO_PI: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

fn params() -> PcwParams {
    PcwParams {
        c_g: 2e-10,
        l_0: 5e-6,
        delta_alpha: 0.3,
        lambda_m: LAMBDA_M_DEFAULT,
        m_trunc: 15,
    }
}

fn shared(n: usize, cell: &'static OnceLock<(BandStructure, f64)>) -> &'static (BandStructure, f64) {
    cell.get_or_init(|| {
        let bs = build_band_structure(&params(), n).expect("band structure");
        let c = calibrate_prefactor(&bs).expect("prefactor calibration");
        (bs, c)
    })
}

fn bs2048() -> &'static (BandStructure, f64) {
    static CELL: OnceLock<(BandStructure, f64)> = OnceLock::new();
    shared(2048, &CELL)
}

fn bs4096() -> &'static (BandStructure, f64) {
    static CELL: OnceLock<(BandStructure, f64)> = OnceLock::new();
    shared(4096, &CELL)
}

/// Right-chiral coupling model at `(x1, x1 + x_d)` for drive `omega_d` (rad/s).
fn chiral_model(
    bs: &BandStructure,
    prefactor: f64,
    omega_d: f64,
    x1: f64,
    x_d: f64,
    a1: f64,
) -> CouplingModel {
    let omega_eff = omega_q_eff(bs, omega_d);
    let res = bs.resonant_mode(omega_eff).expect("resonant mode");
    let phi_c = -optimal_phase(bs, x1, x1 + x_d, res.k_r).expect("optimal phase");
    CouplingModel { x1, x2: x1 + x_d, phi_c, a1, prefactor }
}

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

/// 1. Band gap at the zone edge equals 0.75 GHz within 1e-4 GHz, in under 10 s.
#[test]
fn criterion_1_band_gap() {
    let t0 = Instant::now();
    let gap = chiral_pcw::pcw_band::gap_at_zone_edge(&params()).expect("gap");
    let elapsed = t0.elapsed().as_secs_f64();
    let gap_ghz = gap / (TWO_PI * 1e9);
    let err = (gap_ghz - 0.75).abs();
    report(
        1,
        "band gap",
        err < 1e-4 && elapsed < 10.0,
        &format!("gap = {gap_ghz:.6} GHz (|Δ| = {err:.2e}), {elapsed:.2} s"),
    );
}

/// 2. Chiral emission: β₊ ≥ 0.95 at Ω_d/2π = 0.29 GHz, points (0, λ_m),
/// optimal φ_c, N = 4096.
#[test]
fn criterion_2_directional_emission() {
    let t0 = Instant::now();
    let (bs, c) = bs4096();
    let omega_d = TWO_PI * 0.29e9;
    let lam = bs.params.lambda_m;
    let cm = chiral_model(bs, *c, omega_d, 0.0, lam, 0.5);
    let omega_eff = omega_q_eff(bs, omega_d);
    let rates = markovian_rates(bs, &cm, omega_eff).expect("rates");
    let t_end = 5.0 / rates.gamma_pop();
    let sim = EmissionSim::new(bs, std::slice::from_ref(&cm), omega_d);
    let amp = |_t: f64| 1.0;
    let amps: [&(dyn Fn(f64) -> f64 + Sync); 1] = [&amp];
    let ce0 = [Complex64::new(1.0, 0.0)];
    let out = sim.evolve(0.0, t_end, &ce0, &amps, 1000).expect("evolve");
    let (_bm, bp) = beta_momentum(bs, &out.ck);
    let elapsed = t0.elapsed().as_secs_f64();
    report(
        2,
        "directional emission",
        bp >= 0.95 && elapsed < 300.0,
        &format!("β₊ = {bp:.4} at Ω_d = 0.29 GHz, N = 4096, {elapsed:.1} s"),
    );
}

/// 3. Tunable decay: the fitted rate matches the analytic Markovian rate to
/// 5% and the dominant-channel amplitude rate stays within (1, 3) MHz over
/// Ω_d/2π ∈ {0.22, 0.29, 0.35, 0.45, 0.54} GHz.
#[test]
fn criterion_3_tunable_rate() {
    let (bs, c) = bs2048();
    let lam = bs.params.lambda_m;
    let mut detail = String::new();
    let mut pass = true;
    for &od_ghz in &[0.22, 0.29, 0.35, 0.45, 0.54] {
        let omega_d = TWO_PI * od_ghz * 1e9;
        let cm = chiral_model(bs, *c, omega_d, 0.0, lam, 0.5);
        let omega_eff = omega_q_eff(bs, omega_d);
        let rates = markovian_rates(bs, &cm, omega_eff).expect("rates");
        let gamma_ana = rates.gamma_pop();
        let t_end = (5.0 / gamma_ana).min(0.45e-6);
        let sim = EmissionSim::new(bs, std::slice::from_ref(&cm), omega_d);
        let amp = |_t: f64| 1.0;
        let amps: [&(dyn Fn(f64) -> f64 + Sync); 1] = [&amp];
        let ce0 = [Complex64::new(1.0, 0.0)];
        let out = sim.evolve(0.0, t_end, &ce0, &amps, 100).expect("evolve");
        let gamma_fit = fit_decay_rate(&out.times, &out.pops[0]).expect("fit");
        let rel = (gamma_fit / gamma_ana - 1.0).abs();
        let dom_mhz = rates.gamma_plus.max(rates.gamma_minus) / (TWO_PI * 1e6);
        let ok = rel < 0.05 && dom_mhz > 1.0 && dom_mhz < 3.0;
        pass &= ok;
        detail.push_str(&format!(
            "Ω_d={od_ghz}: Γfit/Γana−1={rel:+.3e}, Γ₊={dom_mhz:.2} MHz; "
        ));
    }
    report(3, "tunable decay rate", pass, detail.trim_end());
}

/// 4. Optimal modulation-phase magnitudes at Ω_d/2π = 0.35 GHz:
/// 0.28π ± 0.01π for points (0.2, 0.8)λ_m and 0.12π ± 0.01π for (0, 1)λ_m.
#[test]
fn criterion_4_optimal_phase() {
    let (bs, _) = bs2048();
    let lam = bs.params.lambda_m;
    let omega_eff = omega_q_eff(bs, TWO_PI * 0.35e9);
    let res = bs.resonant_mode(omega_eff).expect("resonant mode");
    let p_inner = optimal_phase(bs, 0.2 * lam, 0.8 * lam, res.k_r).expect("phase") / PI;
    let p_full = optimal_phase(bs, 0.0, lam, res.k_r).expect("phase") / PI;
    let e1 = (p_inner.abs() - 0.28).abs();
    let e2 = (p_full.abs() - 0.12).abs();
    report(
        4,
        "optimal phase",
        e1 < 0.01 && e2 < 0.01,
        &format!("|φ_c|/π = {:.4} (0.2–0.8 λ), {:.4} (0–1 λ)", p_inner.abs(), p_full.abs()),
    );
}

/// 5. Non-Markovian reconstruction: pole + branch-cut amplitude matches the
/// full simulation within 0.02 pointwise for δ₀/2π ∈ {+0.1, 0, −0.1} GHz;
/// the steady population equals |Res₀|² within 0.02 (δ₀ > 0); the cut decays
/// with log-log slope −1.5 ± 0.1.
#[test]
fn criterion_5_reconstruction() {
    let (bs, c) = bs2048();
    let lam = bs.params.lambda_m;
    let mut detail = String::new();
    let mut pass = true;
    // δ₀ = Δ_d − Ω_d: drive frequencies 0.0, 0.1, 0.2 GHz give
    // δ₀/2π = +0.1, 0, −0.1 GHz.
    for &(od_ghz, d0_ghz) in &[(0.0, 0.1), (0.1, 0.0), (0.2, -0.1)] {
        let omega_d = TWO_PI * od_ghz * 1e9;
        let cm = CouplingModel { x1: 0.0, x2: lam, phi_c: PI, a1: 0.10, prefactor: *c };
        let delta0 = TWO_PI * d0_ghz * 1e9;
        let model = SelfEnergyModel::from_band(bs, &cm, delta0);
        let poles = model.find_poles().expect("poles");
        let sim = EmissionSim::new(bs, std::slice::from_ref(&cm), omega_d);
        let t_end = 0.3e-6;
        let n_steps = (t_end / sim.dt).ceil() as usize;
        let rec = (n_steps / 60).max(1);
        let amp = |_t: f64| 1.0;
        let amps: [&(dyn Fn(f64) -> f64 + Sync); 1] = [&amp];
        let ce0 = [Complex64::new(1.0, 0.0)];
        let out = sim.evolve(0.0, t_end, &ce0, &amps, rec).expect("evolve");
        let mut maxdiff = 0.0f64;
        for (i, &t) in out.times.iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let rec_pop = model.reconstruct(&poles, t).expect("reconstruct").norm_sqr();
            maxdiff = maxdiff.max((rec_pop - out.pops[0][i]).abs());
        }
        let ok = maxdiff < 0.02;
        pass &= ok;
        detail.push_str(&format!("δ₀={d0_ghz:+}: maxdiff={maxdiff:.4}; "));
        if d0_ghz > 0.0 {
            let steady_model = model.steady_state_population(&poles);
            let steady_sim = *out.pops[0].last().unwrap();
            let serr = (steady_model - steady_sim).abs();
            pass &= serr < 0.02;
            detail.push_str(&format!("steady |Res₀|²={steady_model:.4} vs sim={steady_sim:.4}; "));
        }
        if d0_ghz < 0.0 {
            // Long-time cut tail: |S_cut| ∝ t^{−3/2}.
            let ts: [f64; 4] = [1e-3, 2e-3, 4e-3, 1e-2];
            let lnt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let lns: Vec<f64> = ts
                .iter()
                .map(|&t| model.branch_cut_amplitude(t).expect("cut").norm().ln())
                .collect();
            let (slope, _) = chiral_pcw::numerics::linear_fit(&lnt, &lns).expect("fit");
            pass &= (slope + 1.5).abs() < 0.1;
            detail.push_str(&format!("cut slope={slope:.4}; "));
        }
    }
    report(5, "non-Markovian reconstruction", pass, detail.trim_end());
}

/// 6. Channel-weight sweep over δ₀: CSV artifact written; the bound channel
/// dominates (w₀ > 0.9) for δ₀ ≥ +0.1 GHz and the exponential channel is the
/// largest for δ₀ ≤ −0.1 GHz.
#[test]
fn criterion_6_weight_sweep() {
    let (bs, c) = bs2048();
    let lam = bs.params.lambda_m;
    let cm = CouplingModel { x1: 0.0, x2: lam, phi_c: PI, a1: 0.072682, prefactor: *c };
    let grid = [-0.20, -0.15, -0.10, -0.05, 0.0, 0.05, 0.10, 0.15, 0.20];
    let mut rows = Vec::new();
    let mut pass = true;
    let mut detail = String::new();
    for &d0_ghz in &grid {
        let model = SelfEnergyModel::from_band(bs, &cm, TWO_PI * d0_ghz * 1e9);
        let poles = model.find_poles().expect("poles");
        let (w0, w1, w2) = channel_weights(&poles);
        rows.push(vec![d0_ghz, w0, w1, w2]);
        if d0_ghz >= 0.10 {
            pass &= w0 > 0.9;
        }
        if d0_ghz <= -0.10 {
            pass &= w1 > w0 && w1 > w2;
        }
        detail.push_str(&format!("δ₀={d0_ghz:+.2}: w=({w0:.3},{w1:.3},{w2:.3}); "));
    }
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join("weight_sweep.csv");
    write_csv(&path, &["delta0_ghz", "w_bound", "w_exponential", "w_cut"], &rows).expect("csv");
    let digest = sha256_hex(&path).expect("sha256");
    pass &= path.exists() && digest.len() == 64;
    report(6, "channel-weight sweep", pass, detail.trim_end());
}

/// 7. Cascaded pair: the full two-atom simulation matches the
/// master-equation/closed-form populations within 0.03 at gap L_ab = λ_m,
/// and the nonreciprocity witness is below 1e-8 in the forward direction.
#[test]
fn criterion_7_cascade() {
    let (bs, c) = bs2048();
    let lam = bs.params.lambda_m;
    // The Lamb-neutral operating point (φ_i = π/2, x_d = 3λ) removes the
    // modulation-induced frequency pulls so the Markovian cascade is clean.
    let op = chiral_pcw::transfer::lamb_neutral_operating_point(bs).expect("operating point");
    let omega_eff = omega_q_eff(bs, op.omega_d);
    // Calibrate A₁ for a 2π×3 MHz population rate in this geometry.
    let probe = CouplingModel { x1: 0.0, x2: op.x_d, phi_c: op.phi_c, a1: 0.5, prefactor: *c };
    let gamma_probe = markovian_rates(bs, &probe, omega_eff).expect("rates").gamma_pop();
    let a1 = 0.5 * (TWO_PI * 3e6 / gamma_probe).sqrt();
    // Atom a at (0, 3λ); atom b shifted so the gap between a's second and
    // b's first coupling point is L_ab = λ.
    let x1b = op.x_d + lam;
    let atom_a = CouplingModel { x1: 0.0, x2: op.x_d, phi_c: op.phi_c, a1, prefactor: *c };
    let atom_b =
        CouplingModel { x1: x1b, x2: x1b + op.x_d, phi_c: op.phi_c, a1, prefactor: *c };
    let rates = markovian_rates(bs, &atom_a, omega_eff).expect("rates");
    let gamma = rates.gamma_pop();

    let atoms = [atom_a, atom_b];
    let sim = EmissionSim::new(bs, &atoms, op.omega_d);
    let amp = |_t: f64| 1.0;
    let amps: [&(dyn Fn(f64) -> f64 + Sync); 2] = [&amp, &amp];
    let ce0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let t_end = (0.3e-6f64).min(0.9 * TWO_PI / (bs.dk * op.v_g));
    let out = sim.evolve(0.0, t_end, &ce0, &amps, 200).expect("evolve");
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for (i, &t) in out.times.iter().enumerate() {
        let (ra, rb) = closed_form_cascade_pops(gamma, t);
        dev_a = dev_a.max((out.pops[0][i] - ra).abs());
        dev_b = dev_b.max((out.pops[1][i] - rb).abs());
    }

    // Master equation on the same operating point reproduces the closed form
    // and gives the witness. The design phase across each atom is φ_i = π/2.
    let phi_i = 0.5 * PI;
    let phi_l = op.k_r * lam;
    let model = CascadeModel::chiral(gamma, gamma, phi_i, phi_i, phi_l).expect("model");
    let me = MasterEquation::from_model(&model);
    let mut rho0 = M3::zeros();
    rho0[(0, 0)] = Complex64::new(1.0, 0.0);
    let traj = me.evolve(rho0, t_end, 30_000, 500).expect("me evolve");
    let mut me_dev = 0.0f64;
    for (i, &t) in traj.times.iter().enumerate() {
        let (ra, rb) = closed_form_cascade_pops(gamma, t);
        me_dev = me_dev.max((traj.pop_a[i] - ra).abs().max((traj.pop_b[i] - rb).abs()));
    }
    let (forward, backward) = nonreciprocity_witness(&me, 5.0 / gamma, 20_000).expect("witness");

    let pass = dev_a < 0.03 && dev_b < 0.03 && me_dev < 1e-4 && forward < 1e-8 && backward > 1e-3;
    report(
        7,
        "cascaded pair",
        pass,
        &format!(
            "sim vs closed form: dev_a={dev_a:.4}, dev_b={dev_b:.4}; ME dev={me_dev:.2e}; \
             witness forward={forward:.2e}, backward={backward:.2e}"
        ),
    );
}

/// 8. State transfer at L_ab = 8λ_m, t_f = 0.08 µs, Γmax = 2π×7 MHz:
/// delay-corrected fidelity 0.97 ± 0.02, and the corrected protocol is at
/// least as good as the uncorrected one for every gap in {4..12}λ_m; under
/// 15 min at N = 4096.
#[test]
fn criterion_8_state_transfer() {
    let t0 = Instant::now();
    let (bs, c) = bs4096();
    let gamma_max = TWO_PI * 7e6;
    let t_f = 0.08e-6;
    let setup = build_setup(bs, *c, gamma_max, 8.0 * LAMBDA_M_DEFAULT).expect("setup");
    let corrected = run_transfer(bs, &setup, t_f, true).expect("transfer");
    let multiples: Vec<f64> = (4..=12).map(|n| n as f64).collect();
    let sweep = sweep_gap(bs, *c, gamma_max, t_f, &multiples).expect("sweep");
    let monotone = sweep.iter().all(|p| p.fidelity_corrected >= p.fidelity_uncorrected);
    let elapsed = t0.elapsed().as_secs_f64();
    let fid = corrected.fidelity;
    let pass = (fid - 0.97).abs() <= 0.02 && monotone && elapsed < 900.0;
    let sweep_str: String = sweep
        .iter()
        .map(|p| format!("{}λ: {:.4}/{:.4} ", p.l_ab_lambda, p.fidelity_uncorrected, p.fidelity_corrected))
        .collect();
    report(
        8,
        "state transfer",
        pass,
        &format!("fidelity(8λ, corrected) = {fid:.4}; sweep (unc/corr): {sweep_str}; {elapsed:.0} s"),
    );
}

/// 9. Numerical integrity: norm drift < 1e-6; ω(−k) = ω(k); gauge-invariant
/// Bloch conjugation u_{−k} = u_k*; β₊ + β₋ = 1; mirror identity
/// β₊(φ_c) = β₋(−φ_c) within 0.02; N = 64 matrix-exponential oracle < 1e-6.
#[test]
fn criterion_9_integrity() {
    let (bs, c) = bs2048();
    let lam = bs.params.lambda_m;
    let omega_d = TWO_PI * 0.29e9;
    let omega_eff = omega_q_eff(bs, omega_d);
    let mut pass = true;
    let mut detail = String::new();

    // Unitarity of the single-excitation propagation.
    let cm = chiral_model(bs, *c, omega_d, 0.0, lam, 0.5);
    let sim = EmissionSim::new(bs, std::slice::from_ref(&cm), omega_d);
    let amp = |_t: f64| 1.0;
    let amps: [&(dyn Fn(f64) -> f64 + Sync); 1] = [&amp];
    let ce0 = [Complex64::new(1.0, 0.0)];
    let out = sim.evolve(0.0, 0.05e-6, &ce0, &amps, 1000).expect("evolve");
    pass &= out.norm_drift < 1e-6;
    detail.push_str(&format!("norm drift={:.2e}; ", out.norm_drift));

    // Band symmetry and Bloch conjugation (gauge-invariant correlator).
    let mut w_err = 0.0f64;
    let mut u_err = 0.0f64;
    for j in (0..bs.n_modes).step_by(37) {
        let m = bs.mirror_index(j);
        w_err = w_err.max((bs.omega1[j] - bs.omega1[m]).abs() / bs.band1_top);
        for &(x, y) in &[(0.0, 0.31 * lam), (0.2 * lam, 0.77 * lam)] {
            let corr = bs.u_at(j, x) * bs.u_at(j, y).conj();
            let corr_m = bs.u_at(m, x) * bs.u_at(m, y).conj();
            u_err = u_err.max((corr_m - corr.conj()).norm() / corr.norm().max(1e-300));
        }
    }
    pass &= w_err < 1e-10 && u_err < 1e-8;
    detail.push_str(&format!("ω(−k)−ω(k)={w_err:.2e}, u_(−k)−u_k*={u_err:.2e}; "));

    // β₊ + β₋ = 1 and the mirror identity β₊(φ_c) = β₋(−φ_c).
    let (bm, bp) = beta_momentum(bs, &out.ck);
    pass &= (bm + bp - 1.0).abs() < 1e-12;
    let cm_mirror = CouplingModel { phi_c: -cm.phi_c, ..cm.clone() };
    let r1 = markovian_rates(bs, &cm, omega_eff).expect("rates");
    let r2 = markovian_rates(bs, &cm_mirror, omega_eff).expect("rates");
    let mirror_dev = (r1.beta_plus() - (1.0 - r2.beta_plus())).abs();
    pass &= mirror_dev < 0.02;
    detail.push_str(&format!("β₊+β₋−1={:.1e}, mirror dev={mirror_dev:.4}; ", bm + bp - 1.0));

    // Exact matrix-exponential oracle on a small lattice.
    let bs64 = build_band_structure(&params(), 64).expect("band structure");
    let c64 = calibrate_prefactor(&bs64).expect("prefactor");
    let cm64 = chiral_model(&bs64, c64, omega_d, 0.0, lam, 0.5);
    let sim64 = EmissionSim::new(&bs64, std::slice::from_ref(&cm64), omega_d);
    let t_probe = 2000.0 * sim64.dt;
    let out64 = sim64.evolve(0.0, t_probe, &ce0, &amps, 10_000).expect("evolve");
    let refp = matrix_exponential_reference(&sim64, &[1.0], &ce0, out64.t_final);
    let mut oracle_err = (out64.ce[0].norm_sqr() - refp[0]).abs();
    for (j, ck) in out64.ck.iter().enumerate() {
        oracle_err = oracle_err.max((ck.norm_sqr() - refp[1 + j]).abs());
    }
    pass &= oracle_err < 1e-6;
    detail.push_str(&format!("oracle err={oracle_err:.2e}"));

    report(9, "numerical integrity", pass, &detail);
}
