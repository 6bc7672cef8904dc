//! Command-line interface.
//!
//! Exit codes: 0 success, 1 runtime/numerics failure, 2 usage or
//! configuration error.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::RunConfig;
use crate::coupler::{
    self, modulation_spectrum, CouplerParams, CouplingModel, DriveSignal,
};
use crate::dynamics::{self, EmissionSim};
use crate::nonmarkov::{self, SelfEnergyModel};
use crate::pcw_band::{
    build_band_structure, calibrate_period, BandStructure, PcwParams, LAMBDA_M_DEFAULT,
};
use crate::report::{artifact_paths, Manifest};
use crate::{cascade, transfer, Error};

const TWO_PI: f64 = 2.0 * PI;
const GHZ: f64 = 1e9;

#[derive(Parser)]
#[command(
    name = "chiral-pcw",
    version,
    about = "Chiral emission of giant atoms in a modulated photonic-crystal waveguide"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Directory for CSV and manifest outputs.
    #[arg(long, default_value = "out", global = true)]
    pub out_dir: PathBuf,
    /// Number of k-space modes per band.
    #[arg(long, default_value_t = 1024, global = true)]
    pub n_modes: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Band structure of the modulated waveguide.
    Bands {
        /// Adjust the modulation period so the band gap equals this width (GHz).
        #[arg(long)]
        calibrate_gap: Option<f64>,
    },
    /// Tunable-coupler characteristics.
    Coupler {
        /// Emit the harmonic spectrum of the modulated mutual inductance.
        #[arg(long)]
        spectrum: bool,
    },
    /// Single-atom chiral emission.
    Emit {
        /// Modulation frequency Ω_d in GHz.
        #[arg(long, default_value_t = 0.29)]
        omega_d: f64,
        /// Modulation phase difference φ_c in radians (default: chiral optimum).
        #[arg(long)]
        phi_c: Option<f64>,
    },
    /// Pole/branch-cut decomposition of the atom amplitude.
    Nonmarkov {
        /// Sweep detunings δ₀ (GHz) and tabulate spectral weights.
        #[arg(long, value_delimiter = ',')]
        delta0_sweep: Option<Vec<f64>>,
    },
    /// Cascaded two-atom master equation.
    Cascade,
    /// Shaped-pulse excitation transfer between two atoms.
    Transfer {
        /// Advance the capture pulse by the propagation delay.
        #[arg(long)]
        delay_correction: bool,
        /// Gap lengths in units of λ_m (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "8")]
        lab: Vec<f64>,
        /// Pulse window half-width t_f in µs.
        #[arg(long, default_value_t = 0.08)]
        t_f: f64,
    },
    /// Detuning sweep driven by a TOML configuration file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    std::fs::create_dir_all(&cli.common.out_dir)?;
    match cli.command {
        Command::Bands { calibrate_gap } => cmd_bands(&cli.common, calibrate_gap),
        Command::Coupler { spectrum } => cmd_coupler(&cli.common, spectrum),
        Command::Emit { omega_d, phi_c } => cmd_emit(&cli.common, omega_d, phi_c),
        Command::Nonmarkov { delta0_sweep } => cmd_nonmarkov(&cli.common, delta0_sweep),
        Command::Cascade => cmd_cascade(&cli.common),
        Command::Transfer { delay_correction, lab, t_f } => {
            cmd_transfer(&cli.common, delay_correction, &lab, t_f)
        }
        Command::Sweep { config } => cmd_sweep(&cli.common, &config),
    }
}

fn band_structure(common: &Common) -> Result<BandStructure, Error> {
    if common.n_modes < 16 || common.n_modes % 2 != 0 {
        return Err(Error::Config("--n-modes must be even and ≥ 16".into()));
    }
    build_band_structure(&PcwParams::default(), common.n_modes)
}

fn cmd_bands(common: &Common, calibrate_gap: Option<f64>) -> Result<(), Error> {
    let mut params = PcwParams::default();
    if let Some(gap_ghz) = calibrate_gap {
        if !(0.05..=3.0).contains(&gap_ghz) {
            return Err(Error::Config("--calibrate-gap must lie in [0.05, 3.0] GHz".into()));
        }
        params.lambda_m = calibrate_period(&params, TWO_PI * gap_ghz * GHZ)?;
    }
    let bs = build_band_structure(&params, common.n_modes)?;
    let rows: Vec<Vec<f64>> = (0..common.n_modes)
        .map(|j| {
            vec![bs.ks[j], bs.omega1[j] / (TWO_PI * GHZ), bs.omega2[j] / (TWO_PI * GHZ)]
        })
        .collect();
    let (csv, mpath) = artifact_paths(&common.out_dir, "bands");
    crate::report::write_csv(&csv, &["k_rad_per_m", "omega1_ghz", "omega2_ghz"], &rows)?;
    let mut manifest = Manifest::new(
        "bands",
        json!({
            "lambda_m": params.lambda_m,
            "n_modes": common.n_modes,
            "gap_ghz": bs.gap_width() / (TWO_PI * GHZ),
            "band1_top_ghz": bs.band1_top / (TWO_PI * GHZ),
        }),
    );
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    println!(
        "gap {:.6} GHz, band-1 top {:.6} GHz, period {:.6e} m",
        bs.gap_width() / (TWO_PI * GHZ),
        bs.band1_top / (TWO_PI * GHZ),
        params.lambda_m
    );
    Ok(())
}

fn cmd_coupler(common: &Common, spectrum: bool) -> Result<(), Error> {
    let params = CouplerParams::default();
    let d = 0.4 * PI;
    let dc = coupler::balance_dc_bias(d, &params)?;
    let drive = DriveSignal {
        dc_bias: dc,
        ac_amplitude: d,
        drive_freq: TWO_PI * 0.29 * GHZ,
        drive_phase: 0.0,
    };
    println!("balanced dc bias {dc:.6} Φ₀ at drive amplitude d = 0.4π");
    if spectrum {
        let spec = modulation_spectrum(&drive, &params, 8)?;
        // The DC term has no phase; harmonic n's phase sits at phases[n−1].
        let rows: Vec<Vec<f64>> = (0..spec.amps.len())
            .map(|n| {
                let phase = if n == 0 { 0.0 } else { spec.phases[n - 1] };
                vec![n as f64, spec.amps[n], phase]
            })
            .collect();
        let (csv, mpath) = artifact_paths(&common.out_dir, "coupler_spectrum");
        crate::report::write_csv(&csv, &["harmonic", "amplitude", "phase_rad"], &rows)?;
        let mut manifest = Manifest::new(
            "coupler",
            json!({"dc_bias": dc, "ac_amplitude": d, "a2_over_a1": spec.amps[2] / spec.amps[1]}),
        );
        manifest.add_artifact(&csv)?;
        manifest.write(&mpath)?;
        println!("A2/A1 = {:.4}", spec.amps[2] / spec.amps[1]);
    }
    Ok(())
}

fn cmd_emit(common: &Common, omega_d_ghz: f64, phi_c: Option<f64>) -> Result<(), Error> {
    if !(0.05..=1.0).contains(&omega_d_ghz) {
        return Err(Error::Config("--omega-d must lie in [0.05, 1.0] GHz".into()));
    }
    let bs = band_structure(common)?;
    let omega_d = TWO_PI * omega_d_ghz * GHZ;
    let omega_eff = coupler::omega_q_eff(&bs, omega_d);
    let res = bs.resonant_mode(omega_eff)?;
    let prefactor = coupler::calibrate_prefactor(&bs)?;
    let phi_c = match phi_c {
        Some(p) => p,
        None => -coupler::optimal_phase(&bs, 0.0, LAMBDA_M_DEFAULT, res.k_r)?,
    };
    let cm = CouplingModel {
        x1: 0.0,
        x2: LAMBDA_M_DEFAULT,
        phi_c,
        a1: 0.072682,
        prefactor,
    };
    let rates = nonmarkov::markovian_rates(&bs, &cm, omega_eff)?;
    let sim = EmissionSim::new(&bs, std::slice::from_ref(&cm), omega_d);
    let t_end = (12.0 / rates.gamma_pop()).min(0.9 * sim.recurrence_time(res.v_g));
    let one = |_t: f64| 1.0;
    let amps: [&(dyn Fn(f64) -> f64 + Sync); 1] = [&one];
    let ce0 = [num_complex::Complex64::new(1.0, 0.0)];
    let result = sim.evolve(0.0, t_end, &ce0, &amps, 50)?;
    let pops: Vec<f64> = result.pops[0].clone();
    let rows: Vec<Vec<f64>> =
        result.times.iter().zip(&pops).map(|(&t, &p)| vec![t, p]).collect();
    let fitted = dynamics::fit_decay_rate(&result.times, &pops)?;
    let (beta_minus, beta_plus) = dynamics::beta_momentum(&bs, &result.ck);
    let (csv, mpath) = artifact_paths(&common.out_dir, "emit");
    crate::report::write_csv(&csv, &["t_s", "pop"], &rows)?;
    let mut manifest = Manifest::new(
        "emit",
        json!({
            "omega_d_ghz": omega_d_ghz,
            "phi_c": phi_c,
            "gamma_pop_analytic": rates.gamma_pop(),
            "gamma_pop_fitted": fitted,
            "beta_plus": beta_plus,
            "beta_minus": beta_minus,
        }),
    );
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    println!(
        "Γ_pop fitted {:.4} MHz (analytic {:.4} MHz), β₊ = {:.4}",
        fitted / (TWO_PI * 1e6),
        rates.gamma_pop() / (TWO_PI * 1e6),
        beta_plus
    );
    Ok(())
}

fn default_nonmarkov_atom(bs: &BandStructure) -> Result<CouplingModel, Error> {
    let prefactor = coupler::calibrate_prefactor(bs)?;
    let omega_eff = coupler::omega_q_eff(bs, TWO_PI * 0.29 * GHZ);
    let res = bs.resonant_mode(omega_eff)?;
    let phi_c = -coupler::optimal_phase(bs, 0.0, LAMBDA_M_DEFAULT, res.k_r)?;
    Ok(CouplingModel { x1: 0.0, x2: LAMBDA_M_DEFAULT, phi_c, a1: 0.072682, prefactor })
}

fn weight_rows(
    bs: &BandStructure,
    cm: &CouplingModel,
    deltas_ghz: &[f64],
) -> Result<Vec<Vec<f64>>, Error> {
    let mut rows = Vec::new();
    for &d in deltas_ghz {
        let model = SelfEnergyModel::from_band(bs, cm, TWO_PI * d * GHZ);
        let poles = model.find_poles()?;
        let (w0, w1, w2) = nonmarkov::channel_weights(&poles);
        rows.push(vec![d, w0, w1, w2]);
    }
    Ok(rows)
}

fn cmd_nonmarkov(common: &Common, delta0_sweep: Option<Vec<f64>>) -> Result<(), Error> {
    let bs = band_structure(common)?;
    let cm = default_nonmarkov_atom(&bs)?;
    let deltas = delta0_sweep.unwrap_or_else(|| vec![-0.1, 0.0, 0.1]);
    let rows = weight_rows(&bs, &cm, &deltas)?;
    let (csv, mpath) = artifact_paths(&common.out_dir, "nonmarkov_weights");
    crate::report::write_csv(&csv, &["delta0_ghz", "w_bound", "w_exp", "w_cut"], &rows)?;
    let mut manifest =
        Manifest::new("nonmarkov", json!({"delta0_ghz": deltas, "a1": cm.a1}));
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    for row in &rows {
        println!(
            "δ₀ = {:+.3} GHz: w_bound {:.4}, w_exp {:.4}, w_cut {:.4}",
            row[0], row[1], row[2], row[3]
        );
    }
    Ok(())
}

fn cmd_cascade(common: &Common) -> Result<(), Error> {
    let gpop = TWO_PI * 3e6;
    let model = cascade::CascadeModel::chiral(gpop, gpop, 0.5 * PI, 0.5 * PI, 1.0)?;
    let me = cascade::MasterEquation::from_model(&model);
    let mut rho0 = nalgebra::Matrix3::zeros();
    rho0[(0, 0)] = num_complex::Complex64::new(1.0, 0.0);
    let traj = me.evolve(rho0, 0.3e-6, 60_000, 300)?;
    let rows: Vec<Vec<f64>> = (0..traj.times.len())
        .map(|i| vec![traj.times[i], traj.pop_a[i], traj.pop_b[i]])
        .collect();
    let (forward, backward) = cascade::nonreciprocity_witness(&me, 0.2e-6, 40_000)?;
    let (csv, mpath) = artifact_paths(&common.out_dir, "cascade");
    crate::report::write_csv(&csv, &["t_s", "pop_a", "pop_b"], &rows)?;
    let mut manifest = Manifest::new(
        "cascade",
        json!({
            "gamma_pop": gpop,
            "witness_forward": forward,
            "witness_backward": backward,
        }),
    );
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    println!("nonreciprocity witness: forward {forward:.3e}, backward {backward:.3e}");
    Ok(())
}

fn cmd_transfer(
    common: &Common,
    delay_correction: bool,
    lab: &[f64],
    t_f_us: f64,
) -> Result<(), Error> {
    if lab.is_empty() || lab.iter().any(|&n| !(0.5..=64.0).contains(&n)) {
        return Err(Error::Config("--lab entries must lie in [0.5, 64] λ_m".into()));
    }
    if !(0.01..=1.0).contains(&t_f_us) {
        return Err(Error::Config("--t-f must lie in [0.01, 1.0] µs".into()));
    }
    let bs = band_structure(common)?;
    let prefactor = coupler::calibrate_prefactor(&bs)?;
    let gamma_max = TWO_PI * 7e6;
    let t_f = t_f_us * 1e-6;
    let mut rows = Vec::new();
    for &n in lab {
        let setup = transfer::build_setup(&bs, prefactor, gamma_max, n * LAMBDA_M_DEFAULT)?;
        let result = transfer::run_transfer(&bs, &setup, t_f, delay_correction)?;
        println!(
            "L_ab = {n:.2} λ_m: peak ρ_bb = {:.4} ({})",
            result.fidelity,
            if delay_correction { "delay-corrected" } else { "uncorrected" }
        );
        rows.push(vec![n, result.fidelity]);
    }
    let (csv, mpath) = artifact_paths(&common.out_dir, "transfer");
    crate::report::write_csv(&csv, &["l_ab_lambda", "fidelity"], &rows)?;
    let mut manifest = Manifest::new(
        "transfer",
        json!({
            "delay_correction": delay_correction,
            "t_f_us": t_f_us,
            "gamma_max": gamma_max,
            "n_modes": common.n_modes,
        }),
    );
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    Ok(())
}

fn cmd_sweep(common: &Common, config: &std::path::Path) -> Result<(), Error> {
    let cfg = RunConfig::load(config)?;
    let bs = build_band_structure(&cfg.waveguide.to_params(), cfg.numerics.n_modes)?;
    let prefactor = coupler::calibrate_prefactor(&bs)?;
    let omega_d =
        if cfg.omega_d_ghz != 0.0 { TWO_PI * cfg.omega_d_ghz * GHZ } else { TWO_PI * 0.29 * GHZ };
    let omega_eff = coupler::omega_q_eff(&bs, omega_d);
    let res = bs.resonant_mode(omega_eff)?;
    let cm = if let Some(atom) = cfg.atoms.first() {
        let x1 = atom.x1_lambda * cfg.waveguide.lambda_m;
        let x2 = atom.x2_lambda * cfg.waveguide.lambda_m;
        let phi_c = match atom.phi_c {
            Some(p) => p,
            None => -coupler::optimal_phase(&bs, x1, x2, res.k_r)?,
        };
        CouplingModel { x1, x2, phi_c, a1: atom.a1, prefactor }
    } else {
        default_nonmarkov_atom(&bs)?
    };
    let rows = weight_rows(&bs, &cm, &cfg.sweep.delta0_ghz)?;
    let (csv, mpath) = artifact_paths(&common.out_dir, "sweep_weights");
    crate::report::write_csv(&csv, &["delta0_ghz", "w_bound", "w_exp", "w_cut"], &rows)?;
    let mut manifest = Manifest::new(
        "sweep",
        json!({
            "config": config.display().to_string(),
            "n_modes": cfg.numerics.n_modes,
            "delta0_ghz": cfg.sweep.delta0_ghz,
        }),
    );
    manifest.add_artifact(&csv)?;
    manifest.write(&mpath)?;
    println!("wrote {} rows to {}", rows.len(), csv.display());
    Ok(())
}
