//! Wavefunction dynamics in the single-excitation sector: one or two emitters
//! coupled to the discretized band-1 Bloch modes, integrated in the
//! interaction picture with a fixed-step RK4 scheme.
//!
//! The rotating frame absorbs the drive, so an atom driven at Ω_d couples
//! resonantly to modes near `ω_q^eff = ω_q − Ω_d`. Mode phases
//! `e^{iΔ_j t}` advance by precomputed half-step rotors and are recomputed
//! exactly every 512 steps to keep phase drift at round-off level.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coupler::{coupling_spectrum, omega_q_eff, CouplingModel};
use crate::pcw_band::BandStructure;
use crate::Error;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Amplitude schedule for one atom: a multiplier on its coupling spectrum.
pub type Amplitude<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Single-excitation simulator for a set of atoms sharing one waveguide and
/// one drive frequency.
pub struct EmissionSim<'a> {
    pub bs: &'a BandStructure,
    /// Mode detunings `Δ_j = ω_1(k_j) − ω_q^eff` (rad/s).
    pub deltas: Vec<f64>,
    /// Discrete couplings `g_{i,j} = g'_{i}(k_j)·√dk` per atom (rad/s).
    pub couplings: Vec<Vec<Complex64>>,
    /// Coupling-point midpoints, used to split left from right flux (m).
    pub centers: Vec<f64>,
    /// Integration step (s).
    pub dt: f64,
}

/// Recorded populations and final state.
pub struct SimResult {
    pub times: Vec<f64>,
    /// `pops[i][n]` = excited population of atom `i` at `times[n]`.
    pub pops: Vec<Vec<f64>>,
    /// Final atomic amplitudes.
    pub ce: Vec<Complex64>,
    /// Final mode amplitudes (interaction picture).
    pub ck: Vec<Complex64>,
    /// Final time (s).
    pub t_final: f64,
    /// |norm(t_final) − norm(0)| of the full state.
    pub norm_drift: f64,
}

impl<'a> EmissionSim<'a> {
    /// Build a simulator for `atoms` driven at `omega_d` (rad/s). The step is
    /// `dt = 2π / (50·max(Ω_d, max_j |Δ_j|))`.
    pub fn new(bs: &'a BandStructure, atoms: &[CouplingModel], omega_d: f64) -> Self {
        let omega_eff = omega_q_eff(bs, omega_d);
        let deltas: Vec<f64> = bs.omega1.iter().map(|&w| w - omega_eff).collect();
        let sqrt_dk = bs.dk.sqrt();
        let couplings: Vec<Vec<Complex64>> = atoms
            .iter()
            .map(|cm| coupling_spectrum(bs, cm).into_iter().map(|g| g * sqrt_dk).collect())
            .collect();
        let centers = atoms.iter().map(|cm| 0.5 * (cm.x1 + cm.x2)).collect();
        let max_delta = deltas.iter().fold(0.0f64, |a, &d| a.max(d.abs()));
        let dt = TWO_PI / (50.0 * omega_d.max(max_delta));
        Self { bs, deltas, couplings, centers, dt }
    }

    /// Lattice recurrence time `T_rec = L/v_g = 2π/(dk·v_g)`: wavepackets wrap
    /// around the periodic lattice after this time, so fits and flux
    /// evaluation must finish before it.
    pub fn recurrence_time(&self, v_g: f64) -> f64 {
        TWO_PI / (self.bs.dk * v_g)
    }

    /// Integrate from `t0` to `t1` starting with atom amplitudes `ce0` and no
    /// photons. `amps[i](t)` multiplies atom `i`'s couplings. Populations are
    /// recorded every `record_every` steps. Fails if the state norm drifts by
    /// more than 1e−4.
    pub fn evolve(
        &self,
        t0: f64,
        t1: f64,
        ce0: &[Complex64],
        amps: &[Amplitude],
        record_every: usize,
    ) -> Result<SimResult, Error> {
        let n_atoms = self.couplings.len();
        assert_eq!(ce0.len(), n_atoms);
        assert_eq!(amps.len(), n_atoms);
        let n_modes = self.deltas.len();
        let dt = self.dt;
        let n_steps = ((t1 - t0) / dt).ceil() as usize;
        let rec = record_every.max(1);

        let rot_half: Vec<Complex64> =
            self.deltas.iter().map(|&d| Complex64::from_polar(1.0, d * dt / 2.0)).collect();

        let mut ce: Vec<Complex64> = ce0.to_vec();
        let mut ck = vec![Complex64::new(0.0, 0.0); n_modes];
        let norm0 = norm_sqr(&ce, &ck);

        let mut phase = vec![Complex64::new(1.0, 0.0); n_modes];
        let mut p1 = vec![Complex64::new(1.0, 0.0); n_modes];
        let mut p2 = vec![Complex64::new(1.0, 0.0); n_modes];

        // RK4 stage buffers.
        let mut k_ce = vec![[Complex64::new(0.0, 0.0); 4]; n_atoms];
        let mut k_ck: Vec<Vec<Complex64>> = (0..4).map(|_| vec![Complex64::new(0.0, 0.0); n_modes]).collect();
        let mut tmp_ce = vec![Complex64::new(0.0, 0.0); n_atoms];
        let mut tmp_ck = vec![Complex64::new(0.0, 0.0); n_modes];

        let mut times = Vec::with_capacity(n_steps / rec + 2);
        let mut pops: Vec<Vec<f64>> = vec![Vec::with_capacity(n_steps / rec + 2); n_atoms];
        let record = |t: f64, ce: &[Complex64], times: &mut Vec<f64>, pops: &mut Vec<Vec<f64>>| {
            times.push(t);
            for (i, c) in ce.iter().enumerate() {
                pops[i].push(c.norm_sqr());
            }
        };
        record(t0, &ce, &mut times, &mut pops);

        for step in 0..n_steps {
            let t = t0 + step as f64 * dt;
            if step % 512 == 0 {
                for j in 0..n_modes {
                    phase[j] = Complex64::from_polar(1.0, self.deltas[j] * (t - t0));
                }
            }
            for j in 0..n_modes {
                p1[j] = phase[j] * rot_half[j];
                p2[j] = p1[j] * rot_half[j];
            }

            // Derivative at (t_stage, ce_in, ck_in, phase p = e^{iΔt}):
            // ċ_e^i = −i A_i Σ_j g_{ij} p_j* ck_j
            // ċ_k^j = −i p_j Σ_i A_i g_{ij}* ce_i
            let stage = |s: usize,
                             t_stage: f64,
                             ce_in: &[Complex64],
                             ck_in: &[Complex64],
                             p: &[Complex64],
                             k_ce: &mut Vec<[Complex64; 4]>,
                             k_ck: &mut Vec<Vec<Complex64>>| {
                let a: Vec<f64> = amps.iter().map(|f| f(t_stage)).collect();
                for j in 0..n_modes {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n_atoms {
                        acc += a[i] * self.couplings[i][j].conj() * ce_in[i];
                    }
                    k_ck[s][j] = -Complex64::i() * p[j] * acc;
                }
                for i in 0..n_atoms {
                    let mut acc = Complex64::new(0.0, 0.0);
                    let g = &self.couplings[i];
                    for j in 0..n_modes {
                        acc += g[j] * p[j].conj() * ck_in[j];
                    }
                    k_ce[i][s] = -Complex64::i() * a[i] * acc;
                }
            };

            stage(0, t, &ce, &ck, &phase, &mut k_ce, &mut k_ck);
            for i in 0..n_atoms {
                tmp_ce[i] = ce[i] + 0.5 * dt * k_ce[i][0];
            }
            for j in 0..n_modes {
                tmp_ck[j] = ck[j] + 0.5 * dt * k_ck[0][j];
            }
            stage(1, t + 0.5 * dt, &tmp_ce, &tmp_ck, &p1, &mut k_ce, &mut k_ck);
            for i in 0..n_atoms {
                tmp_ce[i] = ce[i] + 0.5 * dt * k_ce[i][1];
            }
            for j in 0..n_modes {
                tmp_ck[j] = ck[j] + 0.5 * dt * k_ck[1][j];
            }
            stage(2, t + 0.5 * dt, &tmp_ce, &tmp_ck, &p1, &mut k_ce, &mut k_ck);
            for i in 0..n_atoms {
                tmp_ce[i] = ce[i] + dt * k_ce[i][2];
            }
            for j in 0..n_modes {
                tmp_ck[j] = ck[j] + dt * k_ck[2][j];
            }
            stage(3, t + dt, &tmp_ce, &tmp_ck, &p2, &mut k_ce, &mut k_ck);

            for i in 0..n_atoms {
                ce[i] += dt / 6.0 * (k_ce[i][0] + 2.0 * k_ce[i][1] + 2.0 * k_ce[i][2] + k_ce[i][3]);
            }
            for j in 0..n_modes {
                ck[j] += dt / 6.0 * (k_ck[0][j] + 2.0 * k_ck[1][j] + 2.0 * k_ck[2][j] + k_ck[3][j]);
                phase[j] = p2[j];
            }

            if (step + 1) % rec == 0 {
                record(t + dt, &ce, &mut times, &mut pops);
            }
        }

        let t_final = t0 + n_steps as f64 * dt;
        let norm_drift = (norm_sqr(&ce, &ck) - norm0).abs();
        if norm_drift > 1e-4 {
            return Err(Error::Numerics(format!(
                "state norm drifted by {norm_drift:.2e}; reduce the step"
            )));
        }
        Ok(SimResult { times, pops, ce, ck, t_final, norm_drift })
    }

    /// Real-space photon amplitude at positions `xs` from interaction-picture
    /// mode amplitudes `ck` at time `t` (relative to the start of evolution):
    /// `ψ(x) = Σ_j ck_j e^{−iΔ_j t} √ω_j · u_j(x) e^{i k_j x}`. Modes with
    /// negligible amplitude are skipped.
    pub fn field_profile(&self, ck: &[Complex64], t: f64, xs: &[f64]) -> Vec<Complex64> {
        let max_amp = ck.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        let active: Vec<usize> =
            (0..ck.len()).filter(|&j| ck[j].norm() > 1e-8 * max_amp).collect();
        let weights: Vec<Complex64> = active
            .iter()
            .map(|&j| ck[j] * Complex64::from_polar(self.bs.omega1[j].sqrt(), -self.deltas[j] * t))
            .collect();
        xs.par_iter()
            .map(|&x| {
                let mut psi = Complex64::new(0.0, 0.0);
                for (idx, &j) in active.iter().enumerate() {
                    psi += weights[idx]
                        * self.bs.u_at(j, x)
                        * Complex64::from_polar(1.0, self.bs.ks[j] * x);
                }
                psi
            })
            .collect()
    }

    /// Left/right emitted energy split: integrates `|ψ(x)|²` over the lattice
    /// (trimming a 5% guard at each periodic edge, step λ_m/8) on either side
    /// of `x_center`. Returns `(P_left, P_right)`.
    pub fn directional_flux(&self, ck: &[Complex64], t: f64, x_center: f64) -> (f64, f64) {
        let length = TWO_PI / self.bs.dk;
        let dx = self.bs.params.lambda_m / 8.0;
        let lo = -0.45 * length;
        let hi = 0.45 * length;
        let n = ((hi - lo) / dx) as usize;
        let xs: Vec<f64> = (0..=n).map(|i| lo + i as f64 * dx).collect();
        let psi = self.field_profile(ck, t, &xs);
        let mut left = 0.0;
        let mut right = 0.0;
        for (x, p) in xs.iter().zip(psi.iter()) {
            let w = p.norm_sqr() * dx;
            if *x < x_center {
                left += w;
            } else {
                right += w;
            }
        }
        (left, right)
    }

    /// Directionality from real-space flux: `β_± = P_±/(P_+ + P_−)` around
    /// the midpoint of atom `atom`. Returns `(β_−, β_+)`.
    pub fn beta_flux(&self, ck: &[Complex64], t: f64, atom: usize) -> (f64, f64) {
        let (l, r) = self.directional_flux(ck, t, self.centers[atom]);
        let tot = l + r;
        (l / tot, r / tot)
    }
}

fn norm_sqr(ce: &[Complex64], ck: &[Complex64]) -> f64 {
    ce.iter().map(|c| c.norm_sqr()).sum::<f64>() + ck.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// Directionality from the momentum decomposition:
/// `β_+ = Σ_{k>0} |c_k|² / Σ_k |c_k|²`. Returns `(β_−, β_+)`.
pub fn beta_momentum(bs: &BandStructure, ck: &[Complex64]) -> (f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (j, c) in ck.iter().enumerate() {
        if bs.ks[j] > 0.0 {
            plus += c.norm_sqr();
        } else {
            minus += c.norm_sqr();
        }
    }
    let tot = plus + minus;
    (minus / tot, plus / tot)
}

/// Fit `Γ` from an exponential decay `P(t) = e^{−Γt}`: a linear fit of
/// `ln P` over the contiguous window from the first sample with `P ≤ 0.9`
/// to the first with `P ≤ 0.1`. Fails with [`Error::NonExponential`] if the
/// window has fewer than 5 samples or the log-residuals exceed 0.25.
pub fn fit_decay_rate(times: &[f64], pops: &[f64]) -> Result<f64, Error> {
    let start = pops.iter().position(|&p| p <= 0.9).ok_or(Error::NonExponential)?;
    let end = pops.iter().position(|&p| p <= 0.1).ok_or(Error::NonExponential)?;
    if end <= start + 4 {
        return Err(Error::NonExponential);
    }
    let ts = &times[start..=end];
    let ys: Vec<f64> = pops[start..=end]
        .iter()
        .map(|&p| if p > 0.0 { Ok(p.ln()) } else { Err(Error::NonExponential) })
        .collect::<Result<_, _>>()?;
    let (slope, intercept) =
        crate::numerics::linear_fit(ts, &ys).map_err(|_| Error::NonExponential)?;
    let max_resid = ts
        .iter()
        .zip(ys.iter())
        .map(|(&t, &y)| (y - slope * t - intercept).abs())
        .fold(0.0f64, f64::max);
    if max_resid > 0.25 {
        return Err(Error::NonExponential);
    }
    Ok(-slope)
}

/// Exact single-excitation propagation by one eigendecomposition of the
/// static Hamiltonian (constant amplitudes only), used as an oracle for the
/// RK4 integrator. Basis ordering: atoms first, then modes. Returns the
/// populations `|c|²` of every basis state at time `t`.
pub fn matrix_exponential_reference(
    sim: &EmissionSim,
    amps: &[f64],
    ce0: &[Complex64],
    t: f64,
) -> Vec<f64> {
    use nalgebra::DMatrix;
    let n_atoms = sim.couplings.len();
    let n_modes = sim.deltas.len();
    let dim = n_atoms + n_modes;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..n_modes {
        h[(n_atoms + j, n_atoms + j)] = Complex64::new(sim.deltas[j], 0.0);
    }
    for i in 0..n_atoms {
        for j in 0..n_modes {
            let g = amps[i] * sim.couplings[i][j];
            h[(i, n_atoms + j)] = g;
            h[(n_atoms + j, i)] = g.conj();
        }
    }
    let eig = h.symmetric_eigen();
    let mut y0 = nalgebra::DVector::<Complex64>::zeros(dim);
    for (i, &c) in ce0.iter().enumerate() {
        y0[i] = c;
    }
    let coeffs = eig.eigenvectors.adjoint() * y0;
    let mut y = nalgebra::DVector::<Complex64>::zeros(dim);
    for m in 0..dim {
        let ph = Complex64::from_polar(1.0, -eig.eigenvalues[m] * t);
        y += eig.eigenvectors.column(m) * (coeffs[m] * ph);
    }
    y.iter().map(|c| c.norm_sqr()).collect()
}
