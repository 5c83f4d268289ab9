//! Model constants and every Hamiltonian / dissipator of the NV electron plus
//! 13C nuclear spin system.
//!
//! Unit convention: every frequency-like quantity is an angular frequency in
//! rad/us whose numerical value equals the usual "MHz" quote (D = 2870,
//! A = 130, Omega = 13). Times are in us, fields in gauss. With this
//! convention the first transfer peak of the balanced drive sits at
//! pi / sqrt(Omega1^2 + Omega2^2) = 0.1709 us.

use nalgebra::{Matrix3, Matrix6, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::spin::{self, idx, tensor, Operator, DIM};

/// Electron gyromagnetic ratio, rad s^-1 T^-1.
pub const GAMMA_E_SI: f64 = -1.76e11;
/// 13C gyromagnetic ratio, rad s^-1 T^-1.
pub const GAMMA_C_SI: f64 = 6.73e7;

/// Converts a gyromagnetic ratio in rad s^-1 T^-1 to the crate convention
/// (MHz-valued per gauss): divide by 2 pi for Hz/T, then 1e-6 MHz/Hz and
/// 1e-4 T/G.
pub fn gyromagnetic_from_si(gamma_si: f64) -> f64 {
    gamma_si / (2.0 * std::f64::consts::PI) * 1e-10
}

/// Secular ratio below which the transverse hyperfine term cannot be dropped.
pub const SECULAR_RATIO_MIN: f64 = 20.0;
/// Rabi frequencies may not exceed this fraction of the detuning of the
/// unwanted transition.
pub const SELECTIVE_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Zero-field splitting D, rad/us.
    pub zfs: f64,
    /// Electron gyromagnetic ratio, rad us^-1 G^-1 (negative).
    pub gamma_e: f64,
    /// 13C gyromagnetic ratio, rad us^-1 G^-1.
    pub gamma_c: f64,
    /// Static field along the NV axis, G.
    pub bz: f64,
    /// Longitudinal hyperfine coupling, rad/us.
    pub a_par: f64,
    /// Transverse hyperfine coupling, rad/us.
    pub a_perp: f64,
    /// Microwave Rabi frequency on |0,up> <-> |-1,up>, rad/us.
    pub omega1: f64,
    /// RF Rabi frequency on |-1,up> <-> |-1,down>, rad/us.
    pub omega2: f64,
    /// Detuning of |-1,up> (delta), rad/us.
    pub delta: f64,
    /// Two-photon detuning of |-1,down> (Delta), rad/us.
    pub delta_two_photon: f64,
    /// Pure-dephasing rate of the m_s = -1 manifold, 1/us.
    pub kappa: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        default_params()
    }
}

pub fn default_params() -> PhysicalParams {
    PhysicalParams {
        zfs: 2870.0,
        gamma_e: gyromagnetic_from_si(GAMMA_E_SI),
        gamma_c: gyromagnetic_from_si(GAMMA_C_SI),
        bz: 50.0,
        a_par: 130.0,
        a_perp: 130.0,
        omega1: 13.0,
        omega2: 13.0,
        delta: 0.0,
        delta_two_photon: 0.0,
        kappa: 1.0 / 58.0,
    }
}

/// Validity diagnostics for the secular and selective-excitation regimes.
/// These are warnings, never hard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub secular_ratio: f64,
    pub secular_ok: bool,
    pub mw_selective_ok: bool,
    pub rf_selective_ok: bool,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.secular_ok && self.mw_selective_ok && self.rf_selective_ok
    }

    /// Semicolon-separated names of the violated conditions, empty if none.
    pub fn flags(&self) -> String {
        let mut out = Vec::new();
        if !self.secular_ok {
            out.push("secular");
        }
        if !self.mw_selective_ok {
            out.push("mw_selective");
        }
        if !self.rf_selective_ok {
            out.push("rf_selective");
        }
        out.join(";")
    }
}

impl PhysicalParams {
    /// Collective Rabi frequency sqrt(Omega1^2 + Omega2^2).
    pub fn omega(&self) -> f64 {
        self.omega1.hypot(self.omega2)
    }

    /// Complex level offsets (omega_1, omega_2) = (delta - i kappa/2, Delta - i kappa/2).
    pub fn complex_detunings(&self) -> (C64, C64) {
        (
            C64::new(self.delta, -0.5 * self.kappa),
            C64::new(self.delta_two_photon, -0.5 * self.kappa),
        )
    }

    pub fn validate(&self) -> crate::Result<()> {
        let finite = [
            self.zfs,
            self.gamma_e,
            self.gamma_c,
            self.bz,
            self.a_par,
            self.a_perp,
            self.omega1,
            self.omega2,
            self.delta,
            self.delta_two_photon,
            self.kappa,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(crate::Error::InvalidInput("all parameters must be finite".into()));
        }
        if self.omega1 < 0.0 || self.omega2 < 0.0 {
            return Err(crate::Error::InvalidInput("Rabi frequencies must be non-negative".into()));
        }
        if self.kappa < 0.0 {
            return Err(crate::Error::InvalidInput("kappa must be non-negative".into()));
        }
        Ok(())
    }

    pub fn validity(&self) -> ValidityReport {
        let gap = (self.zfs - self.gamma_e * self.bz + self.gamma_c * self.bz - 0.5 * self.a_par).abs();
        let coupling = self.a_perp.abs() / std::f64::consts::SQRT_2;
        let secular_ratio = if coupling == 0.0 { f64::INFINITY } else { gap / coupling };
        let a = self.a_par.abs();
        ValidityReport {
            secular_ratio,
            secular_ok: secular_ratio > SECULAR_RATIO_MIN,
            mw_selective_ok: self.omega1 <= SELECTIVE_FRACTION * (self.delta + a) * (1.0 + 1e-12),
            rf_selective_ok: self.omega2 <= SELECTIVE_FRACTION * (a - self.delta + self.delta_two_photon) * (1.0 + 1e-12),
        }
    }
}

/// Carrier frequencies of the two drives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveFrequencies {
    pub omega_a: f64,
    pub omega_b: f64,
}

/// Carriers addressing the secular level spacings: omega_A = D - gamma_e Bz
/// - delta - A_par/2 and omega_B = A_par - gamma_c Bz + delta - Delta.
pub fn drive_frequencies(p: &PhysicalParams) -> DriveFrequencies {
    DriveFrequencies {
        omega_a: p.zfs - p.gamma_e * p.bz - p.delta - 0.5 * p.a_par,
        omega_b: p.a_par - p.gamma_c * p.bz + p.delta - p.delta_two_photon,
    }
}

/// Carriers addressing the exact eigen-spacings of the full field Hamiltonian
/// (transverse hyperfine included), with the same detuning offsets.
pub fn dressed_drive_frequencies(p: &PhysicalParams) -> DriveFrequencies {
    let e = dressed_energies(p);
    DriveFrequencies {
        omega_a: e[idx::MINUS_UP] - e[idx::ZERO_UP] - p.delta,
        omega_b: e[idx::MINUS_DOWN] - e[idx::MINUS_UP] + p.delta - p.delta_two_photon,
    }
}

/// Eigenvalues of the field Hamiltonian, each attached to the product state
/// it is adiabatically connected to.
pub fn dressed_energies(p: &PhysicalParams) -> [f64; DIM] {
    let h = lab_hamiltonian(p).to_matrix6().expect("six-dimensional");
    let eig = SymmetricEigen::new(h);
    let mut taken = [false; DIM];
    let mut out = [0.0; DIM];
    // Greedy assignment by overlap; the transverse coupling is perturbative
    // so every column has one dominant component.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(DIM * DIM);
    for col in 0..DIM {
        for row in 0..DIM {
            pairs.push((eig.eigenvectors[(row, col)].norm_sqr(), row, col));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut used_col = [false; DIM];
    for (_, row, col) in pairs {
        if !taken[row] && !used_col[col] {
            taken[row] = true;
            used_col[col] = true;
            out[row] = eig.eigenvalues[col];
        }
    }
    out
}

/// Secular product-state energies E(m_s, m_I).
pub fn secular_energies(p: &PhysicalParams) -> [f64; DIM] {
    let mut out = [0.0; DIM];
    for label in spin::BasisLabel::all() {
        let ms = label.ms.ms() as f64;
        let mi = label.mi.mi();
        out[label.index()] = p.zfs * ms * ms + p.gamma_e * p.bz * ms + p.gamma_c * p.bz * mi + p.a_par * ms * mi;
    }
    out
}

/// Full hyperfine Hamiltonian H_F including the transverse flip-flop term.
pub fn lab_hamiltonian(p: &PhysicalParams) -> Operator {
    let s = spin::electron();
    let i = spin::nucleus();
    let id3 = Operator::identity(3);
    let id2 = Operator::identity(2);
    let sz2 = s.z.matmul(&s.z);
    tensor(&sz2, &id2)
        .scale(p.zfs)
        .add(&tensor(&s.z, &id2).scale(p.gamma_e * p.bz))
        .add(&tensor(&id3, &i.z).scale(p.gamma_c * p.bz))
        .add(&tensor(&s.z, &i.z).scale(p.a_par))
        .add(&tensor(&s.x, &i.x).add(&tensor(&s.y, &i.y)).scale(p.a_perp))
}

/// Secular Hamiltonian: H_F without the transverse term, diagonal.
pub fn secular_hamiltonian(p: &PhysicalParams) -> Operator {
    Operator::from_real_diagonal(&secular_energies(p))
}

/// Effective non-Hermitian Hamiltonian over (|0,up>, |-1,up>, |-1,down>).
pub fn nonhermitian_matrix(p: &PhysicalParams) -> Matrix3<C64> {
    let (w1, w2) = p.complex_detunings();
    let z = C64::new(0.0, 0.0);
    let o1 = C64::new(p.omega1, 0.0);
    let o2 = C64::new(p.omega2, 0.0);
    Matrix3::new(z, o1, z, o1, w1, o2, z, o2, w2)
}

pub fn nonhermitian_hamiltonian(p: &PhysicalParams) -> Operator {
    let m = nonhermitian_matrix(p);
    let entries = nalgebra::DMatrix::from_fn(3, 3, |i, j| m[(i, j)]);
    Operator::new(entries).expect("square")
}

/// Which physical terms beyond the three-level picture are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSwitches {
    /// Transverse hyperfine flip-flop terms A_perp (Sx Ix + Sy Iy).
    pub transverse_hyperfine: bool,
    /// Keep couplings into the m_s = +1 manifold.
    pub plus_manifold: bool,
    /// Off-resonant drive components: the microwave on |0,down> <-> |-1,down>
    /// and the counter-rotating part of the RF on |-1,up> <-> |-1,down>.
    pub off_resonant: bool,
    /// Tune carriers to the exact eigen-spacings instead of the secular formulas.
    pub dressed_resonance: bool,
}

impl ModelSwitches {
    /// Every physical term on, carriers on the secular level spacings.
    pub const fn full() -> Self {
        ModelSwitches {
            transverse_hyperfine: true,
            plus_manifold: true,
            off_resonant: true,
            dressed_resonance: false,
        }
    }

    /// The driven three-level picture: resonant drives only.
    pub const fn three_level() -> Self {
        ModelSwitches {
            transverse_hyperfine: false,
            plus_manifold: false,
            off_resonant: false,
            dressed_resonance: false,
        }
    }
}

impl Default for ModelSwitches {
    fn default() -> Self {
        ModelSwitches::full()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// Laboratory frame: H_F + H_I(t).
    Lab,
    /// Frame rotating with the drive carriers; the resonant drives are static.
    Rotating,
}

/// `amplitude * exp(i frequency t) |row><col| + h.c.`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatingTerm {
    pub row: usize,
    pub col: usize,
    pub amplitude: C64,
    pub frequency: f64,
}

/// Hermitian Hamiltonian H(t) = H_static + sum of oscillating terms.
#[derive(Clone, Debug, PartialEq)]
pub struct DrivenHamiltonian {
    pub static_part: Matrix6<C64>,
    pub terms: Vec<OscillatingTerm>,
}

/// Oscillating terms slower than this (rad/us) are folded into the static part.
const STATIC_FREQUENCY_TOL: f64 = 1e-9;

impl DrivenHamiltonian {
    pub fn at(&self, t: f64) -> Matrix6<C64> {
        let mut h = self.static_part;
        for term in &self.terms {
            let c = term.amplitude * C64::from_polar(1.0, term.frequency * t);
            h[(term.row, term.col)] += c;
            h[(term.col, term.row)] += c.conj();
        }
        h
    }

    /// Upper bound on the fastest rate in H(t): largest absolute row sum of
    /// the coupling magnitudes plus the fastest oscillation frequency.
    pub fn frequency_scale(&self) -> f64 {
        let mut rows = [0.0f64; DIM];
        for r in 0..DIM {
            rows[r] = (0..DIM).map(|c| self.static_part[(r, c)].norm()).sum();
        }
        let mut fastest = 0.0f64;
        for t in &self.terms {
            rows[t.row] += t.amplitude.norm();
            rows[t.col] += t.amplitude.norm();
            fastest = fastest.max(t.frequency.abs());
        }
        rows.iter().copied().fold(0.0, f64::max) + fastest
    }

    fn push(&mut self, term: OscillatingTerm) {
        if term.amplitude == C64::new(0.0, 0.0) {
            return;
        }
        if term.frequency.abs() < STATIC_FREQUENCY_TOL {
            self.static_part[(term.row, term.col)] += term.amplitude;
            self.static_part[(term.col, term.row)] += term.amplitude.conj();
        } else {
            self.terms.push(term);
        }
    }
}

/// Energies defining the rotating frame U(t) = exp(-i F t): the secular (or
/// dressed) level energies, with |-1,up> lowered by delta and |-1,down> by
/// Delta so that both resonant drives become static.
pub fn frame_energies(p: &PhysicalParams, switches: &ModelSwitches) -> [f64; DIM] {
    let mut f = if switches.dressed_resonance { dressed_energies(p) } else { secular_energies(p) };
    f[idx::MINUS_UP] -= p.delta;
    f[idx::MINUS_DOWN] -= p.delta_two_photon;
    f
}

fn carriers(p: &PhysicalParams, switches: &ModelSwitches) -> DriveFrequencies {
    if switches.dressed_resonance {
        dressed_drive_frequencies(p)
    } else {
        drive_frequencies(p)
    }
}

fn in_plus_manifold(i: usize) -> bool {
    i == idx::PLUS_UP || i == idx::PLUS_DOWN
}

/// Lab-frame drive terms H_I(t) for the selected switches.
pub fn drive_terms(p: &PhysicalParams, switches: &ModelSwitches) -> Vec<OscillatingTerm> {
    let w = carriers(p, switches);
    let o1 = C64::new(p.omega1, 0.0);
    let o2 = C64::new(p.omega2, 0.0);
    let mut terms = vec![
        OscillatingTerm { row: idx::ZERO_UP, col: idx::MINUS_UP, amplitude: o1, frequency: w.omega_a },
        OscillatingTerm { row: idx::MINUS_UP, col: idx::MINUS_DOWN, amplitude: o2, frequency: w.omega_b },
    ];
    if switches.off_resonant {
        terms.push(OscillatingTerm { row: idx::ZERO_DOWN, col: idx::MINUS_DOWN, amplitude: o1, frequency: w.omega_a });
        terms.push(OscillatingTerm { row: idx::MINUS_UP, col: idx::MINUS_DOWN, amplitude: o2, frequency: -w.omega_b });
    }
    terms
}

/// Field Hamiltonian restricted by the switches (transverse term and the
/// m_s = +1 couplings can be removed).
pub fn field_hamiltonian(p: &PhysicalParams, switches: &ModelSwitches) -> Matrix6<C64> {
    let mut h = if switches.transverse_hyperfine { lab_hamiltonian(p) } else { secular_hamiltonian(p) }
        .to_matrix6()
        .expect("six-dimensional");
    if !switches.plus_manifold {
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j && (in_plus_manifold(i) || in_plus_manifold(j)) {
                    h[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
    }
    h
}

/// Time-dependent Hamiltonian H_F + H_I(t) in the requested frame.
pub fn driven_hamiltonian(p: &PhysicalParams, switches: &ModelSwitches, frame: Frame) -> DrivenHamiltonian {
    let field = field_hamiltonian(p, switches);
    let drives = drive_terms(p, switches);
    match frame {
        Frame::Lab => {
            let mut h = DrivenHamiltonian { static_part: field, terms: Vec::new() };
            for t in drives {
                h.push(t);
            }
            h
        }
        Frame::Rotating => {
            let f = frame_energies(p, switches);
            let mut static_part = Matrix6::<C64>::zeros();
            for i in 0..DIM {
                static_part[(i, i)] = C64::new(field[(i, i)].re - f[i], 0.0);
            }
            let mut h = DrivenHamiltonian { static_part, terms: Vec::new() };
            for r in 0..DIM {
                for c in (r + 1)..DIM {
                    let a = field[(r, c)];
                    if a.norm() > 0.0 {
                        h.push(OscillatingTerm { row: r, col: c, amplitude: a, frequency: f[r] - f[c] });
                    }
                }
            }
            for t in drives {
                h.push(OscillatingTerm { frequency: t.frequency + f[t.row] - f[t.col], ..t });
            }
            h
        }
    }
}

/// Rotating-frame Hamiltonian at time `t` with the given switches.
pub fn rotating_hamiltonian(p: &PhysicalParams, switches: &ModelSwitches, t: f64) -> Operator {
    Operator::from_matrix6(&driven_hamiltonian(p, switches, Frame::Rotating).at(t))
}

/// Maps a rotating-frame density matrix to the lab frame at time `t`:
/// rho_lab = U rho U^dagger with U = exp(-i F t).
pub fn rotating_to_lab(rho: &Matrix6<C64>, frame: &[f64; DIM], t: f64) -> Matrix6<C64> {
    Matrix6::from_fn(|j, k| rho[(j, k)] * C64::from_polar(1.0, -(frame[j] - frame[k]) * t))
}

/// Pure dephasing of the m_s = -1 manifold,
/// L rho = kappa (P rho P - {P, rho}/2) with P = |-1><-1| (x) 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DephasingDissipator {
    pub kappa: f64,
}

pub fn dephasing_dissipator(p: &PhysicalParams) -> DephasingDissipator {
    DephasingDissipator { kappa: p.kappa }
}

fn in_minus_manifold(i: usize) -> bool {
    i == idx::MINUS_UP || i == idx::MINUS_DOWN
}

impl DephasingDissipator {
    /// P is diagonal, so the action reduces to damping every coherence that
    /// connects the m_s = -1 manifold to the rest at rate kappa / 2.
    pub fn apply(&self, rho: &Matrix6<C64>) -> Matrix6<C64> {
        let half = 0.5 * self.kappa;
        Matrix6::from_fn(|j, k| {
            if in_minus_manifold(j) != in_minus_manifold(k) {
                -rho[(j, k)] * half
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn projector() -> Matrix6<C64> {
        Matrix6::from_fn(|j, k| if j == k && in_minus_manifold(j) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }
}
