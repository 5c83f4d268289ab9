//! Closed-form solution of the driven three-level problem with loss.
//!
//! The non-Hermitian Hamiltonian over (|0,up>, |-1,up>, |-1,down>)
//!
//! ```text
//!     [ 0    W1   0  ]
//! H = [ W1   w1   W2 ]      w1 = delta - i kappa/2,  w2 = Delta - i kappa/2
//!     [ 0    W2   w2 ]
//! ```
//!
//! has eigenvalues solving x [x^2 - (w1 + w2) x + w1 w2 - W^2] + W1^2 w2 = 0
//! with W^2 = W1^2 + W2^2. For psi(0) = |0,up> the amplitudes are residue sums
//! over these roots; everything here is independent of the numerical
//! integrators in [`crate::dynamics`] and serves as their oracle.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Schur, Vector3};
use num_complex::Complex64 as C64;

use crate::dynamics::Amplitudes3;
use crate::error::{Error, Result};
use crate::model::{nonhermitian_matrix, PhysicalParams};

/// Roots closer than this multiple of Omega are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Perturbative expressions are trusted while max(|w1|, |w2|) / Omega is below this.
pub const PERTURBATIVE_RATIO_MAX: f64 = 0.1;

/// The three eigen-energies, ordered by continuity from the lossless
/// resonant limit: `x[0]` -> 0 (dark), `x[1]` -> +Omega, `x[2]` -> -Omega.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicRoots {
    pub x: [C64; 3],
}

impl CharacteristicRoots {
    pub fn dark(&self) -> C64 {
        self.x[0]
    }

    pub fn min_separation(&self) -> f64 {
        let x = &self.x;
        (x[0] - x[1]).norm().min((x[0] - x[2]).norm()).min((x[1] - x[2]).norm())
    }

    pub fn max_distance(&self, other: &CharacteristicRoots) -> f64 {
        (0..3).map(|j| (self.x[j] - other.x[j]).norm()).fold(0.0, f64::max)
    }
}

/// Monic cubic coefficients (a2, a1, a0) of x^3 + a2 x^2 + a1 x + a0.
fn cubic_coefficients(p: &PhysicalParams) -> (C64, C64, C64) {
    let (w1, w2) = p.complex_detunings();
    let om2 = p.omega1 * p.omega1 + p.omega2 * p.omega2;
    (-(w1 + w2), w1 * w2 - om2, w2 * (p.omega1 * p.omega1))
}

/// Value of the characteristic polynomial at `x`.
pub fn characteristic_residual(p: &PhysicalParams, x: C64) -> C64 {
    let (a2, a1, a0) = cubic_coefficients(p);
    ((x + a2) * x + a1) * x + a0
}

fn require_drive(p: &PhysicalParams) -> Result<f64> {
    let om = p.omega();
    if !(om > 0.0) {
        return Err(Error::InvalidInput("Omega1^2 + Omega2^2 must be positive".into()));
    }
    Ok(om)
}

/// Orders roots to match the targets {0, +Omega, -Omega} with the smallest
/// total distance; ties are broken by the imaginary parts.
fn order_roots(mut roots: [C64; 3], omega: f64) -> [C64; 3] {
    roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    let targets = [C64::new(0.0, 0.0), C64::new(omega, 0.0), C64::new(-omega, 0.0)];
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best = PERMS[0];
    let mut best_cost = f64::INFINITY;
    for perm in PERMS {
        let cost: f64 = (0..3).map(|j| (roots[perm[j]] - targets[j]).norm()).sum();
        if cost < best_cost - 1e-12 * omega {
            best_cost = cost;
            best = perm;
        }
    }
    [roots[best[0]], roots[best[1]], roots[best[2]]]
}

/// Exact roots via eigenvalues of the companion matrix, polished by Newton steps.
pub fn characteristic_roots(p: &PhysicalParams) -> Result<CharacteristicRoots> {
    let omega = require_drive(p)?;
    let (a2, a1, a0) = cubic_coefficients(p);
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let companion = Matrix3::new(z, z, -a0, one, z, -a1, z, one, -a2);
    let eig = Schur::new(companion)
        .eigenvalues()
        .ok_or_else(|| Error::Degenerate("companion eigen-solve did not converge".into()))?;
    let mut roots = [eig[0], eig[1], eig[2]];
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = characteristic_residual(p, *r);
            let df = (C64::new(3.0, 0.0) * *r + a2 * 2.0) * *r + a1;
            if df.norm() == 0.0 {
                break;
            }
            let next = *r - f / df;
            if characteristic_residual(p, next).norm() < f.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    Ok(CharacteristicRoots { x: order_roots(roots, omega) })
}

/// max(|w1|, |w2|) / Omega; the perturbative roots assume this is small.
pub fn perturbation_ratio(p: &PhysicalParams) -> f64 {
    let (w1, w2) = p.complex_detunings();
    w1.norm().max(w2.norm()) / p.omega()
}

/// First-order roots: x1 = (W1^2/W^2) w2, x2,3 = +-W + (w1 + (W2^2/W^2) w2)/2.
pub fn perturbative_roots(p: &PhysicalParams) -> Result<CharacteristicRoots> {
    let omega = require_drive(p)?;
    let (w1, w2) = p.complex_detunings();
    let om2 = omega * omega;
    let x1 = w2 * (p.omega1 * p.omega1 / om2);
    let shift = (w1 + w2 * (p.omega2 * p.omega2 / om2)) * 0.5;
    Ok(CharacteristicRoots { x: [x1, shift + omega, shift - omega] })
}

/// Residue-sum amplitudes for psi(0) = |0,up>, precomputed for fast
/// evaluation on many times.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub roots: CharacteristicRoots,
    coeff_u: [C64; 3],
    coeff_v: [C64; 3],
    coeff_w: [C64; 3],
}

impl ClosedForm {
    pub fn new(p: &PhysicalParams) -> Result<Self> {
        let omega = require_drive(p)?;
        let roots = characteristic_roots(p)?;
        ensure_distinct(&roots, omega)?;
        let (w1, w2) = p.complex_detunings();
        let x = roots.x;
        let mut coeff_u = [C64::new(0.0, 0.0); 3];
        let mut coeff_v = coeff_u;
        let mut coeff_w = coeff_u;
        for j in 0..3 {
            let denom: C64 = (0..3).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            coeff_u[j] = ((x[j] - w1) * (x[j] - w2) - p.omega2 * p.omega2) / denom;
            coeff_v[j] = (x[j] - w2) * p.omega1 / denom;
            coeff_w[j] = C64::new(p.omega1 * p.omega2, 0.0) / denom;
        }
        Ok(ClosedForm { roots, coeff_u, coeff_v, coeff_w })
    }

    pub fn at(&self, t: f64) -> Amplitudes3 {
        let mut out = [C64::new(0.0, 0.0); 3];
        for j in 0..3 {
            let phase = (C64::new(0.0, -t) * self.roots.x[j]).exp();
            out[0] += self.coeff_u[j] * phase;
            out[1] += self.coeff_v[j] * phase;
            out[2] += self.coeff_w[j] * phase;
        }
        Amplitudes3::new(out[0], out[1], out[2])
    }
}

fn ensure_distinct(roots: &CharacteristicRoots, omega: f64) -> Result<()> {
    let sep = roots.min_separation();
    if sep <= DEGENERACY_TOL * omega {
        return Err(Error::Degenerate(format!("eigen-energies coincide (separation {sep:.3e})")));
    }
    Ok(())
}

pub fn closed_form_amplitudes(p: &PhysicalParams, t: f64) -> Result<Amplitudes3> {
    Ok(ClosedForm::new(p)?.at(t))
}

/// Right eigenvectors of the non-Hermitian Hamiltonian.
#[derive(Clone, Debug)]
pub struct EigenTriple {
    pub values: CharacteristicRoots,
    /// Normalized exact eigenvectors over (|0,up>, |-1,up>, |-1,down>).
    pub vectors: [Vector3<C64>; 3],
    /// Normalization constants N_j of the unnormalized eigenvectors.
    pub norms: [f64; 3],
    /// Zeroth-order vectors: the dark state (-W2, 0, W1)/W and the bright
    /// states (W1, +-W, W2)/(sqrt(2) W).
    pub zeroth_order: [Vector3<C64>; 3],
}

impl EigenTriple {
    pub fn dark(&self) -> &Vector3<C64> {
        &self.vectors[0]
    }
}

pub fn eigenstates(p: &PhysicalParams) -> Result<EigenTriple> {
    let omega = require_drive(p)?;
    let roots = characteristic_roots(p)?;
    ensure_distinct(&roots, omega)?;
    let (w1, w2) = p.complex_detunings();
    let mut vectors = [Vector3::zeros(); 3];
    let mut norms = [0.0; 3];
    for j in 0..3 {
        let x = roots.x[j];
        let v = Vector3::new(
            (x - w1) * (x - w2) - p.omega2 * p.omega2,
            (x - w2) * p.omega1,
            C64::new(p.omega1 * p.omega2, 0.0),
        );
        let n = v.norm();
        norms[j] = n;
        vectors[j] = v / C64::new(n, 0.0);
    }
    let c = |a: f64| C64::new(a, 0.0);
    let s = std::f64::consts::SQRT_2 * omega;
    let zeroth_order = [
        Vector3::new(c(-p.omega2 / omega), c(0.0), c(p.omega1 / omega)),
        Vector3::new(c(p.omega1 / s), c(omega / s), c(p.omega2 / s)),
        Vector3::new(c(p.omega1 / s), c(-omega / s), c(p.omega2 / s)),
    ];
    Ok(EigenTriple { values: roots, vectors, norms, zeroth_order })
}

/// Residual max_j |H E_j - x_j E_j|.
pub fn eigen_residual(p: &PhysicalParams, e: &EigenTriple) -> f64 {
    let h = nonhermitian_matrix(p);
    (0..3).map(|j| (h * e.vectors[j] - e.vectors[j] * e.values.x[j]).norm()).fold(0.0, f64::max)
}

/// Detuning delta = (2 W1^2 - W2^2) Delta / W^2 that aligns the dark- and
/// bright-state phases at W t = pi.
pub fn optimal_detuning(omega1: f64, omega2: f64, delta_two_photon: f64) -> Result<f64> {
    let om2 = omega1 * omega1 + omega2 * omega2;
    if !(om2 > 0.0) {
        return Err(Error::InvalidInput("Omega1^2 + Omega2^2 must be positive".into()));
    }
    Ok((2.0 * omega1 * omega1 - omega2 * omega2) / om2 * delta_two_photon)
}

/// Balanced-drive deficit estimate 3 pi kappa / (8 Omega).
///
/// This is the first-order expression in its conventional form. The exact
/// three-level deficit 1 - |w(pi/Omega)|^2 (see [`transfer_deficit`]) is
/// larger by a factor close to 5/3 in the same regime.
pub fn polarization_deficit(p: &PhysicalParams) -> Result<f64> {
    let omega = require_drive(p)?;
    if (p.omega1 - p.omega2).abs() > 1e-9 * omega {
        return Err(Error::UnsupportedRegime(format!(
            "deficit formula needs Omega1 = Omega2 (got {} and {})",
            p.omega1, p.omega2
        )));
    }
    Ok(3.0 * PI * p.kappa / (8.0 * omega))
}

/// Exact three-level deficit 1 - |w(t)|^2 at the transfer time t = pi / Omega.
pub fn transfer_deficit(p: &PhysicalParams) -> Result<f64> {
    let omega = require_drive(p)?;
    let a = closed_form_amplitudes(p, PI / omega)?;
    Ok(1.0 - a.w.norm_sqr())
}
