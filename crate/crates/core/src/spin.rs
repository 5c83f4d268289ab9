//! Spin operator matrices and basis bookkeeping for the electron (S = 1)
//! times nucleus (I = 1/2) product space.
//!
//! Product-space index order is fixed everywhere in the crate:
//!
//! | index | label   |
//! |-------|---------|
//! | 0     | +1, up  |
//! | 1     | +1, down|
//! | 2     |  0, up  |
//! | 3     |  0, down|
//! | 4     | -1, up  |
//! | 5     | -1, down|
//!
//! The driven three-level subspace {|0,up>, |-1,up>, |-1,down>} therefore
//! lives at indices {2, 4, 5}. All operators use hbar = 1.

use std::fmt;

use nalgebra::{DMatrix, Matrix6};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DIM: usize = 6;

const HERMITIAN_TOL: f64 = 1e-12;

/// Electron spin projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElectronState {
    Plus,
    Zero,
    Minus,
}

impl ElectronState {
    pub const ALL: [ElectronState; 3] = [ElectronState::Plus, ElectronState::Zero, ElectronState::Minus];

    pub fn ms(self) -> i32 {
        match self {
            ElectronState::Plus => 1,
            ElectronState::Zero => 0,
            ElectronState::Minus => -1,
        }
    }
}

/// Nuclear spin projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NuclearState {
    Up,
    Down,
}

impl NuclearState {
    pub const ALL: [NuclearState; 2] = [NuclearState::Up, NuclearState::Down];

    pub fn mi(self) -> f64 {
        match self {
            NuclearState::Up => 0.5,
            NuclearState::Down => -0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub ms: ElectronState,
    pub mi: NuclearState,
}

impl BasisLabel {
    pub const fn new(ms: ElectronState, mi: NuclearState) -> Self {
        BasisLabel { ms, mi }
    }

    pub fn all() -> impl Iterator<Item = BasisLabel> {
        (0..DIM).map(|i| BasisLabel::from_index(i).expect("index in range"))
    }

    pub fn index(self) -> usize {
        basis_index(self)
    }

    pub fn from_index(index: usize) -> Option<BasisLabel> {
        if index >= DIM {
            return None;
        }
        let ms = ElectronState::ALL[index / 2];
        let mi = NuclearState::ALL[index % 2];
        Some(BasisLabel { ms, mi })
    }

    /// Short identifier used in column names, e.g. `0up`, `mdown`, `pup`.
    pub fn tag(self) -> &'static str {
        use ElectronState::*;
        use NuclearState::*;
        match (self.ms, self.mi) {
            (Plus, Up) => "pup",
            (Plus, Down) => "pdown",
            (Zero, Up) => "0up",
            (Zero, Down) => "0down",
            (Minus, Up) => "mup",
            (Minus, Down) => "mdown",
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = match self.ms {
            ElectronState::Plus => "+1",
            ElectronState::Zero => "0",
            ElectronState::Minus => "-1",
        };
        let mi = match self.mi {
            NuclearState::Up => "up",
            NuclearState::Down => "down",
        };
        write!(f, "|{ms},{mi}>")
    }
}

pub fn basis_index(label: BasisLabel) -> usize {
    let e = match label.ms {
        ElectronState::Plus => 0,
        ElectronState::Zero => 1,
        ElectronState::Minus => 2,
    };
    let n = match label.mi {
        NuclearState::Up => 0,
        NuclearState::Down => 1,
    };
    2 * e + n
}

/// Indices of the labels used throughout the crate.
pub mod idx {
    pub const PLUS_UP: usize = 0;
    pub const PLUS_DOWN: usize = 1;
    pub const ZERO_UP: usize = 2;
    pub const ZERO_DOWN: usize = 3;
    pub const MINUS_UP: usize = 4;
    pub const MINUS_DOWN: usize = 5;
    /// The driven three-level subspace in (u, v, w) order.
    pub const DRIVEN: [usize; 3] = [ZERO_UP, MINUS_UP, MINUS_DOWN];
}

/// Dense complex square matrix with a Hermiticity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    entries: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    /// Wraps a matrix; the Hermitian flag is set when the matrix passes the
    /// 1e-12 check.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidInput(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let hermitian = hermitian_defect(&entries) < HERMITIAN_TOL;
        Ok(Operator { entries, hermitian })
    }

    pub fn identity(dim: usize) -> Self {
        Operator { entries: DMatrix::identity(dim, dim), hermitian: true }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let entries = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) });
        Operator { entries, hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator { entries: self.entries.adjoint(), hermitian: self.hermitian }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.entries)
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        let entries = &self.entries * &other.entries;
        let hermitian = hermitian_defect(&entries) < HERMITIAN_TOL;
        Operator { entries, hermitian }
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator { entries: &self.entries * C64::new(factor, 0.0), hermitian: self.hermitian }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let entries = &self.entries + &other.entries;
        let hermitian = hermitian_defect(&entries) < HERMITIAN_TOL;
        Operator { entries, hermitian }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        self.add(&other.scale(-1.0))
    }

    /// Fixed-size view for the six-dimensional product space.
    pub fn to_matrix6(&self) -> Option<Matrix6<C64>> {
        if self.dim() != DIM {
            return None;
        }
        Some(Matrix6::from_fn(|i, j| self.entries[(i, j)]))
    }

    pub fn from_matrix6(m: &Matrix6<C64>) -> Operator {
        let entries = DMatrix::from_fn(DIM, DIM, |i, j| m[(i, j)]);
        let hermitian = hermitian_defect(&entries) < HERMITIAN_TOL;
        Operator { entries, hermitian }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        (&self.entries - &other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Cartesian spin operators in the Sz eigenbasis, descending m.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: Operator,
    pub y: Operator,
    pub z: Operator,
}

impl SpinOperators {
    pub fn plus(&self) -> Operator {
        let i_y = Operator {
            entries: self.y.entries() * C64::new(0.0, 1.0),
            hermitian: false,
        };
        self.x.add(&i_y)
    }

    pub fn minus(&self) -> Operator {
        self.plus().adjoint()
    }
}

/// Spin matrices for `s` = 1/2 or 1.
pub fn spin_operators(s: f64) -> Result<SpinOperators> {
    let twice = (2.0 * s).round();
    if (2.0 * s - twice).abs() > 1e-12 || !(twice == 1.0 || twice == 2.0) {
        return Err(Error::InvalidInput(format!("unsupported spin quantum number {s}; expected 1/2 or 1")));
    }
    let n = twice as usize + 1;
    let m = |k: usize| s - k as f64;

    // <m+1|S+|m> = sqrt(s(s+1) - m(m+1))
    let mut plus = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        let mk = m(k);
        plus[(k - 1, k)] = C64::new((s * (s + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
    }
    let minus = plus.adjoint();
    let x = (&plus + &minus) * C64::new(0.5, 0.0);
    let y = (&plus - &minus) * C64::new(0.0, -0.5);
    let z = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(m(i), 0.0) } else { C64::new(0.0, 0.0) });

    Ok(SpinOperators {
        x: Operator { entries: x, hermitian: true },
        y: Operator { entries: y, hermitian: true },
        z: Operator { entries: z, hermitian: true },
    })
}

/// Kronecker product `a (x) b`; with `a` electronic and `b` nuclear this
/// matches the [`BasisLabel`] index order.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let entries = a.entries.kronecker(&b.entries);
    Operator { entries, hermitian: a.hermitian && b.hermitian }
}

/// Operators of the electron spin-1 and the nuclear spin-1/2.
pub fn electron() -> SpinOperators {
    spin_operators(1.0).expect("spin 1 is supported")
}

pub fn nucleus() -> SpinOperators {
    spin_operators(0.5).expect("spin 1/2 is supported")
}

/// `|a><b|` in the six-dimensional product space.
pub fn ket_bra(a: BasisLabel, b: BasisLabel) -> Operator {
    let mut entries = DMatrix::<C64>::zeros(DIM, DIM);
    entries[(a.index(), b.index())] = C64::new(1.0, 0.0);
    let hermitian = a == b;
    Operator { entries, hermitian }
}
