//! Matrix-class predicates and certificates.
//!
//! Nonsingular M-matrices are certified constructively: a Z-matrix `A` is
//! accepted when the solution of `A x = e` (the all-ones vector) is strictly
//! positive, in which case `x` itself is the stored witness (`x > 0` and
//! `A x = e > 0`). H-matrices are certified through their comparison matrix.

use std::fmt;

use serde::Serialize;

use crate::band::{BandCholesky, BandLu};
use crate::error::Error;
use crate::matrix::{norm_inf, SquareMatrix};

/// Witness entries must exceed this after scaling to unit max-norm.
pub const WITNESS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Undetermined,
}

impl Membership {
    pub fn is_yes(self) -> bool {
        self == Membership::Yes
    }
}

impl From<bool> for Membership {
    fn from(b: bool) -> Self {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Yes => "true",
            Membership::No => "false",
            Membership::Undetermined => "undetermined",
        })
    }
}

/// `|a_ii|` on the diagonal, `-|a_ij|` off it.
pub fn comparison_matrix(a: &SquareMatrix) -> SquareMatrix {
    a.filter_map(|i, j, v| Some(if i == j { v.abs() } else { -v.abs() }))
}

/// Strict row diagonal dominance.
pub fn is_sdd(a: &SquareMatrix) -> bool {
    (0..a.order()).all(|i| {
        let (diag, off) = a.row(i).fold((0.0, 0.0), |(d, o), (j, v)| {
            if i == j {
                (v.abs(), o)
            } else {
                (d, o + v.abs())
            }
        });
        diag > off
    })
}

/// Off-diagonal entries are all nonpositive.
pub fn is_z_matrix(a: &SquareMatrix) -> bool {
    a.iter().all(|(i, j, v)| i == j || v <= 0.0)
}

/// Z-matrix with a strictly positive diagonal.
pub fn is_l_matrix(a: &SquareMatrix) -> bool {
    is_z_matrix(a) && a.diagonal().iter().all(|&d| d > 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct MMatrixCheck {
    pub membership: Membership,
    /// `x > 0` with `A x > 0`, scaled to unit max-norm.
    pub witness: Option<Vec<f64>>,
    pub note: Option<String>,
}

impl MMatrixCheck {
    fn rejected(note: impl Into<String>) -> Self {
        Self {
            membership: Membership::No,
            witness: None,
            note: Some(note.into()),
        }
    }

    pub fn is_m(&self) -> bool {
        self.membership.is_yes()
    }
}

/// Nonsingular M-matrix test with a semipositivity witness.
pub fn is_m_matrix(a: &SquareMatrix) -> MMatrixCheck {
    if !is_z_matrix(a) {
        return MMatrixCheck::rejected("not a Z-matrix");
    }
    let lu = match BandLu::factor(a) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return MMatrixCheck::rejected("singular"),
        Err(e) => return MMatrixCheck::rejected(e.to_string()),
    };
    let ones = vec![1.0; a.order()];
    let mut x = lu.solve(&ones).expect("length matches order");
    let scale = norm_inf(&x);
    if !scale.is_finite() || scale == 0.0 {
        return MMatrixCheck::rejected("singular");
    }
    x.iter_mut().for_each(|v| *v /= scale);
    if let Some(i) = x.iter().position(|&v| v <= WITNESS_FLOOR) {
        return MMatrixCheck::rejected(format!(
            "solution of Ax = e is not positive (component {})",
            i + 1
        ));
    }
    let ax = a.mul_vec(&x).expect("length matches order");
    if ax.iter().all(|&v| v > 0.0) {
        MMatrixCheck {
            membership: Membership::Yes,
            witness: Some(x),
            note: None,
        }
    } else {
        MMatrixCheck {
            membership: Membership::Undetermined,
            witness: None,
            note: Some("positive solution found but Ax > 0 failed in floating point".into()),
        }
    }
}

pub fn is_h_matrix(a: &SquareMatrix) -> bool {
    is_m_matrix(&comparison_matrix(a)).is_m()
}

/// Cholesky factor when `a` is exactly symmetric and positive definite.
pub fn spd_factor(a: &SquareMatrix) -> Option<BandCholesky> {
    if !a.is_symmetric() {
        return None;
    }
    BandCholesky::factor(a).ok()
}

pub fn is_spd(a: &SquareMatrix) -> bool {
    spd_factor(a).is_some()
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub is_sdd: Membership,
    pub is_z: Membership,
    pub is_l: Membership,
    pub is_m: Membership,
    pub is_h: Membership,
    pub is_spd: Membership,
    pub m_witness: Option<Vec<f64>>,
    #[serde(skip)]
    pub spd_witness: Option<BandCholesky>,
    pub notes: Vec<String>,
}

pub fn classify(a: &SquareMatrix) -> ClassificationReport {
    let mut notes = Vec::new();
    let sdd = is_sdd(a);
    let z = is_z_matrix(a);
    let m = is_m_matrix(a);
    if let Some(note) = &m.note {
        notes.push(format!("M: {note}"));
    }
    // For a Z-matrix with nonnegative diagonal the comparison matrix is A itself.
    let h = if z && a.diagonal().iter().all(|&d| d >= 0.0) {
        m.membership
    } else {
        let hm = is_m_matrix(&comparison_matrix(a));
        if let Some(note) = &hm.note {
            notes.push(format!("H: comparison matrix {note}"));
        }
        hm.membership
    };
    if sdd && h != Membership::Yes {
        notes.push("SDD but H-matrix certification failed".into());
    }
    let spd_witness = spd_factor(a);
    if !a.is_symmetric() {
        notes.push("not exactly symmetric".into());
    }
    ClassificationReport {
        is_sdd: sdd.into(),
        is_z: z.into(),
        is_l: is_l_matrix(a).into(),
        is_m: m.membership,
        is_h: h,
        is_spd: spd_witness.is_some().into(),
        m_witness: m.witness,
        spd_witness,
        notes,
    }
}
