//! First jets of algebroid sections in split form `(X, phi)`, where `phi` is a
//! `T*M (x) g` correction stored as one g-section per coordinate direction.

use crate::algebroid::Algebroid;
use crate::bundles::Section;
use crate::connections::TMConnection;
use crate::error::{Error, Result};
use crate::symcore::{differentiate, Expr};

/// `phi(d_i)` for each coordinate direction `i`.
pub type Correction = Vec<Section>;

#[derive(Clone, Debug, PartialEq)]
pub struct JetSection {
    pub base: Section,
    pub phi: Correction,
}

impl JetSection {
    pub fn new(base: Section, phi: Correction) -> JetSection {
        JetSection { base, phi }
    }

    /// The prolongation of `x`, i.e. zero correction.
    pub fn prolong(x: Section, n: usize) -> JetSection {
        let r = x.rank();
        JetSection { base: x, phi: zero_correction(n, r) }
    }

    /// A pure correction `(0, phi)`.
    pub fn vertical(phi: Correction, r: usize) -> JetSection {
        JetSection { base: Section::zero(r), phi }
    }

    pub fn check(&self, g: &Algebroid) -> Result<()> {
        g.check_section(&self.base)?;
        check_correction(g, &self.phi)
    }

    /// `f . (X, phi) = (fX, f phi - df (x) X)`.
    pub fn scale(&self, f: &Expr) -> JetSection {
        let phi = self
            .phi
            .iter()
            .enumerate()
            .map(|(i, row)| &row.scale(f) - &self.base.scale(&differentiate(f, i)))
            .collect();
        JetSection { base: self.base.scale(f), phi }
    }

    pub fn add(&self, other: &JetSection) -> JetSection {
        JetSection {
            base: &self.base + &other.base,
            phi: self.phi.iter().zip(&other.phi).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &JetSection) -> JetSection {
        JetSection {
            base: &self.base - &other.base,
            phi: self.phi.iter().zip(&other.phi).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn zero_correction(n: usize, r: usize) -> Correction {
    vec![Section::zero(r); n]
}

fn check_correction(g: &Algebroid, phi: &Correction) -> Result<()> {
    if phi.len() != g.dim() || phi.iter().any(|row| row.rank() != g.rank()) {
        return Err(Error::Shape(format!("correction must be {} x {}", g.dim(), g.rank())));
    }
    Ok(())
}

/// `phi(V) = V^i phi(d_i)`.
pub fn apply_correction(phi: &Correction, v: &Section) -> Section {
    let r = phi.first().map(Section::rank).unwrap_or(0);
    let terms: Vec<(Expr, &Section)> =
        phi.iter().enumerate().filter(|(i, _)| !v[*i].is_literal_zero()).map(|(i, row)| (v[i].clone(), row)).collect();
    Section::combination(r, &terms)
}

/// `(kappa_X phi)(V) = [X, phi(V)] + phi([V, #X])`, evaluated on each `d_i`.
pub fn kappa(g: &Algebroid, x: &Section, phi: &Correction) -> Result<Correction> {
    g.check_section(x)?;
    check_correction(g, phi)?;
    let ax = g.anchor_apply(x)?;
    let n = g.dim();
    (0..n)
        .map(|i| {
            let first = g.bracket(x, &phi[i])?;
            // [d_i, #X] = d_i (#X)^k d_k
            let v = Section((0..n).map(|k| differentiate(&ax[k], i)).collect());
            Ok(&first + &apply_correction(phi, &v))
        })
        .collect()
}

/// `[phi1, phi2] = phi2 . # . phi1 - phi1 . # . phi2`.
pub fn fibre_bracket(g: &Algebroid, phi1: &Correction, phi2: &Correction) -> Result<Correction> {
    check_correction(g, phi1)?;
    check_correction(g, phi2)?;
    (0..g.dim())
        .map(|i| {
            let a = apply_correction(phi2, &g.anchor_apply(&phi1[i])?);
            let b = apply_correction(phi1, &g.anchor_apply(&phi2[i])?);
            Ok(&a - &b)
        })
        .collect()
}

/// `[(X1,phi1),(X2,phi2)] = ([X1,X2], [phi1,phi2] + kappa_{X1} phi2 - kappa_{X2} phi1)`.
pub fn jet_bracket(g: &Algebroid, s1: &JetSection, s2: &JetSection) -> Result<JetSection> {
    s1.check(g)?;
    s2.check(g)?;
    let base = g.bracket(&s1.base, &s2.base)?;
    let fb = fibre_bracket(g, &s1.phi, &s2.phi)?;
    let k12 = kappa(g, &s1.base, &s2.phi)?;
    let k21 = kappa(g, &s2.base, &s1.phi)?;
    let phi = (0..g.dim()).map(|i| &(&fb[i] + &k12[i]) - &k21[i]).collect();
    Ok(JetSection { base, phi })
}

/// Anchor of the jet algebroid: `#(X, phi) = #X`.
pub fn jet_anchor(g: &Algebroid, s: &JetSection) -> Result<Section> {
    g.anchor_apply(&s.base)
}

/// `ad_{(X,phi)} Y = [X,Y] - phi(#Y)`.
pub fn adjoint_action(g: &Algebroid, s: &JetSection, y: &Section) -> Result<Section> {
    s.check(g)?;
    let br = g.bracket(&s.base, y)?;
    Ok(&br - &apply_correction(&s.phi, &g.anchor_apply(y)?))
}

/// The image of a jet of `g` under the prolonged anchor, as a jet of the tangent algebroid:
/// `(X, phi) -> (#X, # . phi)`.
pub fn prolonged_anchor(g: &Algebroid, s: &JetSection) -> Result<JetSection> {
    s.check(g)?;
    Ok(JetSection {
        base: g.anchor_apply(&s.base)?,
        phi: s.phi.iter().map(|row| g.anchor_apply(row)).collect::<Result<_>>()?,
    })
}

/// `nabla. X`: the correction `i -> nabla_{d_i} X`.
pub fn covariant_differential(g: &Algebroid, conn: &TMConnection, x: &Section) -> Result<Correction> {
    conn.check_on(g)?;
    g.check_section(x)?;
    Ok((0..g.dim()).map(|i| conn.along_coord(i, x)).collect())
}

/// `s(X) = (X, -nabla. X)`.
pub fn splitting_from_connection(g: &Algebroid, conn: &TMConnection, x: &Section) -> Result<JetSection> {
    let d = covariant_differential(g, conn, x)?;
    Ok(JetSection { base: x.clone(), phi: d.iter().map(|row| -row).collect() })
}

/// `curv s(X,Y) = [sX, sY] - s[X,Y]`, returned as (base, correction). The base is zero by construction.
pub fn splitting_curvature_full(g: &Algebroid, conn: &TMConnection, x: &Section, y: &Section) -> Result<JetSection> {
    let sx = splitting_from_connection(g, conn, x)?;
    let sy = splitting_from_connection(g, conn, y)?;
    let br = jet_bracket(g, &sx, &sy)?;
    let sxy = splitting_from_connection(g, conn, &g.bracket(x, y)?)?;
    Ok(br.sub(&sxy))
}

/// The `T*M (x) g` valued curvature of the splitting determined by a connection.
pub fn splitting_curvature(g: &Algebroid, conn: &TMConnection, x: &Section, y: &Section) -> Result<Correction> {
    Ok(splitting_curvature_full(g, conn, x, y)?.phi)
}
