//! Sections and tensor fields over a chart, stored against coordinate or algebroid frames.

use std::ops;

use crate::error::{Error, Result};
use crate::symcore::{canon, differentiate, parse_expr, Chart, Expr};
use crate::verdict::{Verdict, ZeroCheck};

/// Components of a section against a declared global frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section(pub Vec<Expr>);

impl Section {
    pub fn new(comps: Vec<Expr>) -> Section {
        Section(comps)
    }

    pub fn zero(rank: usize) -> Section {
        Section(vec![Expr::zero(); rank])
    }

    /// The frame element with index `a`.
    pub fn basis(rank: usize, a: usize) -> Section {
        Section((0..rank).map(|b| Expr::int((a == b) as i64)).collect())
    }

    pub fn parse(chart: &Chart, comps: &[&str]) -> Result<Section> {
        Ok(Section(comps.iter().map(|s| parse_expr(s, chart)).collect::<Result<_>>()?))
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn comps(&self) -> &[Expr] {
        &self.0
    }

    pub fn scale(&self, f: &Expr) -> Section {
        Section(self.0.iter().map(|c| canon(&(f * c))).collect())
    }

    pub fn canon(&self) -> Section {
        Section(self.0.iter().map(canon).collect())
    }

    pub fn is_literal_zero(&self) -> bool {
        self.0.iter().all(Expr::is_literal_zero)
    }

    /// Sum of `coef[k] * sections[k]`.
    pub fn combination(rank: usize, terms: &[(Expr, &Section)]) -> Section {
        Section(
            (0..rank)
                .map(|c| canon(&Expr::sum(terms.iter().map(|(f, s)| f * &s.0[c]))))
                .collect(),
        )
    }

    pub fn all_zero(&self, name: &str, chart: &Chart) -> Verdict {
        let mut z = ZeroCheck::new(name, chart);
        for (k, e) in self.0.iter().enumerate() {
            z.check(&[k], e);
        }
        z.finish()
    }
}

impl std::ops::Index<usize> for Section {
    type Output = Expr;
    fn index(&self, i: usize) -> &Expr {
        &self.0[i]
    }
}

impl ops::Add for &Section {
    type Output = Section;
    fn add(self, rhs: &Section) -> Section {
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| canon(&(a + b))).collect())
    }
}

impl ops::Sub for &Section {
    type Output = Section;
    fn sub(self, rhs: &Section) -> Section {
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| canon(&(a - b))).collect())
    }
}

impl ops::Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        Section(self.0.iter().map(|a| canon(&-a)).collect())
    }
}

/// `V(f) = V^i d_i f` for a vector field in the coordinate frame.
pub fn directional(v: &Section, f: &Expr) -> Expr {
    canon(&Expr::sum(
        v.0.iter().enumerate().filter(|(_, vi)| !vi.is_literal_zero()).map(|(i, vi)| vi * differentiate(f, i)),
    ))
}

fn check_vector(chart: &Chart, v: &Section) -> Result<()> {
    if v.rank() != chart.dim() {
        return Err(Error::Shape(format!("vector field has {} components on a {}-dimensional chart", v.rank(), chart.dim())));
    }
    if let Some(m) = v.0.iter().filter_map(Expr::max_var).max() {
        if m >= chart.dim() {
            return Err(Error::Shape("vector field refers to a coordinate outside the chart".into()));
        }
    }
    Ok(())
}

/// Jacobi-Lie bracket `[V,W]^j = V^i d_i W^j - W^i d_i V^j`.
pub fn vf_bracket(chart: &Chart, v: &Section, w: &Section) -> Result<Section> {
    check_vector(chart, v)?;
    check_vector(chart, w)?;
    Ok(Section((0..chart.dim()).map(|j| canon(&(directional(v, &w.0[j]) - directional(w, &v.0[j])))).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Tangent,
    Algebroid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub variance: Variance,
    pub tag: Tag,
}

impl Slot {
    pub const UP_TM: Slot = Slot { variance: Variance::Upper, tag: Tag::Tangent };
    pub const LOW_TM: Slot = Slot { variance: Variance::Lower, tag: Tag::Tangent };
    pub const UP_G: Slot = Slot { variance: Variance::Upper, tag: Tag::Algebroid };
    pub const LOW_G: Slot = Slot { variance: Variance::Lower, tag: Tag::Algebroid };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

/// Multi-indexed components, row-major in slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    comps: Vec<Expr>,
    symmetries: Vec<Symmetry>,
}

/// Every multi-index for the given dimensions, in row-major order.
pub fn multi_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    if dims.contains(&0) {
        return out;
    }
    let mut idx = vec![0; dims.len()];
    for _ in 0..total {
        out.push(idx.clone());
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

impl TensorField {
    pub fn new(slots: Vec<Slot>, dims: Vec<usize>, comps: Vec<Expr>) -> Result<TensorField> {
        if slots.len() != dims.len() {
            return Err(Error::Shape(format!("{} slots but {} dimensions", slots.len(), dims.len())));
        }
        let total: usize = dims.iter().product();
        if comps.len() != total {
            return Err(Error::Shape(format!("expected {} components, got {}", total, comps.len())));
        }
        Ok(TensorField { slots, dims, comps, symmetries: Vec::new() })
    }

    pub fn from_fn(slots: Vec<Slot>, dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> Expr) -> TensorField {
        let comps = multi_indices(&dims).iter().map(|i| f(i)).collect();
        TensorField { slots, dims, comps, symmetries: Vec::new() }
    }

    pub fn scalar(e: Expr) -> TensorField {
        TensorField { slots: Vec::new(), dims: Vec::new(), comps: vec![e], symmetries: Vec::new() }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn order(&self) -> usize {
        self.slots.len()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.dims.len(), "index arity");
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            assert!(i < d, "index out of range");
            acc * d + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], e: Expr) {
        let o = self.offset(idx);
        self.comps[o] = e;
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField { comps: self.comps.iter().map(f).collect(), ..self.clone() }
    }

    pub fn canon(&self) -> TensorField {
        self.map(canon)
    }

    /// Declare a symmetry after verifying it componentwise.
    pub fn with_symmetry(mut self, chart: &Chart, sym: Symmetry) -> Result<TensorField> {
        let v = self.check_symmetry(chart, sym)?;
        if !v.passed() {
            return Err(Error::Shape(format!(
                "declared symmetry {:?} does not hold{}",
                sym,
                v.witness.map(|w| format!(": {}", w)).unwrap_or_default()
            )));
        }
        self.symmetries.push(sym);
        Ok(self)
    }

    pub fn check_symmetry(&self, chart: &Chart, sym: Symmetry) -> Result<Verdict> {
        let (p, q, sign) = match sym {
            Symmetry::Symmetric(p, q) => (p, q, -1),
            Symmetry::Antisymmetric(p, q) => (p, q, 1),
        };
        if p >= self.order() || q >= self.order() || p == q || self.dims[p] != self.dims[q] || self.slots[p] != self.slots[q] {
            return Err(Error::Shape(format!("symmetry {:?} does not match the slot signature", sym)));
        }
        let mut z = ZeroCheck::new("symmetry", chart);
        for idx in multi_indices(&self.dims) {
            // antisymmetry also constrains the diagonal: T + T = 0
            if idx[p] > idx[q] || (idx[p] == idx[q] && sign < 0) {
                continue;
            }
            let mut swapped = idx.clone();
            swapped.swap(p, q);
            let e = self.get(&idx) + Expr::int(sign) * self.get(&swapped);
            if !z.check(&idx, &e) {
                break;
            }
        }
        Ok(z.finish())
    }

    /// Re-verify every declared symmetry.
    pub fn verify_symmetries(&self, chart: &Chart) -> Result<Verdict> {
        let checks = self.symmetries.iter().map(|&s| self.check_symmetry(chart, s)).collect::<Result<Vec<_>>>()?;
        Ok(Verdict::all("symmetries", checks))
    }

    pub fn all_zero(&self, name: &str, chart: &Chart) -> Verdict {
        let mut z = ZeroCheck::new(name, chart);
        for (idx, e) in multi_indices(&self.dims).iter().zip(&self.comps) {
            if !z.check(idx, e) {
                break;
            }
        }
        z.finish()
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        if self.dims != other.dims || self.slots != other.slots {
            return Err(Error::Shape("tensor signatures differ".into()));
        }
        Ok(TensorField {
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| canon(&(a - b))).collect(),
            symmetries: Vec::new(),
            ..self.clone()
        })
    }
}

/// Lie derivative along a vector field of a tensor with only tangent slots.
pub fn lie_derivative(chart: &Chart, v: &Section, t: &TensorField) -> Result<TensorField> {
    check_vector(chart, v)?;
    if t.slots.iter().any(|s| s.tag != Tag::Tangent) {
        return Err(Error::TargetMismatch("Lie derivative needs tangent-tagged slots only".into()));
    }
    let n = chart.dim();
    if t.dims.iter().any(|&d| d != n) {
        return Err(Error::Shape("tangent slot dimension differs from chart dimension".into()));
    }
    // dv[k][i] = d_k V^i
    let dv: Vec<Vec<Expr>> = (0..n).map(|k| (0..n).map(|i| differentiate(&v.0[i], k)).collect()).collect();
    let mut out = TensorField::from_fn(t.slots.clone(), t.dims.clone(), |idx| {
        let mut terms = vec![directional(v, t.get(idx))];
        for (s, slot) in t.slots.iter().enumerate() {
            let mut j = idx.to_vec();
            for k in 0..n {
                j[s] = k;
                match slot.variance {
                    Variance::Upper => terms.push(-(t.get(&j) * &dv[k][idx[s]])),
                    Variance::Lower => terms.push(t.get(&j) * &dv[idx[s]][k]),
                }
            }
        }
        canon(&Expr::sum(terms))
    });
    out.symmetries = t.symmetries.clone();
    Ok(out)
}

/// Contract an upper slot against a lower slot with the same tag.
pub fn tensor_contract(t: &TensorField, upper: usize, lower: usize) -> Result<TensorField> {
    if upper >= t.order() || lower >= t.order() {
        return Err(Error::Shape("slot index out of range".into()));
    }
    let (su, sl) = (t.slots[upper], t.slots[lower]);
    if su.variance != Variance::Upper || sl.variance != Variance::Lower {
        return Err(Error::Shape("contraction needs one upper and one lower slot".into()));
    }
    if su.tag != sl.tag || t.dims[upper] != t.dims[lower] {
        return Err(Error::Shape("contracted slots have different bundles".into()));
    }
    let keep: Vec<usize> = (0..t.order()).filter(|&s| s != upper && s != lower).collect();
    let slots = keep.iter().map(|&s| t.slots[s]).collect();
    let dims: Vec<usize> = keep.iter().map(|&s| t.dims[s]).collect();
    let d = t.dims[upper];
    Ok(TensorField::from_fn(slots, dims, |idx| {
        let mut full = vec![0; t.order()];
        for (k, &s) in keep.iter().enumerate() {
            full[s] = idx[k];
        }
        canon(&Expr::sum((0..d).map(|m| {
            full[upper] = m;
            full[lower] = m;
            t.get(&full).clone()
        })))
    }))
}

pub fn tensor_product(a: &TensorField, b: &TensorField) -> TensorField {
    let mut slots = a.slots.clone();
    slots.extend_from_slice(&b.slots);
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let k = a.order();
    TensorField::from_fn(slots, dims, |idx| canon(&(a.get(&idx[..k]) * b.get(&idx[k..]))))
}
