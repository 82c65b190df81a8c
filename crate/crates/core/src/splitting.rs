//! Homological splittings `Hom = H ⊕ I ⊕ R` with codifferential and projection.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::ainf::{AInfCategory, Gen, Morphism, Shape, Structure};
use crate::base::Q;
use crate::error::{Error, Result};
use crate::graded::{GradedBasis, VectorB};
use crate::linalg::QMatrix;

/// Applies a rational matrix to a B-vector coordinatewise.
pub fn apply_q(m: &QMatrix, v: &VectorB) -> VectorB {
    let mut out = VectorB::zero();
    for (j, c) in v.iter() {
        for i in 0..m.rows() {
            let a = m.get(i, j);
            if !a.is_zero() {
                out.add_at(i, &c.scale(a));
            }
        }
    }
    out
}

/// Matrix of `μ¹` on `Hom(x, y)`: column `j` is `μ¹(e_j)`.
pub fn mu1_matrix<S: Structure + ?Sized>(p: &S, x: usize, y: usize) -> QMatrix {
    let n = p.shape().dim(x, y);
    let mut m = QMatrix::zeros(n, n);
    for j in 0..n {
        if let Some(v) = p.table().value(&[Gen::new(x, y, j)]) {
            for (i, c) in v.iter() {
                m.set(i, j, c.constant_term());
            }
        }
    }
    m
}

/// The splitting of a single hom space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomSplitting {
    pub h: Vec<Vec<Q>>,
    pub i: Vec<Vec<Q>>,
    pub r: Vec<Vec<Q>>,
    coords: QMatrix,
    codiff: QMatrix,
    proj: QMatrix,
}

impl HomSplitting {
    /// `n` is the dimension; `mu1` the differential; `prefer` a basis index to place in `H` first.
    pub fn compute(mu1: &QMatrix, prefer: Option<usize>) -> Result<Self> {
        let n = mu1.rows();
        if !mu1.mul(mu1).is_zero() {
            return Err(Error::RelationsUnverified("the differential does not square to zero".into()));
        }
        let (_, pivots) = mu1.rref();
        let r: Vec<Vec<Q>> = pivots
            .iter()
            .map(|&p| {
                let mut v = vec![Q::zero(); n];
                v[p] = num_traits::One::one();
                v
            })
            .collect();
        let i: Vec<Vec<Q>> = r.iter().map(|v| mu1.mul_vec(v)).collect();
        let mut kernel = mu1.kernel();
        if let Some(p) = prefer {
            if let Some(pos) = kernel.iter().position(|v| v.iter().enumerate().all(|(k, x)| (k == p) != x.is_zero())) {
                let v = kernel.remove(pos);
                kernel.insert(0, v);
            }
        }
        let mut h: Vec<Vec<Q>> = Vec::new();
        let mut span = i.clone();
        for v in kernel {
            let mut trial = span.clone();
            trial.push(v.clone());
            if QMatrix::from_columns(n, &trial).rank() == trial.len() {
                span = trial;
                h.push(v);
            }
        }
        let mut cols = h.clone();
        cols.extend(i.iter().cloned());
        cols.extend(r.iter().cloned());
        let change = QMatrix::from_columns(n, &cols);
        let coords = change
            .inverse()
            .ok_or_else(|| Error::RelationsUnverified("splitting summands do not span the hom space".into()))?;
        let (dh, di) = (h.len(), i.len());
        let mut codiff = QMatrix::zeros(n, n);
        let mut proj = QMatrix::zeros(n, n);
        for col in 0..n {
            for (a, rv) in r.iter().enumerate() {
                let c = coords.get(dh + a, col);
                if !c.is_zero() {
                    for row in 0..n {
                        let v = codiff.get(row, col) + c * &rv[row];
                        codiff.set(row, col, v);
                    }
                }
            }
            for (a, hv) in h.iter().enumerate() {
                let c = coords.get(a, col);
                if !c.is_zero() {
                    for row in 0..n {
                        let v = proj.get(row, col) + c * &hv[row];
                        proj.set(row, col, v);
                    }
                }
            }
        }
        debug_assert_eq!(coords.rows(), dh + di + r.len());
        Ok(HomSplitting { h, i, r, coords, codiff, proj })
    }

    pub fn dim(&self) -> usize {
        self.coords.rows()
    }

    /// Inverse of the change of basis `[H | I | R]`.
    pub fn coordinates(&self) -> &QMatrix {
        &self.coords
    }

    /// `h: (h, μ¹r′, r) ↦ r′` as a matrix on the hom basis.
    pub fn codifferential(&self) -> &QMatrix {
        &self.codiff
    }

    /// `π: (h, μ¹r′, r) ↦ h` as a matrix on the hom basis.
    pub fn projection(&self) -> &QMatrix {
        &self.proj
    }

    /// Coordinates in the `H` basis of the projection.
    pub fn h_coordinates(&self) -> QMatrix {
        let n = self.dim();
        let mut m = QMatrix::zeros(self.h.len(), n);
        for a in 0..self.h.len() {
            for j in 0..n {
                m.set(a, j, self.coords.get(a, j).clone());
            }
        }
        m
    }

    pub fn h_matrix(&self) -> QMatrix {
        QMatrix::from_columns(self.dim(), &self.h)
    }

    pub fn r_matrix(&self) -> QMatrix {
        QMatrix::from_columns(self.dim(), &self.r)
    }
}

/// Exported coordinates of a splitting, for golden files.
#[derive(Clone, Debug, Serialize)]
pub struct SplittingExport {
    pub source: String,
    pub target: String,
    pub h: Vec<Vec<String>>,
    pub i: Vec<Vec<String>>,
    pub r: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct HomologicalSplitting {
    shape: Arc<Shape>,
    homs: BTreeMap<(usize, usize), HomSplitting>,
    hc_shape: Arc<Shape>,
}

impl HomologicalSplitting {
    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    /// The shape of the cohomology category: hom bases are the `H` vectors.
    pub fn hc_shape(&self) -> &Arc<Shape> {
        &self.hc_shape
    }

    pub fn hom(&self, x: usize, y: usize) -> &HomSplitting {
        &self.homs[&(x, y)]
    }

    pub fn apply_h(&self, v: &Morphism) -> Morphism {
        Morphism::new(v.src, v.tgt, apply_q(self.hom(v.src, v.tgt).codifferential(), &v.value))
    }

    pub fn apply_pi(&self, v: &Morphism) -> Morphism {
        Morphism::new(v.src, v.tgt, apply_q(self.hom(v.src, v.tgt).projection(), &v.value))
    }

    /// The `H` basis vector behind a generator of the cohomology shape, as a morphism of `C`.
    pub fn include(&self, g: Gen) -> Morphism {
        let hv = &self.hom(g.src(), g.tgt()).h[g.idx()];
        Morphism::new(g.src(), g.tgt(), VectorB::from_q(hv))
    }

    /// B-linear inclusion of a cohomology-shape vector into the hom space.
    pub fn include_vector(&self, x: usize, y: usize, v: &VectorB) -> VectorB {
        apply_q(&self.hom(x, y).h_matrix(), v)
    }

    /// `H`-coordinates of the projection of a hom-space vector.
    pub fn pi_coordinates(&self, x: usize, y: usize, v: &VectorB) -> VectorB {
        apply_q(&self.hom(x, y).h_coordinates(), v)
    }

    pub fn export(&self) -> Vec<SplittingExport> {
        let fmt = |vs: &Vec<Vec<Q>>| vs.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>();
        self.homs
            .iter()
            .filter(|(_, s)| s.dim() > 0)
            .map(|((x, y), s)| SplittingExport {
                source: self.shape.object_name(*x).to_string(),
                target: self.shape.object_name(*y).to_string(),
                h: fmt(&s.h),
                i: fmt(&s.i),
                r: fmt(&s.r),
            })
            .collect()
    }
}

fn h_names(basis: &GradedBasis, h: &[Vec<Q>]) -> Vec<String> {
    let mut used = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for v in h {
        let support: Vec<usize> = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect();
        let unit = support.len() == 1 && num_traits::One::is_one(&v[support[0]]);
        let mut name = basis.name(support[0]).to_string();
        if !unit {
            name.push('\'');
        }
        while used.contains(&name) {
            name.push('\'');
        }
        used.insert(name.clone());
        out.push(name);
    }
    out
}

/// Splits every hom space of a category using the fixed pivoting rule; identities are placed in `H`.
pub fn compute_splitting<S: Structure + ?Sized>(c: &S) -> Result<HomologicalSplitting> {
    let shape = c.shape();
    let n = shape.num_objects();
    let mut homs = BTreeMap::new();
    let mut hc_homs = BTreeMap::new();
    let mut identities = vec![None; n];
    for x in 0..n {
        for y in 0..n {
            let prefer = if x == y { shape.identity(x) } else { None };
            let s = HomSplitting::compute(&mu1_matrix(c, x, y), prefer).map_err(|e| match e {
                Error::RelationsUnverified(m) => Error::RelationsUnverified(format!(
                    "Hom({}, {}): {m}",
                    shape.object_name(x),
                    shape.object_name(y)
                )),
                e => e,
            })?;
            let basis = shape.hom(x, y);
            let names = h_names(basis, &s.h);
            let mut elements = Vec::new();
            for (k, v) in s.h.iter().enumerate() {
                let lead = v.iter().position(|q| !q.is_zero()).expect("nonzero H vector");
                elements.push((names[k].clone(), basis.degree(lead)));
            }
            if x == y {
                if let Some(id) = shape.identity(x) {
                    identities[x] = s.h.iter().position(|v| v.iter().enumerate().all(|(k, q)| (k == id) != q.is_zero()));
                }
            }
            hc_homs.insert((x, y), GradedBasis::new(shape.mode(), elements)?);
            homs.insert((x, y), s);
        }
    }
    let hc_shape = Shape::new(shape.mode(), shape.objects().to_vec(), hc_homs, identities)?;
    Ok(HomologicalSplitting { shape: Arc::new(shape.clone()), homs, hc_shape: Arc::new(hc_shape) })
}

/// Convenience wrapper for categories.
pub fn split(c: &AInfCategory) -> Result<HomologicalSplitting> {
    compute_splitting(c)
}
