//! The standard symplectic space `F_q^(2ν)` with Gram matrix `K = [[0, I], [-I, 0]]`.
//!
//! Covers subspace types, duals, membership in `Sp_2ν(F_q)`, transvection
//! generators, constructive transitivity, and the three vertex actions used by
//! the automorphism group: right multiplication by a symplectic matrix,
//! entrywise field automorphisms, and hyperbolic diagonal scalings.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldAut, FieldElem, FieldError, FieldSpec};
use crate::linalg::{self, kernel, LinalgError, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("ν must be at least 1")]
    BadNu,
    #[error("expected vectors or subspaces of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("types differ: {0} vs {1}")]
    TypeMismatch(SympType, SympType),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("scaling factors must be nonzero")]
    ZeroScalar,
    #[error("expected {expected} scaling factors, got {got}")]
    ScalarCount { expected: usize, got: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("malformed descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The pair `(m, s)`: dimension and half the rank of the restricted form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SympType {
    pub m: usize,
    pub s: usize,
}

impl SympType {
    pub fn new(m: usize, s: usize) -> Self {
        SympType { m, s }
    }

    pub fn is_isotropic(self) -> bool {
        self.s == 0
    }
}

impl fmt::Display for SympType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.s)
    }
}

/// A matrix that has passed the `T K tT = K` check.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SympMatrix(Matrix);

impl SympMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// The composite `A -> π(A) · diag(k_1..k_ν, k_1^-1..k_ν^-1) · T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutDescriptor {
    pub t: Option<SympMatrix>,
    pub k: Vec<FieldElem>,
    pub pi: FieldAut,
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    k: Vec<u32>,
    pi: u32,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
}

impl AutDescriptor {
    pub fn identity(nu: usize) -> Self {
        AutDescriptor { t: None, k: vec![FieldElem::ONE; nu], pi: FieldAut::IDENTITY }
    }

    pub fn scaling(k: Vec<FieldElem>, pi: FieldAut) -> Self {
        AutDescriptor { t: None, k, pi }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = DescriptorJson {
            k: self.k.iter().map(|x| x.code()).collect(),
            pi: self.pi.j,
            t: self.t.as_ref().map(|t| t.matrix().to_string()),
        };
        serde_json::to_value(j).expect("descriptor serializes")
    }

    /// Parses and validates `{k: [codes], pi: j, T: optional matrix text}`.
    pub fn from_json(sp: &SympSpace, value: &serde_json::Value) -> Result<Self, SymplecticError> {
        let j: DescriptorJson =
            serde_json::from_value(value.clone()).map_err(|e| SymplecticError::Descriptor(e.to_string()))?;
        let f = sp.field();
        let k = j.k.iter().map(|&c| f.elem(c)).collect::<Result<Vec<_>, _>>()?;
        let pi = FieldAut { j: j.pi };
        f.check_aut(pi)?;
        let t = match j.t {
            Some(text) => Some(sp.certify(linalg::parse_matrix(f, &text)?)?),
            None => None,
        };
        let d = AutDescriptor { t, k, pi };
        sp.check_descriptor(&d)?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympSpace {
    nu: usize,
    field: FieldSpec,
    gram: Matrix,
}

impl SympSpace {
    pub fn new(field: FieldSpec, nu: usize) -> Result<Self, SymplecticError> {
        if nu == 0 {
            return Err(SymplecticError::BadNu);
        }
        let n = 2 * nu;
        let mut gram = Matrix::zeros(n, n);
        let minus_one = field.neg(FieldElem::ONE);
        for i in 0..nu {
            gram.set(i, nu + i, FieldElem::ONE);
            gram.set(nu + i, i, minus_one);
        }
        Ok(SympSpace { nu, field, gram })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Ambient dimension `2ν`.
    pub fn dim(&self) -> usize {
        2 * self.nu
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// The Gram matrix `K`.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// Standard basis vector `e_i`, 0-based.
    pub fn e(&self, i: usize) -> Vec<FieldElem> {
        linalg::unit_vector(self.dim(), i)
    }

    /// `f_i = e_(ν+i)`, 0-based.
    pub fn f(&self, i: usize) -> Vec<FieldElem> {
        linalg::unit_vector(self.dim(), self.nu + i)
    }

    fn check_len(&self, n: usize) -> Result<(), SymplecticError> {
        if n == self.dim() {
            Ok(())
        } else {
            Err(SymplecticError::DimensionMismatch { expected: self.dim(), got: n })
        }
    }

    /// `α K tβ` without length checks.
    #[inline]
    pub fn inner_unchecked(&self, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
        let f = &self.field;
        let nu = self.nu;
        let mut acc = FieldElem::ZERO;
        for i in 0..nu {
            acc = f.add(acc, f.mul(a[i], b[nu + i]));
            acc = f.sub(acc, f.mul(a[nu + i], b[i]));
        }
        acc
    }

    pub fn inner(&self, a: &[FieldElem], b: &[FieldElem]) -> Result<FieldElem, SymplecticError> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        Ok(self.inner_unchecked(a, b))
    }

    /// `P K tQ` for the stored bases.
    pub fn cross_gram(&self, p: &Subspace, q: &Subspace) -> Matrix {
        let mut g = Matrix::zeros(p.dim(), q.dim());
        for (i, a) in p.basis().row_iter().enumerate() {
            for (j, b) in q.basis().row_iter().enumerate() {
                g.set(i, j, self.inner_unchecked(a, b));
            }
        }
        g
    }

    pub fn type_of(&self, p: &Subspace) -> Result<SympType, SymplecticError> {
        self.check_len(p.ambient())?;
        let r = linalg::rank(&self.field, &self.cross_gram(p, p));
        if r % 2 != 0 {
            return Err(SymplecticError::Invariant(format!("alternating Gram matrix of odd rank {r}")));
        }
        Ok(SympType { m: p.dim(), s: r / 2 })
    }

    /// `P^⊥ = { α : α K tβ = 0 for all β in P }`.
    pub fn dual(&self, p: &Subspace) -> Result<Subspace, SymplecticError> {
        self.check_len(p.ambient())?;
        let pk = p.basis().mul(&self.field, &self.gram)?;
        Ok(kernel(&self.field, &pk))
    }

    /// `A K tB = 0`.
    pub fn orthogonal(&self, a: &Subspace, b: &Subspace) -> bool {
        a.basis()
            .row_iter()
            .all(|x| b.basis().row_iter().all(|y| self.inner_unchecked(x, y).is_zero()))
    }

    pub fn is_symplectic(&self, t: &Matrix) -> Result<bool, SymplecticError> {
        if t.rows() != self.dim() || t.cols() != self.dim() {
            return Err(SymplecticError::DimensionMismatch { expected: self.dim(), got: t.rows().max(t.cols()) });
        }
        let f = &self.field;
        let tk = t.mul(f, &self.gram)?;
        Ok(tk.mul(f, &t.transpose())? == self.gram)
    }

    pub fn certify(&self, t: Matrix) -> Result<SympMatrix, SymplecticError> {
        if self.is_symplectic(&t)? {
            Ok(SympMatrix(t))
        } else {
            Err(SymplecticError::NotSymplectic)
        }
    }

    pub fn identity(&self) -> SympMatrix {
        SympMatrix(Matrix::identity(self.dim()))
    }

    pub fn mul(&self, a: &SympMatrix, b: &SympMatrix) -> SympMatrix {
        SympMatrix(a.0.mul(&self.field, &b.0).expect("square matrices of equal size"))
    }

    pub fn inverse(&self, t: &SympMatrix) -> SympMatrix {
        SympMatrix(t.0.inverse(&self.field).expect("symplectic matrices are invertible"))
    }

    pub fn negate(&self, t: &SympMatrix) -> SympMatrix {
        SympMatrix(t.0.neg(&self.field))
    }

    /// `x -> x + λ (x K tv) v`.
    pub fn transvection(&self, v: &[FieldElem], lambda: FieldElem) -> Result<SympMatrix, SymplecticError> {
        self.check_len(v.len())?;
        let f = &self.field;
        let n = self.dim();
        // column K tv
        let kv: Vec<FieldElem> = (0..n).map(|i| linalg::dot(f, self.gram.row(i), v)).collect();
        let mut t = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let extra = f.mul(lambda, f.mul(kv[i], v[j]));
                t.set(i, j, f.add(t.get(i, j), extra));
            }
        }
        self.certify(t)
    }

    /// Nonzero vectors whose first nonzero coordinate is 1, in code order.
    pub fn projective_points(&self) -> Vec<Vec<FieldElem>> {
        linalg::all_vectors(&self.field, self.dim())
            .into_iter()
            .filter(|v| v.iter().find(|x| !x.is_zero()) == Some(&FieldElem::ONE))
            .collect()
    }

    /// One transvection per projective point and nonzero scalar.
    pub fn transvections(&self) -> Vec<SympMatrix> {
        let mut out = Vec::new();
        for v in self.projective_points() {
            for lambda in self.field.nonzero_elements() {
                out.push(self.transvection(&v, lambda).expect("transvections are symplectic"));
            }
        }
        out
    }

    /// A product of `steps` random transvections.
    pub fn random_symplectic<R: Rng + ?Sized>(&self, rng: &mut R, steps: usize) -> SympMatrix {
        let q = self.field.order();
        let mut t = self.identity();
        for _ in 0..steps {
            let v: Vec<FieldElem> = loop {
                let v: Vec<FieldElem> = (0..self.dim()).map(|_| FieldElem(rng.gen_range(0..q) as u16)).collect();
                if v.iter().any(|x| !x.is_zero()) {
                    break v;
                }
            };
            let lambda = FieldElem(rng.gen_range(1..q) as u16);
            t = self.mul(&t, &self.transvection(&v, lambda).expect("length checked"));
        }
        t
    }

    /// The subspace `[e_1..e_(m-s), f_1..f_s]` of type `(m, s)`.
    pub fn standard_subspace(&self, ty: SympType) -> Result<Subspace, SymplecticError> {
        if 2 * ty.s > ty.m || ty.m > self.dim() || ty.m - ty.s > self.nu {
            return Err(SymplecticError::Invariant(format!("no subspace of type {ty} in dimension {}", self.dim())));
        }
        let mut idx: Vec<usize> = (0..ty.m - ty.s).collect();
        idx.extend((0..ty.s).map(|i| self.nu + i));
        Ok(Subspace::coordinate(&self.field, self.dim(), &idx))
    }

    /// Projection onto the orthogonal complement of a set of hyperbolic pairs.
    fn project_off(&self, x: &[FieldElem], pairs: &[(Vec<FieldElem>, Vec<FieldElem>)]) -> Vec<FieldElem> {
        let f = &self.field;
        let mut out = x.to_vec();
        for (u, w) in pairs {
            let xw = self.inner_unchecked(x, w);
            let xu = self.inner_unchecked(x, u);
            for i in 0..out.len() {
                out[i] = f.add(f.sub(out[i], f.mul(xw, u[i])), f.mul(xu, w[i]));
            }
        }
        out
    }

    /// A symplectic frame `u_1..u_ν, w_1..w_ν` (as the rows of a symplectic
    /// matrix) with `P` spanned by `u_1..u_s, w_1..w_s, u_(s+1)..u_(m-s)`.
    pub fn extend_symplectic_basis(&self, p: &Subspace) -> Result<SympMatrix, SymplecticError> {
        let ty = self.type_of(p)?;
        let f = &self.field;
        let nu = self.nu;

        // hyperbolic pairs inside P
        let mut rest: Vec<Vec<FieldElem>> = p.basis().row_iter().map(<[FieldElem]>::to_vec).collect();
        let mut pairs: Vec<(Vec<FieldElem>, Vec<FieldElem>)> = Vec::new();
        loop {
            let found = (0..rest.len()).find_map(|i| {
                (0..rest.len())
                    .find(|&j| j != i && !self.inner_unchecked(&rest[i], &rest[j]).is_zero())
                    .map(|j| (i, j))
            });
            let Some((i, j)) = found else { break };
            let a = rest[i].clone();
            let c = f.inv(self.inner_unchecked(&a, &rest[j]))?;
            let b: Vec<FieldElem> = rest[j].iter().map(|&x| f.mul(c, x)).collect();
            rest = rest
                .iter()
                .enumerate()
                .filter(|&(idx, _)| idx != i && idx != j)
                .map(|(_, x)| {
                    let xb = self.inner_unchecked(x, &b);
                    let xa = self.inner_unchecked(x, &a);
                    x.iter()
                        .zip(a.iter().zip(&b))
                        .map(|(&xi, (&ai, &bi))| f.add(f.sub(xi, f.mul(xb, ai)), f.mul(xa, bi)))
                        .collect()
                })
                .collect();
            pairs.push((a, b));
        }
        if pairs.len() != ty.s || rest.len() != ty.m - 2 * ty.s {
            return Err(SymplecticError::Invariant(format!(
                "deflation found {} hyperbolic pairs for a subspace of type {ty}",
                pairs.len()
            )));
        }

        // partners outside P for the radical vectors
        let radicals = rest;
        let mut new_partners: Vec<Vec<FieldElem>> = Vec::new();
        for j in 0..radicals.len() {
            let mut constraints: Vec<&[FieldElem]> = Vec::new();
            let mut targets = Vec::new();
            for (u, w) in &pairs {
                constraints.push(u);
                constraints.push(w);
                targets.extend([FieldElem::ZERO, FieldElem::ZERO]);
            }
            for (l, r) in radicals.iter().enumerate() {
                constraints.push(r);
                targets.push(if l == j { FieldElem::ONE } else { FieldElem::ZERO });
            }
            for w in &new_partners {
                constraints.push(w);
                targets.push(FieldElem::ZERO);
            }
            let rows = Matrix::from_rows(self.dim(), &constraints)?.mul(f, &self.gram)?;
            let y = linalg::solve(f, &rows, &targets)
                .ok_or_else(|| SymplecticError::Invariant("radical vectors are dependent".into()))?;
            new_partners.push(y);
        }
        let mut frame = pairs;
        frame.extend(radicals.into_iter().zip(new_partners));

        // complete to a full frame in the nondegenerate complement
        while frame.len() < nu {
            let u = (0..self.dim())
                .map(|i| self.project_off(&self.e(i), &frame))
                .find(|x| x.iter().any(|c| !c.is_zero()))
                .ok_or_else(|| SymplecticError::Invariant("complement unexpectedly zero".into()))?;
            let (w, c) = (0..self.dim())
                .map(|i| self.project_off(&self.e(i), &frame))
                .find_map(|y| {
                    let c = self.inner_unchecked(&u, &y);
                    (!c.is_zero()).then_some((y, c))
                })
                .ok_or_else(|| SymplecticError::Invariant("complement is degenerate".into()))?;
            let cinv = f.inv(c)?;
            let w = w.iter().map(|&x| f.mul(cinv, x)).collect();
            frame.push((u, w));
        }

        let mut rows: Vec<Vec<FieldElem>> = frame.iter().map(|(u, _)| u.clone()).collect();
        rows.extend(frame.into_iter().map(|(_, w)| w));
        let m = Matrix::from_rows(self.dim(), &rows)?;
        self.certify(m)
            .map_err(|_| SymplecticError::Invariant("constructed frame is not symplectic".into()))
    }

    /// A symplectic `T` with `A T = B`.
    pub fn transitivity_witness(&self, a: &Subspace, b: &Subspace) -> Result<SympMatrix, SymplecticError> {
        let (ta, tb) = (self.type_of(a)?, self.type_of(b)?);
        if ta != tb {
            return Err(SymplecticError::TypeMismatch(ta, tb));
        }
        let ma = self.extend_symplectic_basis(a)?;
        let mb = self.extend_symplectic_basis(b)?;
        Ok(self.mul(&self.inverse(&ma), &mb))
    }

    pub fn act_matrix(&self, t: &SympMatrix, p: &Subspace) -> Result<Subspace, SymplecticError> {
        self.check_len(p.ambient())?;
        Ok(p.transform(&self.field, &t.0)?)
    }

    pub fn act_field_aut(&self, pi: FieldAut, p: &Subspace) -> Subspace {
        if pi.is_identity() {
            return p.clone();
        }
        Subspace::from_matrix(&self.field, &p.basis().map(|x| self.field.apply_aut(pi, x)))
    }

    pub fn check_descriptor(&self, d: &AutDescriptor) -> Result<(), SymplecticError> {
        if d.k.len() != self.nu {
            return Err(SymplecticError::ScalarCount { expected: self.nu, got: d.k.len() });
        }
        for &k in &d.k {
            self.field.elem(k.code())?;
            if k.is_zero() {
                return Err(SymplecticError::ZeroScalar);
            }
        }
        self.field.check_aut(d.pi)?;
        Ok(())
    }

    /// `diag(k_1..k_ν, k_1^-1..k_ν^-1)`.
    pub fn hyperbolic_diagonal(&self, k: &[FieldElem]) -> Result<SympMatrix, SymplecticError> {
        if k.len() != self.nu {
            return Err(SymplecticError::ScalarCount { expected: self.nu, got: k.len() });
        }
        let mut diag = k.to_vec();
        for &x in k {
            if x.is_zero() {
                return Err(SymplecticError::ZeroScalar);
            }
            diag.push(self.field.inv(x)?);
        }
        self.certify(Matrix::diagonal(&diag))
    }

    pub fn act_descriptor(&self, d: &AutDescriptor, p: &Subspace) -> Result<Subspace, SymplecticError> {
        self.check_descriptor(d)?;
        self.check_len(p.ambient())?;
        let f = &self.field;
        let nu = self.nu;
        let mut kinv = Vec::with_capacity(nu);
        for &k in &d.k {
            kinv.push(f.inv(k)?);
        }
        let scaled = p.basis().clone();
        let mut scaled = scaled.map(|x| f.apply_aut(d.pi, x));
        for r in 0..scaled.rows() {
            for c in 0..2 * nu {
                let factor = if c < nu { d.k[c] } else { kinv[c - nu] };
                scaled.set(r, c, f.mul(factor, scaled.get(r, c)));
            }
        }
        let image = Subspace::from_matrix(f, &scaled);
        match &d.t {
            Some(t) => self.act_matrix(t, &image),
            None => Ok(image),
        }
    }

    /// The descriptor acting as `act(first) ∘ act(second)`, i.e. `second` is applied first.
    pub fn compose_descriptors(
        &self,
        first: &AutDescriptor,
        second: &AutDescriptor,
    ) -> Result<AutDescriptor, SymplecticError> {
        self.check_descriptor(first)?;
        self.check_descriptor(second)?;
        let f = &self.field;
        let k = first
            .k
            .iter()
            .zip(&second.k)
            .map(|(&k1, &k2)| f.mul(k1, f.apply_aut(first.pi, k2)))
            .collect();
        let pi = f.compose_auts(first.pi, second.pi);
        let t = match (&first.t, &second.t) {
            (None, None) => None,
            (Some(t1), None) => Some(t1.clone()),
            (t1, Some(t2)) => {
                let d1 = self.hyperbolic_diagonal(&first.k)?;
                let t2_twisted = self.certify(t2.matrix().map(|x| f.apply_aut(first.pi, x)))?;
                let conj = self.mul(&self.mul(&self.inverse(&d1), &t2_twisted), &d1);
                Some(match t1 {
                    Some(t1) => self.mul(&conj, t1),
                    None => conj,
                })
            }
        };
        Ok(AutDescriptor { t, k, pi })
    }

    /// All `(k, π)` descriptors without a matrix part, `k` in code order, then `π`.
    pub fn scaling_descriptors(&self) -> Vec<AutDescriptor> {
        let f = &self.field;
        let units: Vec<FieldElem> = f.nonzero_elements().collect();
        let mut out = Vec::new();
        let total = units.len().pow(self.nu as u32);
        for pi in f.list_auts() {
            for mut idx in 0..total {
                let mut k = Vec::with_capacity(self.nu);
                for _ in 0..self.nu {
                    k.push(units[idx % units.len()]);
                    idx /= units.len();
                }
                out.push(AutDescriptor::scaling(k, pi));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn space(p: u32, e: u32, nu: usize) -> SympSpace {
        SympSpace::new(FieldSpec::new(p, e).unwrap(), nu).unwrap()
    }

    fn el(codes: &[u16]) -> Vec<FieldElem> {
        codes.iter().map(|&c| FieldElem(c)).collect()
    }

    fn sub(sp: &SympSpace, idx: &[usize]) -> Subspace {
        Subspace::coordinate(sp.field(), sp.dim(), idx)
    }

    #[test]
    fn inner_examples() {
        let sp = space(3, 1, 2);
        assert_eq!(sp.inner(&sp.e(0), &sp.f(0)).unwrap(), FieldElem::ONE);
        assert_eq!(sp.inner(&sp.e(0), &sp.e(1)).unwrap(), FieldElem::ZERO);
        assert_eq!(sp.inner(&sp.e(0), &sp.f(1)).unwrap(), FieldElem::ZERO);
        assert_eq!(sp.inner(&sp.f(0), &sp.f(1)).unwrap(), FieldElem::ZERO);
        assert!(sp.inner(&sp.e(0), &el(&[1, 0])).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a: Vec<FieldElem> = (0..4).map(|_| FieldElem(rng.gen_range(0..3))).collect();
            let b: Vec<FieldElem> = (0..4).map(|_| FieldElem(rng.gen_range(0..3))).collect();
            assert!(sp.inner(&a, &a).unwrap().is_zero());
            assert_eq!(sp.inner(&a, &b).unwrap(), sp.field().neg(sp.inner(&b, &a).unwrap()));
        }
    }

    #[test]
    fn inner_matches_gram_product() {
        let sp = space(5, 1, 2);
        let f = sp.field();
        let a = el(&[1, 2, 3, 4]);
        let b = el(&[4, 0, 2, 1]);
        let ak = Matrix::from_rows(4, &[a.clone()]).unwrap().mul(f, sp.gram()).unwrap();
        assert_eq!(linalg::dot(f, ak.row(0), &b), sp.inner(&a, &b).unwrap());
    }

    #[test]
    fn type_examples() {
        let sp = space(2, 1, 2);
        assert_eq!(sp.type_of(&sub(&sp, &[0])).unwrap(), SympType::new(1, 0));
        assert_eq!(sp.type_of(&sub(&sp, &[0, 2])).unwrap(), SympType::new(2, 1));
        assert_eq!(sp.type_of(&sub(&sp, &[0, 1, 2])).unwrap(), SympType::new(3, 1));
        assert_eq!(sp.type_of(&sub(&sp, &[0, 1])).unwrap(), SympType::new(2, 0));
    }

    #[test]
    fn dual_examples() {
        let sp1 = space(2, 1, 1);
        assert_eq!(sp1.dual(&sub(&sp1, &[0])).unwrap(), sub(&sp1, &[0]));
        let sp = space(2, 1, 2);
        assert_eq!(sp.dual(&sub(&sp, &[0, 1, 2])).unwrap(), sub(&sp, &[1]));
        let d = sp.dual(&sub(&sp, &[0])).unwrap();
        assert_eq!(d, sub(&sp, &[0, 1, 3]));
        // brute force: every vector orthogonal to e1
        let brute: BTreeSet<_> = linalg::all_vectors(sp.field(), 4)
            .into_iter()
            .filter(|v| sp.inner_unchecked(v, &sp.e(0)).is_zero())
            .collect();
        let got: BTreeSet<_> = d.vectors(sp.field()).into_iter().collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn symplectic_membership() {
        let sp = space(3, 1, 2);
        assert!(sp.is_symplectic(&Matrix::identity(4)).unwrap());
        let d = sp.hyperbolic_diagonal(&el(&[2, 1])).unwrap();
        assert!(sp.is_symplectic(d.matrix()).unwrap());
        assert!(!sp.is_symplectic(&Matrix::diagonal(&el(&[2, 1, 1, 1]))).unwrap());
        assert!(sp.is_symplectic(&Matrix::zeros(3, 3)).is_err());
        assert_eq!(sp.certify(Matrix::diagonal(&el(&[2, 1, 1, 1]))), Err(SymplecticError::NotSymplectic));
    }

    #[test]
    fn hyperbolic_diagonal_is_symplectic_for_all_scalars() {
        for (p, e) in [(3, 1), (5, 1), (2, 2)] {
            let sp = space(p, e, 2);
            for d in sp.scaling_descriptors() {
                let m = sp.hyperbolic_diagonal(&d.k).unwrap();
                let prod = m
                    .matrix()
                    .mul(sp.field(), sp.gram())
                    .unwrap()
                    .mul(sp.field(), &m.matrix().transpose())
                    .unwrap();
                assert_eq!(&prod, sp.gram());
            }
        }
    }

    #[test]
    fn transvection_counts_and_fixed_vector() {
        let sp = space(2, 1, 2);
        let ts = sp.transvections();
        assert_eq!(ts.len(), 15);
        for v in sp.projective_points() {
            let t = sp.transvection(&v, FieldElem::ONE).unwrap();
            let row = Matrix::from_rows(4, &[v.clone()]).unwrap().mul(sp.field(), t.matrix()).unwrap();
            assert_eq!(row.row(0), v.as_slice());
        }
        let sp3 = space(3, 1, 2);
        let ts3 = sp3.transvections();
        assert_eq!(ts3.len(), 80);
        for t in &ts3 {
            assert!(sp3.is_symplectic(t.matrix()).unwrap());
        }
    }

    fn check_frame(sp: &SympSpace, p: &Subspace) {
        let ty = sp.type_of(p).unwrap();
        let m = sp.extend_symplectic_basis(p).unwrap();
        assert!(sp.is_symplectic(m.matrix()).unwrap());
        let nu = sp.nu();
        let mut idx: Vec<usize> = (0..ty.s).collect();
        idx.extend((0..ty.s).map(|i| nu + i));
        idx.extend(ty.s..ty.m - ty.s);
        let rows: Vec<&[FieldElem]> = idx.iter().map(|&i| m.matrix().row(i)).collect();
        assert_eq!(Subspace::from_rows(sp.field(), sp.dim(), &rows).unwrap(), *p);
    }

    #[test]
    fn extend_basis_examples() {
        let sp = space(2, 1, 2);
        let m = sp.extend_symplectic_basis(&sub(&sp, &[0])).unwrap();
        assert_eq!(m.matrix().row(0), sp.e(0).as_slice());
        let m = sp.extend_symplectic_basis(&sub(&sp, &[0, 2])).unwrap();
        assert_eq!(m.matrix().row(0), sp.e(0).as_slice());
        assert_eq!(m.matrix().row(2), sp.f(0).as_slice());
    }

    #[test]
    fn extend_basis_all_subspaces_small() {
        for (p, nu) in [(2, 2), (3, 2), (2, 3)] {
            let sp = space(p, 1, nu);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..150 {
                let m = rng.gen_range(1..sp.dim());
                let rows: Vec<Vec<FieldElem>> = (0..m)
                    .map(|_| (0..sp.dim()).map(|_| FieldElem(rng.gen_range(0..p) as u16)).collect())
                    .collect();
                let s = Subspace::from_rows(sp.field(), sp.dim(), &rows).unwrap();
                if s.dim() == 0 {
                    continue;
                }
                check_frame(&sp, &s);
            }
        }
    }

    #[test]
    fn transitivity_witness_examples() {
        let sp = space(2, 1, 2);
        let a = sub(&sp, &[0]);
        let t = sp.transitivity_witness(&a, &a).unwrap();
        assert_eq!(sp.act_matrix(&t, &a).unwrap(), a);
        let b = sub(&sp, &[3]);
        let t = sp.transitivity_witness(&a, &b).unwrap();
        assert!(sp.is_symplectic(t.matrix()).unwrap());
        assert_eq!(sp.act_matrix(&t, &a).unwrap(), b);
        assert!(matches!(
            sp.transitivity_witness(&a, &sub(&sp, &[0, 1])),
            Err(SymplecticError::TypeMismatch(..))
        ));
    }

    #[test]
    fn act_matrix_examples() {
        let sp = space(3, 1, 2);
        let p = sub(&sp, &[0, 1]);
        assert_eq!(sp.act_matrix(&sp.identity(), &p).unwrap(), p);
        let minus = sp.negate(&sp.identity());
        assert_eq!(sp.act_matrix(&minus, &p).unwrap(), p);
        let sp2 = space(2, 1, 2);
        let p2 = sub(&sp2, &[0, 1]);
        for t in sp2.transvections() {
            let img = sp2.act_matrix(&t, &p2).unwrap();
            assert_eq!(sp2.type_of(&img).unwrap(), SympType::new(2, 0));
        }
    }

    #[test]
    fn act_field_aut_examples() {
        let sp = space(2, 2, 2);
        let f = sp.field();
        let p = Subspace::from_rows(f, 4, &[el(&[1, 2, 0, 0])]).unwrap();
        let frob = f.list_auts()[1];
        assert_eq!(sp.act_field_aut(FieldAut::IDENTITY, &p), p);
        let img = sp.act_field_aut(frob, &p);
        assert_eq!(img, Subspace::from_rows(f, 4, &[el(&[1, 3, 0, 0])]).unwrap());
        let prime = space(3, 1, 2);
        let q = Subspace::from_rows(prime.field(), 4, &[el(&[1, 2, 0, 1])]).unwrap();
        for pi in prime.field().list_auts() {
            assert_eq!(prime.act_field_aut(pi, &q), q);
        }
    }

    #[test]
    fn act_descriptor_examples() {
        let sp = space(3, 1, 2);
        let p = Subspace::from_rows(sp.field(), 4, &[el(&[1, 2, 0, 1])]).unwrap();
        assert_eq!(sp.act_descriptor(&AutDescriptor::identity(2), &p).unwrap(), p);
        let d = AutDescriptor::scaling(el(&[2, 1]), FieldAut::IDENTITY);
        let diag = sp.hyperbolic_diagonal(&d.k).unwrap();
        assert_eq!(sp.act_descriptor(&d, &p).unwrap(), sp.act_matrix(&diag, &p).unwrap());
        let e1 = sub(&sp, &[0]);
        assert_eq!(sp.act_descriptor(&d, &e1).unwrap(), e1);
        let bad = AutDescriptor::scaling(el(&[0, 1]), FieldAut::IDENTITY);
        assert_eq!(sp.act_descriptor(&bad, &p), Err(SymplecticError::ZeroScalar));
    }

    #[test]
    fn descriptor_composition_law_exhaustive_gf4() {
        for nu in 1..=2 {
            let sp = space(2, 2, nu);
            let ds = sp.scaling_descriptors();
            let f = sp.field();
            let probes: Vec<Subspace> = (0..sp.dim())
                .map(|i| sub(&sp, &[i]))
                .chain([
                    Subspace::from_rows(f, sp.dim(), &[vec![FieldElem(1); sp.dim()]]).unwrap(),
                    Subspace::from_rows(f, sp.dim(), &[{
                        let mut v = vec![FieldElem(2); sp.dim()];
                        v[0] = FieldElem(1);
                        v
                    }])
                    .unwrap(),
                ])
                .collect();
            for d1 in &ds {
                for d2 in &ds {
                    let d = sp.compose_descriptors(d1, d2).unwrap();
                    for p in &probes {
                        let lhs = sp.act_descriptor(&d, p).unwrap();
                        let rhs = sp.act_descriptor(d1, &sp.act_descriptor(d2, p).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn descriptor_composition_with_matrix_parts() {
        let sp = space(2, 2, 2);
        let f = sp.field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frob = f.list_auts()[1];
        for _ in 0..20 {
            let d1 = AutDescriptor { t: Some(sp.random_symplectic(&mut rng, 6)), k: el(&[2, 3]), pi: frob };
            let d2 = AutDescriptor { t: Some(sp.random_symplectic(&mut rng, 6)), k: el(&[3, 1]), pi: frob };
            let d = sp.compose_descriptors(&d1, &d2).unwrap();
            let p = Subspace::from_rows(f, 4, &[el(&[1, 2, 3, 0]), el(&[0, 1, 1, 2])]).unwrap();
            assert_eq!(
                sp.act_descriptor(&d, &p).unwrap(),
                sp.act_descriptor(&d1, &sp.act_descriptor(&d2, &p).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn descriptor_json_round_trip() {
        let sp = space(3, 1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = AutDescriptor { t: Some(sp.random_symplectic(&mut rng, 4)), k: el(&[2, 1]), pi: FieldAut::IDENTITY };
        let json = d.to_json();
        assert!(json.get("T").is_some());
        assert_eq!(AutDescriptor::from_json(&sp, &json).unwrap(), d);
        let plain = AutDescriptor::identity(2).to_json();
        assert_eq!(plain, serde_json::json!({"k": [1, 1], "pi": 0}));
        let bad = serde_json::json!({"k": [1, 1], "pi": 0, "T": "2,0,0,0;0,1,0,0;0,0,1,0;0,0,0,1"});
        assert_eq!(AutDescriptor::from_json(&sp, &bad), Err(SymplecticError::NotSymplectic));
    }

    #[test]
    fn standard_subspace_types() {
        let sp = space(3, 1, 3);
        for m in 1..6 {
            for s in 0..=m / 2 {
                let ty = SympType::new(m, s);
                if m - s > 3 {
                    assert!(sp.standard_subspace(ty).is_err());
                    continue;
                }
                assert_eq!(sp.type_of(&sp.standard_subspace(ty).unwrap()).unwrap(), ty);
            }
        }
    }
}
