//! Commutative Frobenius algebras given by explicit structure constants,
//! with the duality-derived coproduct and counit.
//!
//! An algebra is loaded from a small JSON description, every axiom is
//! verified exactly at load time, and the derived data (pairing matrix,
//! its inverse, the coproduct on basis elements) is cached.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{Field, PrimeField, Rationals, ScalarParseError};
use crate::linalg::{self, normalize_vec, Mat, SparseVec};

/// Element of `A^{⊗m}` as a finitely supported map on basis multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor<F: Field> {
    pub arity: usize,
    /// multi-index (length `arity`, 0-based basis indices) -> coefficient
    pub terms: BTreeMap<Vec<usize>, F::Elem>,
}

impl<F: Field> Tensor<F> {
    pub fn zero(arity: usize) -> Self {
        Tensor { arity, terms: BTreeMap::new() }
    }

    pub fn monomial(field: &F, indices: Vec<usize>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(indices.clone(), field.one());
        Tensor { arity: indices.len(), terms }
    }

    pub fn basis_element(field: &F, i: usize) -> Self {
        Tensor::monomial(field, vec![i])
    }

    pub fn add_term(&mut self, field: &F, idx: Vec<usize>, c: F::Elem) {
        debug_assert_eq!(idx.len(), self.arity);
        let entry = self.terms.entry(idx);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = field.add(e.get(), &c);
                if field.is_zero(&v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                if !field.is_zero(&c) {
                    e.insert(c);
                }
            }
        }
    }

    pub fn add(&self, field: &F, other: &Tensor<F>) -> Tensor<F> {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(field, k.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Tensor<F> {
        let mut out = Tensor::zero(self.arity);
        for (k, v) in &self.terms {
            out.add_term(field, k.clone(), field.mul(v, c));
        }
        out
    }

    /// Tensor product, concatenating multi-indices.
    pub fn tensor(&self, field: &F, other: &Tensor<F>) -> Tensor<F> {
        let mut out = Tensor::zero(self.arity + other.arity);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                let mut k = k1.clone();
                k.extend_from_slice(k2);
                out.add_term(field, k, field.mul(v1, v2));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Reasons an algebra description is rejected, with the first witness found.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraError {
    NotCommutative { i: usize, j: usize },
    NotAssociative { i: usize, j: usize, k: usize },
    NoUnit { i: usize },
    /// The pairing `ε(ab)` is singular; carries a kernel vector (rendered).
    DegeneratePairing { witness: String },
    Parse(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::NotCommutative { i, j } => {
                write!(f, "NotCommutative: e{i}*e{j} != e{j}*e{i}")
            }
            AlgebraError::NotAssociative { i, j, k } => {
                write!(f, "NotAssociative: (e{i}*e{j})*e{k} != e{i}*(e{j}*e{k})")
            }
            AlgebraError::NoUnit { i } => write!(f, "NoUnit: unit*e{i} != e{i}"),
            AlgebraError::DegeneratePairing { witness } => {
                write!(f, "DegeneratePairing: kernel vector {witness}")
            }
            AlgebraError::Parse(msg) => write!(f, "Parse: {msg}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

impl From<ScalarParseError> for AlgebraError {
    fn from(e: ScalarParseError) -> Self {
        AlgebraError::Parse(e.to_string())
    }
}

/// A finite-dimensional commutative Frobenius algebra over an exact field.
///
/// `mul[i][j]` is the expansion of `e_i * e_j` in the basis. The linear
/// functional `aug` plays the role of the nondegenerate trace; it is taken
/// verbatim from the input and never rescaled.
#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra<F: Field> {
    pub field: F,
    pub basis: Vec<String>,
    pub unit: Vec<F::Elem>,
    mul: Vec<Vec<SparseVec<F>>>,
    pub aug: Vec<F::Elem>,
    /// pairing[i][j] = aug(e_i e_j)
    pairing_mat: Vec<Vec<F::Elem>>,
    pairing_inv: Vec<Vec<F::Elem>>,
    /// coproduct of each basis element, cached
    coproduct_basis: Vec<Tensor<F>>,
}

impl<F: Field> FrobeniusAlgebra<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Build and validate from raw structure constants.
    ///
    /// `mul_entries` holds `(i, j, k, c)` meaning `e_i e_j` contains `c e_k`.
    pub fn new(
        field: F,
        basis: Vec<String>,
        unit: Vec<F::Elem>,
        mul_entries: Vec<(usize, usize, usize, F::Elem)>,
        aug: Vec<F::Elem>,
    ) -> Result<Self, AlgebraError> {
        let dim = basis.len();
        if unit.len() != dim || aug.len() != dim {
            return Err(AlgebraError::Parse(format!(
                "basis has {dim} elements but unit has {} and aug has {}",
                unit.len(),
                aug.len()
            )));
        }
        let mut mul = vec![vec![Vec::new(); dim]; dim];
        for (i, j, k, c) in mul_entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(AlgebraError::Parse(format!("mul entry ({i},{j},{k}) out of range")));
            }
            mul[i][j].push((k, c));
        }
        for row in mul.iter_mut() {
            for cell in row.iter_mut() {
                *cell = normalize_vec(&field, std::mem::take(cell));
            }
        }

        let alg = FrobeniusAlgebra {
            field,
            basis,
            unit,
            mul,
            aug,
            pairing_mat: Vec::new(),
            pairing_inv: Vec::new(),
            coproduct_basis: Vec::new(),
        };
        alg.validate()
    }

    fn validate(mut self) -> Result<Self, AlgebraError> {
        let f = self.field.clone();
        let dim = self.dim();
        // commutativity
        for i in 0..dim {
            for j in i + 1..dim {
                if self.mul[i][j] != self.mul[j][i] {
                    return Err(AlgebraError::NotCommutative { i, j });
                }
            }
        }
        // associativity on basis triples
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let left = self.mul_vec(&self.mul[i][j].clone(), &[(k, f.one())]);
                    let right = self.mul_vec(&[(i, f.one())], &self.mul[j][k].clone());
                    if left != right {
                        return Err(AlgebraError::NotAssociative { i, j, k });
                    }
                }
            }
        }
        // unit law
        let unit_vec: SparseVec<F> = normalize_vec(
            &f,
            self.unit.iter().enumerate().map(|(i, c)| (i, c.clone())).collect(),
        );
        for i in 0..dim {
            let prod = self.mul_vec(&unit_vec, &[(i, f.one())]);
            if prod != vec![(i, f.one())] {
                return Err(AlgebraError::NoUnit { i });
            }
        }
        // pairing and its inverse
        let mut g = vec![vec![f.zero(); dim]; dim];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let prod = self.mul[i][j].clone();
                let mut acc = f.zero();
                for (k, c) in &prod {
                    acc = f.add(&acc, &f.mul(c, &self.aug[*k]));
                }
                *entry = acc;
            }
        }
        let gm = Mat::from_triplets(
            &f,
            dim,
            dim,
            g.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| (i, j, c.clone())))
                .collect(),
        );
        let ker = linalg::kernel_basis(&f, &gm);
        if let Some(v) = ker.first() {
            let witness = v
                .iter()
                .map(|(i, c)| format!("{}*{}", f.render(c), self.basis[*i]))
                .collect::<Vec<_>>()
                .join(" + ");
            return Err(AlgebraError::DegeneratePairing { witness });
        }
        let ginv = invert_dense(&f, &g).expect("nonsingular after kernel check");

        // coproduct: psi(e_i) = sum_j (e_i e_j) ⊗ e^j with e^j the dual basis
        let mut coproduct_basis = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut t = Tensor::zero(2);
            for j in 0..dim {
                let prod = self.mul[i][j].clone();
                for (k, c) in &prod {
                    for (l, gjl) in ginv[j].iter().enumerate() {
                        let coeff = f.mul(c, gjl);
                        t.add_term(&f, vec![*k, l], coeff);
                    }
                }
            }
            coproduct_basis.push(t);
        }

        self.pairing_mat = g;
        self.pairing_inv = ginv;
        self.coproduct_basis = coproduct_basis;
        Ok(self)
    }

    /// Product of two coordinate vectors.
    fn mul_vec(&self, a: &[(usize, F::Elem)], b: &[(usize, F::Elem)]) -> SparseVec<F> {
        let f = &self.field;
        let mut acc: Vec<(usize, F::Elem)> = Vec::new();
        for (i, ca) in a {
            for (j, cb) in b {
                for (k, c) in &self.mul[*i][*j] {
                    acc.push((*k, f.mul(&f.mul(ca, cb), c)));
                }
            }
        }
        normalize_vec(f, acc)
    }

    /// Expansion of `e_i e_j` in the basis.
    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec<F> {
        &self.mul[i][j]
    }

    /// Product of two arity-1 tensors.
    pub fn multiply(&self, a: &Tensor<F>, b: &Tensor<F>) -> Tensor<F> {
        assert_eq!(a.arity, 1);
        assert_eq!(b.arity, 1);
        let f = &self.field;
        let mut out = Tensor::zero(1);
        for (ka, va) in &a.terms {
            for (kb, vb) in &b.terms {
                for (k, c) in &self.mul[ka[0]][kb[0]] {
                    out.add_term(f, vec![*k], f.mul(&f.mul(va, vb), c));
                }
            }
        }
        out
    }

    /// `⟨a, b⟩ = aug(ab)`.
    pub fn pairing(&self, a: &Tensor<F>, b: &Tensor<F>) -> F::Elem {
        let f = &self.field;
        let prod = self.multiply(a, b);
        let mut acc = f.zero();
        for (k, c) in &prod.terms {
            acc = f.add(&acc, &f.mul(c, &self.aug[k[0]]));
        }
        acc
    }

    pub fn pairing_matrix(&self) -> &Vec<Vec<F::Elem>> {
        &self.pairing_mat
    }

    /// The duality coproduct `psi(a)` as an arity-2 tensor.
    pub fn coproduct(&self, a: &Tensor<F>) -> Tensor<F> {
        assert_eq!(a.arity, 1);
        let f = &self.field;
        let mut out = Tensor::zero(2);
        for (k, v) in &a.terms {
            out = out.add(f, &self.coproduct_basis[k[0]].scale(f, v));
        }
        out
    }

    /// Coproduct of a basis element, cached.
    pub fn coproduct_basis(&self, i: usize) -> &Tensor<F> {
        &self.coproduct_basis[i]
    }

    /// The counit `ε̂` of the coproduct; equals the augmentation.
    pub fn counit(&self, a: &Tensor<F>) -> F::Elem {
        assert_eq!(a.arity, 1);
        let f = &self.field;
        let mut acc = f.zero();
        for (k, c) in &a.terms {
            acc = f.add(&acc, &f.mul(c, &self.aug[k[0]]));
        }
        acc
    }

    /// The unit element as an arity-1 tensor.
    pub fn unit_tensor(&self) -> Tensor<F> {
        let f = &self.field;
        let mut t = Tensor::zero(1);
        for (i, c) in self.unit.iter().enumerate() {
            t.add_term(f, vec![i], c.clone());
        }
        t
    }

    pub fn render_tensor(&self, t: &Tensor<F>) -> String {
        if t.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        t.terms
            .iter()
            .map(|(k, c)| {
                let mono = k.iter().map(|i| self.basis[*i].clone()).collect::<Vec<_>>().join("⊗");
                if f.is_one(c) {
                    mono
                } else {
                    format!("{}·{}", f.render(c), mono)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Dense matrix inverse by full elimination; `None` when singular.
fn invert_dense<F: Field>(field: &F, g: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let n = g.len();
    let mut a: Vec<Vec<F::Elem>> = g.to_vec();
    let mut inv: Vec<Vec<F::Elem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !field.is_zero(&a[r][col]))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let inv_p = field.inv(&a[col][col]).unwrap();
        for j in 0..n {
            a[col][j] = field.mul(&a[col][j], &inv_p);
            inv[col][j] = field.mul(&inv[col][j], &inv_p);
        }
        for r in 0..n {
            if r == col || field.is_zero(&a[r][col]) {
                continue;
            }
            let c = a[r][col].clone();
            for j in 0..n {
                let s = field.mul(&c, &a[col][j]);
                a[r][j] = field.sub(&a[r][j], &s);
                let s = field.mul(&c, &inv[col][j]);
                inv[r][j] = field.sub(&inv[r][j], &s);
            }
        }
    }
    Some(inv)
}

// --- serialization ---------------------------------------------------------

/// Field selector as written in algebra files: `"Q"` or `{"prime": p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Prime { prime: u64 },
}

/// Scalars in files may be written as JSON numbers or exact strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Int(i64),
    Str(String),
}

impl ScalarSpec {
    pub fn to_elem<F: Field>(&self, field: &F) -> Result<F::Elem, ScalarParseError> {
        match self {
            ScalarSpec::Int(n) => Ok(field.from_i64(*n)),
            ScalarSpec::Str(s) => field.parse(s),
        }
    }
}

/// One structure constant entry `[i, j, k, c]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MulEntry(pub usize, pub usize, pub usize, pub ScalarSpec);

/// On-disk description of an algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub field: FieldSpec,
    pub basis: Vec<String>,
    pub unit: Vec<ScalarSpec>,
    pub mul: Vec<MulEntry>,
    pub aug: Vec<ScalarSpec>,
}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        serde_json::from_str(text).map_err(|e| AlgebraError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Instantiate over an explicit field context (ignoring the declared one).
    pub fn build<F: Field>(&self, field: F) -> Result<FrobeniusAlgebra<F>, AlgebraError> {
        let unit = self.unit.iter().map(|s| s.to_elem(&field)).collect::<Result<Vec<_>, _>>()?;
        let aug = self.aug.iter().map(|s| s.to_elem(&field)).collect::<Result<Vec<_>, _>>()?;
        let mul = self
            .mul
            .iter()
            .map(|MulEntry(i, j, k, c)| Ok((*i, *j, *k, c.to_elem(&field)?)))
            .collect::<Result<Vec<_>, ScalarParseError>>()?;
        FrobeniusAlgebra::new(field, self.basis.clone(), unit, mul, aug)
    }
}

/// The field an algebra file declares, parsed into a context.
pub enum AnyField {
    Q(Rationals),
    P(PrimeField),
}

pub fn parse_field_spec(spec: &FieldSpec) -> Result<AnyField, AlgebraError> {
    match spec {
        FieldSpec::Named(s) if s == "Q" || s == "q" => Ok(AnyField::Q(Rationals)),
        FieldSpec::Named(s) => Err(AlgebraError::Parse(format!("unknown field {s:?}"))),
        FieldSpec::Prime { prime } => {
            PrimeField::new(*prime).map(AnyField::P).map_err(|e| AlgebraError::Parse(e.to_string()))
        }
    }
}

/// Serialize an algebra back to its file form (rationals only renders exact).
pub fn serialize_algebra<F: Field>(alg: &FrobeniusAlgebra<F>, field_spec: FieldSpec) -> AlgebraSpec {
    let f = &alg.field;
    let mut mul = Vec::new();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            for (k, c) in alg.mul_basis(i, j) {
                mul.push(MulEntry(i, j, *k, ScalarSpec::Str(f.render(c))));
            }
        }
    }
    AlgebraSpec {
        field: field_spec,
        basis: alg.basis.clone(),
        unit: alg.unit.iter().map(|c| ScalarSpec::Str(f.render(c))).collect(),
        mul,
        aug: alg.aug.iter().map(|c| ScalarSpec::Str(f.render(c))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn kx2() -> FrobeniusAlgebra<Rationals> {
        AlgebraSpec::from_json(fixtures::KX2).unwrap().build(Rationals).unwrap()
    }

    fn kt2() -> FrobeniusAlgebra<Rationals> {
        AlgebraSpec::from_json(fixtures::KT2).unwrap().build(Rationals).unwrap()
    }

    fn kx3() -> FrobeniusAlgebra<Rationals> {
        AlgebraSpec::from_json(fixtures::KX3).unwrap().build(Rationals).unwrap()
    }

    #[test]
    fn kx2_loads_with_expected_pairing() {
        let a = kx2();
        let f = &a.field;
        let g = a.pairing_matrix();
        assert!(f.is_zero(&g[0][0]));
        assert!(f.is_one(&g[0][1]));
        assert!(f.is_one(&g[1][0]));
        assert!(f.is_zero(&g[1][1]));
    }

    #[test]
    fn kt2_loads_with_expected_pairing() {
        let a = kt2();
        let f = &a.field;
        let g = a.pairing_matrix();
        // t^2 = 1 so <t,t> = aug(1) = 0, <1,t> = aug(t) = 1
        assert!(f.is_zero(&g[0][0]));
        assert!(f.is_one(&g[0][1]));
        assert!(f.is_zero(&g[1][1]));
    }

    #[test]
    fn degenerate_pairing_rejected() {
        // k[x]/(x^2) with aug(1)=1, aug(x)=0 has <x,-> = 0
        let spec = AlgebraSpec {
            field: FieldSpec::Named("Q".into()),
            basis: vec!["1".into(), "x".into()],
            unit: vec![ScalarSpec::Int(1), ScalarSpec::Int(0)],
            mul: vec![
                MulEntry(0, 0, 0, ScalarSpec::Int(1)),
                MulEntry(0, 1, 1, ScalarSpec::Int(1)),
                MulEntry(1, 0, 1, ScalarSpec::Int(1)),
            ],
            aug: vec![ScalarSpec::Int(1), ScalarSpec::Int(0)],
        };
        match spec.build(Rationals) {
            Err(AlgebraError::DegeneratePairing { .. }) => {}
            other => panic!("expected DegeneratePairing, got {other:?}"),
        }
    }

    #[test]
    fn non_associative_rejected_with_witness() {
        // corrupt kx3: set x*x2 = x, so (x*x)*x2 = 0 but x*(x*x2) = x2
        let spec = AlgebraSpec {
            field: FieldSpec::Named("Q".into()),
            basis: vec!["1".into(), "x".into(), "x2".into()],
            unit: vec![ScalarSpec::Int(1), ScalarSpec::Int(0), ScalarSpec::Int(0)],
            mul: vec![
                MulEntry(0, 0, 0, ScalarSpec::Int(1)),
                MulEntry(0, 1, 1, ScalarSpec::Int(1)),
                MulEntry(0, 2, 2, ScalarSpec::Int(1)),
                MulEntry(1, 0, 1, ScalarSpec::Int(1)),
                MulEntry(2, 0, 2, ScalarSpec::Int(1)),
                MulEntry(1, 1, 2, ScalarSpec::Int(1)),
                MulEntry(1, 2, 1, ScalarSpec::Int(1)),
                MulEntry(2, 1, 1, ScalarSpec::Int(1)),
            ],
            aug: vec![ScalarSpec::Int(0), ScalarSpec::Int(0), ScalarSpec::Int(1)],
        };
        match spec.build(Rationals) {
            Err(AlgebraError::NotAssociative { .. }) => {}
            other => panic!("expected NotAssociative, got {other:?}"),
        }
    }

    #[test]
    fn kx2_coproduct_matches_duality_solution() {
        let a = kx2();
        let f = a.field;
        // psi(1) = 1⊗x + x⊗1, psi(x) = x⊗x
        let one = Tensor::basis_element(&f, 0);
        let x = Tensor::basis_element(&f, 1);
        let psi1 = a.coproduct(&one);
        let mut expected = Tensor::zero(2);
        expected.add_term(&f, vec![0, 1], f.one());
        expected.add_term(&f, vec![1, 0], f.one());
        assert_eq!(psi1, expected);
        let psix = a.coproduct(&x);
        assert_eq!(psix, Tensor::monomial(&f, vec![1, 1]));
    }

    #[test]
    fn coproduct_duality_equation_all_basis_pairs() {
        // <psi(a), b⊗c> = <a, bc> for all basis a,b,c, on all fixtures
        for alg in [kx2(), kt2(), kx3()] {
            let f = alg.field.clone();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    for c in 0..alg.dim() {
                        let ta = Tensor::basis_element(&f, a);
                        let tb = Tensor::basis_element(&f, b);
                        let tc = Tensor::basis_element(&f, c);
                        let bc = alg.multiply(&tb, &tc);
                        let rhs = alg.pairing(&ta, &bc);
                        let psi = alg.coproduct(&ta);
                        let mut lhs = f.zero();
                        for (k, v) in &psi.terms {
                            let p1 = alg.pairing(&Tensor::basis_element(&f, k[0]), &tb);
                            let p2 = alg.pairing(&Tensor::basis_element(&f, k[1]), &tc);
                            lhs = f.add(&lhs, &f.mul(v, &f.mul(&p1, &p2)));
                        }
                        assert_eq!(lhs, rhs, "duality fails at ({a},{b},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn coproduct_counit_coassociativity_cocommutativity() {
        for alg in [kx2(), kt2(), kx3()] {
            let f = alg.field.clone();
            for i in 0..alg.dim() {
                let e = Tensor::basis_element(&f, i);
                let psi = alg.coproduct(&e);
                // (counit ⊗ id) psi = id and (id ⊗ counit) psi = id
                let mut left = Tensor::zero(1);
                let mut right = Tensor::zero(1);
                let mut swapped = Tensor::zero(2);
                for (k, v) in &psi.terms {
                    left.add_term(&f, vec![k[1]], f.mul(v, &alg.aug[k[0]]));
                    right.add_term(&f, vec![k[0]], f.mul(v, &alg.aug[k[1]]));
                    swapped.add_term(&f, vec![k[1], k[0]], v.clone());
                }
                assert_eq!(left, e, "counit left fails at {i}");
                assert_eq!(right, e, "counit right fails at {i}");
                assert_eq!(swapped, psi, "cocommutativity fails at {i}");
                // coassociativity: (psi ⊗ id) psi = (id ⊗ psi) psi
                let mut l3 = Tensor::zero(3);
                let mut r3 = Tensor::zero(3);
                for (k, v) in &psi.terms {
                    for (k2, v2) in &alg.coproduct_basis(k[0]).terms {
                        l3.add_term(&f, vec![k2[0], k2[1], k[1]], f.mul(v, v2));
                    }
                    for (k2, v2) in &alg.coproduct_basis(k[1]).terms {
                        r3.add_term(&f, vec![k[0], k2[0], k2[1]], f.mul(v, v2));
                    }
                }
                assert_eq!(l3, r3, "coassociativity fails at {i}");
            }
        }
    }

    #[test]
    fn frobenius_compatibility() {
        // (mu ⊗ id)(id ⊗ psi) = psi mu = (id ⊗ mu)(psi ⊗ id) on basis pairs
        for alg in [kx2(), kt2(), kx3()] {
            let f = alg.field.clone();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    let ta = Tensor::basis_element(&f, a);
                    let tb = Tensor::basis_element(&f, b);
                    let psi_mu = alg.coproduct(&alg.multiply(&ta, &tb));
                    let mut left = Tensor::zero(2);
                    for (k, v) in alg.coproduct_basis(b).terms.iter() {
                        let prod = alg.multiply(&ta, &Tensor::basis_element(&f, k[0]));
                        for (kp, vp) in &prod.terms {
                            left.add_term(&f, vec![kp[0], k[1]], f.mul(v, vp));
                        }
                    }
                    let mut right = Tensor::zero(2);
                    for (k, v) in alg.coproduct_basis(a).terms.iter() {
                        let prod = alg.multiply(&Tensor::basis_element(&f, k[1]), &tb);
                        for (kp, vp) in &prod.terms {
                            right.add_term(&f, vec![k[0], kp[0]], f.mul(v, vp));
                        }
                    }
                    assert_eq!(left, psi_mu, "left Frobenius fails at ({a},{b})");
                    assert_eq!(right, psi_mu, "right Frobenius fails at ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn dual_basis_roundtrip() {
        for alg in [kx2(), kt2(), kx3()] {
            let f = alg.field.clone();
            let ginv = &alg.pairing_inv;
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    // e^i = sum_k ginv[i][k] e_k; pairing(e^i, e_j) = delta_ij
                    let mut dual = Tensor::zero(1);
                    for (k, c) in ginv[i].iter().enumerate() {
                        dual.add_term(&f, vec![k], c.clone());
                    }
                    let p = alg.pairing(&dual, &Tensor::basis_element(&f, j));
                    if i == j {
                        assert!(f.is_one(&p));
                    } else {
                        assert!(f.is_zero(&p));
                    }
                }
            }
        }
    }

    #[test]
    fn serialize_load_roundtrip() {
        let a = kx2();
        let spec = serialize_algebra(&a, FieldSpec::Named("Q".into()));
        let b = spec.build(Rationals).unwrap();
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.unit, b.unit);
        assert_eq!(a.aug, b.aug);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_eq!(a.mul_basis(i, j), b.mul_basis(i, j));
            }
        }
    }

    #[test]
    fn multiplication_examples() {
        let a = kx2();
        let f = a.field;
        let one = Tensor::basis_element(&f, 0);
        let x = Tensor::basis_element(&f, 1);
        assert_eq!(a.multiply(&one, &x), x);
        assert!(a.multiply(&x, &x).is_zero());
        let t2 = kt2();
        let t = Tensor::basis_element(&t2.field, 1);
        let tt = t2.multiply(&t, &t);
        assert_eq!(tt, Tensor::basis_element(&t2.field, 0));
        // pairing examples
        assert!(a.field.is_one(&a.pairing(&one, &x)));
        assert!(a.field.is_zero(&a.pairing(&one, &one)));
    }

    #[test]
    fn fp_field_build() {
        let f7 = PrimeField::new(7).unwrap();
        let alg = AlgebraSpec::from_json(fixtures::KX3).unwrap().build(f7).unwrap();
        assert_eq!(alg.dim(), 3);
    }
}
