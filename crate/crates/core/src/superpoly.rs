//! The polynomial superalgebra in one even variable x and one odd variable ξ
//! (ξ² = 0), together with its derivations and the contact-field
//! correspondence F ↔ X_F.
//!
//! An element is stored as f₀(x) + ξ·f₁(x) with dense coefficient lists. The
//! odd derivative is the left derivative: ∂ξ(f₀ + ξf₁) = f₁.

use crate::field::{Field, FieldValue};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;

/// f₀(x) + ξ·f₁(x); coefficient lists are trimmed of trailing zeros.
#[derive(Clone, PartialEq)]
pub struct SuperPoly<F: Field> {
    even: Vec<F>,
    odd: Vec<F>,
}

fn trim<F: Field>(v: &mut Vec<F>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

impl<F: Field> SuperPoly<F> {
    pub fn new(mut even: Vec<F>, mut odd: Vec<F>) -> Self {
        trim(&mut even);
        trim(&mut odd);
        SuperPoly { even, odd }
    }

    pub fn zero() -> Self {
        SuperPoly {
            even: vec![],
            odd: vec![],
        }
    }

    pub fn one() -> Self {
        SuperPoly::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        SuperPoly::new(vec![c], vec![])
    }

    /// x^a·ξ^η.
    pub fn monomial(a: usize, eta: u8) -> Self {
        let mut v = vec![F::zero(); a + 1];
        v[a] = F::one();
        match eta {
            0 => SuperPoly::new(v, vec![]),
            1 => SuperPoly::new(vec![], v),
            _ => panic!("ξ-degree must be 0 or 1"),
        }
    }

    /// c·x^a·ξ^η.
    pub fn scaled_monomial(c: F, a: usize, eta: u8) -> Self {
        let mut v = vec![F::zero(); a + 1];
        v[a] = c;
        match eta {
            0 => SuperPoly::new(v, vec![]),
            1 => SuperPoly::new(vec![], v),
            _ => panic!("ξ-degree must be 0 or 1"),
        }
    }

    pub fn x() -> Self {
        SuperPoly::monomial(1, 0)
    }

    pub fn xi() -> Self {
        SuperPoly::monomial(0, 1)
    }

    pub fn even_coeffs(&self) -> &[F] {
        &self.even
    }

    pub fn odd_coeffs(&self) -> &[F] {
        &self.odd
    }

    /// Coefficient of x^a·ξ^η (zero when out of range).
    pub fn coeff(&self, a: usize, eta: u8) -> F {
        let part = if eta == 0 { &self.even } else { &self.odd };
        part.get(a).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    /// Parity-homogeneous iff at most one part is nonzero.
    pub fn homogeneous_parity(&self) -> Option<u8> {
        match (self.even.is_empty(), self.odd.is_empty()) {
            (true, true) => Some(0),
            (false, true) => Some(0),
            (true, false) => Some(1),
            (false, false) => None,
        }
    }

    /// The part of the given parity (0: f₀, 1: ξf₁).
    pub fn parity_part(&self, parity: u8) -> Self {
        if parity == 0 {
            SuperPoly::new(self.even.clone(), vec![])
        } else {
            SuperPoly::new(vec![], self.odd.clone())
        }
    }

    /// Parity endomorphism: f₀ + ξf₁ ↦ f₀ − ξf₁.
    pub fn eps(&self) -> Self {
        SuperPoly {
            even: self.even.clone(),
            odd: self.odd.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        SuperPoly::new(
            add_vecs(&self.even, &rhs.even),
            add_vecs(&self.odd, &rhs.odd),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        SuperPoly {
            even: self.even.iter().map(|c| c.neg()).collect(),
            odd: self.odd.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        SuperPoly::new(
            self.even.iter().map(|x| x.mul(c)).collect(),
            self.odd.iter().map(|x| x.mul(c)).collect(),
        )
    }

    /// Superalgebra product: (f₀ + ξf₁)(g₀ + ξg₁) = f₀g₀ + ξ(f₀g₁ + f₁g₀).
    pub fn mul(&self, rhs: &Self) -> Self {
        let even = mul_vecs(&self.even, &rhs.even);
        let odd = add_vecs(
            &mul_vecs(&self.even, &rhs.odd),
            &mul_vecs(&self.odd, &rhs.even),
        );
        SuperPoly::new(even, odd)
    }

    pub fn dx(&self) -> Self {
        SuperPoly::new(dx_vec(&self.even), dx_vec(&self.odd))
    }

    /// Left odd derivative: ∂ξ(f₀ + ξf₁) = f₁.
    pub fn dxi(&self) -> Self {
        SuperPoly::new(self.odd.clone(), vec![])
    }

    /// D = ∂ξ + ξ∂x.
    pub fn d(&self) -> Self {
        SuperPoly::new(self.odd.clone(), dx_vec(&self.even))
    }

    /// D̄ = ∂ξ − ξ∂x.
    pub fn dbar(&self) -> Self {
        SuperPoly::new(self.odd.clone(), neg_vec(&dx_vec(&self.even)))
    }

    /// D̄ applied k times.
    pub fn dbar_pow(&self, k: usize) -> Self {
        let mut acc = self.clone();
        for _ in 0..k {
            acc = acc.dbar();
        }
        acc
    }

    /// All monomials (a, η, coefficient).
    pub fn terms(&self) -> Vec<(usize, u8, F)> {
        let mut out = Vec::new();
        for (a, c) in self.even.iter().enumerate() {
            if !c.is_zero() {
                out.push((a, 0u8, c.clone()));
            }
        }
        for (a, c) in self.odd.iter().enumerate() {
            if !c.is_zero() {
                out.push((a, 1u8, c.clone()));
            }
        }
        out
    }

    /// Map coefficients into another field.
    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> SuperPoly<G> {
        SuperPoly::new(
            self.even.iter().map(&f).collect(),
            self.odd.iter().map(&f).collect(),
        )
    }
}

fn add_vecs<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    for i in 0..a.len().max(b.len()) {
        let x = a.get(i).cloned().unwrap_or_else(F::zero);
        let y = b.get(i).cloned().unwrap_or_else(F::zero);
        out.push(x.add(&y));
    }
    out
}

fn neg_vec<F: Field>(a: &[F]) -> Vec<F> {
    a.iter().map(|c| c.neg()).collect()
}

fn mul_vecs<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn dx_vec<F: Field>(a: &[F]) -> Vec<F> {
    if a.len() <= 1 {
        return vec![];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&F::from_int(i as i64)))
        .collect()
}

impl<F: Field> fmt::Debug for SuperPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, eta, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            if eta == 1 {
                write!(f, "*xi")?;
            }
            if a == 1 {
                write!(f, "*x")?;
            } else if a > 1 {
                write!(f, "*x^{a}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for SuperPoly<FieldValue> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            even: &'a [FieldValue],
            odd: &'a [FieldValue],
        }
        Repr {
            even: &self.even,
            odd: &self.odd,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperPoly<FieldValue> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            even: Vec<FieldValue>,
            odd: Vec<FieldValue>,
        }
        let r = Repr::deserialize(d)?;
        Ok(SuperPoly::new(r.even, r.odd))
    }
}

/// Polynomial vector field A·∂x + B·∂ξ.
#[derive(Clone, PartialEq, Debug)]
pub struct VectorField<F: Field> {
    pub coef_dx: SuperPoly<F>,
    pub coef_dxi: SuperPoly<F>,
}

/// Contact field X_F, stored by its generator.
#[derive(Clone, PartialEq, Debug)]
pub struct ContactField<F: Field> {
    pub generator: SuperPoly<F>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ContactError {
    #[error("vector field has a nonzero tangential component; not a contact field")]
    NotContact,
}

/// X_F = F∂x + ½D(F)D̄, expanded in the (∂x, ∂ξ) basis.
pub fn contact_of<F: Field>(generator: &SuperPoly<F>) -> VectorField<F> {
    let half = F::from_rational(&Rational::new(1, 2));
    let df = generator.d().scale(&half);
    // ½D(F)·D̄ = ½D(F)∂ξ − (½D(F)·ξ)∂x
    let xi = SuperPoly::xi();
    VectorField {
        coef_dx: generator.sub(&df.mul(&xi)),
        coef_dxi: df,
    }
}

impl<F: Field> VectorField<F> {
    pub fn zero() -> Self {
        VectorField {
            coef_dx: SuperPoly::zero(),
            coef_dxi: SuperPoly::zero(),
        }
    }

    pub fn apply(&self, p: &SuperPoly<F>) -> SuperPoly<F> {
        self.coef_dx.mul(&p.dx()).add(&self.coef_dxi.mul(&p.dxi()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        VectorField {
            coef_dx: self.coef_dx.add(&rhs.coef_dx),
            coef_dxi: self.coef_dxi.add(&rhs.coef_dxi),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        VectorField {
            coef_dx: self.coef_dx.sub(&rhs.coef_dx),
            coef_dxi: self.coef_dxi.sub(&rhs.coef_dxi),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        VectorField {
            coef_dx: self.coef_dx.scale(c),
            coef_dxi: self.coef_dxi.scale(c),
        }
    }

    /// Parity-homogeneous component (0 or 1). ∂x is even and ∂ξ odd, so the
    /// even part of the field pairs the even part of A with the odd part of B.
    pub fn parity_part(&self, parity: u8) -> Self {
        VectorField {
            coef_dx: self.coef_dx.parity_part(parity),
            coef_dxi: self.coef_dxi.parity_part(1 - parity),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coef_dx.is_zero() && self.coef_dxi.is_zero()
    }
}

/// Super bracket [V, W] = VW − (−1)^{|V||W|}WV of polynomial vector fields,
/// computed on parity-homogeneous components.
pub fn bracket<F: Field>(v: &VectorField<F>, w: &VectorField<F>) -> VectorField<F> {
    let mut out = VectorField::zero();
    for pv in 0..2u8 {
        for pw in 0..2u8 {
            let vv = v.parity_part(pv);
            let ww = w.parity_part(pw);
            if vv.is_zero() || ww.is_zero() {
                continue;
            }
            let mut term = VectorField {
                coef_dx: vv.apply(&ww.coef_dx),
                coef_dxi: vv.apply(&ww.coef_dxi),
            };
            let back = VectorField {
                coef_dx: ww.apply(&vv.coef_dx),
                coef_dxi: ww.apply(&vv.coef_dxi),
            };
            if pv * pw == 1 {
                term = term.add(&back);
            } else {
                term = term.sub(&back);
            }
            out = out.add(&term);
        }
    }
    out
}

/// Recover F from a vector field in the image of X: the ∂x-coefficient in the
/// (∂x, D̄) decomposition. Fails when the tangential component is nonzero.
pub fn inverse_x<F: Field>(v: &VectorField<F>) -> Result<SuperPoly<F>, ContactError> {
    // V = X_H + W·D̄ with H = A + B·ξ and W = B − ½D(H).
    let xi = SuperPoly::xi();
    let h = v.coef_dx.add(&v.coef_dxi.mul(&xi));
    if contact_of(&h) == *v {
        Ok(h)
    } else {
        Err(ContactError::NotContact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type SP = SuperPoly<FieldValue>;

    fn fv(n: i64) -> FieldValue {
        FieldValue::from(n)
    }

    #[test]
    fn xi_squared_vanishes() {
        let xi = SP::xi();
        assert!(xi.mul(&xi).is_zero());
    }

    #[test]
    fn product_examples() {
        let x = SP::x();
        let xi = SP::xi();
        assert_eq!(x.mul(&xi), SP::monomial(1, 1));
        let one_xi = SP::one().add(&xi);
        let sq = one_xi.mul(&one_xi);
        assert_eq!(sq, SP::one().add(&xi.scale(&fv(2))));
    }

    #[test]
    fn derivations() {
        // D̄(ξ) = 1
        assert_eq!(SP::xi().dbar(), SP::one());
        // D̄²(x²) = −2x
        let x2 = SP::monomial(2, 0);
        assert_eq!(x2.dbar().dbar(), SP::x().scale(&fv(-2)));
        // (DD̄ + D̄D)(ξx) = 0
        let f = SP::monomial(1, 1);
        assert!(f.dbar().d().add(&f.d().dbar()).is_zero());
    }

    #[test]
    fn d_squared_is_dx() {
        let f = SP::new(
            vec![fv(3), fv(0), fv(5)],
            vec![fv(1), fv(-2), fv(0), fv(7)],
        );
        assert_eq!(f.d().d(), f.dx());
        assert_eq!(f.dbar().dbar(), f.dx().neg());
    }

    #[test]
    fn contact_examples() {
        // X_1 = ∂x
        let v = contact_of(&SP::one());
        assert_eq!(v.coef_dx, SP::one());
        assert!(v.coef_dxi.is_zero());
        // X_ξ = ½D: coefficient of ∂ξ is ½, coefficient of ∂x is ½ξ
        let v = contact_of(&SP::xi());
        let half = FieldValue::from(Rational::new(1, 2));
        assert_eq!(v.coef_dxi, SP::constant(half.clone()));
        assert_eq!(v.coef_dx, SP::xi().scale(&half));
    }

    #[test]
    fn inverse_x_round_trip() {
        let f = SP::new(vec![fv(1), fv(0), fv(2)], vec![fv(0), fv(5)]);
        let v = contact_of(&f);
        assert_eq!(inverse_x(&v).unwrap(), f);
        // A pure tangential field is rejected: D̄ itself is ∂ξ − ξ∂x.
        let tan = VectorField {
            coef_dx: SP::xi().neg(),
            coef_dxi: SP::one(),
        };
        assert_eq!(inverse_x(&tan), Err(ContactError::NotContact));
    }

    #[test]
    fn bracket_closes_on_contact_fields() {
        // [X_F, X_G] stays in the image of X for a few generators.
        let gens = [
            SP::one(),
            SP::xi(),
            SP::x(),
            SP::monomial(1, 1),
            SP::monomial(2, 0),
            SP::monomial(2, 1),
            SP::monomial(3, 0),
        ];
        for f in &gens {
            for g in &gens {
                let b = bracket(&contact_of(f), &contact_of(g));
                inverse_x(&b).expect("contact bracket must be a contact field");
            }
        }
    }
}
