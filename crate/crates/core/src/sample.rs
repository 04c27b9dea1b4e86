//! Deterministic sample generators shared by the test suites, the verify
//! batteries and the CLI. Everything is seeded; reruns reproduce bit-exactly.

use crate::field::FieldValue;
use crate::modspec::{is_resonant, ModuleSpec};
use crate::psido::PsiSymbol;
use crate::rational::Rational;
use crate::superpoly::SuperPoly;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for sample `idx` of a seeded batch; the batch can be
/// evaluated in any order.
pub fn stream(seed: u64, idx: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(idx))
}

/// Random rational with |numerator| ≤ num_bound and 1 ≤ denominator ≤ den_bound.
pub fn rational(rng: &mut ChaCha8Rng, num_bound: i64, den_bound: i64) -> Rational {
    let n = rng.gen_range(-num_bound..=num_bound);
    let d = rng.gen_range(1..=den_bound);
    Rational::new(n, d)
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng, num_bound: i64, den_bound: i64) -> Rational {
    loop {
        let r = rational(rng, num_bound, den_bound);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random superpoly of x-degree ≤ max_deg with small integer coefficients.
pub fn superpoly(rng: &mut ChaCha8Rng, max_deg: usize) -> SuperPoly<FieldValue> {
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for _ in 0..=max_deg {
        even.push(FieldValue::from(rng.gen_range(-4i64..=4)));
        odd.push(FieldValue::from(rng.gen_range(-4i64..=4)));
    }
    SuperPoly::new(even, odd)
}

/// Random symbol with rational parameters; anchor order has denominator ≤ 3.
pub fn symbol(rng: &mut ChaCha8Rng, depth: usize, max_deg: usize, bound: i64) -> PsiSymbol<FieldValue> {
    let lambda = rational(rng, bound, 3);
    let mu = rational(rng, bound, 3);
    let order2 = rational(rng, bound, 3);
    let parity = rng.gen_range(0..2u8);
    let coeffs = (0..depth).map(|_| superpoly(rng, max_deg)).collect();
    PsiSymbol::new(
        FieldValue::from(lambda),
        FieldValue::from(mu),
        FieldValue::from(order2),
        parity,
        coeffs,
    )
}

/// Random symbol with integral anchor order (conjugation-compatible).
pub fn symbol_integral_order(rng: &mut ChaCha8Rng, depth: usize, max_deg: usize) -> PsiSymbol<FieldValue> {
    let s = symbol(rng, depth, max_deg, 3);
    let order2 = FieldValue::from(rng.gen_range(-3i64..=5));
    PsiSymbol::new(
        s.lambda().clone(),
        s.mu().clone(),
        order2,
        s.parity(),
        s.coeffs().to_vec(),
    )
}

/// Random genuine differential symbol: order2 = w ∈ [0, w_max], parity w mod 2,
/// depth w + 1 so every populated level has a non-negative exponent.
pub fn differential_symbol(rng: &mut ChaCha8Rng, w_max: i64, max_deg: usize) -> PsiSymbol<FieldValue> {
    let w = rng.gen_range(0..=w_max);
    let lambda = rational(rng, 4, 3);
    let mu = rational(rng, 4, 3);
    let coeffs = (0..=(w as usize)).map(|_| superpoly(rng, max_deg)).collect();
    PsiSymbol::new(
        FieldValue::from(lambda),
        FieldValue::from(mu),
        FieldValue::from(w),
        (w % 2) as u8,
        coeffs,
    )
}

/// Random non-resonant anchor for length l, denominator ≤ den_bound.
pub fn nonresonant_n(rng: &mut ChaCha8Rng, l: u32, num_bound: i64, den_bound: i64) -> Rational {
    loop {
        let n = rational(rng, num_bound, den_bound);
        if !is_resonant(&n, l) {
            return n;
        }
    }
}

/// Random (λ, μ) with the prescribed δ: λ + μ − 1/2 = t sampled nonzero by
/// default so γ ≠ 0.
pub fn lambda_mu_with_delta(
    rng: &mut ChaCha8Rng,
    delta: &Rational,
    allow_zero_gamma: bool,
) -> (Rational, Rational) {
    let t = if allow_zero_gamma {
        rational(rng, 6, 4)
    } else {
        nonzero_rational(rng, 6, 4)
    };
    lambda_mu_from_t_delta(&t, delta)
}

/// The (λ, μ) with λ + μ − 1/2 = t and μ − λ = δ.
pub fn lambda_mu_from_t_delta(t: &Rational, delta: &Rational) -> (Rational, Rational) {
    let half = Rational::new(1, 2);
    let s = t + &half; // λ + μ
    let lambda = (&s - delta) / &Rational::from(2);
    let mu = (&s + delta) / &Rational::from(2);
    (lambda, mu)
}

/// Random non-resonant spec of the given length and parity.
pub fn spec(rng: &mut ChaCha8Rng, l: u32, p: u8, lacunary: bool) -> ModuleSpec {
    loop {
        let n = nonresonant_n(rng, l, 5, 4);
        if lacunary && (n.is_zero() || n == Rational::new(1, 2)) {
            continue;
        }
        let delta = rational(rng, 5, 4);
        let (lambda, mu) = lambda_mu_with_delta(rng, &delta, true);
        let k = &delta - &n;
        if let Ok(s) = ModuleSpec::new(lambda, mu, k, p, l, lacunary) {
            return s;
        }
    }
}

/// A second spec with the same (n, l, lacunary) as `a`, random parity `p`.
pub fn partner_spec(rng: &mut ChaCha8Rng, a: &ModuleSpec, p: u8) -> ModuleSpec {
    loop {
        let delta = rational(rng, 5, 4);
        let (lambda, mu) = lambda_mu_with_delta(rng, &delta, true);
        let k = &delta - &a.n();
        if let Ok(s) = ModuleSpec::new(lambda, mu, k, p, a.l, a.lacunary) {
            return s;
        }
    }
}

/// Extraction sample for b^p_{m+r, m} with 2r = r2: window non-resonant, no
/// Casimir-eigenvalue collision inside the window, numerators/denominators
/// bounded by 20.
pub fn extraction_sample(rng: &mut ChaCha8Rng, r2: u8) -> (Rational, Rational, Rational) {
    let l = (r2 + 1) as u32;
    loop {
        let m = rational(rng, 20, 20);
        if is_resonant(&m, l) {
            continue;
        }
        if window_has_collision(&m, l) {
            continue;
        }
        let delta = rational(rng, 20, 20);
        let (lambda, mu) = lambda_mu_with_delta(rng, &delta, true);
        return (lambda, mu, m);
    }
}

/// A Casimir-eigenvalue collision inside the window: (m+i) + (m+j) = 1/2 for
/// distinct level offsets i, j < l/2.
pub fn window_has_collision(m: &Rational, l: u32) -> bool {
    let half = Rational::new(1, 2);
    for i2 in 0..l {
        for j2 in (i2 + 1)..l {
            let s = m + m + &Rational::new((i2 + j2) as i64, 2);
            if s == half {
                return true;
            }
        }
    }
    false
}
