//! Shared fixtures for the criterion benchmarks.

use superline_core::field::FieldValue;
use superline_core::modspec::ModuleSpec;
use superline_core::psido::PsiSymbol;
use superline_core::rational::Rational;
use superline_core::sample;

pub fn fixture_symbols(depth: usize) -> (PsiSymbol<FieldValue>, PsiSymbol<FieldValue>) {
    let mut rng = sample::rng(2024);
    let t = sample::symbol(&mut rng, depth, 3, 4);
    let s0 = sample::symbol(&mut rng, depth, 3, 4);
    let s = PsiSymbol::new(
        t.mu().clone(),
        s0.mu().clone(),
        s0.order2().clone(),
        s0.parity(),
        s0.coeffs().to_vec(),
    );
    (s, t)
}

pub fn fixture_pair(l: u32) -> (ModuleSpec, ModuleSpec) {
    let mut rng = sample::rng(7);
    let a = sample::spec(&mut rng, l, 0, false);
    let b = sample::partner_spec(&mut rng, &a, 1);
    (a, b)
}

pub fn extraction_args() -> (Rational, Rational, Rational) {
    (
        Rational::new(1, 3),
        Rational::new(10, 3),
        Rational::new(3, 2),
    )
}
