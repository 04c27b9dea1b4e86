//! Named verification batteries behind the `verify` command and the
//! acceptance suite. Every battery is deterministic in (seed, index), so
//! batches can be evaluated in any order and reassembled.

use crate::decision::{check_svc, decide_closed_form, generic_oracle, known_equivalences, KnownEquivalence};
use crate::field::FieldValue;
use crate::invariants::{b_closed, b_factor, GammaPoint};
use crate::modspec::{is_resonant, ModuleSpec};
use crate::psido::lie_action;
use crate::quantization::extract_b;
use crate::rational::Rational;
use crate::sample;
use crate::superpoly::{bracket, contact_of, inverse_x, SuperPoly};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Suite {
    Bcb,
    ReprLaw,
    ResFacs,
    Symmetry,
    OracleAgreement,
    SvcNecessity,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "bcb" => Some(Suite::Bcb),
            "repr-law" => Some(Suite::ReprLaw),
            "resfacs" => Some(Suite::ResFacs),
            "symmetry" => Some(Suite::Symmetry),
            "oracle-agreement" => Some(Suite::OracleAgreement),
            "svc-necessity" => Some(Suite::SvcNecessity),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Bcb => "bcb",
            Suite::ReprLaw => "repr-law",
            Suite::ResFacs => "resfacs",
            Suite::Symmetry => "symmetry",
            Suite::OracleAgreement => "oracle-agreement",
            Suite::SvcNecessity => "svc-necessity",
        }
    }

    /// Default sample counts sized to the acceptance criteria.
    pub fn default_samples(&self) -> u64 {
        match self {
            Suite::Bcb => 606,
            Suite::ReprLaw => 10,
            Suite::ResFacs => 50,
            Suite::Symmetry => 180,
            Suite::OracleAgreement => 1200,
            Suite::SvcNecessity => 100,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    pub idx: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub samples: u64,
    pub passed: u64,
    /// First counterexamples, capped.
    pub failures: Vec<SampleOutcome>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Evaluate one sample of a suite.
pub fn run_sample(suite: Suite, seed: u64, idx: u64) -> SampleOutcome {
    let mut rng = sample::stream(seed ^ suite_salt(suite), idx);
    let result = match suite {
        Suite::Bcb => bcb_sample(&mut rng, idx),
        Suite::ReprLaw => repr_law_sample(&mut rng),
        Suite::ResFacs => resfacs_sample(&mut rng),
        Suite::Symmetry => symmetry_sample(&mut rng, idx),
        Suite::OracleAgreement => oracle_agreement_sample(&mut rng, idx),
        Suite::SvcNecessity => svc_necessity_sample(&mut rng, idx),
    };
    match result {
        Ok(()) => SampleOutcome {
            idx,
            pass: true,
            detail: None,
        },
        Err(detail) => SampleOutcome {
            idx,
            pass: false,
            detail: Some(detail),
        },
    }
}

fn suite_salt(suite: Suite) -> u64 {
    match suite {
        Suite::Bcb => 0x6263,
        Suite::ReprLaw => 0x7270,
        Suite::ResFacs => 0x7266,
        Suite::Symmetry => 0x7379,
        Suite::OracleAgreement => 0x6f61,
        Suite::SvcNecessity => 0x7376,
    }
}

/// Run a suite serially.
pub fn run(suite: Suite, samples: u64, seed: u64) -> Report {
    let outcomes: Vec<SampleOutcome> = (0..samples).map(|i| run_sample(suite, seed, i)).collect();
    assemble(suite, seed, outcomes)
}

/// Reassemble outcomes (possibly computed out of order) into a report.
pub fn assemble(suite: Suite, seed: u64, mut outcomes: Vec<SampleOutcome>) -> Report {
    outcomes.sort_by_key(|o| o.idx);
    let samples = outcomes.len() as u64;
    let passed = outcomes.iter().filter(|o| o.pass).count() as u64;
    let failures = outcomes.into_iter().filter(|o| !o.pass).take(8).collect();
    Report {
        suite: suite.name().to_string(),
        seed,
        samples,
        passed,
        failures,
    }
}

fn combo(idx: u64) -> (u8, u8) {
    let c = (idx % 6) as u8;
    (3 + c / 2, c % 2)
}

fn bcb_sample(rng: &mut ChaCha8Rng, idx: u64) -> Result<(), String> {
    let (r2, p) = combo(idx);
    let (lambda, mu, m) = sample::extraction_sample(rng, r2);
    let pt = GammaPoint::from_t_delta(
        &(&lambda + &mu - &Rational::new(1, 2)),
        &(&mu - &lambda),
    );
    let closed = b_closed(p, r2, &m, &pt).map_err(|e| e.to_string())?;
    let extracted = extract_b(&lambda, &mu, &m, r2, p).map_err(|e| e.to_string())?;
    if closed == extracted {
        Ok(())
    } else {
        Err(format!(
            "2r={r2} p={p} λ={lambda} μ={mu} m={m}: closed {closed} ≠ extracted {extracted}"
        ))
    }
}

fn repr_law_sample(rng: &mut ChaCha8Rng) -> Result<(), String> {
    type SP = SuperPoly<FieldValue>;
    let t = sample::symbol(rng, 6, 2, 3);
    let gens: Vec<(SP, u8)> = (0..=3usize)
        .flat_map(|a| [(SP::monomial(a, 0), 0u8), (SP::monomial(a, 1), 1u8)])
        .collect();
    for (f, pf) in &gens {
        for (g, pg) in &gens {
            let fg = lie_action(f, &lie_action(g, &t));
            let gf = lie_action(g, &lie_action(f, &t));
            let lhs = if pf * pg == 1 { fg.add(&gf) } else { fg.sub(&gf) };
            let h = inverse_x(&bracket(&contact_of(f), &contact_of(g)))
                .map_err(|e| e.to_string())?;
            let rhs = lie_action(&h, &t);
            if lhs != rhs {
                return Err(format!("representation law fails at F={f:?}, G={g:?}"));
            }
        }
    }
    Ok(())
}

fn resfacs_sample(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = sample::rational(rng, 6, 4);
    let delta = sample::rational(rng, 6, 4);
    let pt = GammaPoint::from_t_delta(&t, &delta);
    let ghalf = FieldValue::sqrt3_times(&t);
    let cases: [(u8, u8, Rational, u8, u8, Rational, u8); 4] = [
        // (p, r2, m) = γ^{e/2}·(p', r2', m'): e recorded as 0/1 power of γ^{1/2}
        (0, 4, Rational::zero(), 1, 3, Rational::new(1, 2), 0),
        (0, 5, Rational::zero(), 1, 4, Rational::new(1, 2), 0),
        (0, 4, Rational::new(-3, 2), 0, 3, Rational::new(-3, 2), 1),
        (0, 5, Rational::from(-2), 0, 4, Rational::from(-2), 0),
    ];
    for par in 0..2u8 {
        for (base_p, r2, m, dp, r2b, mb, e_base) in &cases {
            let lhs = b_factor((base_p + par) % 2, *r2, m, &pt).map_err(|e| e.to_string())?;
            let rhs = b_factor((dp + par) % 2, *r2b, mb, &pt).map_err(|e| e.to_string())?;
            // exponent of γ^{1/2}: γ^{p/2} for the three e_base = 0 cases,
            // γ^{(1−p)/2} for the remaining one
            let e = if *e_base == 0 { par } else { 1 - par };
            let mut scaled = rhs.value().clone();
            if e == 1 {
                scaled = &scaled * &ghalf;
            }
            if lhs.value() != &scaled {
                return Err(format!(
                    "factorization fails: p={par} case (2r={r2}, m={m}): {:?} vs {:?}",
                    lhs.value(),
                    scaled
                ));
            }
        }
    }
    Ok(())
}

fn symmetry_sample(rng: &mut ChaCha8Rng, idx: u64) -> Result<(), String> {
    let (r2, p) = combo(idx);
    // sign (−1)^{⌊r⌋ + 2{r}p}
    let sign_exp = (r2 / 2) as i64 + ((r2 % 2) * p) as i64;
    let sign = if sign_exp % 2 == 0 {
        Rational::one()
    } else {
        -&Rational::one()
    };
    // reflected parameters: m* = −m − r + 1/2, p* = p + 1 + 2r
    let (lambda, mu, m) = loop {
        let (lambda, mu, m) = sample::extraction_sample(rng, r2);
        let m_star = &(-&m) - &Rational::new(r2 as i64, 2) + &Rational::new(1, 2);
        if !is_resonant(&m_star, (r2 + 1) as u32) && !sample::window_has_collision(&m_star, (r2 + 1) as u32)
        {
            break (lambda, mu, m);
        }
    };
    let b = extract_b(&lambda, &mu, &m, r2, p).map_err(|e| e.to_string())?;

    // γ^{1/2} ↦ −γ^{1/2}: conjugate weights, same δ.
    let half = Rational::new(1, 2);
    let (cl, cm) = (&half - &mu, &half - &lambda);
    let b_conj = extract_b(&cl, &cm, &m, r2, p).map_err(|e| e.to_string())?;
    if b_conj != &sign * &b {
        return Err(format!(
            "branch-flip symmetry fails: 2r={r2} p={p} λ={lambda} μ={mu} m={m}: {b_conj} vs {sign}·{b}"
        ));
    }

    // δ ↦ −δ: swapped weights on the left, antidiagonal reflection on the
    // right.
    let b_swap = extract_b(&mu, &lambda, &m, r2, p).map_err(|e| e.to_string())?;
    let m_star = &(-&m) - &Rational::new(r2 as i64, 2) + &half;
    let p_star = (p + 1 + r2) % 2;
    let b_star = extract_b(&lambda, &mu, &m_star, r2, p_star).map_err(|e| e.to_string())?;
    if b_swap != &sign * &b_star {
        return Err(format!(
            "δ-reflection symmetry fails: 2r={r2} p={p} λ={lambda} μ={mu} m={m}: {b_swap} vs {sign}·{b_star}"
        ));
    }
    Ok(())
}

/// Construct a spec with prescribed (n, l, p) whose B factor at the given
/// position vanishes; the brackets are linear in δ, so a random branch value
/// t determines δ.
fn spec_on_factor_conic(
    rng: &mut ChaCha8Rng,
    n: &Rational,
    l: u32,
    p: u8,
    i2: u32,
    j2: u32,
) -> Option<ModuleSpec> {
    let m = n + &Rational::new(j2 as i64, 2);
    let q = (p + j2 as u8) % 2;
    let r2 = (i2 - j2) as u8;
    let half = Rational::new(1, 2);
    let q34 = Rational::new(3, 4);
    let (t, delta) = match (q, r2) {
        (0, 3) => (Rational::zero(), sample::rational(rng, 5, 3)),
        (1, 5) => {
            // γ = 4(m+1)δ − (m+1)² + 3 (the bracket), keep γ = 3t²
            let t = sample::nonzero_rational(rng, 4, 3);
            let m1 = &m + &Rational::one();
            let c = Rational::from(4) * &m1;
            if c.is_zero() {
                return None;
            }
            let delta = (&(Rational::from(3) * &t * &t) + &(&m1 * &m1) - &Rational::from(3)) / &c;
            (t, delta)
        }
        (1, 3) => {
            let t = sample::nonzero_rational(rng, 4, 3);
            let c = Rational::from(3) * &(&m + &half);
            if c.is_zero() {
                return None;
            }
            let delta = (&(Rational::from(3) * &t * &t) - &q34) / &c;
            (t, delta)
        }
        (0, 4) => {
            let t = sample::nonzero_rational(rng, 4, 3);
            let f = &m + &Rational::new(3, 2);
            if f.is_zero() {
                return None;
            }
            let delta = (&(&(Rational::from(3) * &t * &t) / &f) - &(&m + &half))
                / &Rational::from(2);
            (t, delta)
        }
        (1, 4) => {
            if m.is_zero() {
                return None;
            }
            let t = sample::nonzero_rational(rng, 4, 3);
            let delta =
                (&(&(Rational::from(3) * &t * &t) / &m) - &(&m + &Rational::one())) / &Rational::from(2);
            (t, delta)
        }
        (0, 5) => {
            let t = sample::nonzero_rational(rng, 4, 3);
            let m1 = &m + &Rational::one();
            if m1.is_zero() {
                return None;
            }
            let delta = (&(Rational::from(3) * &t * &t) - &q34) / &m1;
            (t, delta)
        }
        _ => return None,
    };
    let (lambda, mu) = sample::lambda_mu_from_t_delta(&t, &delta);
    ModuleSpec::new(lambda, mu, &delta - n, p, l, false).ok()
}

fn oracle_agreement_sample(rng: &mut ChaCha8Rng, idx: u64) -> Result<(), String> {
    let l = 4 + (idx % 4) as u32;
    let (pa, pb) = match (idx / 4) % 3 {
        0 => (0u8, 0u8),
        1 => (1, 1),
        _ => (0, 1),
    };
    let style = rng.gen_range(0..10u32);
    let (a, b) = match style {
        // conjugate pair (same (γ, δ); cross-parity when pb ≠ pa)
        0 => {
            let a = sample::spec(rng, l, pa, false);
            let mut c = a.conjugate();
            c.p = pb;
            (a, c)
        }
        // both sides on the same factor conic (vanishing pattern aligned)
        1 | 2 => {
            let a0 = sample::spec(rng, l, pa, false);
            let n = a0.n();
            let positions = crate::invariants::svc_positions(&a0.level_offsets2());
            let (i2, j2) = positions[rng.gen_range(0..positions.len())];
            let a = spec_on_factor_conic(rng, &n, l, pa, i2, j2);
            let b = spec_on_factor_conic(rng, &n, l, pb, i2, j2);
            match (a, b) {
                (Some(a), Some(b)) if !a.is_resonant() => (a, b),
                _ => {
                    let a = sample::spec(rng, l, pa, false);
                    let b = sample::partner_spec(rng, &a, pb);
                    (a, b)
                }
            }
        }
        // one side on a factor conic only
        3 => {
            let a = sample::spec(rng, l, pa, false);
            let n = a.n();
            let positions = crate::invariants::svc_positions(&a.level_offsets2());
            let (i2, j2) = positions[rng.gen_range(0..positions.len())];
            match spec_on_factor_conic(rng, &n, l, pb, i2, j2) {
                Some(b) => (a, b),
                None => {
                    let b = sample::partner_spec(rng, &a, pb);
                    (a, b)
                }
            }
        }
        // partner-parabola pair (cross-parity equivalence when it applies)
        4 => {
            let a0 = sample::spec(rng, l, pa, false);
            let delta = a0.delta();
            let (lam, mu) = sample::lambda_mu_from_t_delta(
                &(&delta + &Rational::new(1, 2)),
                &delta,
            );
            match ModuleSpec::new(lam, mu, a0.k.clone(), pa, l, false) {
                Ok(a) => {
                    let ks = known_equivalences(&a);
                    let partner = ks.iter().find_map(|k| match k {
                        KnownEquivalence::BolPartner { spec, .. } => Some(spec.clone()),
                        _ => None,
                    });
                    match partner {
                        Some(b) => (a, b),
                        None => {
                            let b = sample::partner_spec(rng, &a0, pb);
                            (a0, b)
                        }
                    }
                }
                Err(_) => {
                    let b = sample::partner_spec(rng, &a0, pb);
                    (a0, b)
                }
            }
        }
        // generic pair
        _ => {
            let a = sample::spec(rng, l, pa, false);
            let b = sample::partner_spec(rng, &a, pb);
            (a, b)
        }
    };
    let closed = decide_closed_form(&a, &b).map_err(|e| e.to_string())?;
    let oracle = generic_oracle(&a, &b).map_err(|e| e.to_string())?;
    if closed.equivalent != oracle.equivalent {
        return Err(format!(
            "verdicts diverge on {a:?} vs {b:?}: closed {} oracle {} ({:?})",
            closed.equivalent, oracle.equivalent, closed.provenance
        ));
    }
    if closed.provenance.iter().any(|p| p == "e-ratio-inconsistent") {
        return Err(format!(
            "closed-form verdict could not produce witness scalars on {a:?} vs {b:?}"
        ));
    }
    Ok(())
}

fn svc_necessity_sample(rng: &mut ChaCha8Rng, idx: u64) -> Result<(), String> {
    let l = 4 + (idx % 5) as u32;
    // half the samples sit on the partner parabola so the odd partner exists
    let pr = rng.gen_range(0..2u8);
    let a = if idx % 2 == 0 {
        sample::spec(rng, l, pr, false)
    } else {
        loop {
            let a0 = sample::spec(rng, l, pr, false);
            let delta = a0.delta();
            let (lam, mu) = sample::lambda_mu_from_t_delta(
                &(&delta + &Rational::new(1, 2)),
                &delta,
            );
            if let Ok(s) = ModuleSpec::new(lam, mu, a0.k.clone(), a0.p, l, false) {
                if !s.is_resonant() {
                    break s;
                }
            }
        }
    };
    for k in known_equivalences(&a) {
        let partner = match k {
            KnownEquivalence::Conjugate { spec, .. } => spec,
            KnownEquivalence::BolPartner { spec, .. } => spec,
            _ => continue,
        };
        let chk = check_svc(&a, &partner).map_err(|e| e.to_string())?;
        if !chk.pass {
            return Err(format!(
                "known equivalence violates the vanishing condition: {a:?} vs {partner:?} at {:?}",
                chk.mismatch
            ));
        }
    }
    Ok(())
}
