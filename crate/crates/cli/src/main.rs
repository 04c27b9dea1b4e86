//! Command-line surface: batch commands over the exact toolkit with stable
//! JSON/CSV contracts. All rationals in interchange formats are strings,
//! never floats; every command is deterministic given (inputs, seed).

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use superline_core::decision::{decide, generic_oracle_mode, Decision, Verdict};
use superline_core::elimination::verify_lge15;
use superline_core::invariants::{
    invariant_i, invariant_j, invariant_m, invariant_r, invariant_tilde_i, invariant_tilde_j,
    lacunary_svc_factors, pencil_conic, svc_factors, Family, GammaPoint, Inv,
};
use superline_core::modspec::ModuleSpec;
use superline_core::quantization::b_matrix;
use superline_core::rational::Rational;
use superline_core::verify::{assemble, run_sample, Suite};

#[derive(Parser)]
#[command(
    name = "superline",
    about = "Exact equivalence classification for pseudodifferential symbol modules on the superline",
    version
)]
struct Cli {
    /// Seed for every randomized battery; identical seeds reproduce bit-exactly.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sample batches (output order is canonical anyway).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide equivalence of two subquotient modules.
    Decide {
        /// Module parameters: inline JSON or a path to a JSON file.
        spec_a: String,
        spec_b: String,
        /// Re-derive every coefficient entry by brute-force extraction.
        #[arg(long)]
        audit: bool,
    },
    /// Emit the coefficient matrix of one module.
    Bmatrix {
        spec: String,
        #[arg(long)]
        audit: bool,
    },
    /// Evaluate the named invariants and the vanishing factor list.
    Invariants {
        spec: String,
        /// Also evaluate the conjectural resonant-frame invariants.
        #[arg(long)]
        conjectural: bool,
    },
    /// Run a verification battery.
    Verify {
        /// bcb | repr-law | resfacs | symmetry | oracle-agreement | svc-necessity
        #[arg(long)]
        suite: String,
        /// Sample count (defaults to the battery's acceptance size).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Emit level-curve conic coefficients as CSV.
    Pencil {
        /// I0 | I1 | J0 | M1
        #[arg(long)]
        family: String,
        /// Composition-series anchor n.
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// Comma-separated list of level values.
        #[arg(long, allow_hyphen_values = true)]
        levels: String,
    },
    /// Scan a rational parameter grid and bucket by invariant triples.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        #[arg(long, default_value = "-6", allow_hyphen_values = true)]
        gamma_min: String,
        #[arg(long, default_value = "6", allow_hyphen_values = true)]
        gamma_max: String,
        #[arg(long, default_value = "1/2")]
        gamma_step: String,
        #[arg(long, default_value = "-4", allow_hyphen_values = true)]
        delta_min: String,
        #[arg(long, default_value = "4", allow_hyphen_values = true)]
        delta_max: String,
        #[arg(long, default_value = "1/2")]
        delta_step: String,
    },
    /// Run the length-15 elimination trials.
    Lge15 {
        #[arg(long, default_value_t = 5)]
        trials: u32,
        /// Fix the anchor instead of sampling it.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
    },
}

/// Exit discipline: 0 success (either verdict), 1 failed battery,
/// 2 invalid input, 3 out of scope (resonant or unresolved).
fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .ok();
    }
    let mut sink = Sink::new(cli.out.clone())?;
    match cli.cmd {
        Cmd::Decide {
            spec_a,
            spec_b,
            audit,
        } => cmd_decide(&mut sink, &spec_a, &spec_b, audit),
        Cmd::Bmatrix { spec, audit } => cmd_bmatrix(&mut sink, &spec, audit),
        Cmd::Invariants { spec, conjectural } => cmd_invariants(&mut sink, &spec, conjectural),
        Cmd::Verify { suite, samples } => {
            cmd_verify(&mut sink, &suite, samples, cli.seed, cli.jobs)
        }
        Cmd::Pencil { family, n, levels } => cmd_pencil(&mut sink, &family, &n, &levels),
        Cmd::Scan {
            n,
            gamma_min,
            gamma_max,
            gamma_step,
            delta_min,
            delta_max,
            delta_step,
        } => cmd_scan(
            &mut sink,
            &n,
            [&gamma_min, &gamma_max, &gamma_step],
            [&delta_min, &delta_max, &delta_step],
        ),
        Cmd::Lge15 { trials, n } => cmd_lge15(&mut sink, trials, cli.seed, n.as_deref()),
    }
}

struct Sink {
    out: Option<std::fs::File>,
}

impl Sink {
    fn new(path: Option<PathBuf>) -> Result<Self> {
        let out = match path {
            Some(p) => Some(
                std::fs::File::create(&p)
                    .with_context(|| format!("cannot create {}", p.display()))?,
            ),
            None => None,
        };
        Ok(Sink { out })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        match &mut self.out {
            Some(f) => writeln!(f, "{s}")?,
            None => println!("{s}"),
        }
        Ok(())
    }

    fn json(&mut self, v: &Value) -> Result<()> {
        self.line(&serde_json::to_string_pretty(v)?)
    }
}

fn parse_spec(input: &str) -> Result<ModuleSpec> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        std::fs::read_to_string(input).with_context(|| format!("cannot read {input}"))?
    };
    let spec: ModuleSpec =
        serde_json::from_str(&text).with_context(|| "invalid module parameters")?;
    spec.validate().map_err(|e| anyhow!("{e}"))?;
    Ok(spec)
}

fn parse_rat(s: &str) -> Result<Rational> {
    s.parse::<Rational>().map_err(|e| anyhow!("{e}"))
}

fn verdict_json(v: &Verdict, audited: bool) -> Value {
    let mut j = serde_json::to_value(v).expect("verdict serializes");
    if audited {
        j["audited"] = json!(true);
    }
    j
}

fn cmd_decide(sink: &mut Sink, spec_a: &str, spec_b: &str, audit: bool) -> Result<ExitCode> {
    let a = parse_spec(spec_a)?;
    let b = parse_spec(spec_b)?;
    match decide(&a, &b) {
        Decision::Decided(v) => {
            if audit {
                let o = generic_oracle_mode(&a, &b, true).map_err(|e| anyhow!("{e}"))?;
                if o.equivalent != v.equivalent {
                    bail!("audited oracle disagrees with the decision");
                }
            }
            sink.json(&verdict_json(&v, audit))?;
            Ok(ExitCode::SUCCESS)
        }
        Decision::OutOfScope {
            reason,
            exploratory,
        } => {
            sink.json(&json!({
                "out_of_scope": reason,
                "exploratory": exploratory.map(|v| verdict_json(&v, false)),
            }))?;
            Ok(ExitCode::from(3))
        }
    }
}

fn cmd_bmatrix(sink: &mut Sink, spec: &str, audit: bool) -> Result<ExitCode> {
    let s = parse_spec(spec)?;
    match b_matrix(&s, audit) {
        Ok(entries) => {
            sink.json(&json!({ "spec": s, "entries": entries }))?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            sink.json(&json!({ "out_of_scope": e.to_string() }))?;
            Ok(ExitCode::from(3))
        }
    }
}

fn inv_value(v: &Inv) -> (Value, Option<String>) {
    match v {
        Inv::Def(r) => (json!(r.to_string()), None),
        Inv::Undef(why) => (Value::Null, Some((*why).to_string())),
    }
}

fn cmd_invariants(sink: &mut Sink, spec: &str, conjectural: bool) -> Result<ExitCode> {
    let s = parse_spec(spec)?;
    let n = s.n();
    let pt = GammaPoint::from_spec(&s);
    let mut reasons = serde_json::Map::new();
    let mut field = |name: &str, v: Inv| -> Value {
        let (val, why) = inv_value(&v);
        if let Some(w) = why {
            reasons.insert(name.to_string(), json!(w));
        }
        val
    };
    let i0 = field("I0", invariant_i(0, &n, &pt));
    let i1 = field("I1", invariant_i(1, &n, &pt));
    let ti0 = field("tildeI0", invariant_tilde_i(0, &n, &pt));
    let j0 = field("J0", invariant_j(0, &n, &pt));
    let tj0 = field("tildeJ0", invariant_tilde_j(&n, &pt));
    let m = field("M", invariant_m(s.p, &n, &pt));
    let (r0, r1) = if conjectural {
        (
            Some(field("R0", invariant_r(0, &pt))),
            Some(field("R1", invariant_r(1, &pt))),
        )
    } else {
        (None, None)
    };
    let factors = if s.lacunary {
        lacunary_svc_factors(&s).map_err(|e| anyhow!("{e}"))?
    } else {
        svc_factors(&s).map_err(|e| anyhow!("{e}"))?
    };
    let svc: Vec<Value> = factors
        .iter()
        .map(|f| {
            json!({
                "i": Rational::new(f.i2 as i64, 2).to_string(),
                "j": Rational::new(f.j2 as i64, 2).to_string(),
                "value": f.value.value(),
                "zero": f.value.is_zero(),
            })
        })
        .collect();
    let mut out = json!({
        "I0": i0, "I1": i1, "tildeI0": ti0, "J0": j0, "tildeJ0": tj0, "M": m,
        "svc": svc,
    });
    if let (Some(r0), Some(r1)) = (r0, r1) {
        out["R0"] = r0;
        out["R1"] = r1;
        out["conjectural"] = json!(["R0", "R1"]);
    }
    if !reasons.is_empty() {
        out["reasons"] = Value::Object(reasons);
    }
    sink.json(&out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    sink: &mut Sink,
    suite: &str,
    samples: Option<u64>,
    seed: u64,
    jobs: usize,
) -> Result<ExitCode> {
    let suite = Suite::parse(suite)
        .ok_or_else(|| anyhow!("unknown battery {suite:?}; see --help for the list"))?;
    let n = samples.unwrap_or_else(|| suite.default_samples());
    let outcomes: Vec<_> = if jobs > 1 {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| run_sample(suite, seed, i))
            .collect()
    } else {
        (0..n).map(|i| run_sample(suite, seed, i)).collect()
    };
    let report = assemble(suite, seed, outcomes);
    let pass = report.all_passed();
    sink.json(&serde_json::to_value(&report)?)?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_pencil(sink: &mut Sink, family: &str, n: &str, levels: &str) -> Result<ExitCode> {
    let family = Family::parse(family)
        .ok_or_else(|| anyhow!("unknown family {family:?} (expected I0, I1, J0, or M1)"))?;
    let n = parse_rat(n)?;
    sink.line("family,n,level,A,B,C,D,E,F")?;
    let name = match family {
        Family::I0 => "I0",
        Family::I1 => "I1",
        Family::J0 => "J0",
        Family::M1 => "M1",
    };
    for level_str in levels.split(',') {
        let level = parse_rat(level_str.trim())?;
        match pencil_conic(family, &n, &level) {
            Ok(c) => {
                sink.line(&format!(
                    "{name},{n},{level},{},{},{},{},{},{}",
                    c[0], c[1], c[2], c[3], c[4], c[5]
                ))?;
            }
            Err(e) => {
                // flagged row: coefficients left empty
                sink.line(&format!("{name},{n},{level},,,,,,"))?;
                eprintln!("level {level}: {e}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn rat_range(min: &Rational, max: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if step.is_zero() || step.is_negative() {
        bail!("step must be positive");
    }
    let mut out = Vec::new();
    let mut x = min.clone();
    while &x <= max {
        out.push(x.clone());
        x = &x + step;
        if out.len() > 100_000 {
            bail!("grid too large");
        }
    }
    Ok(out)
}

fn cmd_scan(sink: &mut Sink, n: &str, g: [&String; 3], d: [&String; 3]) -> Result<ExitCode> {
    let n = parse_rat(n)?;
    let gs = rat_range(&parse_rat(g[0])?, &parse_rat(g[1])?, &parse_rat(g[2])?)?;
    let ds = rat_range(&parse_rat(d[0])?, &parse_rat(d[1])?, &parse_rat(d[2])?)?;
    let half = Rational::new(1, 2);
    let mut buckets: std::collections::BTreeMap<(String, String, String), Vec<(String, String)>> =
        Default::default();
    let mut points = 0u64;
    let mut skipped = 0u64;
    for gamma in &gs {
        for delta in &ds {
            let pt = GammaPoint::from_gamma_delta(gamma, delta);
            let ti0 = invariant_tilde_i(0, &n, &pt);
            let ti1 = invariant_tilde_i(1, &(&n + &half), &pt);
            let tj0 = invariant_tilde_j(&n, &pt);
            let (Inv::Def(a), Inv::Def(b), Inv::Def(c)) = (ti0, ti1, tj0) else {
                skipped += 1;
                continue;
            };
            points += 1;
            buckets
                .entry((a.to_string(), b.to_string(), c.to_string()))
                .or_default()
                .push((gamma.to_string(), delta.to_string()));
        }
    }
    // a collision is a bucket holding more than one parameter point
    let collisions: Vec<Value> = buckets
        .iter()
        .filter(|(_, pts)| pts.len() > 1)
        .map(|((a, b, c), pts)| {
            json!({
                "invariants": {"tildeI0": a, "tildeI1": b, "tildeJ0": c},
                "points": pts,
            })
        })
        .collect();
    sink.json(&json!({
        "n": n.to_string(),
        "points": points,
        "undefined_skipped": skipped,
        "buckets": buckets.len(),
        "collisions": collisions,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lge15(sink: &mut Sink, trials: u32, seed: u64, n: Option<&str>) -> Result<ExitCode> {
    let fixed = match n {
        Some(s) => Some(parse_rat(s)?),
        None => None,
    };
    let report = verify_lge15(trials, seed, fixed);
    for t in &report.trials {
        sink.line(&serde_json::to_string(t)?)?;
    }
    sink.line(&serde_json::to_string(&json!({
        "all_unique": report.all_unique,
        "trials": report.trials.len(),
    }))?)?;
    Ok(if report.all_unique {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
