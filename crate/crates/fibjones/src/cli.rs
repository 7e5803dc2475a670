//! Command-line front end. Every command prints one JSON document (or a
//! plain-text rendering of the same numbers) and is byte-reproducible for
//! a fixed argument list and seed.

use crate::braid::{parse_braid, BraidWord, MarkovMove};
use crate::compiler::{estimate_jones_dqc1_with_samples, MAX_COMPILE_STRANDS};
use crate::error::{Error, Result};
use crate::fibrep::{
    constants, enumerate_sector, fibonacci, represent, zeckendorf_decode, zeckendorf_encode,
    Sector, SymbolString,
};
use crate::jones::{jones_value, weighted_trace};
use crate::linalg::random_unitary;
use crate::oracle::oracle_jones;
use crate::reduction::{
    block_factors_product, density_report, inchworm_swap, seven_block_decompose,
    two_level_decompose, two_level_reconstruct,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "fibjones",
    about = "Jones values of braid trace closures at t = e^{2πi/5}: exact, state-sum oracle, and one-clean-qubit estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Oracle,
    Dqc1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeMode {
    #[value(name = "two-level")]
    TwoLevel,
    Seven,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Jones polynomial of a braid's trace closure.
    Jones {
        /// Braid text ("B3: 1 2 -1") or a path to a file containing it.
        input: String,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the Hoeffding shot count (per estimated part).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Dump the Fibonacci-representation matrix of a braid on one sector.
    Rep {
        input: String,
        /// Sector: "**"/"ss", "*p"/"sp", "p*"/"ps", or "pp".
        #[arg(long, default_value = "sp")]
        sector: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run an invariant suite and print a pass/fail table.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print the SU(2) density diagnostics of the two generator images.
    Density {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Decompose a seeded random unitary into two-level or seven-block factors.
    Decompose {
        #[arg(long, value_enum)]
        mode: DecomposeMode,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Apply the inchworm segment swap to a symbol string.
    Inchworm {
        /// Run the built-in demonstration string.
        #[arg(long)]
        demo: bool,
        #[arg(long)]
        string: Option<String>,
        #[arg(long, default_value_t = 0)]
        current: usize,
        #[arg(long, default_value_t = 1)]
        target: usize,
        #[arg(long, default_value_t = 2)]
        cprime: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Zeckendorf utilities: string ↔ integer.
    Encode {
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        value: Option<u64>,
        #[arg(long)]
        string: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct JonesReport {
    braid: String,
    n: usize,
    crossings: usize,
    writhe: i64,
    weighted_trace: [f64; 2],
    value: [f64; 2],
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct RepReport {
    n: usize,
    sector: String,
    basis: Vec<String>,
    /// Row-major [re, im] pairs.
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct CheckReport {
    suite: String,
    max_n: usize,
    checks: Vec<CheckLine>,
    all_pass: bool,
}

#[derive(Serialize)]
struct DecomposeReport {
    mode: String,
    dim: usize,
    seed: u64,
    factors: usize,
    max_support: usize,
    reconstruction_error: f64,
}

#[derive(Serialize)]
struct InchwormReport {
    string: String,
    c_prime: usize,
    current: usize,
    target: usize,
    result: String,
    changed: bool,
}

#[derive(Serialize)]
struct EncodeReport {
    len: usize,
    value: u64,
    string: String,
}

/// Execute a parsed command line; returns the stdout payload and exit code.
pub fn run(cli: Cli) -> (String, i32) {
    match execute(cli) {
        Ok(output) => (output, 0),
        Err(err) => {
            let code = match err {
                Error::SizeCap(_) => 2,
                _ => 1,
            };
            (format!("error: {err}\n"), code)
        }
    }
}

fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Jones {
            input,
            method,
            epsilon,
            confidence,
            seed,
            samples,
            format,
        } => {
            let braid = read_braid(&input)?;
            let report = match method {
                Method::Exact => {
                    let r = jones_value(&braid);
                    base_jones_report(&braid, r.weighted_trace, r.value, "exact")
                }
                Method::Oracle => {
                    let trace = crate::oracle::oracle_trace(&braid)?;
                    let value = oracle_jones(&braid)?;
                    base_jones_report(&braid, trace, value, "oracle")
                }
                Method::Dqc1 => {
                    if braid.strands() > MAX_COMPILE_STRANDS {
                        return Err(Error::SizeCap(format!(
                            "{} strands exceeds the compile cap",
                            braid.strands()
                        )));
                    }
                    let r = estimate_jones_dqc1_with_samples(
                        &braid, epsilon, confidence, seed, samples,
                    )?;
                    let mut report = base_jones_report(
                        &braid,
                        r.jones.weighted_trace,
                        r.jones.value,
                        "dqc1",
                    );
                    report.samples = Some(r.estimate.samples);
                    report.radius = Some(r.radius);
                    report.kappa = Some(complex_pair(r.kappa));
                    report.epsilon = Some(epsilon);
                    report.confidence = Some(confidence);
                    report.seed = Some(seed);
                    report
                }
            };
            render(&report, format, |r| {
                let mut out = String::new();
                out.push_str(&format!("braid: {}\n", r.braid));
                out.push_str(&format!("writhe: {}\n", r.writhe));
                out.push_str(&format!(
                    "weighted_trace: {} {}\n",
                    num(r.weighted_trace[0]),
                    num(r.weighted_trace[1])
                ));
                out.push_str(&format!(
                    "value: {} {}\n",
                    num(r.value[0]),
                    num(r.value[1])
                ));
                out.push_str(&format!("method: {}\n", r.method));
                if let (Some(s), Some(rad)) = (r.samples, r.radius) {
                    out.push_str(&format!("samples: {s}\nradius: {}\n", num(rad)));
                }
                out
            })
        }
        Command::Rep {
            input,
            sector,
            format,
        } => {
            let braid = read_braid(&input)?;
            let sector = Sector::parse(&sector)?;
            let op = represent(&braid, sector);
            let dim = op.dim();
            let mut matrix = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                for c in 0..dim {
                    matrix.push(complex_pair(op.matrix[(r, c)]));
                }
            }
            let report = RepReport {
                n: braid.strands(),
                sector: sector.to_string(),
                basis: op.basis.strings().iter().map(|s| s.to_string()).collect(),
                matrix,
            };
            render(&report, format, |r| {
                let mut out = format!("n: {}\nsector: {}\nbasis:", r.n, r.sector);
                for b in &r.basis {
                    out.push_str(&format!(" {b}"));
                }
                out.push('\n');
                let dim = r.basis.len();
                for row in 0..dim {
                    for col in 0..dim {
                        let [re, im] = r.matrix[row * dim + col];
                        out.push_str(&format!("{} {}  ", num(re), num(im)));
                    }
                    out.push('\n');
                }
                out
            })
        }
        Command::Check {
            suite,
            max_n,
            format,
        } => {
            let checks = run_suite(&suite, max_n)?;
            let all_pass = checks.iter().all(|c| c.pass);
            let report = CheckReport {
                suite,
                max_n,
                checks,
                all_pass,
            };
            let rendered = render(&report, format, |r| {
                let mut out = String::new();
                for c in &r.checks {
                    out.push_str(&format!(
                        "{:<44} {:<4} {}\n",
                        c.name,
                        if c.pass { "ok" } else { "FAIL" },
                        c.detail
                    ));
                }
                out.push_str(&format!(
                    "suite {} : {}\n",
                    r.suite,
                    if r.all_pass { "pass" } else { "fail" }
                ));
                out
            })?;
            if !all_pass {
                // Surface the failure through the exit code path.
                return Err(Error::Domain(format!("suite failed:\n{rendered}")));
            }
            Ok(rendered)
        }
        Command::Density { format } => {
            let report = density_report();
            render(&report, format, |r| {
                format!(
                    "angle_a: {}\nangle_b: {}\ntheta12: {}\nr_angle: {}\nmargin_k5: {}\nmargin_k30: {}\nq_axis_separation: {}\n",
                    num(r.angle_a),
                    num(r.angle_b),
                    num(r.theta12),
                    num(r.r_angle),
                    num(r.exclusion_margin_k5),
                    num(r.exclusion_margin_k30),
                    num(r.q_axis_separation)
                )
            })
        }
        Command::Decompose {
            mode,
            dim,
            seed,
            format,
        } => {
            if dim == 0 || dim > 64 {
                return Err(Error::Domain("dimension must be in 1..=64".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(dim, &mut rng);
            let report = match mode {
                DecomposeMode::TwoLevel => {
                    let factors = two_level_decompose(&u)?;
                    let err =
                        crate::linalg::max_abs_diff(&two_level_reconstruct(&factors, dim), &u);
                    DecomposeReport {
                        mode: "two-level".into(),
                        dim,
                        seed,
                        factors: factors.len(),
                        max_support: 2,
                        reconstruction_error: err,
                    }
                }
                DecomposeMode::Seven => {
                    let factors = seven_block_decompose(&u)?;
                    let err = crate::linalg::max_abs_diff(&block_factors_product(&factors, dim), &u);
                    DecomposeReport {
                        mode: "seven".into(),
                        dim,
                        seed,
                        factors: factors.len(),
                        max_support: factors.iter().map(|f| f.support.len()).max().unwrap_or(0),
                        reconstruction_error: err,
                    }
                }
            };
            render(&report, format, |r| {
                format!(
                    "mode: {}\ndim: {}\nseed: {}\nfactors: {}\nmax_support: {}\nreconstruction_error: {}\n",
                    r.mode,
                    r.dim,
                    r.seed,
                    r.factors,
                    r.max_support,
                    num(r.reconstruction_error)
                )
            })
        }
        Command::Inchworm {
            demo,
            string,
            current,
            target,
            cprime,
            format,
        } => {
            let (s, current, target, cprime) = if demo || string.is_none() {
                // A * parked at the center of superblock 0, empty runway in 1.
                (SymbolString::parse("pp*ppppppppp")?, 0, 1, 2)
            } else {
                (SymbolString::parse(&string.unwrap())?, current, target, cprime)
            };
            let result = inchworm_swap(&s, current, target, cprime)?;
            let report = InchwormReport {
                string: s.to_string(),
                c_prime: cprime,
                current,
                target,
                changed: result != s,
                result: result.to_string(),
            };
            render(&report, format, |r| {
                format!(
                    "string: {}\nresult: {}\nchanged: {}\n",
                    r.string, r.result, r.changed
                )
            })
        }
        Command::Encode {
            len,
            value,
            string,
            format,
        } => {
            let report = match (len, value, string) {
                (Some(len), Some(value), None) => {
                    let s = zeckendorf_decode(len, value)?;
                    EncodeReport {
                        len,
                        value,
                        string: s.to_string(),
                    }
                }
                (None, None, Some(text)) => {
                    let s = SymbolString::parse(&text)?;
                    EncodeReport {
                        len: s.len(),
                        value: zeckendorf_encode(&s),
                        string: s.to_string(),
                    }
                }
                _ => {
                    return Err(Error::Domain(
                        "pass either --len with --value, or --string".into(),
                    ))
                }
            };
            render(&report, format, |r| {
                format!("len: {}\nvalue: {}\nstring: {}\n", r.len, r.value, r.string)
            })
        }
    }
}

fn base_jones_report(
    braid: &BraidWord,
    trace: Complex64,
    value: Complex64,
    method: &'static str,
) -> JonesReport {
    JonesReport {
        braid: braid.to_string(),
        n: braid.strands(),
        crossings: braid.crossings(),
        writhe: braid.writhe(),
        weighted_trace: complex_pair(trace),
        value: complex_pair(value),
        method,
        samples: None,
        radius: None,
        kappa: None,
        epsilon: None,
        confidence: None,
        seed: None,
    }
}

/// Numeric rendering shared by text and JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn render<T: Serialize>(
    report: &T,
    format: Format,
    text: impl Fn(&T) -> String,
) -> Result<String> {
    match format {
        Format::Json => Ok(format!(
            "{}\n",
            serde_json::to_string(report).expect("report serializes")
        )),
        Format::Text => Ok(text(report)),
    }
}

fn read_braid(input: &str) -> Result<BraidWord> {
    match parse_braid(input) {
        Ok(b) => Ok(b),
        Err(parse_err) => {
            let path = std::path::Path::new(input);
            if path.exists() {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: input.to_string(),
                    source,
                })?;
                parse_braid(&text)
            } else {
                Err(parse_err)
            }
        }
    }
}

fn run_suite(suite: &str, max_n: usize) -> Result<Vec<CheckLine>> {
    let mut checks = Vec::new();
    let known = ["relations", "zeckendorf", "constants", "markov", "all"];
    if !known.contains(&suite) {
        return Err(Error::Domain(format!(
            "unknown suite {suite:?}; pick one of {known:?}"
        )));
    }
    if suite == "constants" || suite == "all" {
        let k = constants();
        let id1 = (k.phi * k.e + k.a - (k.b + k.phi * k.a)).norm();
        checks.push(line("constants: phi*e + a = b + phi*a", id1 <= 1e-12, id1));
        let id2 = (k.delta - (k.big_a - 1.0)).norm();
        checks.push(line("constants: delta = A - 1", id2 <= 1e-12, id2));
        let id3 = (-(k.big_a.powi(2) + k.big_a.powi(-2)) - k.big_d).norm();
        checks.push(line("constants: D = phi = -A^2 - A^-2", id3 <= 1e-12, id3));
    }
    if suite == "zeckendorf" || suite == "all" {
        let mut ok = true;
        for len in 1..=20usize {
            for z in 0..fibonacci(len + 2) {
                if zeckendorf_encode(&zeckendorf_decode(len, z)?) != z {
                    ok = false;
                }
            }
        }
        checks.push(line("zeckendorf: bijective for lengths <= 20", ok, f64::NAN));
        let mut dims_ok = true;
        for n in 1..=16usize {
            for sec in Sector::ALL {
                if enumerate_sector(n, sec).len() as u64 != sec.dimension(n) {
                    dims_ok = false;
                }
            }
        }
        checks.push(line("zeckendorf: sector dimension table n <= 16", dims_ok, f64::NAN));
        let eff_ok = (1..=32).all(|n| crate::compiler::encoding_efficiency(n) > 0.5);
        checks.push(line("zeckendorf: f_{n+2}/2^b > 1/2 for n <= 32", eff_ok, f64::NAN));
    }
    if suite == "relations" || suite == "all" {
        let mut worst: f64 = 0.0;
        for n in 2..=max_n.max(2) {
            for (_, residual) in crate::jones::tl_relation_residuals(n)? {
                worst = worst.max(residual);
            }
        }
        checks.push(line(
            &format!("relations: TL rel1-rel3 up to n = {max_n}"),
            worst <= 1e-12,
            worst,
        ));
        let mut braid_worst: f64 = 0.0;
        for n in 2..=max_n.max(2) {
            for sec in Sector::ALL {
                if enumerate_sector(n, sec).is_empty() {
                    continue;
                }
                for i in 1..n {
                    let u = crate::fibrep::crossing_operator(n, i, sec)?;
                    braid_worst = braid_worst.max(crate::linalg::unitarity_residual(&u.matrix));
                }
            }
        }
        checks.push(line(
            &format!("relations: crossing unitarity up to n = {max_n}"),
            braid_worst <= 1e-12,
            braid_worst,
        ));
        let mut contraction_worst: f64 = 0.0;
        for text in ["B2:", "B3: 1 1", "B4: 1 2 -1"] {
            let b = parse_braid(text)?;
            contraction_worst = contraction_worst.max(crate::jones::markov_contraction_check(&b)?);
        }
        checks.push(line(
            "relations: Markov contraction residual",
            contraction_worst <= 1e-9,
            contraction_worst,
        ));
    }
    if suite == "markov" || suite == "all" {
        let mut worst: f64 = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        use rand::Rng;
        for _ in 0..20 {
            let n = rng.gen_range(2..=5usize);
            let len = rng.gen_range(0..=6usize);
            let word: Vec<i32> = (0..len)
                .map(|_| {
                    let i = rng.gen_range(1..n) as i32;
                    if rng.gen_bool(0.5) {
                        i
                    } else {
                        -i
                    }
                })
                .collect();
            let b = BraidWord::new(n, word)?;
            let v = jones_value(&b).value;
            let g = rng.gen_range(1..n) as i32;
            let conj = b.markov_move(MarkovMove::Conjugate(g))?;
            worst = worst.max((jones_value(&conj).value - v).norm());
            let stab = b.markov_move(MarkovMove::Stabilize(1))?;
            worst = worst.max((jones_value(&stab).value - v).norm());
            let stab = b.markov_move(MarkovMove::Stabilize(-1))?;
            worst = worst.max((jones_value(&stab).value - v).norm());
            let _ = weighted_trace(&b);
        }
        checks.push(line("markov: conjugation and stabilization", worst <= 1e-9, worst));
    }
    Ok(checks)
}

fn line(name: &str, pass: bool, residual: f64) -> CheckLine {
    CheckLine {
        name: name.to_string(),
        pass,
        detail: if residual.is_nan() {
            "exhaustive".to_string()
        } else {
            format!("max residual {residual:.3e}")
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_args(args: &[&str]) -> (String, i32) {
        let cli = Cli::try_parse_from(args).expect("arguments parse");
        run(cli)
    }

    #[test]
    fn jones_exact_and_oracle_agree() {
        let (exact, code) = run_args(&["fibjones", "jones", "B2: 1 1 1"]);
        assert_eq!(code, 0);
        let (oracle, code) = run_args(&["fibjones", "jones", "B2: 1 1 1", "--method", "oracle"]);
        assert_eq!(code, 0);
        let e: serde_json::Value = serde_json::from_str(exact.trim()).unwrap();
        let o: serde_json::Value = serde_json::from_str(oracle.trim()).unwrap();
        let ev = e["value"].as_array().unwrap();
        let ov = o["value"].as_array().unwrap();
        for (a, b) in ev.iter().zip(ov.iter()) {
            assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-9);
        }
        assert_eq!(e["method"], "exact");
        assert_eq!(o["method"], "oracle");
    }

    #[test]
    fn malformed_braid_is_input_error() {
        let (_, code) = run_args(&["fibjones", "jones", "B3: 9"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn oversized_oracle_is_size_cap() {
        let braid = format!("B2: {}", "1 ".repeat(21).trim_end());
        let (_, code) = run_args(&["fibjones", "jones", &braid, "--method", "oracle"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn identical_invocations_are_byte_identical() {
        let args = [
            "fibjones", "jones", "B3: 1 2 -1", "--method", "dqc1", "--seed", "5", "--epsilon",
            "0.2",
        ];
        let (a, _) = run_args(&args);
        let (b, _) = run_args(&args);
        assert_eq!(a, b);
    }

    #[test]
    fn text_and_json_carry_identical_numbers() {
        let (json_out, _) = run_args(&["fibjones", "jones", "B2: 1 1 1"]);
        let (text_out, _) = run_args(&["fibjones", "jones", "B2: 1 1 1", "--format", "text"]);
        let v: serde_json::Value = serde_json::from_str(json_out.trim()).unwrap();
        let value = v["value"].as_array().unwrap();
        let expect = format!(
            "value: {} {}",
            serde_json::to_string(&value[0].as_f64().unwrap()).unwrap(),
            serde_json::to_string(&value[1].as_f64().unwrap()).unwrap()
        );
        assert!(text_out.contains(&expect), "{text_out} vs {expect}");
    }

    #[test]
    fn check_suite_passes() {
        let (out, code) = run_args(&["fibjones", "check", "--suite", "relations", "--max-n", "5"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["all_pass"], true);
    }

    #[test]
    fn rep_dump_shape() {
        let (out, code) = run_args(&["fibjones", "rep", "B3: 1", "--sector", "sp"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let basis = v["basis"].as_array().unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(v["matrix"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn encode_round_trip() {
        let (out, code) = run_args(&["fibjones", "encode", "--len", "3", "--value", "4"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["string"], "*p*");
        let (out2, _) = run_args(&["fibjones", "encode", "--string", "*p*"]);
        let v2: serde_json::Value = serde_json::from_str(out2.trim()).unwrap();
        assert_eq!(v2["value"], 4);
    }

    #[test]
    fn inchworm_demo_runs() {
        let (out, code) = run_args(&["fibjones", "inchworm", "--demo"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["changed"], true);
    }

    #[test]
    fn decompose_modes_run() {
        for mode in ["two-level", "seven"] {
            let (out, code) = run_args(&[
                "fibjones",
                "decompose",
                "--mode",
                mode,
                "--dim",
                "8",
                "--seed",
                "3",
            ]);
            assert_eq!(code, 0, "{mode}");
            let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
            assert!(v["reconstruction_error"].as_f64().unwrap() < 1e-8);
        }
    }
}
