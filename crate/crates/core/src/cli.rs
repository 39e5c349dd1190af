//! Command-line surface.
//!
//! Exit codes: 0 success, 1 a negative mathematical certificate (not a
//! trivialisation, input fails its own cocycle condition, conditions refused),
//! 2 usage error. `--json` prints one canonical JSON report on stdout.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bott::{bott_dim, rule_discrepancies, BottQuery, SplitBundleDegrees};
use crate::cech::{cohomology, line_bundle_cohomology, SheafSpec, Window};
use crate::error::{Error, Result};
use crate::io::{cochain_to_json, parse_file, rational_to_json, to_canonical_string, trivialization_from_json};
use crate::obstruct::{
    check_lemma71, condition2_bound_at, pipeline_obstructed_cp2, search_split_triples, sufficient_l_nonsplit,
    Lemma71Report, Verdict,
};
use crate::sample::{random_degrees, random_order2, rng, H1Cache};
use crate::supermap::verify_gamma_cocycle;

pub const WINDOW_ENV: &str = "SUPERTHICK_WINDOW";

#[derive(Parser, Debug)]
#[command(name = "superthick", version, about = "Exact computations with thickenings of CP¹ and CP²")]
struct Cli {
    /// Print a canonical JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SheafArg {
    Line,
    Tangent,
    OneForm,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// h^q(CP^n, Ω^p(k)) by the Bott formula.
    Bott {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Čech cohomology of a sum of twisted line, tangent or one-form sheaves.
    Cohomology {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "line")]
        sheaf: SheafArg,
        /// Comma-separated twists.
        #[arg(long, allow_hyphen_values = true)]
        twists: String,
        #[arg(long)]
        q: usize,
        /// Weight window "lo,hi".
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// The three existence conditions for a rank-3 split bundle on CP².
    #[command(name = "check-lemma71")]
    CheckLemma71 {
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
    },
    /// Degree triples in a window satisfying the linear constraint system.
    Search {
        #[arg(long, allow_hyphen_values = true, default_value = "-8,8")]
        window: String,
    },
    /// Check the cocycle condition of a thickening file.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Obstruction cocycle of a thickening file, or a randomized cocycle check.
    Gamma {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        file: Option<PathBuf>,
        /// Number of random order-2 trivialisations on CP² to check.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether ∂* is nonzero on H¹(T⊗∧²E) for a rank-3 split bundle.
    Pushforward {
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Provable threshold on l for the non-split family F_{k'} ⊕ O(l).
    #[command(name = "sufficient-l")]
    SufficientL {
        #[arg(long = "k-prime", allow_hyphen_values = true)]
        k_prime: i64,
        /// Also report whether the bounds prove the conditions at this l.
        #[arg(long, allow_hyphen_values = true)]
        l: Option<i64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    command: &'static str,
    inputs: Value,
    outputs: Value,
    exact: bool,
    human: String,
    code: i32,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("{what}: {x:?} is not an integer")))
        })
        .collect()
}

fn parse_window(s: &str, what: &str) -> Result<Window> {
    let v = parse_list(s, what)?;
    if v.len() != 2 {
        return Err(Error::InvalidArgument(format!("{what}: expected \"lo,hi\", got {s:?}")));
    }
    let lo = i32::try_from(v[0]).map_err(|_| Error::InvalidArgument(format!("{what}: out of range")))?;
    let hi = i32::try_from(v[1]).map_err(|_| Error::InvalidArgument(format!("{what}: out of range")))?;
    Window::new(lo, hi)
}

/// `--window`, else `SUPERTHICK_WINDOW`, else the default.
fn resolve_window(flag: Option<&str>) -> Result<Window> {
    if let Some(f) = flag {
        return parse_window(f, "--window");
    }
    match std::env::var(WINDOW_ENV) {
        Ok(s) => parse_window(&s, WINDOW_ENV),
        Err(_) => Ok(Window::DEFAULT),
    }
}

fn window_json(w: &Window) -> Value {
    json!([w.lo, w.hi])
}

fn lemma_json(r: &Lemma71Report) -> Value {
    let d = |i: usize| json!({"holds": r.direct[i].holds, "witness": r.direct[i].witness});
    json!({
        "degrees": r.degrees.degrees(),
        "canonical": r.canonical(),
        "paper": {"c1": r.literal[0], "c2": r.literal[1], "c3": r.literal[2]},
        "direct": {"c1": d(0), "c2": d(1), "c3": d(2)},
        "eq74": r.eq74,
        "flags": r.flags,
    })
}

fn execute(command: Command) -> Result<Report> {
    match command {
        Command::Bott { n, p, q, k } => {
            let query = BottQuery::new(n, p, q, k)?;
            let d = query.dim();
            Ok(Report {
                command: "bott",
                inputs: json!({"n": n, "p": p, "q": q, "k": k}),
                outputs: json!({"dim": d}),
                exact: true,
                human: format!("{d}\n"),
                code: 0,
            })
        }
        Command::Cohomology { n, sheaf, twists, q, window } => {
            let twists = parse_list(&twists, "--twists")?;
            let spec = match sheaf {
                SheafArg::Line => SheafSpec::line_sum(n, twists.clone())?,
                SheafArg::Tangent => SheafSpec::tangent(n, twists.clone())?,
                SheafArg::OneForm => SheafSpec::one_form(n, twists.clone())?,
            };
            if q > n {
                return Err(Error::InvalidArgument(format!("--q {q} exceeds --n {n}")));
            }
            let (report, method) = match (&spec.kind, twists.as_slice(), window.is_none() && std::env::var(WINDOW_ENV).is_err()) {
                (crate::cech::SheafKind::LineSum(_), [k], true) => {
                    let r = line_bundle_cohomology(n, *k, q)?;
                    let m = r.method.as_str();
                    (r, m)
                }
                _ => {
                    let w = resolve_window(window.as_deref())?;
                    let r = cohomology(&spec, q, w)?;
                    let m = r.method.as_str();
                    (r, m)
                }
            };
            let d = report.dim(q);
            Ok(Report {
                command: "cohomology",
                inputs: json!({"n": n, "sheaf": spec.kind.name(), "twists": twists, "q": q, "window": window_json(&report.window)}),
                outputs: json!({
                    "dim": d,
                    "bott": spec.bott_dim(q),
                    "method": method,
                    "representatives": report.reps(q).iter().map(|c| cochain_to_json(c)).collect::<Vec<_>>(),
                }),
                exact: report.complete,
                human: format!("h^{q}({spec}) = {d}  [{method}]\n"),
                code: 0,
            })
        }
        Command::CheckLemma71 { degrees } => {
            let d = SplitBundleDegrees::new(parse_list(&degrees, "--degrees")?)?;
            let r = check_lemma71(&d)?;
            let mut human = format!("{r}\n");
            for f in &r.flags {
                human.push_str(&format!("  flag: {f}\n"));
            }
            Ok(Report {
                command: "check-lemma71",
                inputs: json!({"degrees": d.degrees()}),
                outputs: lemma_json(&r),
                exact: true,
                human,
                code: 0,
            })
        }
        Command::Search { window } => {
            let v = parse_list(&window, "--window")?;
            if v.len() != 2 {
                return Err(Error::InvalidArgument("--window: expected \"lo,hi\"".into()));
            }
            let found = search_split_triples(v[0], v[1])?;
            let mut human = String::new();
            for r in &found {
                human.push_str(&format!("{r}\n"));
            }
            human.push_str(&format!("{} triples\n", found.len()));
            let rules: Vec<Value> = rule_discrepancies(v[0], v[1])
                .iter()
                .map(|row| json!({"rule": row.rule.name(), "l": row.l, "literal": row.literal, "dim": row.dim}))
                .collect();
            Ok(Report {
                command: "search",
                inputs: json!({"window": v}),
                outputs: json!({"triples": found.iter().map(lemma_json).collect::<Vec<_>>(), "rule_discrepancies": rules}),
                exact: true,
                human,
                code: 0,
            })
        }
        Command::Verify { file } => {
            let t = trivialization_from_json(&parse_file(&file)?)?;
            let res = t.cocycle_residual()?;
            let inv = t.inverse_residual()?;
            let bad: Vec<Value> = res
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(k, d)| json!({"triple": [k.0, k.1, k.2], "residual": d.to_string()}))
                .collect();
            let bad_inv: Vec<Value> = inv
                .iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(k, d)| json!({"pair": [k.0, k.1], "residual": d.to_string()}))
                .collect();
            let ok = bad.is_empty() && bad_inv.is_empty();
            let human = if ok {
                format!("valid order-{} trivialisation: {} triples, all residuals zero\n", t.order(), res.len())
            } else {
                let mut s = String::from("not a trivialisation\n");
                for b in bad.iter().chain(&bad_inv) {
                    s.push_str(&format!("  {b}\n"));
                }
                s
            };
            Ok(Report {
                command: "verify",
                inputs: json!({"file": file.display().to_string()}),
                outputs: json!({"valid": ok, "triples_checked": res.len(), "nonzero_residuals": bad, "nonzero_inverse_residuals": bad_inv}),
                exact: true,
                human,
                code: if ok { 0 } else { 1 },
            })
        }
        Command::Gamma { file, random, seed } => match (file, random) {
            (Some(file), _) => {
                let t = trivialization_from_json(&parse_file(&file)?)?;
                let gamma = match t.obstruction_cocycle() {
                    Ok(g) => g,
                    Err(Error::NotCocycle(msg)) => {
                        return Ok(Report {
                            command: "gamma",
                            inputs: json!({"file": file.display().to_string()}),
                            outputs: json!({"rejected": msg}),
                            exact: true,
                            human: format!("rejected: {msg}\n"),
                            code: 1,
                        })
                    }
                    Err(e) => return Err(e),
                };
                let check = verify_gamma_cocycle(&gamma, &t)?;
                Ok(Report {
                    command: "gamma",
                    inputs: json!({"file": file.display().to_string()}),
                    outputs: json!({
                        "degree": gamma.degree(),
                        "slot": if gamma.is_even_slot() { "T⊗∧E" } else { "∧E⊗E^∨" },
                        "zero": gamma.cochain.is_zero(),
                        "gamma": cochain_to_json(&gamma.cochain),
                        "cocycle_check": check.pass,
                        "coboundary_vacuous": check.coboundary_vacuous,
                    }),
                    exact: true,
                    human: format!(
                        "Γ in degree {} ({}), cocycle check {}\n",
                        gamma.degree(),
                        if gamma.cochain.is_zero() { "zero" } else { "nonzero" },
                        if check.pass { "passed" } else { "FAILED" }
                    ),
                    code: if check.pass { 0 } else { 1 },
                })
            }
            (None, Some(count)) => {
                let mut r = rng(seed);
                let mut cache = H1Cache::default();
                let mut passed = 0;
                let mut failures = Vec::new();
                for i in 0..count {
                    let d = random_degrees(&mut r);
                    let (t, _) = random_order2(&mut r, 2, &d, &mut cache)?;
                    let g = t.obstruction_cocycle()?;
                    let c = verify_gamma_cocycle(&g, &t)?;
                    if c.pass {
                        passed += 1;
                    } else {
                        failures.push(json!({"case": i, "degrees": d.degrees(), "residual": c.residual}));
                    }
                }
                Ok(Report {
                    command: "gamma",
                    inputs: json!({"random": count, "seed": seed}),
                    outputs: json!({"cases": count, "passed": passed, "failures": failures}),
                    exact: true,
                    human: format!("{passed}/{count} random order-2 trivialisations passed the Γ cocycle check\n"),
                    code: if passed == count { 0 } else { 1 },
                })
            }
            (None, None) => Err(Error::InvalidArgument("gamma needs --file or --random".into())),
        },
        Command::Pushforward { degrees, n, window } => {
            let d = SplitBundleDegrees::new(parse_list(&degrees, "--degrees")?)?;
            let w = resolve_window(window.as_deref())?;
            let c = pipeline_obstructed_cp2(n, &d, w)?;
            let coords: Vec<Vec<Value>> = c
                .coordinates
                .iter()
                .map(|v| v.iter().map(rational_to_json).collect())
                .collect();
            let detail = match &c.verdict {
                Verdict::Inconclusive(s) | Verdict::Refused(s) => Some(s.clone()),
                _ => None,
            };
            let code = if matches!(c.verdict, Verdict::Refused(_)) { 1 } else { 0 };
            let mut human = format!("E = {d} on CP{n}: {}\n", c.verdict.as_str());
            if let Some(s) = &detail {
                human.push_str(&format!("  {s}\n"));
            }
            if !coords.is_empty() {
                human.push_str(&format!("  h1 = {}, h2 = {}\n", c.h1_dim, c.h2_dim));
                for (i, v) in c.coordinates.iter().enumerate() {
                    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    human.push_str(&format!("  ∂*(ω{}) = [{}]\n", i + 1, s.join(", ")));
                }
            }
            if let Some(a) = c.agrees_with_prediction() {
                human.push_str(&format!(
                    "  literal conditions predict {}; {}\n",
                    if c.literal_predicts_nonzero { "nonzero" } else { "no prediction" },
                    if a { "agrees" } else { "disagrees" }
                ));
            }
            Ok(Report {
                command: "pushforward",
                inputs: json!({"degrees": d.degrees(), "n": n, "window": window_json(&w)}),
                outputs: json!({
                    "verdict": c.verdict.as_str(),
                    "detail": detail,
                    "h1_dim": c.h1_dim,
                    "h2_dim": c.h2_dim,
                    "coordinates": coords,
                    "h2_basis_weights": c.basis_labels,
                    "gamma_matches_formula": c.gamma_matches_formula,
                    "extension_consistent": c.extension_consistent,
                    "literal_predicts_nonzero": c.literal_predicts_nonzero,
                    "agrees_with_prediction": c.agrees_with_prediction(),
                }),
                exact: !matches!(c.verdict, Verdict::Inconclusive(_)),
                human,
                code,
            })
        }
        Command::SufficientL { k_prime, l } => {
            let c = sufficient_l_nonsplit(k_prime)?;
            let mut human = format!("k' = {k_prime}: all three conditions provable for l ≤ {}\n", c.l0);
            for b in &c.bounds {
                human.push_str(&format!(
                    "  c{}: {} (witness {}{})\n",
                    b.condition,
                    b.statement,
                    b.witness,
                    if b.l_independent { ", l-independent" } else { "" }
                ));
            }
            for f in &c.flags {
                human.push_str(&format!("  flag: {f}\n"));
            }
            let at = l.map(|l| {
                let w = condition2_bound_at(l);
                human.push_str(&match w {
                    Some(w) => format!("  l = {l}: condition 2 proved (h0(Ω¹({})) = {w})\n", -l),
                    None => format!("  l = {l}: condition 2 not provable by these bounds\n"),
                });
                json!({"l": l, "condition2_witness": w, "provable": w.is_some()})
            });
            Ok(Report {
                command: "sufficient-l",
                inputs: json!({"k_prime": k_prime, "l": l}),
                outputs: json!({
                    "l0": c.l0,
                    "bounds": c.bounds.iter().map(|b| json!({
                        "condition": b.condition, "statement": b.statement,
                        "witness": b.witness, "l_independent": b.l_independent,
                    })).collect::<Vec<_>>(),
                    "flags": c.flags,
                    "at": at,
                    "check": bott_dim(2, 1, 0, -c.l0),
                }),
                exact: true,
                human,
                code: 0,
            })
        }
    }
}

/// Parse `argv` (including the program name) and run one command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    let (json_out, timing) = (cli.json, cli.timing);
    match execute(cli.command) {
        Ok(r) => {
            let elapsed = start.elapsed();
            let stdout = if json_out {
                let mut v = json!({
                    "command": r.command,
                    "inputs": r.inputs,
                    "outputs": r.outputs,
                    "exact": r.exact,
                    "version": env!("CARGO_PKG_VERSION"),
                    "exit_code": r.code,
                });
                if timing {
                    v["timing_ms"] = json!(elapsed.as_millis() as u64);
                }
                to_canonical_string(&v)
            } else {
                let mut s = r.human;
                if !r.exact {
                    s.push_str("(window-limited result)\n");
                }
                if timing {
                    s.push_str(&format!("time: {} ms\n", elapsed.as_millis()));
                }
                s
            };
            Outcome { code: r.code, stdout, stderr: String::new() }
        }
        Err(e) => Outcome {
            code: if e.is_usage() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
