use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorlab::acceptance;
use mirrorlab::branes::{decompose_for_continuation, grade_restriction_check, verify_decomposition, window_half_width, Brane, LaurentChar};
use mirrorlab::enumerative::{disk_bps, disk_invariants_cy, disk_invariants_lg, gw_invariants, lg_mirror_series, mirror_map_cy, multiple_cover_bps, InvariantTable};
use mirrorlab::exact::int;
use mirrorlab::glsm::{inspect, GlsmCharges};
use mirrorlab::ifunc::{continuation_coefficients, i_cy, i_lg, t_c_coefficients, t_c_value, t_cy, t_lg, verify_oscillatory_identities, HalfPlane};
use mirrorlab::mb::{hemisphere_z, log_q_from, model_integrand, open_closed_factor, rel_diff, residue_sum_auto, Method, Model, NumericResult, Precision, Side};
use mirrorlab::pf::{extended_pf, lg_pf, pf_l};
use mirrorlab::series::rational_json;
use mirrorlab::{ExecPolicy, PuiseuxLogSeries, PuiseuxSeries, Rational};
use num_traits::ToPrimitive;
use rug::Complex;
use serde_json::{json, Value};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const DEFAULT_BITS: u32 = 192;

#[derive(Parser)]
#[command(name = "mirrorlab", version, about = "Open/closed LG/CY computations for the quintic")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Truncation order (a rational such as 12 or 23/2).
    #[arg(long, global = true, default_value = "12")]
    order: String,
    /// Working precision in bits; MIRRORLAB_BITS overrides the default of 192.
    #[arg(long, global = true)]
    bits: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write (x, y) pairs as CSV for plotting.
    #[arg(long, global = true)]
    emit_plot_data: Option<PathBuf>,
    /// Run numeric kernels on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print one of the generating series.
    Series {
        #[arg(value_enum)]
        name: SeriesName,
        /// Component index for the I-functions.
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// Apply a Picard-Fuchs operator to its expected solutions and report the residual.
    PfCheck {
        #[arg(long, value_enum, default_value_t = PfOperator::L)]
        operator: PfOperator,
    },
    /// Genus-zero Gromov-Witten invariants.
    Gw {
        #[arg(long, default_value_t = 5)]
        max_degree: u32,
        /// Report multiple-cover (BPS) numbers instead.
        #[arg(long)]
        bps: bool,
    },
    /// Disk invariants of the real quintic.
    Disk {
        #[arg(long, default_value_t = 5)]
        max_degree: u32,
        #[arg(long)]
        bps: bool,
    },
    /// LG mirror map and the conjectural LG disk potential.
    Lg,
    /// GLSM phase data.
    Glsm {
        #[command(subcommand)]
        action: GlsmAction,
    },
    /// Character, decomposition and window verdicts for a brane.
    Brane {
        /// Fixture name (extended-walcher, structure-sheaf, t-c, walcher-g) or a JSON map.
        #[arg(long, default_value = "extended-walcher")]
        brane: String,
        /// Window offset B.
        #[arg(long, default_value = "1/2")]
        b: String,
        /// Model whose window is tested.
        #[arg(long, default_value = "extended")]
        model: String,
    },
    /// Hemisphere partition function of a brane.
    CentralCharge {
        #[arg(long, default_value = "extended")]
        model: String,
        #[arg(long, default_value = "extended-walcher")]
        brane: String,
        /// |q|, as a decimal string.
        #[arg(long, default_value = "1e-3", allow_hyphen_values = true)]
        q: String,
        /// arg q in units of pi.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        arg: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Continuation of the extended brane to the LG phase through the decomposition.
    Wallcross {
        #[arg(long, default_value = "extended-walcher")]
        brane: String,
        #[arg(long, default_value = "1e4", allow_hyphen_values = true)]
        q: String,
        /// Which constants multiply the LG periods in the comparison.
        #[arg(long, value_enum, default_value_t = Coefficients::Lower)]
        coefficients: Coefficients,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Termwise Gamma identities behind the oscillatory periods.
    Oscillatory {
        #[arg(long, default_value_t = 25)]
        m_max: u32,
    },
    /// Run the acceptance checks.
    Selftest,
}

#[derive(Subcommand)]
enum GlsmAction {
    Inspect {
        #[arg(long, default_value = "extended")]
        model: String,
        /// Sign of zeta: +1 or -1.
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        zeta: String,
        /// Degrees for loop-space data, comma separated.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesName {
    ICy,
    ILg,
    TCy,
    TLg,
    MirrorMap,
    Tau,
    FLg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PfOperator {
    L,
    Extended,
    Lg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Contour,
    Residues,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coefficients {
    Printed,
    Lower,
    Upper,
}

enum Failure {
    Domain(String),
    Verify(String, Output),
    Usage(String),
}

impl From<mirrorlab::Error> for Failure {
    fn from(e: mirrorlab::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

#[derive(Default)]
struct Output {
    json: Value,
    csv: Option<String>,
    plot: Option<Vec<(f64, f64)>>,
}

impl Output {
    fn json(v: Value) -> Self {
        Output { json: v, ..Default::default() }
    }
}

type Res = Result<Output, Failure>;

struct Ctx {
    order: Rational,
    bits: u32,
    policy: ExecPolicy,
}

fn parse_rational(s: &str, what: &str) -> Result<Rational, Failure> {
    s.trim().parse::<Rational>().map_err(|_| Failure::Usage(format!("{what}: `{s}` is not a rational number")))
}

fn default_bits() -> Result<u32, Failure> {
    match std::env::var("MIRRORLAB_BITS") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("MIRRORLAB_BITS: `{v}` is not an integer"))),
        Err(_) => Ok(DEFAULT_BITS),
    }
}

fn with_schema(v: Value) -> Value {
    match v {
        Value::Object(mut m) => {
            let mut out = serde_json::Map::new();
            out.insert("schema".into(), json!(1));
            out.append(&mut m);
            Value::Object(out)
        }
        other => json!({ "schema": 1, "result": other }),
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn series_output(name: &str, log_series: &PuiseuxLogSeries) -> Output {
    let mut csv = String::from("exponent_num,exponent_den,coeff_num,coeff_den,log_power\n");
    let mut plot = Vec::new();
    for (j, part) in log_series.parts().iter().enumerate() {
        for (e, c) in part.terms() {
            csv.push_str(&format!("{},{},{},{},{j}\n", e.numer(), e.denom(), c.numer(), c.denom()));
            if j == 0 {
                plot.push((to_f64(&e), to_f64(&c)));
            }
        }
    }
    Output { json: json!({ "name": name, "series": log_series.to_json() }), csv: Some(csv), plot: Some(plot) }
}

fn plain(name: &str, s: PuiseuxSeries) -> Output {
    series_output(name, &PuiseuxLogSeries::from_series(s))
}

fn table_output(t: &InvariantTable, bps: Option<std::collections::BTreeMap<i64, Rational>>) -> Output {
    let plot = t.entries.iter().map(|(d, v)| (to_f64(d), to_f64(v))).collect();
    let mut json = t.to_json();
    let mut csv = t.to_csv();
    if let Some(b) = bps {
        let entries: Vec<Value> = b.iter().map(|(d, v)| json!([d, rational_json(v)])).collect();
        json["bps"] = json!(entries);
        csv = String::from("degree,bps\n");
        for (d, v) in &b {
            csv.push_str(&format!("{d},{v}\n"));
        }
    }
    Output { json, csv: Some(csv), plot: Some(plot) }
}

fn numeric_json(r: &NumericResult) -> Output {
    let re = r.value.real().to_f64();
    let im = r.value.imag().to_f64();
    let csv = format!(
        "value_re,value_im,est_error,method,n_terms\n{},{},{:e},{},{}\n",
        r.to_json()["value_re"].as_str().unwrap_or_default(),
        r.to_json()["value_im"].as_str().unwrap_or_default(),
        r.est_error,
        r.method,
        r.n_terms
    );
    Output { json: r.to_json(), csv: Some(csv), plot: Some(vec![(re, im)]) }
}

fn complex_json(z: &Complex) -> Value {
    let digits = (z.prec().0 as f64 * 0.30103) as usize;
    json!({
        "re": format!("{:.*e}", digits, z.real()),
        "im": format!("{:.*e}", digits, z.imag()),
    })
}

fn model(s: &str) -> Result<Model, Failure> {
    Model::parse(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_series(ctx: &Ctx, name: SeriesName, k: usize) -> Res {
    if k > 3 && matches!(name, SeriesName::ICy | SeriesName::ILg) {
        return Err(Failure::Usage(format!("--k must be 0..3, got {k}")));
    }
    Ok(match name {
        SeriesName::ICy => series_output("i-cy", &i_cy(k, &ctx.order)?),
        SeriesName::ILg => plain("i-lg", i_lg(k, &ctx.order)?),
        SeriesName::TCy => plain("t-cy", t_cy(&ctx.order)?),
        SeriesName::TLg => plain("t-lg", t_lg(&ctx.order)?.t_form),
        SeriesName::MirrorMap => {
            let m = mirror_map_cy(&ctx.order)?;
            let mut out = series_output("mirror-map", &m.log_q);
            out.json["inverse"] = m.inverse.to_json();
            out
        }
        SeriesName::Tau => plain("tau", lg_mirror_series(&ctx.order)?.tau),
        SeriesName::FLg => {
            let mut out = plain("f-lg", lg_mirror_series(&ctx.order)?.f_lg_01);
            out.json["conjectural"] = json!(true);
            out
        }
    })
}

fn cmd_pf_check(ctx: &Ctx, op: PfOperator) -> Res {
    let order = &ctx.order;
    let lift = PuiseuxLogSeries::from_series;
    let (name, operator, cases): (&str, _, Vec<(String, PuiseuxLogSeries)>) = match op {
        PfOperator::L => ("L", pf_l(), {
            let mut v: Vec<_> = (0..4).map(|k| Ok((format!("I^CY_{k}"), i_cy(k, order)?))).collect::<mirrorlab::Result<_>>()?;
            v.push(("T^CY".into(), lift(t_cy(order)?)));
            v
        }),
        PfOperator::Extended => ("extended", extended_pf(), {
            let mut v: Vec<_> = (0..4).map(|k| Ok((format!("I^CY_{k}"), i_cy(k, order)?))).collect::<mirrorlab::Result<_>>()?;
            v.push(("T^CY".into(), lift(t_cy(order)?)));
            v
        }),
        // the negative exponent of the operator costs five orders
        PfOperator::Lg => ("lg", lg_pf(), (0..4).map(|k| Ok((format!("I^LG_{k}"), lift(i_lg(k, &(order + int(5)))?)))).collect::<mirrorlab::Result<_>>()?),
    };
    let mut rows = Vec::new();
    let mut ok = true;
    for (label, s) in cases {
        let out = operator.apply(&s)?;
        let residual = out.to_json();
        // L T^CY has the single source term 15/8 q^{1/2}
        let expected_source = op == PfOperator::L && label == "T^CY";
        let pass = if expected_source {
            out.log_free().map(|f| f.terms() == vec![(mirrorlab::exact::rat(1, 2), mirrorlab::exact::rat(15, 8))]).unwrap_or(false)
        } else {
            out.is_zero()
        };
        ok &= pass;
        rows.push(json!({ "series": label, "pass": pass, "residual": residual, "certified_order": out.order().map(|o| rational_json(&o)) }));
    }
    let mut csv = String::from("series,pass\n");
    for r in &rows {
        csv.push_str(&format!("{},{}\n", r["series"].as_str().unwrap(), r["pass"]));
    }
    let output = Output { json: json!({ "operator": name, "checks": rows, "pass": ok }), csv: Some(csv), plot: None };
    if ok {
        Ok(output)
    } else {
        Err(Failure::Verify("nonzero residual".into(), output))
    }
}

fn max_degree_check(d: u32) -> Result<(), Failure> {
    if d == 0 {
        return Err(Failure::Usage("--max-degree must be at least 1".into()));
    }
    Ok(())
}

fn cmd_glsm(action: GlsmAction) -> Res {
    let GlsmAction::Inspect { model, zeta, degrees } = action;
    let charges = GlsmCharges::by_name(&model).map_err(|e| Failure::Usage(e.to_string()))?;
    let sign = match zeta.trim() {
        "+1" | "1" | "+" => 1,
        "-1" | "-" => -1,
        other => return Err(Failure::Usage(format!("--zeta must be +1 or -1, got `{other}`"))),
    };
    let degrees: Vec<Rational> = if degrees.is_empty() {
        let defaults: &[&str] = match (model.as_str(), sign) {
            ("extended", 1) => &["1/2", "1", "3/2", "2"],
            (_, 1) => &["1", "2"],
            _ => &["-1/5", "-2/5"],
        };
        defaults.iter().map(|s| parse_rational(s, "degree")).collect::<Result<_, _>>()?
    } else {
        degrees.iter().map(|s| parse_rational(s, "--degrees")).collect::<Result<_, _>>()?
    };
    Ok(Output::json(inspect(&charges, sign, &degrees)?))
}

fn brane_arg(s: &str) -> Result<Brane, Failure> {
    Brane::parse(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_brane(brane: &str, b: &str, model_name: &str) -> Res {
    let br = brane_arg(brane)?;
    let b = parse_rational(b, "--b")?;
    let weights: Vec<i64> = GlsmCharges::by_name(model_name).map_err(|e| Failure::Usage(e.to_string()))?.coords.iter().map(|c| c.weight).collect();
    let width = window_half_width(&weights);
    let grade = grade_restriction_check(&br.char, &width, &b)?;
    let decomposition = match decompose_for_continuation(&br.char) {
        Ok((f, g)) => json!({ "f": f.to_json(), "g": g.to_json(), "f_text": f.to_string(), "g_text": g.to_string(), "verified": verify_decomposition(&br.char, &f, &g) }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(Output::json(json!({
        "brane": br.to_json(),
        "window": { "model": model_name, "half_width": rational_json(&width), "B": rational_json(&b), "pass": grade.pass, "violations": grade.violations },
        "decomposition": decomposition,
    })))
}

fn cmd_central_charge(ctx: &Ctx, model_name: &str, brane: &str, q: &str, arg: f64, method: MethodArg) -> Res {
    let m = model(model_name)?;
    let br = brane_arg(brane)?;
    let log_q = log_q_from(q, arg, ctx.bits)?;
    let method = match method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Contour => Method::Contour,
        MethodArg::Residues => Method::Residues,
    };
    let r = hemisphere_z(m, &br.char, &log_q, method, Precision::new(ctx.bits), ctx.policy)?;
    Ok(numeric_json(&r))
}

fn right_closure(char: &LaurentChar, log_q: &Complex, ctx: &Ctx) -> mirrorlab::Result<NumericResult> {
    let ig = model_integrand(Model::Extended, char, log_q)?;
    let r = residue_sum_auto(&ig, Side::Right, Precision::new(ctx.bits), ctx.policy)?;
    // hemisphere normalization
    let value = Complex::with_val(ctx.bits, -&r.value);
    Ok(NumericResult { value, ..r })
}

fn cmd_wallcross(ctx: &Ctx, brane: &str, q: &str, coefficients: Coefficients, tol: f64) -> Res {
    let br = brane_arg(brane)?;
    let bits = ctx.bits;
    let log_q = log_q_from(q, 0.0, bits)?;
    let (f, g) = decompose_for_continuation(&br.char)?;
    let plus = LaurentChar::from_terms(&[(0, 1), (-1, 1)]);
    let minus = LaurentChar::from_terms(&[(0, 1), (-5, -1)]);
    let whole = right_closure(&br.char, &log_q, ctx)?;
    let zf = right_closure(&(&f * &plus), &log_q, ctx)?;
    let zg = right_closure(&(&g * &minus), &log_q, ctx)?;
    let sum = Complex::with_val(bits, &zf.value + &zg.value);
    let split_rel = rel_diff(&sum, &whole.value);
    let mut report = json!({
        "brane": br.to_json(),
        "f": f.to_json(),
        "g": g.to_json(),
        "z": complex_json(&whole.value),
        "z_f_piece": complex_json(&zf.value),
        "z_g_piece": complex_json(&zg.value),
        "split_rel_error": split_rel,
    });
    let mut ok = split_rel < tol;
    if br.char == mirrorlab::branes::koszul_char(&[1, 1, 1, 1, 1], 2) {
        let log_t = Complex::with_val(bits, &log_q / -5i32);
        let order = int(60);
        let coeffs = match coefficients {
            Coefficients::Printed => t_c_coefficients(bits),
            Coefficients::Lower => continuation_coefficients(HalfPlane::Lower, bits),
            Coefficients::Upper => continuation_coefficients(HalfPlane::Upper, bits),
        };
        let tlg = t_lg(&order)?.t_form.eval(&log_t, bits);
        let tc = t_c_value(&coeffs, &log_t, &order, bits)?;
        let lg_side = Complex::with_val(bits, &tlg + &tc) * open_closed_factor(bits);
        let r = rel_diff(&whole.value, &lg_side);
        ok &= r < tol;
        report["lg_side"] = complex_json(&lg_side);
        report["lg_rel_error"] = json!(r);
    }
    report["pass"] = json!(ok);
    let out = Output::json(report);
    if ok {
        Ok(out)
    } else {
        Err(Failure::Verify("continuation does not match".into(), out))
    }
}

fn cmd_oscillatory(m_max: u32) -> Res {
    let rep = verify_oscillatory_identities(m_max)?;
    let fmt = |p: &mirrorlab::exact::PiHalfScalar| json!({ "coeff": rational_json(p.coeff()), "sqrt_pi_power": p.half_pi_power() });
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| json!({ "side": c.side, "m": c.m, "lhs": fmt(&c.lhs), "rhs": fmt(&c.rhs), "pass": c.holds() }))
        .collect();
    let out = Output::json(json!({ "m_max": m_max, "checks": checks, "pass": rep.all_pass() }));
    if rep.all_pass() {
        Ok(out)
    } else {
        Err(Failure::Verify(format!("{} identities fail", rep.failures().len()), out))
    }
}

fn cmd_selftest(ctx: &Ctx) -> Res {
    let outcomes = acceptance::run_all(ctx.policy);
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let ok = outcomes.iter().all(|o| o.pass);
    let mut csv = String::from("id,pass,seconds\n");
    for o in &outcomes {
        csv.push_str(&format!("{},{},{:.3}\n", o.id, o.pass, o.seconds));
    }
    let out = Output { json: json!({ "checks": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>(), "pass": ok }), csv: Some(csv), plot: None };
    if ok {
        Ok(out)
    } else {
        Err(Failure::Verify("some acceptance checks fail".into(), out))
    }
}

fn run(cli: Cli) -> Res {
    let bits = match cli.common.bits {
        Some(b) => b,
        None => default_bits()?,
    };
    if !(32..=1 << 20).contains(&bits) {
        return Err(Failure::Usage(format!("--bits must be between 32 and 2^20, got {bits}")));
    }
    let ctx = Ctx {
        order: parse_rational(&cli.common.order, "--order")?,
        bits,
        policy: if cli.common.sequential { ExecPolicy::Sequential } else { ExecPolicy::Parallel },
    };
    match cli.command {
        Command::Series { name, k } => cmd_series(&ctx, name, k),
        Command::PfCheck { operator } => cmd_pf_check(&ctx, operator),
        Command::Gw { max_degree, bps } => {
            max_degree_check(max_degree)?;
            let t = gw_invariants(max_degree)?;
            let b = bps.then(|| multiple_cover_bps(&t));
            Ok(table_output(&t, b))
        }
        Command::Disk { max_degree, bps } => {
            max_degree_check(max_degree)?;
            let t = disk_invariants_cy(max_degree)?;
            let b = bps.then(|| disk_bps(&t));
            Ok(table_output(&t, b))
        }
        Command::Lg => {
            let m = lg_mirror_series(&ctx.order)?;
            let t = disk_invariants_lg(&ctx.order)?;
            let mut out = table_output(&t, None);
            out.json["tau"] = m.tau.to_json();
            out.json["inverse"] = m.inverse.to_json();
            out.json["conjectural"] = json!(true);
            Ok(out)
        }
        Command::Glsm { action } => cmd_glsm(action),
        Command::Brane { brane, b, model } => cmd_brane(&brane, &b, &model),
        Command::CentralCharge { model, brane, q, arg, method } => cmd_central_charge(&ctx, &model, &brane, &q, arg, method),
        Command::Wallcross { brane, q, coefficients, tol } => cmd_wallcross(&ctx, &brane, &q, coefficients, tol),
        Command::Oscillatory { m_max } => cmd_oscillatory(m_max),
        Command::Selftest => cmd_selftest(&ctx),
    }
}

fn emit(out: &Output, common: &Common) -> Result<(), Failure> {
    let text = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&with_schema(out.json.clone())).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => out.csv.clone().ok_or_else(|| Failure::Usage("this command has no CSV form".into()))?,
    };
    match &common.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display())))?,
        None => {
            let mut so = std::io::stdout().lock();
            let _ = so.write_all(text.as_bytes());
        }
    }
    if let Some(path) = &common.emit_plot_data {
        let pts = out.plot.as_ref().ok_or_else(|| Failure::Usage("this command has no plot data".into()))?;
        let mut s = String::from("x,y\n");
        for (x, y) in pts {
            s.push_str(&format!("{x:e},{y:e}\n"));
        }
        std::fs::write(path, s).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let common = cli.common.clone();
    let result = run(cli);
    let (out, code) = match result {
        Ok(out) => (Some(out), 0),
        Err(Failure::Verify(msg, out)) => {
            eprintln!("verification failed: {msg}");
            (Some(out), EXIT_VERIFY)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            (None, EXIT_DOMAIN)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            (None, EXIT_USAGE)
        }
    };
    if let Some(out) = out {
        if let Err(f) = emit(&out, &common) {
            return match f {
                Failure::Usage(m) => {
                    eprintln!("usage error: {m}");
                    ExitCode::from(EXIT_USAGE)
                }
                Failure::Domain(m) | Failure::Verify(m, _) => {
                    eprintln!("error: {m}");
                    ExitCode::from(EXIT_DOMAIN)
                }
            };
        }
    }
    ExitCode::from(code)
}
