//! `qcnt`: command-line front end for qcnt-core.
//!
//! Artifacts go to standard output, or to `--out` with a one-line summary on
//! standard output. Failures print a JSON diagnostic on standard error and
//! exit with 2 (bad input) or 3 (truncation or precision).

use std::fmt;
use std::io::Write as _;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use qcnt_core::modelset::enumerate;
use qcnt_core::modular::{j_invariant, pink_set_check, pink_targets, pink_value_check, quantum_j, Prefactor};
use qcnt_core::qctrig::{
    c_abs, cos_zeros, curve_csv, curve_samples, curve_svg, exp_qc, loop_count, s_abs, t_abs, winding, TrigTables,
};
use qcnt_core::theta::{functional_equation_residual, lambda_completed, poisson_check, Normalization, WeightSpec};
use qcnt_core::zeta::{zeta_continued, zeta_deep, zeta_direct};
use qcnt_core::{FieldElement, ModelSetSpec, PointCloud, QcError, QuadraticField};

const SCHEMA: &str = "qcnt/1";

/// Exact rational `p/q` (or an integer); decimals are rejected.
#[derive(Debug, Clone, PartialEq)]
struct Rat(BigRational);

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(['.', 'e', 'E']) {
            return Err(format!("{s:?} is not an exact fraction; write it as p/q"));
        }
        BigRational::from_str(s.trim())
            .map(Rat)
            .map_err(|_| format!("{s:?} is not a rational of the form p/q"))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "qcnt", version, about = "Quasicrystalline number theory toolkit")]
struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Field data for ℚ(√d): ring of integers, fundamental unit.
    Field(FieldArgs),
    /// Enumerate a model set.
    Modelset(ModelsetArgs),
    /// ζ(𝔪, s) by direct summation or continuation.
    Zeta(ZetaArgs),
    /// Completed Λ(𝔪, s) and its functional-equation residual.
    Lambda(LambdaArgs),
    /// Poisson–Meyer check of the theta function at t.
    ThetaCheck(ThetaArgs),
    /// J = ζ(6)²/ζ(4)³ and j.
    J(JArgs),
    /// Diophantine j_ε(θ) along ε = θ^(−x−m).
    Jqt(JqtArgs),
    /// Convergence of scaled Λ sets and values to 𝔞_x.
    Pink(PinkArgs),
    /// Quasicrystalline sine, cosine, zeros and π.
    Trig(TrigArgs),
    /// Samples of the quasicrystalline exponential.
    Curve(CurveArgs),
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct FieldArgs {
    #[arg(long, default_value_t = 5)]
    d: i64,
}

/// Model set selection: `{α ∈ O_K : |α'| < |θ'|^x}`, or `ξℤ` with `--lattice`.
#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ModelArgs {
    #[arg(long, default_value_t = 5)]
    d: i64,
    /// Window exponent as an exact fraction.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    x: Rat,
    /// Use the closed window `|α'| ≤ |θ'|^x`.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    closed: bool,
    /// Lattice mode with spacing ξ (exact fraction); ignores the window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<Rat>,
}

impl ModelArgs {
    fn field(&self) -> Result<Arc<QuadraticField>, QcError> {
        Ok(Arc::new(QuadraticField::new(self.d)?))
    }

    fn spec(&self) -> Result<ModelSetSpec, QcError> {
        let k = self.field()?;
        match &self.lattice {
            Some(xi) => ModelSetSpec::lattice(k, FieldElement::rational(xi.0.clone())),
            None => ModelSetSpec::ring(k, &self.x.0, !self.closed),
        }
    }

    fn cloud(&self, range: f64, signed: bool) -> Result<PointCloud, QcError> {
        enumerate(&self.spec()?, range, signed)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ModelsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 100.0)]
    range: f64,
    /// Enumerate [−R, R] instead of (0, R].
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    signed: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ZetaMethod {
    Direct,
    Continued,
    Deep,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ZetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s_im: f64,
    #[arg(long, value_enum, default_value_t = ZetaMethod::Continued)]
    method: ZetaMethod,
    /// Integration-by-parts depth for `--method deep`.
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 1e4)]
    range: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Norm {
    Covolume,
    TwoPi,
}

impl From<Norm> for Normalization {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Covolume => Normalization::Covolume,
            Norm::TwoPi => Normalization::TwoPi,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct LambdaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s_im: f64,
    /// Gaussian weight parameter c in e^(−πcy²).
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = Norm::Covolume)]
    norm: Norm,
    /// Range of the Dirichlet side of the residual.
    #[arg(long, default_value_t = 1e4)]
    range: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct ThetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = Norm::Covolume)]
    norm: Norm,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct JArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1e4)]
    range: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PrefactorArg {
    TwelveCubed,
    Twelve,
}

impl From<PrefactorArg> for Prefactor {
    fn from(p: PrefactorArg) -> Self {
        match p {
            PrefactorArg::TwelveCubed => Prefactor::TwelveCubed,
            PrefactorArg::Twelve => Prefactor::Twelve,
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct JqtArgs {
    #[arg(long, default_value_t = 5)]
    d: i64,
    #[arg(long, default_value = "0")]
    x: Rat,
    #[arg(long, default_value_t = 8)]
    m_max: u32,
    #[arg(long, default_value_t = 100_000)]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = PrefactorArg::TwelveCubed)]
    prefactor: PrefactorArg,
    /// Range used for the target J(𝔞_x).
    #[arg(long, default_value_t = 2e4)]
    range: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PinkMode {
    Set,
    Value,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct PinkArgs {
    #[arg(long, default_value_t = 5)]
    d: i64,
    #[arg(long, default_value = "0")]
    x: Rat,
    #[arg(long, default_value_t = 8)]
    m_max: u32,
    #[arg(long, value_enum, default_value_t = PinkMode::Set)]
    mode: PinkMode,
    /// Comparison range for `--mode set`.
    #[arg(long, default_value_t = 50.0)]
    range: f64,
    /// Search bound for Λ_ε in `--mode value`.
    #[arg(long, default_value_t = 100_000)]
    n_max: u64,
    /// `csv` emits the scaled sets as `m,value` rows.
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TrigWhat {
    Values,
    Zeros,
    Pi,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct TrigArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2000.0)]
    range: f64,
    #[arg(long, value_enum, default_value_t = TrigWhat::Values)]
    what: TrigWhat,
    /// Evaluation points for `values`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,1,2")]
    #[serde(serialize_with = "comma_list")]
    at: Vec<f64>,
    /// Number of zeros of c for `zeros` and `pi`.
    #[arg(long, default_value_t = 50)]
    zeros: usize,
}

fn comma_list<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    s.serialize_str(&parts.join(","))
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CurveFormat {
    Svg,
    Csv,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2000.0)]
    range: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = CurveFormat::Svg)]
    format: CurveFormat,
}

enum Artifact {
    Json(Value),
    Text { body: String, summary: String },
}

#[derive(Debug)]
enum Failure {
    Core(QcError),
    Io(std::io::Error),
}

impl From<QcError> for Failure {
    fn from(e: QcError) -> Self {
        Failure::Core(e)
    }
}

fn envelope(command: &str, config: &impl Serialize, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "result": result,
    })
}

fn config_line(prefix: &str, command: &str, config: &impl Serialize) -> String {
    let c = json!({"schema": SCHEMA, "command": command, "config": config});
    format!("{prefix}{c}")
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn field(a: &FieldArgs) -> Result<Artifact, Failure> {
    let k = QuadraticField::new(a.d)?;
    Ok(Artifact::Json(envelope("field", a, k.summary())))
}

fn modelset(a: &ModelsetArgs) -> Result<Artifact, Failure> {
    let spec = a.model.spec()?;
    let cloud = enumerate(&spec, a.range, a.signed)?;
    Ok(match a.format {
        TableFormat::Csv => Artifact::Text {
            body: format!("{}\n{}", config_line("# ", "modelset", a), cloud.to_csv()),
            summary: format!("{} points in range {}", cloud.len(), a.range),
        },
        TableFormat::Json => {
            let points: Vec<Value> = cloud
                .points
                .iter()
                .map(|p| json!({"a": p.a, "b": p.b, "value": p.value, "conj_value": p.internal}))
                .collect();
            Artifact::Json(envelope(
                "modelset",
                a,
                json!({
                    "spec": spec.describe(),
                    "denominator": cloud.den,
                    "stats": cloud.stats_json(),
                    "points": points,
                }),
            ))
        }
    })
}

fn zeta(a: &ZetaArgs) -> Result<Artifact, Failure> {
    let cloud = a.model.cloud(a.range, false)?;
    let s = Complex64::new(a.s, a.s_im);
    let r = match a.method {
        ZetaMethod::Direct => zeta_direct(&cloud, s)?,
        ZetaMethod::Continued => zeta_continued(&cloud, s)?,
        ZetaMethod::Deep => zeta_deep(&cloud, s, a.depth)?,
    };
    let mut v = r.to_json();
    v["s"] = complex(s);
    Ok(Artifact::Json(envelope("zeta", a, v)))
}

fn lambda(a: &LambdaArgs) -> Result<Artifact, Failure> {
    let spec = a.model.spec()?;
    let w = WeightSpec::new(a.c)?;
    let s = Complex64::new(a.s, a.s_im);
    let norm = a.norm.into();
    let lam = lambda_completed(&spec, &w, s, norm)?;
    let fe = functional_equation_residual(&spec, &w, s, norm, a.range)?;
    Ok(Artifact::Json(envelope(
        "lambda",
        a,
        json!({
            "s": complex(s),
            "value": complex(lam.value),
            "error_bound": lam.error_bound,
            "residual_functional_eq": fe.residual,
            "functional_equation": to_value(&fe),
        }),
    )))
}

fn theta_check(a: &ThetaArgs) -> Result<Artifact, Failure> {
    let spec = a.model.spec()?;
    let w = WeightSpec::new(a.c)?;
    let r = poisson_check(&spec, &w, a.t, a.norm.into())?;
    Ok(Artifact::Json(envelope(
        "theta-check",
        a,
        json!({
            "t": r.t,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "rel_err": r.rel_err,
            "constant_used": r.constant,
            "normalization": r.normalization,
            "lhs_bound": r.lhs_bound,
            "rhs_bound": r.rhs_bound,
            "cutoffs": {"range": r.range, "dual_range": r.dual_range, "dual_shells": r.dual_shells},
        }),
    )))
}

fn j(a: &JArgs) -> Result<Artifact, Failure> {
    let cloud = a.model.cloud(a.range, false)?;
    let v = j_invariant(&cloud)?;
    Ok(Artifact::Json(envelope("j", a, to_value(&v))))
}

fn jqt(a: &JqtArgs) -> Result<Artifact, Failure> {
    let k = Arc::new(QuadraticField::new(a.d)?);
    let rep = quantum_j(&k, &a.x.0, a.m_max, a.n_max, a.prefactor.into())?;
    let (target, target_closed) = pink_targets(k, &a.x.0, a.range)?;
    let pairs: Vec<Value> = rep
        .j_values
        .iter()
        .map(|je| json!({"eps": je.eps, "big_j_eps": je.big_j_eps, "j_eps": je.j_eps}))
        .collect();
    let mut v = to_value(&rep);
    v["pairs"] = Value::Array(pairs);
    v["target"] = json!(target);
    v["target_closed"] = json!(target_closed);
    Ok(Artifact::Json(envelope("jqt", a, v)))
}

fn pink(a: &PinkArgs) -> Result<Artifact, Failure> {
    let k = Arc::new(QuadraticField::new(a.d)?);
    let rep = match a.mode {
        PinkMode::Set => pink_set_check(k, &a.x.0, a.m_max, a.range)?,
        PinkMode::Value => pink_value_check(k, &a.x.0, a.m_max, a.n_max)?,
    };
    Ok(match a.format {
        TableFormat::Json => Artifact::Json(envelope("pink", a, to_value(&rep))),
        TableFormat::Csv => Artifact::Text {
            body: format!("{}\n{}", config_line("# ", "pink", a), rep.scaled_csv()),
            summary: format!("{} scaled sets", rep.scaled_sets.len()),
        },
    })
}

fn null_if_err<T: Serialize>(r: Result<T, QcError>) -> Value {
    r.map_or(Value::Null, to_value)
}

fn trig(a: &TrigArgs) -> Result<Artifact, Failure> {
    let cloud = a.model.cloud(a.range, false)?;
    let mut t = TrigTables::new(&cloud)?;
    let base = json!({
        "points": t.alphas.len(),
        "rho": t.rho,
        "x_tail": t.x_tail,
        "reach": t.reach(),
        "lattice_spacing": t.spacing,
    });
    let result = match a.what {
        TrigWhat::Values => {
            let mut rows = Vec::new();
            for &x in &a.at {
                let e = exp_qc(&t, x)?;
                rows.push(json!({
                    "x": x,
                    "s": to_value(s_abs(&t, x)?),
                    "c": to_value(c_abs(&t, x)?),
                    "t": null_if_err(t_abs(&t, x)),
                    "exp": {"re": e.re, "im": e.im},
                }));
            }
            json!({"tables": base, "values": rows})
        }
        TrigWhat::Zeros => {
            let z = cos_zeros(&t, a.zeros)?;
            json!({"tables": base, "zeros": z})
        }
        TrigWhat::Pi => {
            t = TrigTables::with_zeros(&cloud, a.zeros)?;
            json!({"tables": base, "pi": t.pi_qc})
        }
    };
    Ok(Artifact::Json(envelope("trig", a, result)))
}

fn curve(a: &CurveArgs) -> Result<Artifact, Failure> {
    let cloud = a.model.cloud(a.range, false)?;
    let t = TrigTables::new(&cloud)?;
    let s = curve_samples(&t, a.x_min, a.x_max, a.samples)?;
    let summary = format!("{} samples, {} loops, winding {:.3}", s.len(), loop_count(&s), winding(&s));
    let body = match a.format {
        CurveFormat::Csv => format!("{}\n{}", config_line("# ", "curve", a), curve_csv(&s)),
        CurveFormat::Svg => {
            let svg = curve_svg(&s);
            let (head, tail) = svg.split_once('\n').unwrap_or((&svg, ""));
            let comment = config_line("", "curve", a).replace("--", "- -");
            format!("{head}\n<!-- {comment} -->\n{tail}")
        }
    };
    Ok(Artifact::Text { body, summary })
}

fn dispatch(cli: &Cli) -> Result<Artifact, Failure> {
    match &cli.cmd {
        Cmd::Field(a) => field(a),
        Cmd::Modelset(a) => modelset(a),
        Cmd::Zeta(a) => zeta(a),
        Cmd::Lambda(a) => lambda(a),
        Cmd::ThetaCheck(a) => theta_check(a),
        Cmd::J(a) => j(a),
        Cmd::Jqt(a) => jqt(a),
        Cmd::Pink(a) => pink(a),
        Cmd::Trig(a) => trig(a),
        Cmd::Curve(a) => curve(a),
    }
}

fn diagnostic(kind: &str, message: &str, code: u8) -> ExitCode {
    let v = json!({"schema": SCHEMA, "error": kind, "message": message, "exit_code": code});
    eprintln!("{v}");
    ExitCode::from(code)
}

fn emit(cli: &Cli, art: Artifact) -> std::io::Result<()> {
    let (body, summary) = match art {
        Artifact::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("json");
            s.push('\n');
            (s, format!("{} written", v["command"].as_str().unwrap_or("result")))
        }
        Artifact::Text { body, summary } => (body, summary),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body)?;
            println!("{summary} -> {}", path.display());
        }
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return diagnostic("usage", &e.kind().to_string(), 2);
        }
    };
    let result = dispatch(&cli).and_then(|a| emit(&cli, a).map_err(Failure::Io));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            let code = if e.is_precision_class() { 3 } else { 2 };
            diagnostic(e.kind(), &e.to_string(), code)
        }
        Err(Failure::Io(e)) => diagnostic("io", &e.to_string(), 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_parse_exactly() {
        let r: Rat = "-3/6".parse().unwrap();
        assert_eq!(r.0, BigRational::new((-1).into(), 2.into()));
        assert_eq!("7".parse::<Rat>().unwrap().to_string(), "7");
        for bad in ["0.5", "1e3", "1/0", "a/b", ""] {
            assert!(bad.parse::<Rat>().is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
