//! Command-line front end for `shannon_cone`.
//!
//! [`run`] executes one [`RunConfig`] and writes the report to a writer;
//! [`exit_code`] maps library errors to the process exit status.

mod output;
mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use shannon_cone::bounds::{
    lovasz_problem, lovasz_theta_with, motzkin_straus_value_with, parrilo_problem, schrijver_problem,
    schrijver_theta_with, sos_problem, theta_r_problem, theta_r_with, BoundOptions, BoundResult, GramLayout,
};
use shannon_cone::graphs::{chromatic_number_with, maximum_independent_set, parse_graph_expr_with};
use shannon_cone::productprop::{
    check_product_pair_with, cone_membership, construct_counterexample_with, ConeId, MembershipVerdict,
};
use shannon_cone::sdp::{dump_problem, SolveOptions};
use shannon_cone::symmat::{parse_matrix_text, write_matrix_text};
use shannon_cone::{Error, Graph, Limits, Result, SymMatrix};

pub use output::{format_sig, Emitted};
pub use report::{paper_report, ReportRow, RowStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Alpha,
    Chi,
    Theta,
    ThetaPrime,
    ThetaR,
    MsValue,
    ConeMember,
    ProductCheck,
    Counterexample,
    PaperReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum GramArg {
    #[default]
    SignSymmetric,
    Full,
}

impl From<GramArg> for GramLayout {
    fn from(g: GramArg) -> Self {
        match g {
            GramArg::SignSymmetric => GramLayout::SignSymmetric,
            GramArg::Full => GramLayout::Full,
        }
    }
}

/// Graph bounds, cone-membership tests and product-property counterexamples.
#[derive(Clone, Debug, Parser)]
#[command(name = "shannon-cone", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Graph expression, e.g. `cycle:5` or `power(cycle:7,2)`.
    #[arg(long = "graph")]
    pub graph_expr: Option<String>,
    /// SOS level for theta-r.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// psd, parrilo, sos0, sos1 or oracle.
    #[arg(long, default_value = "parrilo")]
    pub cone: ConeId,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Relative solver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the assembled conic program to this path.
    #[arg(long)]
    pub dump_sdp: Option<PathBuf>,
    /// Write the certificate matrix Y of a bound to this path.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Matrix spec: `off-diag-ones:N`, `lambda2` or `file:<path>`.
    #[arg(long)]
    pub seed_matrix: Option<String>,
    /// Matrix spec for cone-member (defaults to --seed-matrix).
    #[arg(long)]
    pub matrix: Option<String>,
    /// Left factor spec for product-check.
    #[arg(long)]
    pub left: Option<String>,
    /// Right factor spec for product-check.
    #[arg(long)]
    pub right: Option<String>,
    /// Gram parametrisation for theta-r.
    #[arg(long, value_enum, default_value_t = GramArg::SignSymmetric)]
    pub gram: GramArg,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            graph_expr: None,
            r: 1,
            cone: ConeId::Parrilo,
            output: OutputFormat::Text,
            tol: None,
            dump_sdp: None,
            certificate: None,
            seed_matrix: None,
            matrix: None,
            left: None,
            right: None,
            gram: GramArg::SignSymmetric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let needs_graph = matches!(
            self.command,
            Command::Alpha | Command::Chi | Command::Theta | Command::ThetaPrime | Command::ThetaR | Command::MsValue
        );
        if needs_graph && self.graph_expr.is_none() {
            return Err(Error::InvalidArgument(format!("--graph is required for {}", self.command_name())));
        }
        if self.command == Command::ThetaR && self.r > 1 {
            return Err(Error::InvalidArgument(format!("--r must be 0 or 1, got {}", self.r)));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0 && t < 1.0) {
                return Err(Error::InvalidArgument(format!("--tol must lie in (0, 1), got {t}")));
            }
        }
        match self.command {
            Command::Counterexample if self.seed_matrix.is_none() => {
                Err(Error::InvalidArgument("--seed-matrix is required for counterexample".into()))
            }
            Command::ConeMember if self.matrix.is_none() && self.seed_matrix.is_none() => {
                Err(Error::InvalidArgument("--matrix is required for cone-member".into()))
            }
            Command::ProductCheck if self.left.is_none() || self.right.is_none() => {
                Err(Error::InvalidArgument("--left and --right are required for product-check".into()))
            }
            _ => Ok(()),
        }
    }

    fn command_name(&self) -> String {
        self.command.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }

    fn bound_options(&self, graph: &str) -> BoundOptions {
        let mut o = BoundOptions {
            layout: self.gram.into(),
            limits: Limits::from_env(),
            dump_on_failure: self.dump_sdp.clone(),
            graph_id: Some(graph.to_string()),
            ..Default::default()
        };
        if let Some(t) = self.tol {
            o.solve = SolveOptions { tol: t, ..o.solve };
        }
        o
    }
}

/// Exit status for an error: 2 invalid input, 3 resource limit, 4 solver
/// failure, 1 internal error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Syntax { .. } | Error::Io(_) | Error::NoCounterexample(_) => 2,
        Error::ResourceLimit(_) => 3,
        Error::Solver { .. } => 4,
        Error::Internal(_) => 1,
    }
}

/// Parses `off-diag-ones:N`, `lambda2`, `identity:N` or `file:<path>`.
pub fn parse_matrix_spec(spec: &str) -> Result<SymMatrix> {
    let spec = spec.trim();
    if spec == "lambda2" {
        return Ok(SymMatrix::lambda2());
    }
    let sized = |rest: &str, offset: usize| -> Result<usize> {
        match rest.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Syntax {
                offset,
                message: format!("expected a positive size, found '{rest}'"),
            }),
        }
    };
    if let Some(rest) = spec.strip_prefix("off-diag-ones:") {
        let n = sized(rest, "off-diag-ones:".len())?;
        return SymMatrix::all_ones(n).sub(&SymMatrix::identity(n));
    }
    if let Some(rest) = spec.strip_prefix("identity:") {
        return Ok(SymMatrix::identity(sized(rest, "identity:".len())?));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        return parse_matrix_text(&text);
    }
    Err(Error::Syntax {
        offset: 0,
        message: format!("unknown matrix spec '{spec}' (expected off-diag-ones:N, identity:N, lambda2 or file:<path>)"),
    })
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct ScalarRecord<'a> {
    command: &'a str,
    graph: &'a str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
}

fn scalar(config: &RunConfig, graph: &str, value: f64, witness: Option<Vec<usize>>) -> Emitted {
    let name = config.command_name();
    let mut headers = vec!["command".to_string(), "graph".into(), "value".into()];
    let mut row = vec![name.clone(), graph.to_string(), value.to_string()];
    if let Some(w) = &witness {
        headers.push("witness".into());
        row.push(w.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    }
    let shown = if value.fract() == 0.0 { format!("{value}") } else { format_sig(value) };
    Emitted::new(
        serde_json::to_value(ScalarRecord {
            command: &name,
            graph,
            value,
            witness,
        })
        .expect("serialisable"),
        headers,
        vec![row],
        format!("{name}({graph}) = {shown}\n"),
    )
}

fn bound(config: &RunConfig, res: &BoundResult) -> Result<Emitted> {
    let path = match &config.certificate {
        Some(p) => {
            write_file(p, &write_matrix_text(&res.certificate))?;
            Some(p.display().to_string())
        }
        None => None,
    };
    let rec = res.record(path.clone());
    let text = format!(
        "{}({}) = {}  [{} after {} iterations]\n",
        rec.bound,
        rec.graph,
        format_sig(rec.value),
        rec.status,
        res.iterations
    );
    Ok(Emitted::new(
        serde_json::to_value(&rec).expect("serialisable"),
        ["graph", "bound", "value", "status", "lambda", "certificate_path"].map(String::from).to_vec(),
        vec![vec![
            rec.graph.clone(),
            rec.bound.to_string(),
            rec.value.to_string(),
            rec.status.to_string(),
            rec.lambda.to_string(),
            path.unwrap_or_default(),
        ]],
        text,
    ))
}

fn verdict_row(v: &MembershipVerdict) -> Vec<String> {
    vec![
        v.subject.clone(),
        v.cone.to_string(),
        v.dim.to_string(),
        serde_json::to_value(v.outcome).expect("serialisable").as_str().unwrap_or_default().to_string(),
        v.detail.clone(),
    ]
}

fn verdict_headers() -> Vec<String> {
    ["subject", "cone", "dim", "outcome", "detail"].map(String::from).to_vec()
}

fn graph_for(config: &RunConfig) -> Result<(String, Graph)> {
    let expr = config.graph_expr.clone().expect("validated");
    let g = parse_graph_expr_with(&expr, &Limits::from_env())?;
    Ok((expr, g))
}

fn dump(config: &RunConfig, problem: Result<shannon_cone::sdp::ConicProblem>) -> Result<()> {
    if let Some(path) = &config.dump_sdp {
        write_file(path, &dump_problem(&problem?))?;
    }
    Ok(())
}

/// Runs one command and writes its report to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let emitted = execute(config)?;
    emitted.write(config.output, out)
}

/// Runs one command and returns its report without writing it.
pub fn execute(config: &RunConfig) -> Result<Emitted> {
    config.validate()?;
    let limits = Limits::from_env();
    match config.command {
        Command::Alpha => {
            let (expr, g) = graph_for(config)?;
            let set = maximum_independent_set(&g, &limits)?;
            Ok(scalar(config, &expr, set.len() as f64, Some(set)))
        }
        Command::Chi => {
            let (expr, g) = graph_for(config)?;
            Ok(scalar(config, &expr, chromatic_number_with(&g, &limits)? as f64, None))
        }
        Command::MsValue => {
            let (expr, g) = graph_for(config)?;
            Ok(scalar(config, &expr, motzkin_straus_value_with(&g, &limits)?, None))
        }
        Command::Theta => {
            let (expr, g) = graph_for(config)?;
            dump(config, lovasz_problem(&g))?;
            bound(config, &lovasz_theta_with(&g, &config.bound_options(&expr))?)
        }
        Command::ThetaPrime => {
            let (expr, g) = graph_for(config)?;
            dump(config, schrijver_problem(&g))?;
            bound(config, &schrijver_theta_with(&g, &config.bound_options(&expr))?)
        }
        Command::ThetaR => {
            let (expr, g) = graph_for(config)?;
            dump(config, theta_r_problem(&g, config.r, config.gram.into()))?;
            bound(config, &theta_r_with(&g, config.r, &config.bound_options(&expr))?)
        }
        Command::ConeMember => {
            let spec = config.matrix.as_ref().or(config.seed_matrix.as_ref()).expect("validated");
            let q = parse_matrix_spec(spec)?;
            match config.cone {
                ConeId::Parrilo => dump(config, parrilo_problem(&q))?,
                ConeId::SosR(r) => dump(config, sos_problem(&q, r, config.gram.into()).map(|(_, p)| p))?,
                _ => {}
            }
            let v = cone_membership(config.cone, &q, spec, &limits)?;
            let text = format!(
                "{spec} in {}: {}\n  {}\n",
                v.cone,
                if v.is_member() { "member" } else { "not a member" },
                v.detail
            );
            Ok(Emitted::new(
                serde_json::to_value(&v).expect("serialisable"),
                verdict_headers(),
                vec![verdict_row(&v)],
                text,
            ))
        }
        Command::ProductCheck => {
            let (ls, rs) = (config.left.as_ref().expect("validated"), config.right.as_ref().expect("validated"));
            let check = check_product_pair_with(config.cone, &parse_matrix_spec(ls)?, &parse_matrix_spec(rs)?, &limits)?;
            #[derive(Serialize)]
            struct Rec<'a> {
                cone: ConeId,
                holds: bool,
                product_dim: usize,
                left: &'a MembershipVerdict,
                right: &'a MembershipVerdict,
                product: &'a MembershipVerdict,
            }
            let rec = Rec {
                cone: check.cone,
                holds: check.holds,
                product_dim: check.product.dim(),
                left: &check.left,
                right: &check.right,
                product: &check.result,
            };
            let text = format!(
                "product property for {} on ({ls}, {rs}): {}\n  product order {}: {}\n",
                check.cone,
                if check.holds { "holds" } else { "violated" },
                check.product.dim(),
                check.result.detail
            );
            Ok(Emitted::new(
                serde_json::to_value(&rec).expect("serialisable"),
                verdict_headers(),
                [&check.left, &check.right, &check.result].into_iter().map(verdict_row).collect(),
                text,
            ))
        }
        Command::Counterexample => {
            let spec = config.seed_matrix.as_ref().expect("validated");
            let q = parse_matrix_spec(spec)?;
            let rep = construct_counterexample_with(config.cone, &q, &limits)?;
            let rec = rep.record();
            let mut text = format!(
                "seed {spec} (order {}), cone {}\n  v = {:?}, vᵀQv = {}\n  k1 = {} (threshold {})\n  wᵀBw = {}\n  k2 = {} (threshold {})\n  C has order {}, u = {:?}\n  uᵀCu = {}\n",
                q.dim(),
                rep.cone,
                rep.v,
                format_sig(rep.v_value),
                format_sig(rep.k1),
                format_sig(rep.k1_threshold),
                format_sig(rep.w_b_w),
                format_sig(rep.k2),
                format_sig(rep.k2_threshold),
                rep.c.dim(),
                rep.u,
                format_sig(rep.u_value)
            );
            for m in &rep.memberships {
                text.push_str(&format!("  {} ∈ {}: {:?} ({})\n", m.subject, m.cone, m.outcome, m.detail));
            }
            text.push_str(&format!("  {}\n", rec.conclusion));
            let headers = ["cone", "k1", "k1_threshold", "wBw", "k2", "k2_threshold", "C_dim", "u_value", "violating_left", "violating_right", "verified"]
                .map(String::from)
                .to_vec();
            let row = vec![
                rec.cone.to_string(),
                rec.k1.to_string(),
                rec.k1_threshold.to_string(),
                rec.w_b_w.to_string(),
                rec.k2.to_string(),
                rec.k2_threshold.to_string(),
                rec.c_dim.to_string(),
                rec.u_value.to_string(),
                rec.violating_pair.left.clone(),
                rec.violating_pair.right.clone(),
                rec.violating_pair.verified.to_string(),
            ];
            Ok(Emitted::new(serde_json::to_value(&rec).expect("serialisable"), headers, vec![row], text))
        }
        Command::PaperReport => Ok(report::emit(&paper_report())),
    }
}

/// Parses arguments, runs, and reports errors on `err`; returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(&config).and_then(|em| {
        em.write(config.output, out)?;
        Ok(em)
    }) {
        Ok(em) => em.exit_code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
