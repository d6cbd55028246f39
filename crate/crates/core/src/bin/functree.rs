//! Command-line front end. Reports are JSON on stdout (or `--out`).
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use functree::apportion::{apportionment_report, spectrum_gap};
use functree::campaign::{run_campaign, CampaignConfig, CheckKind};
use functree::certificate::{
    certificate_factors, certificate_magnitude_check, check_certificate_equivalence, check_monomial_support,
    check_transposition_invariance, composition_chain, first_nonzero_lattice_point, nonvanishing_by_sweep,
};
use functree::decomposition::{decompose_directed_knn, decompose_k2n1, decompose_knxnx, verify_partition, HostKind};
use functree::export::{export, parse_decomposition, parse_labeling, parse_tree, ExportFormat, ExportObject};
use functree::group::{closure, sigma_from_first_column, sigma_from_labeled_tree, worked_example};
use functree::labeling::{find_all_beta, find_beta_with, phi_set, verify_beta, Labeling, SearchOptions};
use functree::{catalog, Error, FunctionalTree, Permutation, Result};

#[derive(Parser)]
#[command(
    name = "functree",
    version,
    about = "Functional trees, oriented beta-labelings and the decompositions they certify"
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free-tree catalog.
    Trees {
        #[command(subcommand)]
        command: TreesCommand,
    },
    /// Find and verify oriented beta-labelings.
    Label {
        #[command(subcommand)]
        command: LabelCommand,
    },
    /// Build a cyclic decomposition of a host graph.
    Decompose(DecomposeArgs),
    /// Polynomial certificate checks.
    Certificate {
        #[command(subcommand)]
        command: CertificateCommand,
    },
    /// Entry permutations generated by cyclic shifts.
    Group {
        #[command(subcommand)]
        command: GroupCommand,
    },
    /// Unitary apportionment of the block-diagonal bi-adjacency matrix.
    Apportion {
        #[command(subcommand)]
        command: ApportionCommand,
    },
    /// Batch sweeps over the catalog.
    Campaign {
        #[command(subcommand)]
        command: CampaignCommand,
    },
    /// Render a tree, labeling or decomposition as JSON or DOT.
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct TreeArg {
    /// Tree as inline JSON (`[0,0,1,1]` or `{"n":4,"g":[0,0,1,1]}`) or a path to a JSON file.
    #[arg(long)]
    tree: String,
}

#[derive(Args, Clone)]
struct LabelingArg {
    /// Permutation as inline JSON (`[0,3,2,1]` or `{"sigma":[..]}`) or a file; searched for when omitted.
    #[arg(long)]
    sigma: Option<String>,
    /// Seed for randomized restarts of the search.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum TreesCommand {
    Enumerate {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum LabelCommand {
    Find {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        seed: Option<u64>,
        /// List every labeling instead of the first one.
        #[arg(long)]
        all: bool,
    },
    Verify {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        sigma: String,
    },
    /// Every permutation whose relabelling is an oriented beta-labeling.
    Phi {
        #[command(flatten)]
        tree: TreeArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

impl From<Format> for ExportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ExportFormat::Json,
            Format::Dot => ExportFormat::Dot,
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    tree: TreeArg,
    #[command(flatten)]
    labeling: LabelingArg,
    /// Host graph: knn, k2n1 or knxnx.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 1)]
    x: usize,
    /// Print the partition report instead of the decomposition.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum CertificateCommand {
    /// Evaluate the certificate at one lattice point.
    Eval {
        #[command(flatten)]
        tree: TreeArg,
        /// Lattice point as a JSON array.
        #[arg(long)]
        point: String,
    },
    Magnitude {
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Whether the certificate is nonzero somewhere.
    Nonzero {
        #[command(flatten)]
        tree: TreeArg,
        /// Sweep all n^n lattice points instead of permutations only.
        #[arg(long)]
        full_lattice: bool,
    },
    Equivalence {
        #[command(flatten)]
        tree: TreeArg,
    },
    Invariance {
        #[command(flatten)]
        tree: TreeArg,
    },
    MonomialSupport {
        #[arg(long)]
        n: usize,
    },
    Composition {
        #[command(flatten)]
        tree: TreeArg,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    FromTree {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        labeling: LabelingArg,
    },
    /// Group generated by first columns, each a JSON array of entry indices.
    Closure {
        #[arg(long)]
        n: usize,
        #[arg(long = "column", required = true)]
        columns: Vec<String>,
    },
    Example {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum ApportionCommand {
    /// Check one tree, or every catalog tree up to `--n-max` when `--tree` is omitted.
    Check {
        #[arg(long)]
        tree: Option<String>,
        #[command(flatten)]
        labeling: LabelingArg,
        #[arg(long, default_value_t = functree::apportion::DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Also compare power-sum traces against the input.
        #[arg(long)]
        spectrum: bool,
    },
}

#[derive(Subcommand)]
enum CampaignCommand {
    Run(CampaignArgs),
}

#[derive(Args)]
struct CampaignArgs {
    /// JSON campaign descriptor; the flags below override nothing when it is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated check names.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    x_min: usize,
    #[arg(long, default_value_t = 1)]
    x_max: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// JSONL file to append records to.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectKind {
    Tree,
    Labeling,
    Decomposition,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum)]
    object: ObjectKind,
    /// Tree input for tree and labeling exports.
    #[arg(long)]
    tree: Option<String>,
    #[command(flatten)]
    labeling: LabelingArg,
    /// Decomposition JSON (inline or file) for decomposition exports.
    #[arg(long)]
    decomposition: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    format: Format,
}

/// A rendered report plus whether everything in it passed.
struct Report {
    body: String,
    pass: bool,
}

impl Report {
    fn json(value: &impl Serialize, pass: bool) -> Result<Report> {
        Ok(Report {
            body: serde_json::to_string_pretty(value)?,
            pass,
        })
    }
}

fn inline_or_file(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn load_tree(arg: &str) -> Result<FunctionalTree> {
    parse_tree(&inline_or_file(arg)?)
}

fn load_labeling(t: &FunctionalTree, arg: &LabelingArg) -> Result<Labeling> {
    match &arg.sigma {
        Some(s) => parse_labeling(t, &inline_or_file(s)?),
        None => find_beta_with(
            t,
            &SearchOptions {
                seed: arg.seed,
                ..SearchOptions::default()
            },
        ),
    }
}

fn labeling_json(lab: &Labeling) -> serde_json::Value {
    json!({
        "sigma": lab.sigma,
        "h": lab.h.parent_map(),
        "signed_labels": lab.signed_labels,
        "a_labels": lab.a_labels(),
        "b_labels": lab.b_labels(),
    })
}

fn parse_json_array(arg: &str) -> Result<Vec<usize>> {
    serde_json::from_str(arg).map_err(|e| Error::MalformedInput(format!("expected a JSON array: {e}")))
}

fn run(command: Command) -> Result<Report> {
    match command {
        Command::Trees {
            command: TreesCommand::Enumerate { n },
        } => {
            let entries: Vec<_> = catalog(n)?
                .into_iter()
                .map(|e| json!({"index": e.index, "code": e.canonical_code, "g": e.tree.parent_map()}))
                .collect();
            Report::json(&entries, true)
        }
        Command::Label { command } => label(command),
        Command::Decompose(args) => decompose(args),
        Command::Certificate { command } => certificate(command),
        Command::Group { command } => group(command),
        Command::Apportion { command } => apportion(command),
        Command::Campaign {
            command: CampaignCommand::Run(args),
        } => campaign(args),
        Command::Export(args) => export_object(args),
    }
}

fn label(command: LabelCommand) -> Result<Report> {
    match command {
        LabelCommand::Find { tree, seed, all } => {
            let t = load_tree(&tree.tree)?;
            if all {
                let labs: Vec<_> = find_all_beta(&t)?.iter().map(labeling_json).collect();
                let found = !labs.is_empty();
                return Report::json(&labs, found);
            }
            let lab = find_beta_with(
                &t,
                &SearchOptions {
                    seed,
                    ..SearchOptions::default()
                },
            )?;
            Report::json(&labeling_json(&lab), true)
        }
        LabelCommand::Verify { tree, sigma } => {
            let t = load_tree(&tree.tree)?;
            let sigma: Permutation = serde_json::from_str(&inline_or_file(&sigma)?)
                .map_err(|e| Error::MalformedInput(format!("not a permutation: {e}")))?;
            match verify_beta(&t, &sigma) {
                Ok(lab) => Report::json(&json!({"pass": true, "labeling": labeling_json(&lab)}), true),
                Err(Error::NotBetaLabeling(failure)) => {
                    Report::json(&json!({"pass": false, "failure": failure}), false)
                }
                Err(e) => Err(e),
            }
        }
        LabelCommand::Phi { tree } => {
            let phi = phi_set(&load_tree(&tree.tree)?)?;
            Report::json(&json!({"size": phi.len(), "permutations": phi}), true)
        }
    }
}

fn decompose(args: DecomposeArgs) -> Result<Report> {
    let t = load_tree(&args.tree.tree)?;
    let lab = load_labeling(&t, &args.labeling)?;
    let d = match HostKind::parse(&args.target)? {
        HostKind::DirectedKnn => decompose_directed_knn(&t, &lab)?,
        HostKind::K2n1 => decompose_k2n1(&t, &lab, args.x)?,
        HostKind::Knxnx => decompose_knxnx(&t, &lab, args.x)?,
    };
    if args.verify {
        let report = verify_partition(&d);
        let pass = report.pass;
        return Report::json(&report, pass);
    }
    Ok(Report {
        body: export(args.format.into(), ExportObject::Decomposition(&d))?,
        pass: true,
    })
}

fn certificate(command: CertificateCommand) -> Result<Report> {
    match command {
        CertificateCommand::Eval { tree, point } => {
            let t = load_tree(&tree.tree)?;
            let f = parse_json_array(&point)?;
            let factors = certificate_factors(&t, &f)?;
            let value = factors.value();
            Report::json(
                &json!({
                    "value": value.to_string(),
                    "vertex": factors.vertex.to_string(),
                    "edge": factors.edge.to_string(),
                    "range": factors.range.to_string(),
                }),
                true,
            )
        }
        CertificateCommand::Magnitude { tree } => {
            let r = certificate_magnitude_check(&load_tree(&tree.tree)?)?;
            let pass = r.pass;
            Report::json(&r, pass)
        }
        CertificateCommand::Nonzero { tree, full_lattice } => {
            let t = load_tree(&tree.tree)?;
            if full_lattice {
                let witness = first_nonzero_lattice_point(&t)?;
                let pass = witness.is_some();
                Report::json(
                    &json!({"nonzero": pass, "witness": witness.map(|p| p.as_slice().to_vec())}),
                    pass,
                )
            } else {
                let nonzero = nonvanishing_by_sweep(&t)?;
                Report::json(&json!({"nonzero": nonzero}), nonzero)
            }
        }
        CertificateCommand::Equivalence { tree } => {
            let r = check_certificate_equivalence(&load_tree(&tree.tree)?)?;
            let pass = r.pass;
            Report::json(&r, pass)
        }
        CertificateCommand::Invariance { tree } => {
            let r = check_transposition_invariance(&load_tree(&tree.tree)?)?;
            let pass = r.pass;
            Report::json(&r, pass)
        }
        CertificateCommand::MonomialSupport { n } => {
            let r = check_monomial_support(n)?;
            let pass = r.pass;
            Report::json(&r, pass)
        }
        CertificateCommand::Composition { tree } => {
            let c = composition_chain(&load_tree(&tree.tree)?)?;
            let pass = c.implication_holds && c.ends_constant;
            Report::json(&c, pass)
        }
    }
}

fn group(command: GroupCommand) -> Result<Report> {
    match command {
        GroupCommand::FromTree { tree, labeling } => {
            let t = load_tree(&tree.tree)?;
            let lab = load_labeling(&t, &labeling)?;
            let sigma = sigma_from_labeled_tree(&t, &lab)?;
            Report::json(&json!({"sigma": sigma.sigma, "matrix": sigma.matrix()}), true)
        }
        GroupCommand::Closure { n, columns } => {
            let generators = columns
                .iter()
                .map(|c| sigma_from_first_column(n, &parse_json_array(c)?))
                .collect::<Result<Vec<_>>>()?;
            let summary = closure(&generators)?;
            let pass = summary.verified_closed != Some(false);
            Report::json(&summary, pass)
        }
        GroupCommand::Example { n } => {
            if n != 3 {
                return Err(Error::PreconditionViolated(
                    "the worked example exists for n = 3 only".into(),
                ));
            }
            let (s1, s2, g) = worked_example()?;
            Report::json(
                &json!({"sigma1": s1.matrix(), "sigma2": s2.matrix(), "order": g.order, "group": g}),
                true,
            )
        }
    }
}

fn apportion(command: ApportionCommand) -> Result<Report> {
    let ApportionCommand::Check {
        tree,
        labeling,
        tol,
        n_max,
        spectrum,
    } = command;
    let trees: Vec<FunctionalTree> = match &tree {
        Some(arg) => vec![load_tree(arg)?],
        None => (1..=n_max)
            .map(catalog)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .map(|e| e.tree)
            .collect(),
    };
    let mut reports = Vec::new();
    let mut pass = true;
    for t in &trees {
        let lab = load_labeling(t, &labeling)?;
        let r = apportionment_report(t, &lab, tol)?;
        let gap = if spectrum {
            Some(spectrum_gap(t, &lab.sigma)?)
        } else {
            None
        };
        pass &= r.pass && gap.is_none_or(|g| g <= 1e-7);
        reports.push(json!({"tree": t.parent_map(), "sigma": lab.sigma, "report": r, "spectrum_gap": gap}));
    }
    if tree.is_some() {
        return Report::json(&reports[0], pass);
    }
    Report::json(&json!({"trees": reports.len(), "pass": pass, "reports": reports}), pass)
}

fn campaign(args: CampaignArgs) -> Result<Report> {
    let config = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => CampaignConfig {
            checks: args.checks.iter().map(|c| CheckKind::parse(c)).collect::<Result<_>>()?,
            n_min: args.n_min,
            n_max: args.n_max,
            x_min: args.x_min,
            x_max: args.x_max,
            workers: args.workers,
            output: args.records,
            seed: args.seed,
        },
    };
    match run_campaign(&config) {
        Ok(summary) => Report::json(&summary, true),
        Err(Error::PartialFailure(summary)) => Report::json(&*summary, false),
        Err(e) => Err(e),
    }
}

fn export_object(args: ExportArgs) -> Result<Report> {
    let format = args.format.into();
    let missing = |what: &str| Error::MalformedInput(format!("--{what} is required for this object"));
    let body = match args.object {
        ObjectKind::Tree => {
            let t = load_tree(args.tree.as_deref().ok_or_else(|| missing("tree"))?)?;
            export(format, ExportObject::Tree(&t))?
        }
        ObjectKind::Labeling => {
            let t = load_tree(args.tree.as_deref().ok_or_else(|| missing("tree"))?)?;
            let lab = load_labeling(&t, &args.labeling)?;
            export(format, ExportObject::Labeling(&lab))?
        }
        ObjectKind::Decomposition => {
            let raw = args.decomposition.as_deref().ok_or_else(|| missing("decomposition"))?;
            let d = parse_decomposition(&inline_or_file(raw)?)?;
            export(format, ExportObject::Decomposition(&d))?
        }
    };
    Ok(Report { body, pass: true })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::VerificationFailed(_)
        | Error::NotBetaLabeling(_)
        | Error::NotFound
        | Error::NotBijective(_)
        | Error::PartialFailure(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = run(cli.command).and_then(|report| {
        let mut body = report.body;
        if !body.ends_with('\n') {
            body.push('\n');
        }
        match &out {
            Some(path) => std::fs::write(path, body)?,
            None => print!("{body}"),
        }
        Ok(report.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
