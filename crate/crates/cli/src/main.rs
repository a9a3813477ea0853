//! `mub`: build, check and use Pauli partitions and their unbiased bases.

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use serde_json::json;

use mub_core::basis::{eigenbasis, verify_unbiased, CHAINED_TOL};
use mub_core::entanglement::{classify_basis, fingerprint_bases, partition_fingerprint};
use mub_core::gf2::parse_polynomial;
use mub_core::io::{
    partition_to_json, table_from_csv, table_to_csv, BasisDoc, DensityMatrixDoc, PartitionDoc,
};
use mub_core::partition::{
    enumerate_partitions, partition_from_labels, preset, stabilizing_set, standard_partition, validate_partition,
};
use mub_core::tomography::{mub_probabilities, reconstruct, sample_shots, trace_distance};
use mub_core::{BasisLabelSpec, DensityMatrix, MubError, MubFrame, MubPartition, OrthonormalBasis, Preset};

#[derive(Parser, Debug)]
#[command(name = "mub", version, about = "Pauli partitions, mutually unbiased bases and MUB tomography")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, enumerate and validate partitions.
    #[command(subcommand)]
    Partition(PartitionCmd),
    /// Synthesize and compare bases.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// Entanglement fingerprint of a partition or basis file.
    Classify {
        /// Partition JSON, basis JSON or a list of bases; `-` reads stdin.
        file: String,
    },
    /// Tomography from MUB probabilities.
    #[command(subcommand)]
    Tomo(TomoCmd),
    /// Table of bases, stabilizing operators and categories for a preset.
    Report {
        #[arg(long, value_parser = parse_preset)]
        figure: Preset,
    },
}

#[derive(Subcommand, Debug)]
enum PartitionCmd {
    /// Partition from the finite-field construction.
    Gen {
        #[arg(long)]
        n: usize,
        /// Irreducible polynomial as a bit string, most significant first.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Every partition of the two-qubit Paulis.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Check a partition file; exits 1 if it is not valid.
    Validate { file: String },
    /// Partition from basis labels: a preset name, a file of labels, or a
    /// comma/space separated list.
    FromLabels { spec: String },
}

#[derive(Subcommand, Debug)]
enum BasisCmd {
    /// Eigenbases of every set of a partition file.
    Synth {
        file: String,
        /// Only the set with this index.
        #[arg(long)]
        set: Option<usize>,
    },
    /// Compare two basis files.
    VerifyUnbiased { file1: String, file2: String },
}

#[derive(Args, Debug)]
struct StateArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Partition JSON defining the bases; defaults to the standard one.
    #[arg(long)]
    partition: Option<String>,
    /// Density matrix JSON; otherwise a random state is drawn from the seed.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum TomoCmd {
    /// Exact probability table for a state.
    Forward {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Linear-inversion estimate from a probability table CSV.
    Reconstruct {
        csv: String,
        #[arg(long)]
        partition: Option<String>,
        /// Clip negative eigenvalues and renormalize.
        #[arg(long)]
        clip: bool,
    },
    /// Sample finite shots, then reconstruct.
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        clip: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<MubError> for Failure {
    fn from(e: MubError) -> Self {
        match e {
            MubError::InvalidLabel { .. }
            | MubError::MalformedPolynomial(..)
            | MubError::InvalidBasisSpec { .. }
            | MubError::QubitCount { .. }
            | MubError::EnumerationTooLarge { .. }
            | MubError::Json(_)
            | MubError::Csv(_) => Failure::Usage(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<Output, Failure>;

/// Rendered output plus whether the command found its input invalid.
struct Output {
    text: String,
    invalid: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, invalid: false }
    }
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: MubError| e.to_string())
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    Ok(text)
}

fn tolerance() -> Result<f64, Failure> {
    match std::env::var("MUB_TOL") {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Failure::Usage(format!("MUB_TOL must be a positive number, got {v:?}"))),
        },
        Err(_) => Ok(CHAINED_TOL),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn unsupported(format: Format) -> Failure {
    Failure::Usage(format!("format {format:?} is not available for this command").to_lowercase())
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                let _ = write!(s, "{cell:<w$}  ");
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn partition_table(p: &MubPartition) -> String {
    let rows: Vec<Vec<String>> = p
        .sets()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let members: Vec<String> = s.members().iter().map(ToString::to_string).collect();
            let gens: Vec<String> = s.generators().iter().map(ToString::to_string).collect();
            vec![i.to_string(), gens.join(" "), members.join(" ")]
        })
        .collect();
    render_table(&["set", "generators", "members"], &rows)
}

fn emit_partition(p: &MubPartition, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(partition_to_json(p)? + "\n"),
        Format::Table => Ok(partition_table(p)),
        Format::Csv => Err(unsupported(format)),
    }
}

fn load_partition(path: &str) -> Result<MubPartition, Failure> {
    let doc: PartitionDoc = serde_json::from_str(&read_input(path)?)?;
    Ok(doc.to_partition()?)
}

fn load_basis(path: &str) -> Result<OrthonormalBasis, Failure> {
    let doc: BasisDoc = serde_json::from_str(&read_input(path)?)?;
    Ok(doc.to_basis()?)
}

fn label_specs(spec: &str) -> Result<Vec<BasisLabelSpec>, Failure> {
    if let Ok(which) = spec.parse::<Preset>() {
        return Ok(preset(which));
    }
    let text = if Path::new(spec).is_file() || spec == "-" { read_input(spec)? } else { spec.to_string() };
    let specs = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<BasisLabelSpec>, _>>()?;
    if specs.is_empty() {
        return Err(Failure::Usage("no basis labels given".into()));
    }
    Ok(specs)
}

fn partition_cmd(cmd: PartitionCmd, format: Option<Format>) -> CmdResult {
    let format = format.unwrap_or(Format::Json);
    match cmd {
        PartitionCmd::Gen { n, poly } => {
            let poly = poly.as_deref().map(parse_polynomial).transpose()?;
            Ok(Output::ok(emit_partition(&standard_partition(n, poly)?, format)?))
        }
        PartitionCmd::Enumerate { n } => {
            let all = enumerate_partitions(n)?;
            let text = match format {
                Format::Json => to_json(&all.iter().map(PartitionDoc::from).collect::<Vec<_>>())?,
                Format::Table => all
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("partition {i}\n{}", partition_table(p)))
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Csv => return Err(unsupported(format)),
            };
            Ok(Output::ok(text))
        }
        PartitionCmd::Validate { file } => {
            let doc: PartitionDoc = serde_json::from_str(&read_input(&file)?)?;
            let report = validate_partition(&doc.to_partition_unchecked()?);
            let text = match format {
                Format::Json => to_json(&json!({ "valid": report.is_valid(), "violations": report.violations }))?,
                Format::Table => format!("{report}\n"),
                Format::Csv => return Err(unsupported(format)),
            };
            Ok(Output { text, invalid: !report.is_valid() })
        }
        PartitionCmd::FromLabels { spec } => {
            Ok(Output::ok(emit_partition(&partition_from_labels(&label_specs(&spec)?)?, format)?))
        }
    }
}

fn basis_cmd(cmd: BasisCmd, format: Option<Format>) -> CmdResult {
    let format = format.unwrap_or(Format::Json);
    match cmd {
        BasisCmd::Synth { file, set } => {
            if format != Format::Json {
                return Err(unsupported(format));
            }
            let p = load_partition(&file)?;
            match set {
                Some(k) => {
                    let s = p.sets().get(k).ok_or_else(|| {
                        Failure::Usage(format!("set {k} out of range (partition has {} sets)", p.sets().len()))
                    })?;
                    Ok(Output::ok(to_json(&BasisDoc::from(&eigenbasis(s)?))?))
                }
                None => {
                    let docs = p.sets().iter().map(|s| eigenbasis(s).map(|b| BasisDoc::from(&b))).collect::<Result<Vec<_>, _>>()?;
                    Ok(Output::ok(to_json(&docs)?))
                }
            }
        }
        BasisCmd::VerifyUnbiased { file1, file2 } => {
            let tol = tolerance()?;
            let report = verify_unbiased(&load_basis(&file1)?, &load_basis(&file2)?)?;
            let unbiased = report.is_unbiased(tol);
            let text = match format {
                Format::Json => to_json(&json!({
                    "unbiased": unbiased,
                    "tolerance": tol,
                    "max_deviation": report.max_deviation,
                    "trace_form_deviation": report.trace_form_deviation,
                    "same_basis": report.same_basis,
                }))?,
                Format::Table => format!(
                    "unbiased: {unbiased}\nmax deviation: {:e}\ntrace-form deviation: {:e}\nsame basis: {}\n",
                    report.max_deviation, report.trace_form_deviation, report.same_basis
                ),
                Format::Csv => return Err(unsupported(format)),
            };
            Ok(Output { text, invalid: !unbiased })
        }
    }
}

fn classify_cmd(file: &str, format: Option<Format>) -> CmdResult {
    let format = format.unwrap_or(Format::Json);
    let value: serde_json::Value = serde_json::from_str(&read_input(file)?)?;
    let fingerprint = if value.get("sets").is_some() {
        partition_fingerprint(&serde_json::from_value::<PartitionDoc>(value)?.to_partition()?)?
    } else if value.is_array() {
        let docs: Vec<BasisDoc> = serde_json::from_value(value)?;
        fingerprint_bases(&docs.iter().map(BasisDoc::to_basis).collect::<Result<Vec<_>, _>>()?)?
    } else {
        fingerprint_bases(&[serde_json::from_value::<BasisDoc>(value)?.to_basis()?])?
    };
    let text = match format {
        Format::Json => to_json(&fingerprint)?,
        Format::Table => {
            let rows: Vec<Vec<String>> = fingerprint
                .per_basis
                .iter()
                .enumerate()
                .map(|(i, b)| vec![i.to_string(), b.members.join(" "), b.category.to_string()])
                .collect();
            let counts: Vec<String> = fingerprint.counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            format!("{}counts: {}\n", render_table(&["basis", "members", "category"], &rows), counts.join(", "))
        }
        Format::Csv => return Err(unsupported(format)),
    };
    Ok(Output::ok(text))
}

fn frame_for(partition: Option<&str>, n: Option<usize>) -> Result<MubFrame, Failure> {
    let p = match (partition, n) {
        (Some(path), n) => {
            let p = load_partition(path)?;
            if let Some(n) = n.filter(|&n| n != p.n_qubits()) {
                return Err(Failure::Usage(format!("--n {n} does not match the {}-qubit partition", p.n_qubits())));
            }
            p
        }
        (None, Some(n)) => standard_partition(n, None)?,
        (None, None) => return Err(Failure::Usage("give --n or --partition".into())),
    };
    Ok(MubFrame::new(&p)?)
}

fn state_for(args: &StateArgs, n_qubits: usize) -> Result<DensityMatrix, Failure> {
    match &args.rho {
        Some(path) => {
            let doc: DensityMatrixDoc = serde_json::from_str(&read_input(path)?)?;
            let rho = doc.to_density_matrix()?;
            if rho.n_qubits() != n_qubits {
                return Err(Failure::Usage(format!("state has {} qubits, bases have {n_qubits}", rho.n_qubits())));
            }
            Ok(rho)
        }
        None => Ok(DensityMatrix::random(n_qubits, &mut Xoshiro256PlusPlus::seed_from_u64(args.seed))?),
    }
}

fn density_text(rho: &DensityMatrix, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => to_json(&DensityMatrixDoc::from(rho)),
        Format::Table => {
            let m = rho.matrix();
            let rows: Vec<Vec<String>> = (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| format!("{:+.6}{:+.6}i", m[(r, c)].re, m[(r, c)].im)).collect())
                .collect();
            let header: Vec<String> = (0..m.ncols()).map(|c| c.to_string()).collect();
            Ok(render_table(&header.iter().map(String::as_str).collect::<Vec<_>>(), &rows))
        }
        Format::Csv => Err(unsupported(format)),
    }
}

fn tomo_cmd(cmd: TomoCmd, format: Option<Format>) -> CmdResult {
    match cmd {
        TomoCmd::Forward { state } => {
            let frame = frame_for(state.partition.as_deref(), state.n)?;
            let rho = state_for(&state, frame.n_qubits())?;
            let table = mub_probabilities(&rho, frame.bases())?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => Ok(Output::ok(table_to_csv(&table)?)),
                Format::Json => Ok(Output::ok(to_json(&json!({
                    "seed": state.rho.is_none().then_some(state.seed),
                    "state": DensityMatrixDoc::from(&rho),
                    "probabilities": table.rows(),
                }))?)),
                f => Err(unsupported(f)),
            }
        }
        TomoCmd::Reconstruct { csv, partition, clip } => {
            let table = table_from_csv(&read_input(&csv)?)?;
            let n = table.dim().trailing_zeros() as usize;
            let frame = frame_for(partition.as_deref(), Some(n))?;
            let rho = reconstruct(&table, &frame)?;
            let rho = if clip { rho.clipped() } else { rho };
            Ok(Output::ok(density_text(&rho, format.unwrap_or(Format::Json))?))
        }
        TomoCmd::Simulate { state, shots, clip } => {
            let frame = frame_for(state.partition.as_deref(), state.n)?;
            let rho = state_for(&state, frame.n_qubits())?;
            let exact = mub_probabilities(&rho, frame.bases())?;
            let sampled = sample_shots(&exact, shots, state.seed)?;
            let estimate = reconstruct(&sampled, &frame)?;
            let min_eig = estimate.min_eigenvalue();
            let estimate = if clip { estimate.clipped() } else { estimate };
            let distance = trace_distance(&rho, &estimate)?;
            let text = match format.unwrap_or(Format::Json) {
                Format::Csv => table_to_csv(&sampled)?,
                Format::Json => to_json(&json!({
                    "seed": state.seed,
                    "shots_per_basis": shots,
                    "clipped": clip,
                    "trace_distance": distance,
                    "min_eigenvalue": min_eig,
                    "probabilities": sampled.rows(),
                    "state": DensityMatrixDoc::from(&rho),
                    "estimate": DensityMatrixDoc::from(&estimate),
                }))?,
                Format::Table => format!(
                    "seed: {}\nshots per basis: {shots}\nclipped: {clip}\ntrace distance: {distance:.6e}\nmin eigenvalue before clipping: {min_eig:.6e}\n",
                    state.seed
                ),
            };
            Ok(Output::ok(text))
        }
    }
}

#[derive(Serialize)]
struct ReportRow {
    label: String,
    operators: Vec<String>,
    category: String,
}

fn report_cmd(which: Preset, format: Option<Format>) -> CmdResult {
    let specs = preset(which);
    let rows = specs
        .iter()
        .map(|spec| {
            let basis = spec.basis()?;
            let set = stabilizing_set(&basis)?;
            Ok(ReportRow {
                label: spec.to_string(),
                operators: set.members().iter().map(ToString::to_string).collect(),
                category: classify_basis(&basis)?.to_string(),
            })
        })
        .collect::<Result<Vec<_>, MubError>>()?;
    // Fails if the labelled bases do not form a partition.
    partition_from_labels(&specs)?;
    let text = match format.unwrap_or(Format::Table) {
        Format::Json => to_json(&rows)?,
        Format::Table => render_table(
            &["basis", "operators", "category"],
            &rows.iter().map(|r| vec![r.label.clone(), r.operators.join(" "), r.category.clone()]).collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("basis,operators,category\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.label, r.operators.join(" "), r.category);
            }
            s
        }
    };
    Ok(Output::ok(text))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Partition(cmd) => partition_cmd(cmd, cli.format),
        Command::Basis(cmd) => basis_cmd(cmd, cli.format),
        Command::Classify { file } => classify_cmd(&file, cli.format),
        Command::Tomo(cmd) => tomo_cmd(cmd, cli.format),
        Command::Report { figure } => report_cmd(figure, cli.format),
    }
}

fn fail(message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(e.render().to_string().trim(), 2),
    };
    let out_path = cli.out.clone();
    let output = match run(cli) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => return fail(&m, 2),
        Err(Failure::Invalid(m)) => return fail(&m, 1),
    };
    let written = match &out_path {
        Some(path) => std::fs::write(path, &output.text),
        None => io::stdout().lock().write_all(output.text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(&e.to_string(), 2);
    }
    if output.invalid {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_align() {
        let t = render_table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\n---  --\nxyz  1\n");
    }

    #[test]
    fn label_lists_split_on_commas_and_spaces() {
        assert_eq!(label_specs("(zz)pi, (xy)pi (yx)pi,(zx)B (yz)Bi").unwrap().len(), 5);
        assert_eq!(label_specs("fig2").unwrap().len(), 9);
        assert!(label_specs("(qq)pi").is_err());
    }

}
