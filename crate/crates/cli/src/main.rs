use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use forge_core::codes::{CodeSpec, Party};
use forge_core::graph_state::{to_graph, ExportFormat, GraphState};
use forge_core::oracle::{self, fidelity_up_to_phase, gates, DenseState};
use forge_core::tasks::{self, CompositionPlan, ErrorModel, Verdict};
use forge_core::{PauliString, Role, StabilizerTableau};

const ORACLE_CAP: usize = 14;
const GROUP_CAP: usize = 8;

#[derive(Parser)]
#[command(
    name = "forge",
    version,
    about = "Build and verify measurement-based resource states"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a composition plan into a tableau and graph state.
    Build {
        plan: PathBuf,
        /// Tableau JSON destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Graph export destination.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Graph format; inferred from the --graph extension when omitted.
        #[arg(long)]
        format: Option<String>,
    },
    /// Tableau for a built-in task.
    Task {
        #[command(subcommand)]
        task: Task,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Correction table over all Bell outcome patterns on the input qubits.
    Corrections {
        tableau: PathBuf,
        /// Code whose designed error model is used.
        #[arg(long, conflicts_with = "model")]
        code: Option<CodeSpec>,
        /// none, bitflips:W, phaseflips:W, single, or a comma list of Paulis.
        #[arg(long)]
        model: Option<String>,
        /// Keep/discard classification for purification resources.
        #[arg(long)]
        purify: bool,
    },
    /// Check validity and, at desk scale, compare against the dense oracle.
    Verify { tableau: PathBuf },
    /// Local-Clifford-equivalent graph state of a tableau.
    Graph {
        tableau: PathBuf,
        #[arg(long, default_value = "dot")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Task {
    Encoder {
        code: CodeSpec,
    },
    Decoder {
        code: CodeSpec,
    },
    Switcher {
        from: CodeSpec,
        to: CodeSpec,
    },
    Syndrome {
        code: CodeSpec,
    },
    LogicalEpp {
        code: CodeSpec,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = PartyArg::Alice)]
        party: PartyArg,
    },
    Repeater {
        left: PathBuf,
        right: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PartyArg {
    Alice,
    Bob,
}

impl From<PartyArg> for Party {
    fn from(p: PartyArg) -> Party {
        match p {
            PartyArg::Alice => Party::Alice,
            PartyArg::Bob => Party::Bob,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes a line to stdout; a closed pipe ends output quietly.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => emit(text),
    }
}

fn load_tableau(path: &Path) -> Result<StabilizerTableau> {
    serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing tableau {}", path.display()))
}

fn load_plan(path: &Path) -> Result<CompositionPlan> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing plan {}", path.display()))
}

fn graph_format(format: Option<&str>, path: &Path) -> Result<ExportFormat> {
    let name = match format {
        Some(f) => f.to_string(),
        None => path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("dot")
            .to_string(),
    };
    Ok(name.parse()?)
}

fn parse_model(s: &str) -> Result<ErrorModel> {
    let weight = |w: &str| {
        w.parse::<usize>()
            .with_context(|| format!("bad weight {w:?}"))
    };
    Ok(match s.split_once(':') {
        None if s == "none" => ErrorModel::None,
        None if s == "single" => ErrorModel::SingleQubit,
        Some(("bitflips", w)) => ErrorModel::BitFlips(weight(w)?),
        Some(("phaseflips", w)) => ErrorModel::PhaseFlips(weight(w)?),
        _ => ErrorModel::Custom(
            s.split(',')
                .map(|p| p.trim().parse::<PauliString>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("unknown error model {s:?}"))?,
        ),
    })
}

fn tableau_json(t: &StabilizerTableau) -> Result<String> {
    Ok(serde_json::to_string_pretty(t)?)
}

fn run_task(task: Task) -> Result<StabilizerTableau> {
    let t = match task {
        Task::Encoder { code } => tasks::encoder(&code)?.to_stabilizers()?,
        Task::Decoder { code } => tasks::decoder(&code)?.to_stabilizers()?,
        Task::Switcher { from, to } => tasks::switcher(&from, &to)?,
        Task::Syndrome { code } => tasks::syndrome_readout(&code)?,
        Task::LogicalEpp {
            code,
            rounds,
            party,
        } => tasks::logical_epp(&code, rounds, party.into())?,
        Task::Repeater { left, right } => tasks::repeater(&load_plan(&left)?, &load_plan(&right)?)?,
    };
    Ok(t)
}

/// CZ graph state followed by each local Clifford as its H/S gate word.
fn dense_graph_form(g: &GraphState) -> Result<DenseState> {
    let mut s = oracle::graph_state(g.adjacency())?;
    for (q, c) in g.local_cliffords().iter().enumerate() {
        for gate in c.name().chars() {
            match gate {
                'H' => s = s.apply_gate(q, &gates::h()),
                'S' => s = s.apply_gate(q, &gates::s()),
                _ => {}
            }
        }
    }
    Ok(s)
}

fn verify(t: &StabilizerTableau) -> Result<Vec<String>> {
    let mut report = Vec::new();
    let n = t.n_qubits();
    let inputs = t.qubits_with_role(Role::Input).len();
    report.push(format!(
        "qubits: {n} ({inputs} input, {} output), generators: {}",
        n - inputs,
        t.generators().len()
    ));
    if !t.is_full_rank() {
        bail!(
            "tableau has {} generators on {n} qubits, not a stabilizer state",
            t.generators().len()
        );
    }
    report.push("generators: hermitian, commuting, independent, full rank".into());
    let g = to_graph(t)?;
    report.push(format!(
        "graph: {} edges, local-Clifford round trip exact",
        g.edges().len()
    ));
    if n > ORACLE_CAP {
        report.push(format!("oracle: skipped ({n} > {ORACLE_CAP} qubits)"));
        return Ok(report);
    }
    let state = oracle::state_of(t)?;
    if let Some(bad) = t.generators().iter().find(|s| !state.is_stabilized_by(s)) {
        bail!("dense state is not stabilized by {bad}");
    }
    let graph_state = dense_graph_form(&g)?;
    let f = fidelity_up_to_phase(&state, &graph_state);
    if f < 1.0 - 1e-10 {
        bail!("graph form disagrees with dense state: fidelity {f}");
    }
    report.push(format!(
        "oracle: every generator stabilizes the dense state, graph form fidelity {f:.12}"
    ));
    if n <= GROUP_CAP {
        let group = oracle::stabilizer_group_of(&state)?.with_roles(t.roles().to_vec())?;
        if !group.group_equal(t)? {
            bail!("brute-force stabilizer group differs from the tableau");
        }
        report.push("oracle: brute-force stabilizer group equals the tableau group".into());
    }
    Ok(report)
}

fn main() -> Result<()> {
    match Args::parse().command {
        Command::Build {
            plan,
            out,
            graph,
            format,
        } => {
            let built = load_plan(&plan)?.build()?;
            write_or_print(out.as_deref(), &tableau_json(&built.tableau)?)?;
            if let Some(path) = graph {
                let fmt = graph_format(format.as_deref(), &path)?;
                fs::write(&path, built.graph.export(fmt))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Task { task, out } => {
            let t = run_task(task)?;
            write_or_print(out.as_deref(), &tableau_json(&t)?)?;
        }
        Command::Corrections {
            tableau,
            code,
            model,
            purify,
        } => {
            let t = load_tableau(&tableau)?;
            let model = match (code, model) {
                (Some(c), _) => ErrorModel::for_code(&c),
                (None, Some(m)) => parse_model(&m)?,
                (None, None) => ErrorModel::None,
            };
            let fallback = if purify {
                Verdict::Discard
            } else {
                Verdict::Uncorrectable
            };
            let table = tasks::correction_table(&t, &model, fallback)?;
            emit(&serde_json::to_string_pretty(&table)?)?;
        }
        Command::Verify { tableau } => {
            let mut report = verify(&load_tableau(&tableau)?)?;
            report.push("ok".into());
            emit(&report.join("\n"))?;
        }
        Command::Graph {
            tableau,
            format,
            out,
        } => {
            let g = to_graph(&load_tableau(&tableau)?)?;
            write_or_print(out.as_deref(), &g.export(format.parse()?))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_grammar() {
        assert_eq!(parse_model("none").unwrap(), ErrorModel::None);
        assert_eq!(parse_model("single").unwrap(), ErrorModel::SingleQubit);
        assert_eq!(parse_model("bitflips:1").unwrap(), ErrorModel::BitFlips(1));
        assert_eq!(
            parse_model("phaseflips:2").unwrap(),
            ErrorModel::PhaseFlips(2)
        );
        let custom = parse_model("XII, IXI").unwrap();
        assert_eq!(
            custom,
            ErrorModel::Custom(vec!["XII".parse().unwrap(), "IXI".parse().unwrap()])
        );
        assert!(parse_model("bitflips:x").is_err());
        assert!(parse_model("sometimes").is_err());
    }

    #[test]
    fn format_from_flag_or_extension() {
        let p = Path::new("out.graphml");
        assert_eq!(graph_format(None, p).unwrap(), ExportFormat::Graphml);
        assert_eq!(graph_format(Some("json"), p).unwrap(), ExportFormat::Json);
        assert_eq!(
            graph_format(None, Path::new("out")).unwrap(),
            ExportFormat::Dot
        );
        assert!(graph_format(None, Path::new("out.png")).is_err());
    }

    #[test]
    fn dense_graph_form_matches_tableau() {
        let t = tasks::encoder(&"shor:2x2".parse().unwrap())
            .unwrap()
            .to_stabilizers()
            .unwrap();
        let g = to_graph(&t).unwrap();
        let f = fidelity_up_to_phase(
            &dense_graph_form(&g).unwrap(),
            &oracle::state_of(&t).unwrap(),
        );
        assert!(f > 1.0 - 1e-10);
    }
}
