//! Command-line front end: classical and quantum values of nonlocal games,
//! cut numbers, cycle tables and strategy checks, with table, JSON and CSV
//! output.
//!
//! Exit codes: 0 success, 2 parse error, 3 enumeration cap exceeded,
//! 4 uncertified SDP solution (values are still printed), 5 unsupported
//! request, 6 invalid input object.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use syncval_core::classical::{
    complete_coloring_crosscheck, local_value, max_c_cut, sync_local_value,
};
use syncval_core::error::Error;
use syncval_core::game::{pinned_game, uniform_edge_prior, GameInstance};
use syncval_core::io::{game_file_from_str, graph_from_str, pvm_from_str, GameFile};
use syncval_core::sdp::SolveConfig;
use syncval_core::strategies::{
    check_exchange_inequality, check_first_order, check_povm_conditions, chsh_commutation_audit,
    PvmFamily,
};
use syncval_core::xor::{
    bias_report, cycle_closed_forms, cycle_game, cycle_game_symmetric, graph_corr_half,
    quantum_max_cut2, two_coloring_xor, xor_sync_value, xor_value,
};

#[derive(Parser)]
#[command(
    name = "syncval",
    about = "Classical, synchronous and quantum values of finite nonlocal games",
    version
)]
struct Cli {
    #[command(flatten)]
    run: RunOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunOpts {
    /// Base seed for the SDP solver; restart j uses seed + j.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Number of solver restarts.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Relative duality-gap tolerance for certification.
    #[arg(long = "tol-gap", global = true, default_value_t = 1e-6)]
    tol_gap: f64,
    /// Tolerance for strategy condition checks.
    #[arg(long = "tol-check", global = true, default_value_t = 1e-8)]
    tol_check: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Print only the report itself, no headers.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact classical value by enumeration (add --sync for the synchronous value).
    Classical {
        /// Game file (plain or XOR JSON).
        game: Option<PathBuf>,
        /// Use the built-in pinned-question repetition game with N rounds
        /// instead of a file.
        #[arg(long, value_name = "N", conflicts_with = "game")]
        pinned: Option<usize>,
        /// Restrict both players to one shared function.
        #[arg(long)]
        sync: bool,
    },
    /// Quantum and synchronous values, biases and balancedness of an XOR game.
    Xor {
        /// XOR game file.
        game: Option<PathBuf>,
        /// Use the 2-colouring game of the N-cycle (non-symmetric prior, or
        /// the symmetric prior when --p is given) instead of a file.
        #[arg(long, value_name = "N", conflicts_with = "game")]
        cycle: Option<usize>,
        /// Edge weight p for the symmetric cycle prior.
        #[arg(long, requires = "cycle")]
        p: Option<f64>,
    },
    /// Max c-cut of a graph; with --quantum also the quantum cut, the graph
    /// correlation at 1/2 and the synchronous 2-colouring value.
    Cut {
        /// Graph file.
        graph: PathBuf,
        /// Number of colours.
        #[arg(long, default_value_t = 2)]
        c: usize,
        /// Also compute the SDP quantities (requires c = 2).
        #[arg(long)]
        quantum: bool,
    },
    /// CSV table of odd-cycle closed forms next to the SDP values.
    CycleTable {
        #[arg(long = "n-max", default_value_t = 11)]
        n_max: usize,
        /// Symmetric prior weight; omitted means the non-symmetric prior.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Optimality checks for a projection-valued strategy on a game.
    CheckPvm {
        /// Game file (plain or XOR JSON).
        game: PathBuf,
        /// PVM family file.
        pvm: PathBuf,
    },
    /// Brute-force colouring value of the complete graph next to the
    /// closed form 1 + 1/n - 1/c, with a discrepancy flag.
    ColoringCrosscheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

/// Default mapping of library errors onto exit codes.
fn map_err(e: Error) -> Failure {
    let code = match &e {
        Error::EnumerationCap { .. } | Error::TensorCap { .. } => 3,
        Error::Uncertified => 4,
        Error::InvariantViolation(_) => 6,
        _ => 2,
    };
    Failure::new(code, e.to_string())
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

/// One report row: a name and a pre-formatted value.
type Row = (&'static str, String);

fn fmt_f(v: f64) -> String {
    // full double precision, 17 significant digits
    format!("{v:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", fmt_f(*x));
    }
    s.push(']');
    s
}

fn fmt_usize_vec(v: &[usize]) -> String {
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{x}");
    }
    s.push(']');
    s
}

fn emit(opts: &RunOpts, title: &str, rows: &[Row], json: &serde_json::Value) {
    match opts.format {
        Format::Table => {
            if !opts.quiet {
                println!("# {title}");
            }
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                println!("{k:<width$}  {v}");
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(json).expect("serializable")
            );
        }
        Format::Csv => {
            let header: Vec<&str> = rows.iter().map(|(k, _)| *k).collect();
            let values: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
            println!("{}", header.join(","));
            println!("{}", values.join(","));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let solve_cfg = SolveConfig {
        seed: cli.run.seed,
        restarts: cli.run.restarts,
        gap_tol: cli.run.tol_gap,
        ..SolveConfig::default()
    };
    match &cli.cmd {
        Cmd::Classical { game, pinned, sync } => {
            cmd_classical(&cli.run, game.as_ref(), *pinned, *sync)
        }
        Cmd::Xor { game, cycle, p } => cmd_xor(&cli.run, &solve_cfg, game.as_ref(), *cycle, *p),
        Cmd::Cut { graph, c, quantum } => cmd_cut(&cli.run, &solve_cfg, graph, *c, *quantum),
        Cmd::CycleTable { n_max, p } => cmd_cycle_table(&solve_cfg, *n_max, *p),
        Cmd::CheckPvm { game, pvm } => cmd_check_pvm(&cli.run, game, pvm),
        Cmd::ColoringCrosscheck { n, c } => cmd_coloring_crosscheck(&cli.run, *n, *c),
    }
}

fn load_instance(
    game: Option<&PathBuf>,
    pinned: Option<usize>,
) -> Result<GameInstance<f64>, Failure> {
    match (game, pinned) {
        (Some(path), None) => {
            let text = read_file(path)?;
            match game_file_from_str(&text).map_err(map_err)? {
                GameFile::Plain(inst) => Ok(inst),
                GameFile::Xor(g) => Ok(g.to_instance()),
            }
        }
        (None, Some(n)) => {
            if n == 0 {
                return Err(Failure::new(5, "--pinned needs at least one round"));
            }
            pinned_game::<f64>(n).map_err(map_err)
        }
        _ => Err(Failure::new(2, "provide a game file or --pinned N")),
    }
}

#[derive(Serialize)]
struct ClassicalReport {
    value: f64,
    synchronous: bool,
    witness_alice: Vec<usize>,
    witness_bob: Vec<usize>,
}

fn cmd_classical(
    opts: &RunOpts,
    game: Option<&PathBuf>,
    pinned: Option<usize>,
    sync: bool,
) -> Result<u8, Failure> {
    let inst = load_instance(game, pinned)?;
    let report = if sync {
        let (value, f) = sync_local_value(&inst).map_err(map_err)?;
        ClassicalReport {
            value,
            synchronous: true,
            witness_alice: f.clone(),
            witness_bob: f,
        }
    } else {
        let (value, w) = local_value(&inst).map_err(map_err)?;
        ClassicalReport {
            value,
            synchronous: false,
            witness_alice: w.f_a,
            witness_bob: w.f_b,
        }
    };
    let rows = vec![
        ("value", fmt_f(report.value)),
        ("synchronous", report.synchronous.to_string()),
        ("witness_alice", fmt_usize_vec(&report.witness_alice)),
        ("witness_bob", fmt_usize_vec(&report.witness_bob)),
    ];
    emit(
        opts,
        if sync {
            "synchronous classical value"
        } else {
            "classical value"
        },
        &rows,
        &serde_json::to_value(&report).expect("serializable"),
    );
    Ok(0)
}

#[derive(Serialize)]
struct XorReport {
    omega: f64,
    omega_sync: f64,
    bias: f64,
    bias_sync: f64,
    balanced: bool,
    dual_y: Vec<f64>,
    gap: f64,
    gap_sync: f64,
    certified: bool,
    certified_sync: bool,
}

fn cmd_xor(
    opts: &RunOpts,
    cfg: &SolveConfig,
    game: Option<&PathBuf>,
    cycle: Option<usize>,
    p: Option<f64>,
) -> Result<u8, Failure> {
    let g = match (game, cycle) {
        (Some(path), None) => {
            let text = read_file(path)?;
            match game_file_from_str(&text).map_err(map_err)? {
                GameFile::Xor(g) => g,
                GameFile::Plain(_) => {
                    return Err(Failure::new(
                        5,
                        "this command needs an XOR game; plain games have no cost matrix",
                    ))
                }
            }
        }
        (None, Some(n)) => match p {
            Some(p) => cycle_game_symmetric::<f64>(n, p).map_err(map_err)?,
            None => cycle_game::<f64>(n).map_err(map_err)?,
        },
        _ => return Err(Failure::new(2, "provide an XOR game file or --cycle N")),
    };
    let r = bias_report(&g, cfg);
    let report = XorReport {
        omega: r.omega,
        omega_sync: r.omega_sync,
        bias: r.bias,
        bias_sync: r.bias_sync,
        balanced: r.balanced,
        dual_y: r.dual_y.clone(),
        gap: r.gap,
        gap_sync: r.gap_sync,
        certified: r.certified,
        certified_sync: r.certified_sync,
    };
    let rows = vec![
        ("omega", fmt_f(report.omega)),
        ("omega_sync", fmt_f(report.omega_sync)),
        ("bias", fmt_f(report.bias)),
        ("bias_sync", fmt_f(report.bias_sync)),
        ("balanced", report.balanced.to_string()),
        ("dual_y", fmt_vec(&report.dual_y)),
        ("gap", fmt_f(report.gap)),
        ("gap_sync", fmt_f(report.gap_sync)),
        ("certified", report.certified.to_string()),
        ("certified_sync", report.certified_sync.to_string()),
    ];
    emit(
        opts,
        "XOR game values",
        &rows,
        &serde_json::to_value(&report).expect("serializable"),
    );
    if !(report.certified && report.certified_sync) {
        eprintln!("warning: SDP solution not certified at the requested gap tolerance");
        return Ok(4);
    }
    Ok(0)
}

#[derive(Serialize)]
struct CutReport {
    colours: usize,
    classical_cut: usize,
    partition: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum_cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_corr_half: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_sync_2coloring: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified: Option<bool>,
}

fn cmd_cut(
    opts: &RunOpts,
    cfg: &SolveConfig,
    graph: &PathBuf,
    c: usize,
    quantum: bool,
) -> Result<u8, Failure> {
    if quantum && c != 2 {
        return Err(Failure::new(5, "--quantum is only available for c = 2"));
    }
    let g = graph_from_str(&read_file(graph)?).map_err(map_err)?;
    let (cut, partition) = max_c_cut(&g, c).map_err(map_err)?;
    let mut report = CutReport {
        colours: c,
        classical_cut: cut,
        partition,
        quantum_cut: None,
        graph_corr_half: None,
        omega_sync_2coloring: None,
        certified: None,
    };
    if quantum {
        let qcut = quantum_max_cut2::<f64>(&g, cfg).map_err(map_err)?;
        let corr = graph_corr_half::<f64>(&g, cfg).map_err(map_err)?;
        let prior = uniform_edge_prior::<f64>(&g).map_err(map_err)?;
        let omega_sync = xor_sync_value(&two_coloring_xor(&g, prior).map_err(map_err)?, cfg);
        report.quantum_cut = Some(qcut.value);
        report.graph_corr_half = Some(corr.value);
        report.omega_sync_2coloring = Some(omega_sync.value);
        report.certified = Some(qcut.certified && corr.certified && omega_sync.certified);
    }
    let mut rows = vec![
        ("colours", report.colours.to_string()),
        ("classical_cut", report.classical_cut.to_string()),
        ("partition", fmt_usize_vec(&report.partition)),
    ];
    if quantum {
        rows.push(("quantum_cut", fmt_f(report.quantum_cut.unwrap())));
        rows.push(("graph_corr_half", fmt_f(report.graph_corr_half.unwrap())));
        rows.push((
            "omega_sync_2coloring",
            fmt_f(report.omega_sync_2coloring.unwrap()),
        ));
        rows.push(("certified", report.certified.unwrap().to_string()));
    }
    emit(
        opts,
        "cut numbers",
        &rows,
        &serde_json::to_value(&report).expect("serializable"),
    );
    if quantum && !report.certified.unwrap() {
        eprintln!("warning: SDP solution not certified at the requested gap tolerance");
        return Ok(4);
    }
    Ok(0)
}

fn cmd_cycle_table(cfg: &SolveConfig, n_max: usize, p: Option<f64>) -> Result<u8, Failure> {
    println!(
        "n,omega_closed,omega_sdp,delta_omega,omega_sync_closed,omega_sync_sdp,delta_omega_sync"
    );
    let mut worst_uncertified = false;
    let mut n = 3usize;
    while n <= n_max {
        let closed = cycle_closed_forms::<f64>(n, p).map_err(map_err)?;
        let g = match p {
            Some(p) => cycle_game_symmetric::<f64>(n, p).map_err(map_err)?,
            None => cycle_game::<f64>(n).map_err(map_err)?,
        };
        let omega = xor_value(&g, cfg);
        let omega_sync = xor_sync_value(&g, cfg);
        worst_uncertified |= !(omega.certified && omega_sync.certified);
        println!(
            "{n},{},{},{},{},{},{}",
            fmt_f(closed.omega),
            fmt_f(omega.value),
            fmt_f((omega.value - closed.omega).abs()),
            fmt_f(closed.omega_sync),
            fmt_f(omega_sync.value),
            fmt_f((omega_sync.value - closed.omega_sync).abs())
        );
        n += 2;
    }
    if worst_uncertified {
        eprintln!("warning: at least one SDP solution not certified");
        return Ok(4);
    }
    Ok(0)
}

#[derive(Serialize)]
struct CheckPvmReport {
    first_order_pass: bool,
    first_order_residual: f64,
    exchange_pass: bool,
    exchange_worst_eig: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    povm_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    povm_worst_psd_eig: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    povm_worst_annihilation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_min_eigs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chsh_commutator: Option<f64>,
    all_pass: bool,
}

fn cmd_check_pvm(opts: &RunOpts, game: &PathBuf, pvm: &PathBuf) -> Result<u8, Failure> {
    let inst = match game_file_from_str(&read_file(game)?).map_err(map_err)? {
        GameFile::Plain(inst) => inst,
        GameFile::Xor(g) => g.to_instance(),
    };
    let fam: PvmFamily<f64> = pvm_from_str(&read_file(pvm)?).map_err(map_err)?;
    let tol = opts.tol_check;

    let shape_err = |e: Error| match e {
        Error::DimensionMismatch(m) => Failure::new(6, format!("game/PVM shape mismatch: {m}")),
        Error::NotSquare => Failure::new(6, "game must be square for strategy checks".to_string()),
        other => map_err(other),
    };

    let fo = check_first_order(&inst, &fam, tol).map_err(shape_err)?;
    let ex = check_exchange_inequality(&inst, &fam, tol).map_err(shape_err)?;
    let mut report = CheckPvmReport {
        first_order_pass: fo.pass,
        first_order_residual: fo.residual,
        exchange_pass: ex.pass,
        exchange_worst_eig: ex.worst,
        povm_pass: None,
        povm_worst_psd_eig: None,
        povm_worst_annihilation: None,
        omega_min_eigs: None,
        chsh_commutator: None,
        all_pass: fo.pass && ex.pass,
    };
    // POVM conditions only apply when the diagonal same-answer tuples win.
    match check_povm_conditions(&inst, &fam, tol) {
        Ok(pc) => {
            report.all_pass = report.all_pass && pc.pass;
            report.povm_pass = Some(pc.pass);
            report.povm_worst_psd_eig = Some(pc.worst_psd_eig);
            report.povm_worst_annihilation = Some(pc.worst_annihilation);
            report.omega_min_eigs = Some(pc.omega_min_eigs);
        }
        Err(Error::Precondition(_)) => {}
        Err(e) => return Err(shape_err(e)),
    }
    if fam.n() == 2 && fam.k() == 2 {
        report.chsh_commutator = Some(chsh_commutation_audit(&fam).map_err(shape_err)?);
    }

    let mut rows = vec![
        ("first_order_pass", report.first_order_pass.to_string()),
        ("first_order_residual", fmt_f(report.first_order_residual)),
        ("exchange_pass", report.exchange_pass.to_string()),
        ("exchange_worst_eig", fmt_f(report.exchange_worst_eig)),
    ];
    if let Some(p) = report.povm_pass {
        rows.push(("povm_pass", p.to_string()));
        rows.push((
            "povm_worst_psd_eig",
            fmt_f(report.povm_worst_psd_eig.unwrap()),
        ));
        rows.push((
            "povm_worst_annihilation",
            fmt_f(report.povm_worst_annihilation.unwrap()),
        ));
        rows.push((
            "omega_min_eigs",
            fmt_vec(report.omega_min_eigs.as_ref().unwrap()),
        ));
    }
    if let Some(c) = report.chsh_commutator {
        rows.push(("chsh_commutator", fmt_f(c)));
    }
    rows.push(("all_pass", report.all_pass.to_string()));
    emit(
        opts,
        "strategy checks",
        &rows,
        &serde_json::to_value(&report).expect("serializable"),
    );
    Ok(if report.all_pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CrosscheckReport {
    n: usize,
    c: usize,
    brute_force: f64,
    closed_form: f64,
    discrepancy: bool,
    witness: Vec<usize>,
}

fn cmd_coloring_crosscheck(opts: &RunOpts, n: usize, c: usize) -> Result<u8, Failure> {
    let r = complete_coloring_crosscheck::<f64>(n, c).map_err(map_err)?;
    let report = CrosscheckReport {
        n,
        c,
        brute_force: r.brute_force,
        closed_form: r.closed_form,
        discrepancy: r.discrepancy,
        witness: r.witness,
    };
    let rows = vec![
        ("n", report.n.to_string()),
        ("c", report.c.to_string()),
        ("brute_force", fmt_f(report.brute_force)),
        ("closed_form", fmt_f(report.closed_form)),
        (
            "discrepancy",
            if report.discrepancy {
                "closed-form cross-check: discrepancy".to_string()
            } else {
                "agree".to_string()
            },
        ),
        ("witness", fmt_usize_vec(&report.witness)),
    ];
    emit(
        opts,
        "complete-graph colouring cross-check",
        &rows,
        &serde_json::to_value(&report).expect("serializable"),
    );
    Ok(0)
}
