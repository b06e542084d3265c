use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use measched::cover::{check_no_three_collinear, check_unique_tangent};
use measched::graphcheck::{build_graph, lower_bound, verify_cover};
use measched::matrix::C64;
use measched::sim::{basis_state, random_state, term_expectation, MAX_QUBITS};
use measched::swapnet::is_sorted_layout;
use measched::universe::{classify_terms, closed_form_clique_count};
use measched::{
    estimate_all, estimate_sampled, Family, Hamiltonian, Mapping, Schedule, Spin, StateVector,
    Universe,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "measched",
    version,
    about = "Measurement schedules for molecular Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Number of spatial orbitals N (2N qubits)
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=4096))]
    orbitals: u32,
    /// Fermion-to-qubit mapping: jw or parity
    #[arg(long, default_value = "jw")]
    mapping: Mapping,
}

#[derive(Subcommand)]
enum Command {
    /// Build the schedule, write it as JSON and print statistics
    Schedule {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "schedule.json")]
        out: PathBuf,
    },
    /// Check the construction, circuits and optionally a schedule file
    Verify {
        #[command(flatten)]
        common: Common,
        /// Schedule file to check against a fresh build
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Seed for the random state used in the simulation checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the energy of a state from the schedule
    Estimate {
        /// Defaults to the Hamiltonian's orbital count
        #[arg(long)]
        orbitals: Option<usize>,
        #[arg(long, default_value = "jw")]
        mapping: Mapping,
        /// Hamiltonian JSON file
        #[arg(long)]
        hamiltonian: PathBuf,
        /// random:<seed>, basis:<occupations>, file:<path> or a path
        #[arg(long, default_value = "random:0")]
        state: String,
        /// Shots per clique; 0 computes exact expectations
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print schedule statistics without writing a file
    Stats {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SCHED_THREADS") else {
        return Ok(());
    };
    let k: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| format!("SCHED_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Schedule { common, out } => {
            let schedule = Schedule::build(common.orbitals as usize, common.mapping)?;
            fs::write(&out, schedule.to_json_string())
                .with_context(|| format!("writing {}", out.display()))?;
            print!("{}", stats_text(&schedule));
            println!("written: {}", out.display());
            Ok(true)
        }
        Command::Stats { common } => {
            let schedule = Schedule::build(common.orbitals as usize, common.mapping)?;
            print!("{}", stats_text(&schedule));
            Ok(true)
        }
        Command::Verify {
            common,
            schedule,
            seed,
        } => verify(
            common.orbitals as usize,
            common.mapping,
            schedule.as_deref(),
            seed,
        ),
        Command::Estimate {
            orbitals,
            mapping,
            hamiltonian,
            state,
            shots,
            seed,
        } => {
            let ham = Hamiltonian::load(&hamiltonian)?;
            let n = ham.n_orbitals();
            if let Some(o) = orbitals.filter(|&o| o != n) {
                bail!("--orbitals {o} does not match the Hamiltonian's {n} orbitals");
            }
            estimate(&ham, mapping, &state, shots, seed)
        }
    }
}

fn stats_text(schedule: &Schedule) -> String {
    let n = schedule.n_orbitals;
    let mut out = schedule.stats().render();
    out.push_str(&format!("lower_bound: {}\n", lower_bound(n)));
    out.push_str(&format!(
        "same_spin_construction: {}\n",
        schedule.prime.get().pow(2)
    ));
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &schedule.entries {
        *hist.entry(e.circuit.depth).or_default() += 1;
    }
    let hist: Vec<String> = hist.iter().map(|(d, k)| format!("{d}x{k}")).collect();
    out.push_str(&format!("depth_histogram: {}\n", hist.join(" ")));
    out
}

fn parse_state(spec: &str, n: usize, mapping: Mapping) -> Result<StateVector> {
    if 2 * n > MAX_QUBITS {
        bail!(
            "{} qubits exceeds the simulator limit of {MAX_QUBITS}",
            2 * n
        );
    }
    let state = if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| anyhow!("bad seed in state `{spec}`"))?;
        random_state(n, mapping, seed)?
    } else if let Some(bits) = spec.strip_prefix("basis:") {
        basis_state(bits, mapping)?
    } else {
        let path = Path::new(spec.strip_prefix("file:").unwrap_or(spec));
        load_amplitudes(path, mapping)?
    };
    if state.n_qubits() != 2 * n {
        bail!("state has {} qubits, expected {}", state.n_qubits(), 2 * n);
    }
    Ok(state)
}

/// JSON list of `[re, im]` pairs indexed by occupation bits.
fn load_amplitudes(path: &Path, mapping: Mapping) -> Result<StateVector> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let pairs: Vec<[f64; 2]> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let amps = pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect();
    StateVector::from_occupation_amplitudes(amps, mapping)
        .with_context(|| format!("state in {}", path.display()))
}

fn estimate(
    ham: &Hamiltonian,
    mapping: Mapping,
    spec: &str,
    shots: u64,
    seed: u64,
) -> Result<bool> {
    let n = ham.n_orbitals();
    let state = parse_state(spec, n, mapping)?;
    let schedule = Schedule::build(n, mapping)?;
    let report = if shots == 0 {
        estimate_all(&state, &schedule, Some(ham))?
    } else {
        estimate_sampled(&state, &schedule, Some(ham), shots, seed)?
    };
    println!("n_orbitals: {n}");
    println!("mapping: {mapping}");
    println!("state: {spec}");
    println!("shots: {shots}");
    println!("cliques: {}", schedule.entries.len());
    println!("terms: {}", report.terms.len());
    println!("constant: {}", ham.e_nuc());
    for f in Family::ALL {
        let e = report.family_energy.get(&f).copied().unwrap_or(0.0);
        println!("energy.{}: {e}", f.name());
    }
    println!("energy: {}", report.energy.expect("hamiltonian given"));
    if let Some(se) = report.energy_stderr {
        println!("energy_stderr: {se}");
    }
    Ok(true)
}

struct Checks {
    failed: usize,
}

impl Checks {
    fn record(&mut self, name: &str, ok: bool, detail: impl AsRef<str>) {
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", detail.as_ref());
    }
}

fn verify(n: usize, mapping: Mapping, file: Option<&Path>, seed: u64) -> Result<bool> {
    let mut checks = Checks { failed: 0 };
    let universe = Universe::build(n)?;
    let prime = universe.prime();
    println!("n_orbitals: {n}");
    println!("prime: {}", prime.get());
    println!("lower_bound: {}", lower_bound(n));

    let total = universe.cliques().len();
    if prime.get() as usize == n - 1 {
        checks.record(
            "clique_count",
            total == closed_form_clique_count(n),
            format!(
                "{total} cliques, 2N²-2N+1 = {}",
                closed_form_clique_count(n)
            ),
        );
    } else {
        println!("INFO clique_count: {total} cliques (N-1 is not prime)");
    }

    let report = verify_cover(&build_graph(n), universe.pair_cliques());
    checks.record(
        "edge_cover",
        report.is_valid(),
        format!(
            "{} cliques, {} edges, {} non-cliques, {} uncovered",
            report.cliques,
            report.edges,
            report.non_cliques.len(),
            report.uncovered.len()
        ),
    );
    checks.record(
        "no_three_collinear",
        check_no_three_collinear(prime),
        format!("order {}", prime.get()),
    );
    checks.record(
        "unique_tangent",
        check_unique_tangent(prime),
        format!("order {}", prime.get()),
    );

    let bad = universe
        .cliques()
        .iter()
        .find_map(|c| c.commutation_violation().map(|v| (c.id, v)));
    checks.record(
        "commutation",
        bad.is_none(),
        match bad {
            Some((id, (a, b))) => format!("clique {id}: {a} and {b}"),
            None => "all cliques commute".into(),
        },
    );
    match universe.routing() {
        Ok(r) => checks.record("coverage", true, format!("{} terms routed", r.len())),
        Err(e) => checks.record("coverage", false, e.to_string()),
    }

    let schedule = match Schedule::from_universe(&universe, mapping) {
        Ok(s) => {
            checks.record(
                "circuits",
                true,
                format!("{} circuits diagonalize their cliques", s.entries.len()),
            );
            s
        }
        Err(e) => {
            checks.record("circuits", false, e.to_string());
            return Ok(false);
        }
    };
    let problems = schedule.problems();
    checks.record(
        "structure",
        problems.is_empty(),
        problems.first().cloned().unwrap_or("ok".into()),
    );

    let mut swap_issue = None;
    for e in &schedule.entries {
        for spin in Spin::BOTH {
            let ops: Vec<_> = e.clique.ops_for(spin).collect();
            let net = &e.circuit.networks[spin.index()];
            if net.depth() > n || !is_sorted_layout(&ops, net) {
                swap_issue.get_or_insert(format!("clique {} spin {spin}", e.clique.id));
            }
        }
    }
    checks.record(
        "swap_networks",
        swap_issue.is_none(),
        swap_issue.unwrap_or(format!("depth <= {n} and sorted layout")),
    );

    if let Some(path) = file {
        file_checks(&mut checks, path, &schedule)?;
    }

    if 2 * n <= 12 {
        let state = random_state(n, mapping, seed)?;
        let rep = estimate_all(&state, &schedule, None)?;
        let mut worst = (0.0f64, None);
        for term in classify_terms(n) {
            let want = term_expectation(&state, &term, mapping, n);
            let got = rep.terms[&term];
            let d = (got - want.re).abs().max(want.im.abs());
            if d > worst.0 {
                worst = (d, Some(term));
            }
        }
        let detail = match worst.1 {
            Some(t) => format!("max deviation {:.2e} at {t}", worst.0),
            None => "exact".into(),
        };
        checks.record("decode_consistency", worst.0 <= 1e-10, detail);
    } else {
        println!("INFO decode_consistency: skipped above {} qubits", 12);
    }

    let ok = checks.failed == 0;
    if ok {
        println!("verify: PASS");
    } else {
        println!("verify: FAIL ({} checks failed)", checks.failed);
    }
    Ok(ok)
}

fn file_checks(checks: &mut Checks, path: &Path, fresh: &Schedule) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let loaded = match Schedule::from_json_str(&text) {
        Ok(s) => s,
        Err(e) => {
            checks.record("schedule_file", false, format!("{}: {e}", path.display()));
            return Ok(());
        }
    };
    let problems = loaded.problems();
    checks.record(
        "schedule_file_structure",
        problems.is_empty(),
        match problems.first() {
            Some(p) => format!("{}: {p}", path.display()),
            None => "ok".into(),
        },
    );
    let detail = if loaded.n_orbitals != fresh.n_orbitals || loaded.mapping != fresh.mapping {
        Some(format!(
            "file is for N={} {}, expected N={} {}",
            loaded.n_orbitals, loaded.mapping, fresh.n_orbitals, fresh.mapping
        ))
    } else if loaded.entries.len() != fresh.entries.len() {
        Some(format!(
            "{} cliques in file, {} expected",
            loaded.entries.len(),
            fresh.entries.len()
        ))
    } else {
        loaded
            .entries
            .iter()
            .zip(&fresh.entries)
            .position(|(a, b)| a != b)
            .map(|i| format!("clique {i} differs from a fresh build"))
    };
    checks.record(
        "schedule_file_matches",
        detail.is_none(),
        detail.unwrap_or("identical".into()),
    );
    Ok(())
}
