use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use measched::sim::{estimate_all, exact_energy, random_state};
use measched::{Hamiltonian, Mapping, Schedule};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_measched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .to_string()
}

fn write_hamiltonian(dir: &Path, n: usize, seed: u64) -> (Hamiltonian, String) {
    let ham = Hamiltonian::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
    let path = dir.join(format!("ham{n}_{seed}.json"));
    fs::write(&path, serde_json::to_string(&ham.to_json()).unwrap()).unwrap();
    (ham, path.to_str().unwrap().to_string())
}

#[test]
fn schedule_writes_file_with_expected_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&[
        "schedule",
        "--orbitals",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "cliques"), "61");
    assert_eq!(field(&text, "lower_bound"), "15");
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["cliques"].as_array().unwrap().len(), 61);
}

#[test]
fn stats_reports_families() {
    let o = run(&["stats", "--orbitals", "4", "--mapping", "parity"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(field(&text, "part"), "1");
    assert_eq!(field(&text, "one_body"), "6");
    assert_eq!(field(&text, "diff_spin"), "9");
    assert_eq!(field(&text, "same_spin"), "9");
    assert_eq!(field(&text, "mapping"), "parity");
}

#[test]
fn schedule_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(
        run(&["schedule", "--orbitals", "5", "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    let o = Command::new(env!("CARGO_BIN_EXE_measched"))
        .args(["schedule", "--orbitals", "5", "--out", b.to_str().unwrap()])
        .env("SCHED_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn bad_arguments_exit_two() {
    let o = run(&["stats", "--orbitals", "4", "--mapping", "bk"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["stats", "--orbitals", "1"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_measched"))
        .args(["stats", "--orbitals", "4"])
        .env("SCHED_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_for_generated_schedules() {
    for (n, lb) in [("6", "15"), ("8", "35")] {
        let o = run(&["verify", "--orbitals", n]);
        let text = stdout(&o);
        assert!(o.status.success(), "{text}");
        assert_eq!(field(&text, "lower_bound"), lb);
        assert!(text.contains("PASS clique_count"));
        assert!(!text.contains("FAIL"));
        assert!(text.ends_with("verify: PASS\n"));
    }
}

#[test]
fn verify_round_trips_a_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    assert!(run(&[
        "schedule",
        "--orbitals",
        "4",
        "--mapping",
        "parity",
        "--out",
        p
    ])
    .status
    .success());
    let o = run(&[
        "verify",
        "--orbitals",
        "4",
        "--mapping",
        "parity",
        "--schedule",
        p,
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS schedule_file_matches"));
}

#[test]
fn verify_flags_a_corrupted_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let p = path.to_str().unwrap();
    assert!(run(&["schedule", "--orbitals", "4", "--out", p])
        .status
        .success());
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["cliques"][3]["depth"] = Value::from(99);
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = run(&["verify", "--orbitals", "4", "--schedule", p]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL schedule_file"), "{text}");
    assert!(text.contains("clique 3"), "{text}");
    assert!(text.contains("verify: FAIL"));
}

#[test]
fn verify_rejects_unreadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(&path, "{").unwrap();
    let o = run(&[
        "verify",
        "--orbitals",
        "4",
        "--schedule",
        path.to_str().unwrap(),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn estimate_matches_direct_energy() {
    let dir = tempfile::tempdir().unwrap();
    let (ham, path) = write_hamiltonian(dir.path(), 3, 11);
    for mapping in Mapping::ALL {
        let o = run(&[
            "estimate",
            "--hamiltonian",
            &path,
            "--mapping",
            mapping.name(),
            "--state",
            "random:4",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let got: f64 = field(&stdout(&o), "energy").parse().unwrap();
        let st = random_state(3, mapping, 4).unwrap();
        let want = exact_energy(&st, &ham, mapping);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        let sched = Schedule::build(3, mapping).unwrap();
        let rep = estimate_all(&st, &sched, Some(&ham)).unwrap();
        assert!((got - rep.energy.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn estimate_basis_and_amplitude_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = write_hamiltonian(dir.path(), 2, 3);
    let a = run(&["estimate", "--hamiltonian", &path, "--state", "basis:1010"]);
    assert!(a.status.success());
    // occupation index with modes 0 and 2 filled
    let mut amps = vec![[0.0, 0.0]; 16];
    amps[0b0101] = [1.0, 0.0];
    let amp_path = dir.path().join("amps.json");
    fs::write(&amp_path, serde_json::to_string(&amps).unwrap()).unwrap();
    let file_state = format!("file:{}", amp_path.display());
    for mapping in ["jw", "parity"] {
        let b = run(&[
            "estimate",
            "--hamiltonian",
            &path,
            "--mapping",
            mapping,
            "--state",
            &file_state,
        ]);
        assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
        let ea: f64 = field(&stdout(&a), "energy").parse().unwrap();
        let eb: f64 = field(&stdout(&b), "energy").parse().unwrap();
        assert!((ea - eb).abs() < 1e-12);
    }
}

#[test]
fn sampled_estimates_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = write_hamiltonian(dir.path(), 2, 5);
    let args = [
        "estimate",
        "--hamiltonian",
        &path,
        "--shots",
        "2000",
        "--seed",
        "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(field(&stdout(&a), "energy_stderr").parse::<f64>().unwrap() > 0.0);
    let c = run(&[
        "estimate",
        "--hamiltonian",
        &path,
        "--shots",
        "2000",
        "--seed",
        "10",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn estimate_rejects_oversized_and_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = write_hamiltonian(dir.path(), 8, 1);
    let o = run(&["estimate", "--hamiltonian", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
    let (_, small) = write_hamiltonian(dir.path(), 2, 1);
    let o = run(&["estimate", "--hamiltonian", &small, "--orbitals", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
