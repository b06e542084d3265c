//! Acceptance suite. Each check prints one `PASS`/`FAIL` line.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use measched::circuits::{emit, Mapping};
use measched::cover::{
    build_cover, build_cover_for, check_no_three_collinear, check_unique_tangent, place_s_points,
    Vertex,
};
use measched::gf::{smallest_prime_at_least, Prime};
use measched::graphcheck::{
    brute_force_cover, build_graph, lower_bound, verify_cover, BRUTE_FORCE_MAX_N,
};
use measched::matrix::{Matrix, C64};
use measched::plane::Point;
use measched::roundrobin::build_rounds;
use measched::sim::{
    apply_circuit, estimate_all, hamiltonian_matrix, operator_matrix, random_state, StateVector,
};
use measched::swapnet::{build_network, is_sorted_layout};
use measched::universe::{closed_form_clique_count, Family, Spin};
use measched::{Hamiltonian, Schedule, Universe};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(name: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn clique_count_check(n: usize) -> bool {
    let (u, dt) = timed(|| Universe::build(n).unwrap());
    let m = n - 1;
    let want = [1, 2 * m, m * m, m * m];
    let got = [
        Family::Part,
        Family::OneBody,
        Family::DiffSpin,
        Family::SameSpin,
    ]
    .map(|f| u.family_count(f));
    let total = u.cliques().len();
    let ok = total == 2 * n * n - 2 * n + 1
        && total == closed_form_clique_count(n)
        && got == want
        && dt < Duration::from_secs(1);
    report(
        &format!("clique_count[N={n}]"),
        ok,
        format!("total {total} families {got:?} expected {want:?} in {dt:?}"),
    )
}

#[test]
fn clique_counts() {
    let results: Vec<bool> = [4, 6, 8, 12, 14]
        .into_iter()
        .map(clique_count_check)
        .collect();
    assert!(results.iter().all(|&b| b));
}

// Odd N uses N round-robin rounds per spin, so the one-body family is 2N
// rather than 2(N-1) and this case does not close.
#[test]
fn clique_count_odd_three() {
    assert!(clique_count_check(3));
}

#[test]
fn golden_plane_clique() {
    let (cover, dt) = timed(|| build_cover(Prime::new(5).unwrap()));
    let s = place_s_points(Prime::new(5).unwrap());
    let want_s = vec![
        Point::gamma(0, 0),
        Point::gamma(1, 1),
        Point::gamma(2, 4),
        Point::gamma(3, 4),
        Point::gamma(4, 1),
        Point::Alpha,
    ];
    let c = cover.iter().find(|c| c.anchor == Point::gamma(4, 3));
    let members = c.map(|c| c.members.clone()).unwrap_or_default();
    let want = vec![Vertex::new(0, 2), Vertex::new(1, 3), Vertex::new(4, 5)];
    let a = report(
        "golden_clique[P_gamma(4,3)]",
        members == want,
        format!("{members:?} in {dt:?}"),
    );
    let b = report("golden_s_placement", s == want_s, format!("{s:?}"));
    let c = report(
        "golden_time",
        dt < Duration::from_secs(1),
        format!("{dt:?}"),
    );
    assert!(a && b && c);
}

#[test]
fn cover_validity() {
    let mut all = true;
    for n in [3usize, 4, 6, 8] {
        let ((cover, report_), dt) = timed(|| {
            let pi = smallest_prime_at_least(n as u64 - 1).unwrap();
            let (cover, _) = build_cover_for(n, pi);
            let rep = verify_cover(&build_graph(n), &cover);
            (cover, rep)
        });
        let ok = report_.is_valid() && dt < Duration::from_secs(10);
        all &= report(
            &format!("cover_valid[N={n}]"),
            ok,
            format!(
                "{} cliques, {} edges, {} non-cliques, {} uncovered in {dt:?}",
                cover.len(),
                report_.edges,
                report_.non_cliques.len(),
                report_.uncovered.len()
            ),
        );
    }
    assert!(all);
}

#[test]
fn optimality_sandwich() {
    let mut all = true;
    let mut prev_ratio = f64::INFINITY;
    for n in [4usize, 6, 8, 12, 14] {
        let lb = lower_bound(n);
        let pi = smallest_prime_at_least(n as u64 - 1).unwrap();
        let (cover, _) = build_cover_for(n, pi);
        let construction = cover.len();
        let mut ok = lb <= construction && construction == (n - 1) * (n - 1);
        let mut detail = format!("lower {lb} construction {construction}");
        if n <= BRUTE_FORCE_MAX_N {
            let g = build_graph(n).v2_subgraph();
            let greedy = brute_force_cover(&g).unwrap().len();
            ok &= lb <= greedy && greedy <= construction;
            detail.push_str(&format!(" greedy {greedy}"));
        }
        let ratio = construction as f64 / lb as f64;
        ok &= ratio < prev_ratio && ratio > 1.0;
        detail.push_str(&format!(" ratio {ratio:.4}"));
        prev_ratio = ratio;
        all &= report(&format!("sandwich[N={n}]"), ok, detail);
    }
    assert!(all);
}

#[test]
fn conic_lemmas() {
    let (res, dt) = timed(|| {
        (2u32..=47)
            .filter_map(|p| Prime::new(p).ok())
            .map(|p| {
                (
                    p.get(),
                    check_no_three_collinear(p),
                    check_unique_tangent(p),
                )
            })
            .collect::<Vec<_>>()
    });
    let bad: Vec<u32> = res.iter().filter(|r| !(r.1 && r.2)).map(|r| r.0).collect();
    let ok = bad.is_empty() && dt < Duration::from_secs(5);
    assert!(report(
        "conic_lemmas[primes<=47]",
        ok,
        format!("{} primes checked, failures {bad:?} in {dt:?}", res.len())
    ));
}

#[test]
fn round_robin_partition() {
    let mut all = true;
    for n in 2usize..=16 {
        let rounds = build_rounds(n).unwrap();
        let mut seen = BTreeSet::new();
        let mut disjoint = true;
        for r in &rounds {
            let mut used = BTreeSet::new();
            for &(p, q) in &r.pairs {
                disjoint &= p < q && q < n && used.insert(p) && used.insert(q);
                disjoint &= seen.insert((p, q));
            }
        }
        let want_rounds = if n % 2 == 0 { n - 1 } else { n };
        let ok = disjoint && seen.len() == n * (n - 1) / 2 && rounds.len() == want_rounds;
        all &= report(
            &format!("round_robin[n={n}]"),
            ok,
            format!("{} rounds, {} pairs", rounds.len(), seen.len()),
        );
    }
    assert!(all);
}

#[test]
fn swap_network_bound() {
    let mut all = true;
    for n in [3usize, 4, 6, 8] {
        let u = Universe::build(n).unwrap();
        let mut max_depth = 0;
        let mut ok = true;
        for c in u.cliques() {
            for spin in [Spin::Up, Spin::Down] {
                let ops: Vec<_> = c.ops_for(spin).collect();
                let net = build_network(&ops, n).unwrap();
                max_depth = max_depth.max(net.depth());
                // replay the layers on mode labels
                let mut at: Vec<usize> = (0..n).collect();
                for layer in &net.layers {
                    for &l in &layer.swaps {
                        at.swap(l, l + 1);
                    }
                }
                let perm_ok = at
                    .iter()
                    .enumerate()
                    .all(|(slot, &mode)| net.permutation[mode] == slot);
                ok &= net.depth() <= n && perm_ok && is_sorted_layout(&ops, &net);
            }
        }
        all &= report(
            &format!("swap_network[N={n}]"),
            ok,
            format!(
                "{} cliques, max depth {max_depth} (bound {n})",
                u.cliques().len()
            ),
        );
    }
    assert!(all);
}

fn circuit_unitary(n_qubits: usize, circ: &measched::MeasCircuit) -> Matrix {
    let dim = 1 << n_qubits;
    let mut u = Matrix::zeros(dim);
    for j in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[j] = C64::new(1.0, 0.0);
        let out = apply_circuit(&StateVector::new(amps).unwrap(), circ).unwrap();
        for (i, a) in out.amplitudes().iter().enumerate() {
            u[(i, j)] = *a;
        }
    }
    u
}

#[test]
fn diagonalization_tripwire() {
    let mut all = true;
    for n in [2usize, 3] {
        let u = Universe::build(n).unwrap();
        for mapping in Mapping::ALL {
            let mut worst = 0.0f64;
            let mut checked = 0;
            for c in u.cliques() {
                let circ = emit(c, mapping, n).unwrap();
                let unitary = circuit_unitary(2 * n, &circ);
                for op in &c.ops {
                    let o = operator_matrix(*op, mapping, n).unwrap();
                    let d = unitary.mul(&o).mul(&unitary.adjoint());
                    worst = worst.max(d.max_abs_offdiag());
                    checked += 1;
                }
            }
            all &= report(
                &format!("diagonalization[N={n},{mapping}]"),
                worst < 1e-12,
                format!("{checked} ops, max off-diagonal {worst:.2e}"),
            );
        }
    }
    assert!(all);
}

#[test]
fn end_to_end_energy() {
    let start = Instant::now();
    let mut all = true;
    for n in [2usize, 3] {
        for mapping in Mapping::ALL {
            let sched = Schedule::build(n, mapping).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let ham = Hamiltonian::random(n, &mut rng);
                let h = hamiltonian_matrix(&ham, mapping).unwrap();
                for s in 0..20u64 {
                    let st = random_state(n, mapping, s).unwrap();
                    let dense = h.expectation(st.amplitudes()).re;
                    let est = estimate_all(&st, &sched, Some(&ham))
                        .unwrap()
                        .energy
                        .unwrap();
                    worst = worst.max((est - dense).abs());
                }
            }
            all &= report(
                &format!("energy[N={n},{mapping}]"),
                worst < 1e-9,
                format!("100 cases, max deviation {worst:.2e}"),
            );
        }
    }
    let dt = start.elapsed();
    all &= report(
        "energy_time",
        dt < Duration::from_secs(60),
        format!("{dt:?}"),
    );
    assert!(all);
}

#[test]
fn gate_count_scaling() {
    let mut all = true;
    for n in [3usize, 4, 6, 8] {
        let sched = Schedule::build(n, Mapping::Jw).unwrap();
        let depth = sched.entries.iter().map(|e| e.circuit.depth).max().unwrap();
        let gates = sched
            .entries
            .iter()
            .map(|e| e.circuit.gates.len())
            .max()
            .unwrap();
        let ok = depth <= 2 * n + 6 && gates <= 3 * n * n;
        all &= report(
            &format!("gate_scaling[N={n}]"),
            ok,
            format!(
                "max depth {depth} (budget {}), max gates {gates} (budget {})",
                2 * n + 6,
                3 * n * n
            ),
        );
    }
    assert!(all);
}
