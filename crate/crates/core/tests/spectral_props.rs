use std::collections::BTreeMap;

use weyl_q::spectral::{lattice_shell_counts, make_flat_torus, make_round_sphere, validate};

fn brute_force_shells(n: usize, max: i64) -> BTreeMap<i64, u64> {
    let r = (max as f64).sqrt() as i64;
    let mut counts = BTreeMap::new();
    let mut k = vec![-r; n];
    loop {
        let norm: i64 = k.iter().map(|v| v * v).sum();
        if norm <= max {
            *counts.entry(norm).or_insert(0) += 1;
        }
        let mut i = 0;
        while i < n {
            k[i] += 1;
            if k[i] <= r {
                break;
            }
            k[i] = -r;
            i += 1;
        }
        if i == n {
            return counts;
        }
    }
}

#[test]
fn lattice_counts_match_enumeration() {
    for n in [4usize, 6] {
        let fast = lattice_shell_counts(n, 6);
        let slow = brute_force_shells(n, 6);
        for (norm, count) in fast.iter().enumerate() {
            assert_eq!(*count, slow.get(&(norm as i64)).copied().unwrap_or(0), "n={n} |k|²={norm}");
        }
    }
}

#[test]
fn torus_model_uses_lattice_counts() {
    let t = make_flat_torus(6, 6).unwrap();
    let slow = brute_force_shells(6, 6);
    for m in &t.scalar_modes {
        let k = m.kappa.to_integer().try_into().unwrap();
        assert_eq!(m.multiplicity, slow[&k]);
    }
}

#[test]
fn generated_models_validate() {
    for n in [4usize, 6, 8] {
        for max in 0..4 {
            assert!(validate(&make_flat_torus(n, max).unwrap()).is_empty());
            assert!(validate(&make_round_sphere(n, max).unwrap()).is_empty());
        }
    }
}
