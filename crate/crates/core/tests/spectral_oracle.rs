use geocomb::spectral::{a_infinity, classify, perron_data, spectral_radius, TransitionMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tm(rows: &[Vec<u64>]) -> TransitionMatrix {
    TransitionMatrix::from_rows(rows).unwrap()
}

fn random_strongly_connected(rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let n = rng.random_range(1..=12usize);
    let mut rows = vec![vec![0u64; n]; n];
    for i in 0..n {
        rows[i][(i + 1) % n] += 1;
    }
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            if rng.random_bool(0.25) {
                *x += rng.random_range(1..=3);
            }
        }
    }
    rows
}

/// Largest eigenvalue modulus from a dense complex eigensolver.
fn eigen_radius(rows: &[Vec<u64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j] as f64);
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Wielandt: a nonnegative n x n matrix is primitive iff its boolean power
/// `(n-1)^2 + 1` is positive.
fn wielandt_primitive(rows: &[Vec<u64>]) -> bool {
    let n = rows.len();
    let b: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = b.clone();
    for _ in 1..((n - 1) * (n - 1) + 1) {
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if p[i][k] {
                    for j in 0..n {
                        next[i][j] |= b[k][j];
                    }
                }
            }
        }
        p = next;
    }
    p.iter().all(|r| r.iter().all(|&x| x))
}

#[test]
fn radius_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let rows = random_strongly_connected(&mut rng);
        let got = spectral_radius(&tm(&rows));
        let oracle = eigen_radius(&rows);
        assert!((got - oracle).abs() <= 1e-8 * oracle.max(1.0), "{rows:?}: {got} vs {oracle}");
    }
}

#[test]
fn primitivity_matches_wielandt() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 2];
    for _ in 0..200 {
        let n = rng.random_range(1..=7usize);
        let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.random_bool(0.3) as u64).collect()).collect();
        let expected = wielandt_primitive(&rows);
        seen[expected as usize] += 1;
        assert_eq!(classify(&tm(&rows)).primitive, expected, "{rows:?}");
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

#[test]
fn a_infinity_is_the_limit_of_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let rows = random_strongly_connected(&mut rng);
        let a = tm(&rows);
        let d = perron_data(&a).unwrap();
        let p = d.p_star();
        let inf = a_infinity(&a, p).unwrap();
        // A_inf is a projector commuting with A^p / lambda^p
        let scaled = DMatrix::from_fn(a.size(), a.size(), |i, j| rows[i][j] as f64) / d.lambda;
        let mut step = DMatrix::<f64>::identity(a.size(), a.size());
        for _ in 0..p {
            step = &step * &scaled;
        }
        assert!((&inf * &inf - &inf).amax() < 1e-8);
        assert!((&step * &inf - &inf).amax() < 1e-8);
        assert!((&inf * &step - &inf).amax() < 1e-8);
    }
}

#[test]
fn asymmetric_counts_follow_p_i_q_j() {
    // lambda = 2, p = (1, 1), q proportional to (2, 1)
    let a = tm(&[vec![1, 1], vec![2, 0]]);
    let d = perron_data(&a).unwrap();
    let c = d.growth.value().unwrap();
    let mut pow = DMatrix::<f64>::identity(2, 2);
    let am = a.to_real();
    for _ in 0..60 {
        pow = &pow * &am;
    }
    let total: f64 = pow.iter().sum();
    for i in 0..2 {
        for j in 0..2 {
            let ratio = pow[(i, j)] / total;
            assert!((ratio - d.p[i] * d.q[j] / c).abs() < 1e-12, "({i},{j})");
        }
    }
    // the transposed product differs off the diagonal
    assert!((d.q[0] * d.p[1] - d.p[0] * d.q[1]).abs() > 0.1);
}

proptest! {
    #[test]
    fn eigenvector_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = random_strongly_connected(&mut rng);
        let a = tm(&rows);
        let d = perron_data(&a).unwrap();
        let n = a.size();
        for i in 0..n {
            let ap: f64 = (0..n).map(|j| a.get(i, j) as f64 * d.p[j]).sum();
            let qa: f64 = (0..n).map(|j| d.q[j] * a.get(j, i) as f64).sum();
            prop_assert!((ap - d.lambda * d.p[i]).abs() <= 1e-10 * d.lambda * 10.0);
            prop_assert!((qa - d.lambda * d.q[i]).abs() <= 1e-9);
            prop_assert!(d.p[i] > 0.0 && d.q[i] > 0.0);
        }
        let s: f64 = d.pi.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }
}
