//! Temporary diagnostic: monotonicity robustness of sweep orders.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn train_worst_increase(order_shuffled: bool, seed: u64) -> (f64, f64) {
    let a = [6.0f64, 5.0, -5.0, -6.0];
    let b = [5.0f64, 5.5, 6.0, 6.5];
    let k = 25;
    let iters = 100;
    let lr = 0.001;
    let n_users = 4;
    let n_items = 4;

    let mut samples: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            samples.push((u, i, a[u] * b[i]));
        }
    }
    let n = samples.len();
    let mu = samples.iter().map(|s| s.2).sum::<f64>() / n as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![vec![0.0f64; n_users]; k];
    for u in 0..n_users {
        for col in p.iter_mut() {
            col[u] = rng.random_range(0.05..0.15);
        }
    }
    let mut q = vec![vec![0.0f64; n_items]; k];
    for i in 0..n_items {
        for col in q.iter_mut() {
            col[i] = rng.random_range(0.05..0.15);
        }
    }
    if order_shuffled {
        for s in (1..samples.len()).rev() {
            let j = rng.random_range(0..=s);
            samples.swap(s, j);
        }
    }

    let mut other = vec![0.0f64; n];
    for (s, o) in samples.iter().zip(other.iter_mut()) {
        let mut t = mu;
        for f in 1..k {
            t += p[f][s.0] * q[f][s.1];
        }
        *o = t;
    }

    let mut worst = 0.0f64;
    let mut final_sse = 0.0;
    let mut prev: Option<f64> = None;
    for f in 0..k {
        let p_col = &mut p[f];
        let q_col = &mut q[f];
        for _ in 0..iters {
            for (s, o) in samples.iter().zip(other.iter()) {
                let pu = p_col[s.0];
                let qi = q_col[s.1];
                let err = s.2 - (o + pu * qi);
                p_col[s.0] = pu + lr * err * qi;
                q_col[s.1] = qi + lr * err * pu;
            }
            let sse: f64 = samples
                .iter()
                .zip(other.iter())
                .map(|(s, o)| {
                    let e = s.2 - (o + p_col[s.0] * q_col[s.1]);
                    e * e
                })
                .sum();
            if let Some(pv) = prev {
                if sse > pv {
                    worst = worst.max((sse - pv) / pv);
                }
            }
            prev = Some(sse);
            final_sse = sse;
        }
        if f + 1 < k {
            let (head, tail) = p.split_at(f + 1);
            let p_cur = &head[f];
            let p_next = &tail[0];
            let (qh, qt) = q.split_at(f + 1);
            let q_cur = &qh[f];
            let q_next = &qt[0];
            for (s, o) in samples.iter().zip(other.iter_mut()) {
                *o += p_cur[s.0] * q_cur[s.1] - p_next[s.0] * q_next[s.1];
            }
        }
    }
    (worst, (final_sse / n as f64).sqrt())
}

fn main() {
    for shuffled in [false, true] {
        let mut bad = 0;
        let mut worst_overall = 0.0f64;
        let mut worst_rmse = 0.0f64;
        for seed in 0..60u64 {
            let (worst, rmse) = train_worst_increase(shuffled, seed);
            if worst > 1e-9 {
                bad += 1;
            }
            worst_overall = worst_overall.max(worst);
            worst_rmse = worst_rmse.max(rmse);
        }
        println!(
            "{}: {}/60 seeds violate 1e-9, worst increase {:.3e}, worst train rmse {:.4}",
            if shuffled { "shuffled " } else { "row-major" },
            bad,
            worst_overall,
            worst_rmse
        );
    }
}
