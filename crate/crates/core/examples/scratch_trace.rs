//! Temporary diagnostic: locate monotonicity violations in the sweep trace.

use coldstart::data::{RatingMatrix, RatingScale};
use coldstart::predictors::{train_funk_svd_traced, FactorConfig};

fn main() {
    let a = [6.0, 5.0, -5.0, -6.0];
    let b = [5.0, 5.5, 6.0, 6.5];
    let scale = RatingScale::new(-40.0, 40.0).unwrap();
    let users: Vec<String> = (0..4).map(|u| format!("u{u}")).collect();
    let items: Vec<String> = (0..4).map(|i| format!("i{i}")).collect();
    let mut triples = Vec::new();
    for (u, &au) in a.iter().enumerate() {
        for (i, &bi) in b.iter().enumerate() {
            triples.push((users[u].as_str(), items[i].as_str(), au * bi));
        }
    }
    let m = RatingMatrix::from_triples(scale, &triples).unwrap();
    for seed in [1u64, 2, 3, 4, 5] {
        let (_, sweeps) = train_funk_svd_traced(&m, FactorConfig::default(), seed).unwrap();
        let mut worst = 0.0f64;
        let mut violations = 0;
        for (idx, w) in sweeps.windows(2).enumerate() {
            if w[1] > w[0] {
                let rel = (w[1] - w[0]) / w[0];
                if rel > 1e-9 {
                    violations += 1;
                    if rel > worst {
                        worst = rel;
                    }
                    if violations <= 5 {
                        println!(
                            "seed {seed}: sweep {} -> {} (feature {} iter {}): {} -> {} rel {:.3e}",
                            idx,
                            idx + 1,
                            (idx + 1) / 100,
                            (idx + 1) % 100,
                            w[0],
                            w[1],
                            rel
                        );
                    }
                }
            }
        }
        println!("seed {seed}: {violations} violations beyond 1e-9, worst {worst:.3e}");
    }
}
