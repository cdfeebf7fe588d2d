//! Generate seeded synthetic datasets in the two ingestion formats.
//!
//! ```text
//! cargo run --release -p coldstart --example gen_dataset -- dense  data/dense.csv  [seed]
//! cargo run --release -p coldstart --example gen_dataset -- sparse data/sparse.csv [seed]
//! ```
//!
//! `dense` writes a Jester-shaped comma-separated file for `dataset = jester`;
//! `sparse` writes a BookCrossing-native semicolon file for
//! `dataset = bookcrossing`.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use coldstart::synth::{
    dense_matrix, sparse_matrix, write_bookcrossing_csv, write_jester_csv, DenseConfig,
    SparseConfig,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (kind, path, seed) = match args.as_slice() {
        [kind, path] => (kind.as_str(), PathBuf::from(path), None),
        [kind, path, seed] => (
            kind.as_str(),
            PathBuf::from(path),
            Some(seed.parse::<u64>().expect("seed must be an integer")),
        ),
        _ => {
            eprintln!("usage: gen_dataset <dense|sparse> <output.csv> [seed]");
            std::process::exit(1);
        }
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).expect("create output directory");
    }
    let file = File::create(&path).expect("create output file");
    let mut out = BufWriter::new(file);

    match kind {
        "dense" => {
            let mut cfg = DenseConfig::default();
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let m = dense_matrix(&cfg);
            write_jester_csv(&m, &mut out).expect("write csv");
            println!(
                "wrote {} ({} users, {} items, {} ratings, scale -10..10)",
                path.display(),
                m.n_users(),
                m.n_items(),
                m.n_entries()
            );
        }
        "sparse" => {
            let mut cfg = SparseConfig::default();
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let m = sparse_matrix(&cfg);
            write_bookcrossing_csv(&m, &mut out).expect("write csv");
            println!(
                "wrote {} ({} users, {} items, {} ratings, scale 1..10)",
                path.display(),
                m.n_users(),
                m.n_items(),
                m.n_entries()
            );
        }
        other => {
            eprintln!("unknown dataset kind {other:?} (expected dense or sparse)");
            std::process::exit(1);
        }
    }
}
