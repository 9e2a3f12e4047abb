//! Runs the full theorem suite over the bundled corpus.
//!
//! cargo run --release --example verify_corpus -- [k-list] [budget]

use region_select::algebra::{Modulus, DEFAULT_BUDGET};
use region_select::verify::{run_suite, Corpus};

fn main() {
    let mut args = std::env::args().skip(1);
    let k_list: Vec<Modulus> = args
        .next()
        .unwrap_or_else(|| "2,3,4,5,6,inf".into())
        .split(',')
        .map(|k| k.trim().parse().expect("k is an integer >= 2 or inf"))
        .collect();
    let budget = args.next().map_or(DEFAULT_BUDGET, |b| b.parse().expect("budget is an integer"));
    let report = run_suite(&Corpus::builtin(), &k_list, budget);
    print!("{}", report.to_text());
    if !report.passed() {
        std::process::exit(1);
    }
}
