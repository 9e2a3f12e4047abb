//! Plays a seeded game by following hints, then undoes and replays a move.
//!
//! cargo run --example play_session -- [diagram] [k] [seed]

use region_select::algebra::Modulus;
use region_select::catalog::Catalog;
use region_select::engine::{new_session, Hint, SessionSource};
use region_select::game::GameConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "6_2".into());
    let k: Modulus = args.next().map_or(Modulus::Finite(4), |s| s.parse().expect("k is an integer or inf"));
    let seed: u64 = args.next().map_or(2024, |s| s.parse().expect("seed is an integer"));
    let shadow = Catalog::builtin().get(&name).unwrap_or_else(|| panic!("no diagram {name}")).clone();
    let mut session = new_session("example", shadow, GameConfig::new(k), SessionSource::Seed(seed)).expect("playable diagram");
    println!("start: {:?}", session.current().0.iter().map(ToString::to_string).collect::<Vec<_>>());

    while let Hint::Push { region, remaining } = session.hint().unwrap() {
        session.push(region, remaining.signum()).unwrap();
        println!(
            "push {region:>2} ({remaining:>3} left there): {:?}",
            session.current().0.iter().map(ToString::to_string).collect::<Vec<_>>()
        );
    }
    println!("solved in {} pushes", session.history().len());

    if let Some(last) = session.history().last().copied() {
        session.undo().unwrap();
        println!("after undo: {:?}", session.status());
        session.push(last.region, last.sign).unwrap();
        println!("after replaying region {}: {:?}", last.region, session.status());
    }
    println!("{}", serde_json::to_string(&session.state()).unwrap());
}
