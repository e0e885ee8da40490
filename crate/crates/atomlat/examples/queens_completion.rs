//! Queens completion on a small board: runs the epoch protocol, prints the
//! board after each epoch and basic diagnostics about the solution constant.

use atomlat::algebra::AlgebraState;
use atomlat::problems::queens::{self, BoardSpec, QueensWorld, Square};
use atomlat::trainer::{self, QueensSchedule};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let size: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let blocked_arg = args.get(2).cloned().unwrap_or_else(|| "a1".to_string());
    let epochs: u32 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(8);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(3);

    let blocked: Vec<Square> = blocked_arg
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| Square::parse(s, size).unwrap())
        .collect();
    let spec = BoardSpec { size, blocked };
    let mut state = AlgebraState::new(seed);
    let world = QueensWorld::register(&mut state, size).unwrap();

    let schedule = QueensSchedule::with_idle_every(8);
    let reports = trainer::queens_protocol(
        &mut state,
        &world,
        &spec,
        &schedule,
        epochs,
        None,
        true,
    )
    .unwrap();

    for report in &reports {
        println!("epoch {} ({:?})", report.epoch + 1, report.kind);
        print!("{}", queens::render_board(&report.board));
        println!();
    }

    // Diagnostics on the live state after the last epoch.
    for q in &spec.blocked {
        let holds = state
            .leq(world.queen_at(*q).into(), world.solution.into())
            .unwrap();
        println!("state leq(Q_{}, S) = {holds}", q.name());
    }
    let s_atoms = state
        .master_atoms(world.solution.into())
        .unwrap();
    println!(
        "S holds {} atoms; total live atoms {}",
        s_atoms.len(),
        state.live_atom_set().len()
    );
    if let Some(report) = reports.last() {
        let complete = report.complete;
        println!("complete: {complete}");
    }
}
