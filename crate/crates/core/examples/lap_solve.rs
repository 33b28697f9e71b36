//! Solves a small assignment problem and checks it against enumeration.

use dimred_t2ta::{solve_lap, AssignmentMatrix, MatrixKind};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn main() -> dimred_t2ta::Result<()> {
    // rows: agent-1 tracks, columns: agent-2 tracks
    let costs = vec![
        vec![4.0, 1.0, 3.0, 2.5],
        vec![2.0, 0.5, 5.0, 1.0],
        vec![3.0, 2.0, 2.0, 4.0],
        vec![1.5, 3.0, 4.5, 0.5],
    ];
    let a = AssignmentMatrix::from_rows(&costs, MatrixKind::Full)?;
    let sol = solve_lap(&a)?;
    for (j, i) in sol.perm.iter().enumerate() {
        println!("agent-2 track {} -> agent-1 track {}", j + 1, i + 1);
    }
    println!("cost {}", sol.cost);

    let best = permutations(a.size())
        .into_iter()
        .map(|p| a.cost_of(&p))
        .fold(f64::INFINITY, f64::min);
    println!("enumeration minimum {best}");
    Ok(())
}
