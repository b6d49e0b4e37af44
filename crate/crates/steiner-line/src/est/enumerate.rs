//! Enumeration of full Steiner topologies by repeated edge insertion.
//!
//! A full topology on `n` terminals has `n - 2` Steiner nodes, every terminal
//! of degree 1 and every Steiner node of degree 3. Starting from the single
//! edge on two terminals, inserting terminal `t` together with a fresh
//! Steiner node into any existing edge yields each full topology on `t + 1`
//! terminals exactly once, so the count is the double factorial
//! 1 * 3 * 5 * ... * (2n - 5).

use super::Topology;

/// Iterator over all full topologies on `n` terminals. Lazily rebuilds each
/// topology from an odometer of edge choices, so memory stays constant.
pub struct FullTopologies {
    n: usize,
    counters: Vec<usize>,
    done: bool,
}

/// All full Steiner topologies on `n` terminals (empty for `n < 2`).
pub fn enumerate_full_topologies(n: usize) -> FullTopologies {
    FullTopologies {
        n,
        counters: vec![0; n.saturating_sub(2)],
        done: n < 2,
    }
}

/// Number of full topologies on `n` terminals.
pub fn full_topology_count(n: usize) -> u64 {
    if n < 2 {
        return 0;
    }
    let mut count = 1u64;
    for t in 2..n {
        count *= (2 * t - 3) as u64;
    }
    count
}

impl Iterator for FullTopologies {
    type Item = Topology;

    fn next(&mut self) -> Option<Topology> {
        if self.done {
            return None;
        }
        let n = self.n;
        let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
        for (j, &choice) in self.counters.iter().enumerate() {
            let terminal = j + 2;
            let steiner = n + j;
            let (u, v) = edges[choice];
            edges[choice] = (u, steiner);
            edges.push((v, steiner));
            edges.push((terminal, steiner));
        }
        // Advance the odometer: choice j ranges over the 2*(j + 2) - 3 edges
        // present when terminal j + 2 is inserted.
        let mut advanced = false;
        for j in (0..self.counters.len()).rev() {
            let limit = 2 * (j + 2) - 3;
            if self.counters[j] + 1 < limit {
                self.counters[j] += 1;
                for c in self.counters[j + 1..].iter_mut() {
                    *c = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(Topology::new(n, n.saturating_sub(2), edges).expect("insertion preserves validity"))
    }
}
