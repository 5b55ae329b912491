//! Min-cost assignment on exact integer costs.
//!
//! Costs are `Option<i128>` with `None` meaning a forbidden (infinite) edge.
//! The solver is the shortest-augmenting-path form of the Hungarian method
//! and returns dual potentials alongside the optimal permutation.

/// Square cost matrix in row-major order.
#[derive(Clone, Debug)]
pub struct CostMatrix {
    n: usize,
    cost: Vec<Option<i128>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub total: i128,
    /// `perm[i]` is the column assigned to row `i`.
    pub perm: Vec<usize>,
    /// Duals with `row_dual[i] + col_dual[j] <= cost(i, j)` for every finite edge
    /// and equality on the assignment.
    pub row_dual: Vec<i128>,
    pub col_dual: Vec<i128>,
}

impl CostMatrix {
    pub fn new(n: usize, cost: Vec<Option<i128>>) -> Self {
        assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
        CostMatrix { n, cost }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<i128> {
        self.cost[i * self.n + j]
    }

    /// Optimal assignment, or `None` when every permutation uses a forbidden edge.
    pub fn solve(&self) -> Option<Assignment> {
        self.solve_forbidding(None)
    }

    /// Optimal value with one extra edge forbidden.
    pub fn solve_forbidding(&self, forbidden: Option<(usize, usize)>) -> Option<Assignment> {
        let n = self.n;
        if n == 0 {
            return Some(Assignment {
                total: 0,
                perm: Vec::new(),
                row_dual: Vec::new(),
                col_dual: Vec::new(),
            });
        }
        let max_abs = self
            .cost
            .iter()
            .flatten()
            .map(|c| c.abs())
            .max()
            .unwrap_or(0);
        // Any permutation through a `big` edge costs more than every finite permutation.
        let big = (max_abs + 1) * (2 * n as i128 + 1);
        let at = |i: usize, j: usize| -> i128 {
            if forbidden == Some((i, j)) {
                return big;
            }
            self.cost[i * n + j].unwrap_or(big)
        };

        // 1-based arrays; index 0 is the virtual column.
        let inf = i128::MAX / 4;
        let mut u = vec![0i128; n + 1];
        let mut v = vec![0i128; n + 1];
        let mut p = vec![0usize; n + 1];
        let mut way = vec![0usize; n + 1];
        for i in 1..=n {
            p[0] = i;
            let mut j0 = 0usize;
            let mut minv = vec![inf; n + 1];
            let mut used = vec![false; n + 1];
            loop {
                used[j0] = true;
                let i0 = p[j0];
                let mut delta = inf;
                let mut j1 = 0usize;
                for j in 1..=n {
                    if !used[j] {
                        let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                        if cur < minv[j] {
                            minv[j] = cur;
                            way[j] = j0;
                        }
                        if minv[j] < delta {
                            delta = minv[j];
                            j1 = j;
                        }
                    }
                }
                for j in 0..=n {
                    if used[j] {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
                if p[j0] == 0 {
                    break;
                }
            }
            loop {
                let j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
                if j0 == 0 {
                    break;
                }
            }
        }

        let mut perm = vec![0usize; n];
        for j in 1..=n {
            perm[p[j] - 1] = j - 1;
        }
        let mut total = 0i128;
        for (i, &j) in perm.iter().enumerate() {
            if forbidden == Some((i, j)) {
                return None;
            }
            total += self.cost[i * n + j]?;
        }
        Some(Assignment {
            total,
            perm,
            row_dual: u[1..].to_vec(),
            col_dual: v[1..].to_vec(),
        })
    }

    /// Whether `assignment` is the only permutation attaining its total.
    ///
    /// The optimal permutations are the perfect matchings on tight edges, where
    /// `row_dual + col_dual == cost`. The optimum is unique exactly when no
    /// cycle alternates between tight edges outside the assignment and
    /// assignment edges.
    pub fn is_unique_optimum(&self, assignment: &Assignment) -> bool {
        let n = self.n;
        let perm = &assignment.perm;
        let mut owner = vec![0usize; n];
        for (i, &j) in perm.iter().enumerate() {
            owner[j] = i;
        }
        let tight = |i: usize, j: usize| {
            j != perm[i]
                && self.cost[i * n + j]
                    == Some(assignment.row_dual[i] + assignment.col_dual[j])
        };
        // Row i points at the owner of every column it could swap into.
        // Iterative depth-first search; state 1 = on the stack, 2 = finished.
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some(top) = stack.last_mut() {
                let i = top.0;
                if let Some(j) = (top.1..n).find(|&j| tight(i, j)) {
                    top.1 = j + 1;
                    let k = owner[j];
                    match state[k] {
                        0 => {
                            state[k] = 1;
                            stack.push((k, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    state[i] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Uniqueness by re-solving once per assignment edge with that edge forbidden.
    #[cfg(test)]
    fn is_unique_by_resolving(&self, assignment: &Assignment) -> bool {
        assignment.perm.iter().enumerate().all(|(i, &j)| {
            match self.solve_forbidding(Some((i, j))) {
                Some(other) => other.total > assignment.total,
                None => true,
            }
        })
    }
}
